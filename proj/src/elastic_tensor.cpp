#include "disloc/elastic_tensor.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace disloc {

std::string_view to_string(TensorMode mode) {
  switch (mode) {
    case TensorMode::isotropic:
      return "isotropic";
    case TensorMode::general:
      return "general";
    case TensorMode::toy:
      return "toy";
  }
  return "unknown";
}

ElasticTensor ElasticTensor::isotropic(double lambda, double mu) {
  if (!(mu > 0.0) || !(lambda + mu > 0.0)) {
    throw ConfigError("isotropic tensor requires mu > 0 and lambda + mu > 0");
  }
  ElasticTensor t;
  t.mode_ = TensorMode::isotropic;
  t.lambda_ = lambda;
  t.mu_ = mu;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const double dij = i == j, dkl = k == l, dik = i == k, djl = j == l, dil = i == l,
                       djk = j == k;
          t.c_[index(i, j, k, l)] = lambda * dij * dkl + mu * (dik * djl + dil * djk);
        }
  t.finalize();
  return t;
}

ElasticTensor ElasticTensor::general(const std::array<double, 16>& entries) {
  ElasticTensor t;
  t.mode_ = TensorMode::general;
  // minor symmetries: average over (i,j) and (k,l) swaps
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          t.c_[index(i, j, k, l)] = 0.25 * (entries[index(i, j, k, l)] + entries[index(j, i, k, l)] +
                                            entries[index(i, j, l, k)] + entries[index(j, i, l, k)]);
        }
  t.finalize();
  if (!(t.c1_ > 0.0)) throw ConfigError("general tensor is not coercive on symmetric matrices");
  return t;
}

ElasticTensor ElasticTensor::toy() {
  ElasticTensor t;
  t.mode_ = TensorMode::toy;
  // W(xi) = |xi|^2  <=>  C = 2 Id on the full matrix space
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t.c_[index(i, j, i, j)] = 2.0;
  t.finalize();
  return t;
}

void ElasticTensor::finalize() {
  double scale = 0.0;
  for (double v : c_) scale = std::max(scale, std::abs(v));
  major_symmetric_ = true;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          if (std::abs(c_[index(i, j, k, l)] - c_[index(k, l, i, j)]) > 1e-12 * std::max(1.0, scale))
            major_symmetric_ = false;

  if (mode_ == TensorMode::toy) return;

  // Quadratic form on the Frobenius-orthonormal basis of symmetric matrices.
  const double s = 1.0 / std::sqrt(2.0);
  const std::array<Matrix2, 3> basis = {(Matrix2() << 1, 0, 0, 0).finished(),
                                        (Matrix2() << 0, 0, 0, 1).finished(),
                                        (Matrix2() << 0, s, s, 0).finished()};
  Eigen::Matrix3d q;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double ab = (apply(basis[a]).cwiseProduct(basis[b])).sum();
      const double ba = (apply(basis[b]).cwiseProduct(basis[a])).sum();
      q(a, b) = 0.5 * (ab + ba);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(q);
  c1_ = es.eigenvalues()(0);
  c2_ = es.eigenvalues()(2);
}

Matrix2 ElasticTensor::apply(const Matrix2& xi) const {
  Matrix2 out = Matrix2::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double v = 0.0;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) v += c_[index(i, j, k, l)] * xi(k, l);
      out(i, j) = v;
    }
  return out;
}

double ElasticTensor::energy_density(const Matrix2& xi) const {
  if (mode_ == TensorMode::isotropic) {
    const Matrix2 e = sym(xi);
    const double tr = e.trace();
    return mu_ * e.squaredNorm() + 0.5 * lambda_ * tr * tr;
  }
  if (mode_ == TensorMode::toy) return xi.squaredNorm();
  return 0.5 * apply(xi).cwiseProduct(xi).sum();
}

std::pair<double, double> ElasticTensor::coercivity_constants() const {
  if (mode_ == TensorMode::toy)
    throw ConfigError("coercivity constants are undefined for the toy full-norm tensor");
  return {c1_, c2_};
}

ElasticTensor ElasticTensor::rotated(double angle) const {
  if (mode_ == TensorMode::isotropic || mode_ == TensorMode::toy) return *this;
  const double c = std::cos(angle), s = std::sin(angle);
  const double r[2][2] = {{c, -s}, {s, c}};
  std::array<double, 16> out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          double v = 0.0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              for (int cc = 0; cc < 2; ++cc)
                for (int d = 0; d < 2; ++d)
                  v += r[i][a] * r[j][b] * r[k][cc] * r[l][d] * c_[index(a, b, cc, d)];
          out[index(i, j, k, l)] = v;
        }
  return general(out);
}

}  // namespace disloc
