#include "disloc/p1_elasticity.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>

namespace disloc {

SymTensor::SymTensor(const ElasticTensor& t) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) c[i * 8 + j * 4 + k * 2 + l] = 0.5 * (t(i, j, k, l) + t(k, l, i, j));
}

Matrix2 SymTensor::apply(const Matrix2& m) const {
  Matrix2 out = Matrix2::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(i, j) += (*this)(i, j, k, l) * m(k, l);
  return out;
}

std::vector<Eigen::Triplet<double>> p1_stiffness(const TriMesh& mesh, const ElasticTensor& c) {
  const SymTensor cs(c);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.n_triangles() * 36);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& g = mesh.grads(static_cast<int>(t));
    const double area = mesh.area(static_cast<int>(t));
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 2; ++i)
          for (int k = 0; k < 2; ++k) {
            double v = 0.0;
            for (int j = 0; j < 2; ++j)
              for (int l = 0; l < 2; ++l) v += cs(i, j, k, l) * g[a][j] * g[b][l];
            trip.emplace_back(2 * tri[a] + i, 2 * tri[b] + k, area * v);
          }
  }
  return trip;
}

NeumannSolve p1_neumann_solve(const TriMesh& mesh, const ElasticTensor& c,
                              const std::vector<Eigen::Triplet<double>>& stiffness, Eigen::VectorXd f) {
  const std::size_t n = mesh.n_nodes();
  if (static_cast<std::size_t>(f.size()) != 2 * n) throw ConfigError("load vector size does not match the mesh");

  // Remove the rigid-mode component of the load (quadrature residue).
  std::vector<Eigen::VectorXd> modes;
  {
    Eigen::VectorXd t1 = Eigen::VectorXd::Zero(f.size()), t2 = t1, rot = t1;
    for (std::size_t a = 0; a < n; ++a) {
      t1(2 * a) = 1.0;
      t2(2 * a + 1) = 1.0;
      rot(2 * a) = -mesh.nodes()[a].y();
      rot(2 * a + 1) = mesh.nodes()[a].x();
    }
    modes = {t1, t2};
    if (c.coercive()) modes.push_back(rot);
    for (std::size_t i = 0; i < modes.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) modes[i] -= modes[j].dot(modes[i]) * modes[j];
      modes[i].normalize();
    }
  }
  for (const auto& m : modes) f -= m.dot(f) * m;

  // Pin the rigid modes: node 0, plus one component of the farthest node.
  std::vector<int> fixed = {0, 1};
  if (c.coercive()) {
    std::size_t far = 0;
    double best = -1.0;
    for (std::size_t a = 0; a < n; ++a) {
      const double d = (mesh.nodes()[a] - mesh.nodes()[0]).norm();
      if (d > best) best = d, far = a;
    }
    const Vec2 dir = rot90(mesh.nodes()[far] - mesh.nodes()[0]);
    fixed.push_back(static_cast<int>(2 * far + (std::abs(dir.x()) >= std::abs(dir.y()) ? 0 : 1)));
  }
  std::vector<int> map(2 * n, 0);
  for (int d : fixed) map[d] = -1;
  int nfree = 0;
  for (auto& m : map) m = (m == -1) ? -1 : nfree++;

  std::vector<Eigen::Triplet<double>> red;
  red.reserve(stiffness.size());
  for (const auto& t : stiffness)
    if (map[t.row()] >= 0 && map[t.col()] >= 0) red.emplace_back(map[t.row()], map[t.col()], t.value());
  Eigen::SparseMatrix<double> kr(nfree, nfree);
  kr.setFromTriplets(red.begin(), red.end());
  Eigen::VectorXd fr(nfree);
  for (std::size_t d = 0; d < 2 * n; ++d)
    if (map[d] >= 0) fr(map[d]) = -f(static_cast<Eigen::Index>(d));

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(kr);
  if (ldlt.info() != Eigen::Success) throw SolverError("factorization of the elasticity system failed");
  const Eigen::VectorXd ur = ldlt.solve(fr);
  if (ldlt.info() != Eigen::Success || !ur.allFinite()) throw SolverError("elasticity solve failed");

  Eigen::VectorXd u = Eigen::VectorXd::Zero(f.size());
  for (std::size_t d = 0; d < 2 * n; ++d)
    if (map[d] >= 0) u(static_cast<Eigen::Index>(d)) = ur(map[d]);

  Eigen::SparseMatrix<double> k(f.size(), f.size());
  k.setFromTriplets(stiffness.begin(), stiffness.end());
  const double fnorm = f.norm();
  NeumannSolve out;
  out.residual = fnorm > 0.0 ? (k * u + f).norm() / fnorm : (k * u).norm();
  if (!(out.residual < 1e-6)) throw SolverError("elasticity solve did not reach the residual tolerance");
  out.u.resize(n);
  for (std::size_t a = 0; a < n; ++a) out.u[a] = u.segment<2>(2 * a);
  return out;
}

Eigen::SparseMatrix<double> p1_dirichlet_laplacian(const TriMesh& mesh, std::vector<int>& interior) {
  const std::size_t n = mesh.n_nodes();
  std::vector<char> on_boundary(n, 0);
  for (const auto& e : mesh.boundary_edges()) on_boundary[e[0]] = on_boundary[e[1]] = 1;
  interior.assign(n, -1);
  int m = 0;
  for (std::size_t a = 0; a < n; ++a)
    if (!on_boundary[a]) interior[a] = m++;
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& g = mesh.grads(static_cast<int>(t));
    const double area = mesh.area(static_cast<int>(t));
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const int ia = interior[tri[a]], ib = interior[tri[b]];
        if (ia >= 0 && ib >= 0) trip.emplace_back(ia, ib, area * g[a].dot(g[b]));
      }
  }
  Eigen::SparseMatrix<double> k(m, m);
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

}  // namespace disloc
