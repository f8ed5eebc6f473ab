#include "disloc/pcg.hpp"

#include <cmath>

namespace disloc {

PcgResult pcg_solve(const SparseMatrix& k, std::span<const RankOneTerm> extra, const Vector& b, double rel_tol,
                    int max_iter) {
  const Eigen::Index n = b.size();
  PcgResult res;
  res.x = Vector::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }

  Vector diag = k.diagonal();
  for (const RankOneTerm& t : extra) diag += t.kappa * t.g.cwiseAbs2();
  Vector inv_diag = diag.unaryExpr([](double d) { return d > 0.0 ? 1.0 / d : 1.0; });

  auto apply = [&](const Vector& v) {
    Vector out = k * v;
    for (const RankOneTerm& t : extra) out += (t.kappa * t.g.dot(v)) * t.g;
    return out;
  };

  Vector r = b;
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    const Vector q = apply(p);
    const double pq = p.dot(q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    res.x += alpha * p;
    r -= alpha * q;
    res.iterations = it;
    res.rel_residual = r.norm() / bnorm;
    if (res.rel_residual <= rel_tol) {
      res.converged = true;
      break;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  // true residual, guards against drift in the recursion
  res.rel_residual = (b - apply(res.x)).norm() / bnorm;
  res.converged = res.rel_residual <= 10.0 * rel_tol;
  return res;
}

double penalty_weight(const SparseMatrix& k, const Vector& g) {
  const double avg_diag = k.diagonal().cwiseAbs().mean();
  const double g2 = g.squaredNorm();
  return g2 > 0.0 ? avg_diag / g2 : 0.0;
}

}  // namespace disloc
