#pragma once

#include <Eigen/Sparse>

#include <span>

namespace disloc {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Rank-one penalty kappa * g g^T added to the operator.
struct RankOneTerm {
  Vector g;
  double kappa;
};

struct PcgResult {
  Vector x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients for (K + sum kappa g g^T) x = b.
/// Stops when |r| <= rel_tol * |b|. Returns x = 0 for b = 0.
PcgResult pcg_solve(const SparseMatrix& k, std::span<const RankOneTerm> extra, const Vector& b, double rel_tol,
                    int max_iter);

/// Penalty weight that makes kappa g g^T comparable to K's diagonal.
double penalty_weight(const SparseMatrix& k, const Vector& g);

}  // namespace disloc
