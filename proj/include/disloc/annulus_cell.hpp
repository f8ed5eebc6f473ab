#pragma once

#include "disloc/elastic_tensor.hpp"
#include "disloc/pcg.hpp"
#include "disloc/singular_fields.hpp"
#include "disloc/types.hpp"

#include <vector>

namespace disloc {

struct CellMeshParams {
  int n_theta = 128;
  /// Radial layers in s = log r; 0 picks ceil(log(R/eps) / (aspect * 2 pi / n_theta)).
  int n_s = 0;
  /// Element aspect h_s / h_theta in the (s, theta) plane. Must lie in [1/cap, cap].
  double aspect = 1.0;
  double aspect_cap = 8.0;
  double rel_tol = 1e-10;
  int max_iter = 20000;
  /// When > 0, the solve is repeated with n_theta / 2 and fails if the
  /// Richardson error estimate of psi exceeds this relative tolerance.
  double max_rel_error = 0.0;
};

/// Tensor-product grid on the annulus eps < r < R_out, uniform in (s, theta)
/// with s = log r, i.e. geometrically graded in r.
struct AnnulusMesh {
  double inner = 0.0;
  double outer = 1.0;
  int n_s = 0;
  int n_theta = 0;
  double h_s = 0.0;
  double h_theta = 0.0;

  AnnulusMesh() = default;
  AnnulusMesh(double inner, double outer, const CellMeshParams& p);
  int n_nodes() const { return (n_s + 1) * n_theta; }
  int node(int i, int j) const { return i * n_theta + ((j % n_theta) + n_theta) % n_theta; }
  double radius(int i) const;
  double aspect() const { return h_s / h_theta; }
};

struct CellSolution {
  Vec2 xi = Vec2::Zero();
  double eps = 0.0;
  double outer = 1.0;
  double energy = 0.0;     // ∫ W(beta) over the annulus
  double value = 0.0;      // energy / |log eps|
  double residual = 0.0;   // final relative residual of the linear solve
  int iterations = 0;
  double seconds = 0.0;
  double error_estimate = -1.0;  // relative, when requested
  AnnulusMesh mesh;
  std::vector<Vec2> u;     // nodal displacement corrector

  /// beta = K_hat(xi) + grad u at a point of the annulus (center 0).
  Matrix2 beta(const Vec2& x) const;
  /// Circulation on the circle of radius r. The corrector contribution is
  /// integrated exactly on each element, the K_hat part analytically.
  Vec2 circulation(double r) const;
  /// Gamma(theta_j) = r beta(r, theta_j) at the grid radius nearest to
  /// sqrt(eps * outer), sampled at the n_theta grid angles.
  AngularProfile profile() const;
};

/// psi_eps(xi): min over beta = K_hat(xi) + grad u on B_1 \ B_eps of
/// (1/|log eps|) ∫ W(beta).
CellSolution solve_cell(const ElasticTensor& c, const Vec2& xi, double eps, const CellMeshParams& p = {});

/// Same ansatz on B_rho \ B_eps, still normalized by 1/|log eps|.
CellSolution solve_cell_hardcore(const ElasticTensor& c, const Vec2& xi, double eps, double rho,
                                 const CellMeshParams& p = {});

struct PsiLimit {
  double value = 0.0;
  std::vector<double> eps;
  std::vector<double> psi_eps;
  std::vector<double> richardson;  // estimate from consecutive pairs
  double rate_constant = 0.0;      // max |psi_eps - psi| |log eps| / |xi|^2
  double profile_value = -1.0;     // closed-form cross-check (isotropic only)
};

/// Extrapolates psi_eps along eps = 10^-2 .. 10^-5 with the 1/|log eps| rate.
/// Throws SolverError when consecutive estimates are non-monotone beyond
/// `monotone_tol` (relative).
PsiLimit psi_limit(const ElasticTensor& c, const Vec2& xi, const CellMeshParams& p = {},
                   const std::vector<double>& eps_list = {1e-2, 1e-3, 1e-4, 1e-5}, double monotone_tol = 1e-3);

/// Angular profile of the whole-plane field from a cell solve: the
/// grid-sampled r beta is made exactly admissible (curl free, circulation xi).
/// Used as the singular field for tensors without a closed form.
AngularProfile profile_from_cell(const ElasticTensor& c, const Vec2& xi, double eps = 1e-4,
                                 const CellMeshParams& p = {});

}  // namespace disloc
