#pragma once

#include "disloc/annulus_cell.hpp"
#include "disloc/burgers.hpp"
#include "disloc/elastic_tensor.hpp"
#include "disloc/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace disloc {

/// psi(xi) = xi^T Q xi, the limiting self-energy density (a quadratic form).
struct PsiForm {
  Matrix2 q = Matrix2::Zero();
  std::string source;  // toy-analytic | profile-quadrature | cell-extrapolated

  double operator()(const Vec2& xi) const { return xi.dot(q * xi); }

  static PsiForm toy();
  /// Polarization of psi_from_profile(beta_r2) at e1, e2, e1 + e2.
  static PsiForm from_profile(const ElasticTensor& c);
  /// Polarization of psi_limit at e1, e2, e1 + e2.
  static PsiForm from_cell(const ElasticTensor& c, const CellMeshParams& p = {});
  /// Default source per tensor mode: toy -> analytic, isotropic -> profile,
  /// general -> cell extrapolation.
  static PsiForm for_tensor(const ElasticTensor& c, const CellMeshParams& p = {});
};

struct PsiEntry {
  LatticeVector xi;
  double psi;
};

/// psi tabulated on the lattice ball of radius R.
class PsiTable {
 public:
  PsiTable(PsiForm form, BurgersSystem system, double radius);

  const PsiForm& form() const { return form_; }
  const BurgersSystem& system() const { return system_; }
  double radius() const { return radius_; }
  const std::vector<PsiEntry>& entries() const { return entries_; }
  /// min over the table of psi(xi_k) / |xi_k|
  double min_efficiency() const;

 private:
  PsiForm form_;
  BurgersSystem system_;
  double radius_;
  std::vector<PsiEntry> entries_;
};

/// Builds the table and checks sufficiency of R: every vector in the shell
/// R - max|b| < |xi| <= R must have psi/|xi| >= 2 max_i psi(b_i)/|b_i|.
/// Throws ConfigError naming the first vector that fails.
PsiTable build_psi_table(const PsiForm& form, const BurgersSystem& system, double radius);
PsiTable build_psi_table(const ElasticTensor& c, const BurgersSystem& system, double radius);

struct PhiTerm {
  Vec2 vector;
  std::vector<int> coeffs;  // witness in terms of S (empty for reduced columns)
  double lambda;
  double psi;
};

struct PhiCertificate {
  Vec2 xi = Vec2::Zero();
  double value = 0.0;
  std::vector<PhiTerm> terms;
  Vec2 dual = Vec2::Zero();         // y with y . xi_k = psi(xi_k) on the basis
  double feasibility_residual = 0.0;  // |sum lambda_k xi_k - xi|
  double optimality_residual = 0.0;   // max_k max(0, y . xi_k - psi(xi_k))
};

/// phi(xi) = min { sum lambda_k psi(xi_k) : sum lambda_k xi_k = xi, lambda >= 0 }
/// over the table columns, by enumerating all 2-column bases.
PhiCertificate phi(const Vec2& xi, const PsiTable& table);

struct BurgersReport {
  bool holds = true;
  int z_max = 3;
  std::size_t combinations = 0;
  // witness on failure
  std::vector<int> z;
  Vec2 vector = Vec2::Zero();
  double psi_value = 0.0;
  double split_value = 0.0;
};

/// Bounded check of the Burgers condition: for every lattice point v reached by
/// z in [-z_max, z_max]^s, psi(v) >= min over those z with sum z_i b_i = v of
/// sum |z_i| psi(b_i), i.e. keeping v whole never costs less than splitting it
/// into generators.
BurgersReport check_burgers_condition(const PsiTable& table, int z_max = 3);

/// min { sum |lambda_i| psi(b_i) : sum lambda_i b_i = xi } with columns +-b_i.
/// Requires a passing BurgersReport.
PhiCertificate phi_reduced(const Vec2& xi, const PsiTable& table, const BurgersReport& report);

/// Table vectors b with psi(b) = phi(b) (relative tolerance tol).
std::vector<LatticeVector> burgers_set_diagnostic(const PsiTable& table, double tol = 1e-9);

/// CSV rows "angle,phi" for n equispaced angles on the unit circle.
void write_phi_polar_csv(std::ostream& os, const PsiTable& table, int n);

}  // namespace disloc
