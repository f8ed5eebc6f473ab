#pragma once

#include "disloc/burgers.hpp"
#include "disloc/elastic_tensor.hpp"
#include "disloc/limit_measure.hpp"
#include "disloc/mesh.hpp"
#include "disloc/relaxation_phi.hpp"
#include "disloc/singular_fields.hpp"

#include <memory>
#include <string>
#include <vector>

namespace disloc {

struct Dislocation {
  Vec2 x;
  Vec2 xi;
  bool operator==(const Dislocation& o) const { return x == o.x && xi == o.xi; }
};

/// mu = sum_i xi_i delta_{x_i} with core radius eps and hard-core radius rho.
struct DislocationConfig {
  std::vector<Dislocation> dislocations;
  double eps = 1e-3;
  double rho = 0.1;
  std::size_t count() const { return dislocations.size(); }
  double total_variation() const;
};

/// rho = eps^gamma
double rho_gamma(double eps, double gamma = 0.5);
/// rho = 1 / (2 sqrt(Lambda N))
double rho_recovery(double lambda_total, double n_eps);

struct Violation {
  enum class Kind { scales, containment, separation, charge };
  Kind kind;
  int i = -1;
  int j = -1;
  std::string message;
};

/// Checks eps < rho, B_rho(x_i) inside Omega, |x_j - x_k| >= 2 rho, and, when
/// `system` is given, xi_i in Span_Z S. Reports every violation.
std::vector<Violation> validate_config(const Domain2D& omega, const DislocationConfig& mu,
                                       const BurgersSystem* system = nullptr);

struct SimParams {
  double h = 1.0 / 48.0;       // mesh size
  int rule_order = 3;          // Gauss order of the triangle rule
  double min_size_ratio = 0.125;
  double point_ratio = 2.0;    // leaves near a core satisfy dist >= point_ratio * diam
  int max_depth = 24;
  int edge_gauss = 6;
  int core_circle_points = 64;
  double self_ds = 0.25;       // log-radius panel width of the hard-core rule
  int self_theta_panels = 24;
  int self_gauss = 3;
  bool direct_total = true;    // also integrate W over Omega_eps element by element
};

/// beta = sum_i S_i + grad u - A on Omega_eps, zero inside the cores.
/// S_i are whole-plane equilibrium singular fields, u is P1, A the constant
/// skew matrix making the skew average of beta vanish.
class StrainField {
 public:
  StrainField(std::shared_ptr<const TriMesh> mesh, ElasticTensor c, std::vector<SingularField> singular,
              std::vector<Vec2> u, double eps);

  Matrix2 operator()(const Vec2& x) const;
  Matrix2 singular_part(const Vec2& x) const;
  /// Piecewise-constant grad u on the element containing x.
  Matrix2 corrector_gradient(const Vec2& x) const;
  Matrix2 corrector_gradient(int tri) const;
  bool in_core(const Vec2& x) const;

  const TriMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const TriMesh> mesh_ptr() const { return mesh_; }
  const ElasticTensor& tensor() const { return c_; }
  const std::vector<SingularField>& singular() const { return singular_; }
  const std::vector<Vec2>& nodal_u() const { return u_; }
  const Matrix2& skew_offset() const { return skew_offset_; }
  double eps() const { return eps_; }
  std::vector<Vec2> centers() const;

  /// ∮ beta · t ds on a circle avoiding the cores; the corrector contributes
  /// its exact (telescoping) line integral.
  Vec2 circulation(const Vec2& center, double radius, int n_quad = 256) const;

  /// Calls cb(x, weight, tri) over Omega minus the cores (adaptive near them).
  template <class Callback>
  void integrate(const SimParams& p, double mask_radius, Callback&& cb) const;

  void set_skew_offset(const Matrix2& a) { skew_offset_ = a; }

 private:
  std::shared_ptr<const TriMesh> mesh_;
  ElasticTensor c_;
  std::vector<SingularField> singular_;
  std::vector<Vec2> u_;
  double eps_;
  Matrix2 skew_offset_ = Matrix2::Zero();
};

enum class Regime { dilute, critical, super };
std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);
/// N_eps of the regime: |log eps|^{1/2}, |log eps|, |log eps|^2.
double regime_count(Regime r, double eps);

struct EnergyReport {
  double total = 0.0;         // self + inter
  double direct_total = -1.0; // element-wise integral over Omega_eps (when computed)
  double self = 0.0;          // ∪ B_rho \ B_eps
  double inter = 0.0;         // Omega \ ∪ B_rho
  std::vector<double> per_dislocation_self;
  double eps = 0.0;
  double rho = 0.0;
  double n_eps = 0.0;
  double rescaled_dilute = 0.0;   // E / (N |log eps|)
  double rescaled_critical = 0.0; // E / |log eps|^2
  double rescaled_super = 0.0;    // E / N^2
};

/// 1/(N |log eps|), 1/|log eps|^2 or 1/N^2 times the total energy.
double rescaled_energy(const EnergyReport& report, Regime regime, double n_eps, double eps);

struct SimResult {
  StrainField field;
  EnergyReport report;
  double solve_residual = 0.0;
};

/// Minimizes ∫_{Omega_eps} W(beta) over admissible strains of mu.
/// Throws ConfigError when validate_config reports violations.
SimResult minimize_energy(const Domain2D& omega, const DislocationConfig& mu, const ElasticTensor& c,
                          const SimParams& p = {});

/// Self / interaction split of a finalized field at hard-core radius rho.
EnergyReport split_energy(const StrainField& field, const DislocationConfig& mu, double rho, const SimParams& p = {});

struct RecoveryResult {
  DislocationConfig config;
  std::vector<double> r_eps;       // per region
  std::vector<std::size_t> counts; // per region
  double lambda_total = 0.0;       // max over regions of Lambda
};

/// Lattice construction for a locally constant target: each region A_l is
/// covered by the grid of squares of side 2 r, r = 1/(2 sqrt(Lambda_l N)),
/// aligned with the origin; squares inside A_l and Omega receive the
/// generators xi_k of the phi-decomposition of xi_l with frequencies
/// lambda_k / Lambda_l. eps and rho of the returned config are left to the
/// caller (rho defaults to min r).
RecoveryResult recovery_sequence(const LimitMeasure& target, double n_eps, const Domain2D& omega,
                                 const PsiTable& table);

struct SweepRow {
  double eps;
  double n_eps;
  std::size_t count;
  double rho;
  double e_self;
  double e_inter;
  double e_total;
};

struct SweepResult {
  Regime regime;
  std::vector<SweepRow> rows;
  // log-log slopes; NaN with fewer than two rows
  double exponent_self_vs_nlog = 0.0;   // E_self against N |log eps|
  double exponent_inter_vs_n = 0.0;     // E_inter against N (nominal)
  double exponent_inter_vs_count = 0.0; // E_inter against the realized count
};

struct SweepOptions {
  double gamma = 0.5;  // rho = eps^gamma
  bool rho_recovery = false;  // rho = min r of the recovery lattice instead
  int threads = 1;            // (eps, configuration) pairs solved in parallel
  SimParams sim;
};

SweepResult scaling_sweep(Regime regime, const ElasticTensor& c, const Domain2D& omega,
                          const std::vector<double>& eps_list, const LimitMeasure& target, const PsiTable& table,
                          const SweepOptions& opt = {});

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace disloc

#include "disloc/dislocation_sim_impl.hpp"
