#pragma once

#include "disloc/dislocation_sim.hpp"
#include "disloc/elastic_tensor.hpp"
#include "disloc/limit_measure.hpp"
#include "disloc/mesh.hpp"
#include "disloc/relaxation_phi.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace disloc {

/// Square-integrable matrix field on Omega. `singular_points` mark integrable
/// singularities where quadrature is refined.
struct LimitStrain {
  std::function<Matrix2(const Vec2&)> fn;
  std::vector<Vec2> singular_points;

  static LimitStrain zero();
  static LimitStrain constant(const Matrix2& m);
  static LimitStrain field(std::function<Matrix2(const Vec2&)> fn, std::vector<Vec2> singular_points = {});
  /// Piecewise constant on the triangles of a mesh.
  static LimitStrain piecewise_constant(std::shared_ptr<const TriMesh> mesh, std::vector<Matrix2> values);

  Matrix2 operator()(const Vec2& x) const { return fn(x); }
};

/// General right-hand side of the curl test: Dirac masses, a bounded density,
/// and uniform line charges on circles (total charge xi per circle).
struct CurlSource {
  struct Circle {
    Vec2 center;
    double radius;
    Vec2 xi;
  };
  std::vector<DiracMass> diracs;
  std::function<Vec2(const Vec2&)> density;  // may be empty
  std::vector<Circle> circles;

  static CurlSource from(const LimitMeasure& mu);
  double mass_bound(const Domain2D& omega, const TriMesh& mesh) const;
};

struct CurlOptions {
  double h = 1.0 / 32.0;  // test mesh size
  int rule_order = 4;
  int circle_points = 512;
  double rel_tol = 1e-6;  // compatibility threshold on residual / scale
};

struct CurlResidual {
  double norm = 0.0;      // discrete H^{-1} norm of Curl beta - mu
  double scale = 0.0;     // ||beta||_{L2} + |mu|(Omega)
  double relative() const { return scale > 0.0 ? norm / scale : norm; }
};

/// Row-wise functional phi -> ∫ beta_(i) . J grad phi - ∫ phi d mu_i over P1
/// test functions vanishing on the boundary, measured in the norm of one
/// Dirichlet Laplace solve per row. J grad phi = (d2 phi, -d1 phi).
CurlResidual weak_curl_residual(const LimitStrain& beta, const CurlSource& mu, const Domain2D& omega,
                                const CurlOptions& opt = {});
CurlResidual weak_curl_residual(const LimitStrain& beta, const LimitMeasure& mu, const Domain2D& omega,
                                const CurlOptions& opt = {});

/// Value of a limit functional; +infinity is a tagged sentinel.
struct FValue {
  bool finite = true;
  double value = 0.0;
  std::string violated;  // constraint that failed when !finite
  double residual = 0.0; // relative curl residual of the gate
  double elastic = 0.0;
  double plastic = 0.0;

  static FValue infinite(std::string violated, double residual);
  double or_infinity() const { return finite ? value : std::numeric_limits<double>::infinity(); }
};

/// ∫_Omega W(beta) on the test mesh.
double elastic_energy(const LimitStrain& beta, const ElasticTensor& c, const Domain2D& omega,
                      const CurlOptions& opt = {});
/// sum_l phi(xi_l) area(A_l) (1-homogeneity folds d mu / d|mu|).
double plastic_energy(const LimitMeasure& mu, const PsiTable& table);

/// ∫ W(beta) + ∫ phi(d mu / d|mu|) d|mu| when Curl beta = mu, else +inf.
FValue evaluate_F(const LimitMeasure& mu, const LimitStrain& beta, const ElasticTensor& c, const PsiTable& table,
                  const Domain2D& omega, const CurlOptions& opt = {});
/// Same value with the gate Curl beta = 0 (mu and beta independent).
FValue evaluate_F_dilute(const LimitMeasure& mu, const LimitStrain& beta, const ElasticTensor& c,
                         const PsiTable& table, const Domain2D& omega, const CurlOptions& opt = {});
/// ∫ W(beta_sym); throws ConfigError for a non-symmetric input.
double evaluate_F_super(const LimitStrain& beta_sym, const ElasticTensor& c, const Domain2D& omega,
                        const CurlOptions& opt = {});

/// Elastic-energy minimizer among fields with Curl beta = mu (density
/// measures): a particular P0 solution J grad g_i with -Lap g_i = mu_i plus the
/// P1 elastic corrector. Exactly compatible against P1 test functions of the
/// same mesh (CurlOptions::h == h); O(h) residual on other test meshes.
struct CompatibleStrain {
  LimitStrain beta;
  double energy = 0.0;
};
CompatibleStrain minimal_compatible_strain(const LimitMeasure& mu, const ElasticTensor& c, const Domain2D& omega,
                                           double h = 1.0 / 48.0);

/// Diagnostic core measures of a configuration: mass xi_i spread uniformly
/// over B_r(x_i) (density) or over the circle of radius r (line charges).
CurlSource smeared_measure(const DislocationConfig& mu, double r);
CurlSource circle_measure(const DislocationConfig& mu, double r);

struct GapRow {
  double eps;
  double n_eps;
  std::size_t count;
  double discrete;  // rescaled discrete energy
  double limit;     // limit functional
  double gap;       // discrete - limit
  double gap_pct;   // 100 gap / limit
};

struct GapOptions {
  SimParams sim;
  CurlOptions curl;
  bool rho_recovery = true;  // rho = 1/(2 sqrt(Lambda N)); else eps^gamma
  double gamma = 0.5;
  double compat_h = 1.0 / 48.0;
  int threads = 1;
};

/// Gamma-limsup gap: recovery configurations per eps, minimized discrete
/// energy plus the N-scaled gradient part beta - beta_min (orthogonal to the
/// minimizer), rescaled per regime and compared with the limit functional.
std::vector<GapRow> gamma_gap(const LimitMeasure& mu, const LimitStrain& beta, const ElasticTensor& c,
                              Regime regime, const std::vector<double>& eps_list, const PsiTable& table,
                              const Domain2D& omega, const GapOptions& opt = {});

/// CSV with header eps,N_eps,discrete,limit,gap,gap_pct.
void write_gap_csv(std::ostream& os, const std::vector<GapRow>& rows);

}  // namespace disloc
