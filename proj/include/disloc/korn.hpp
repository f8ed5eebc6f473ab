#pragma once

#include "disloc/dislocation_sim.hpp"
#include "disloc/gamma_functionals.hpp"
#include "disloc/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace disloc {

/// Integrals entering the generalized Korn inequality
///   ∫ |beta_skew - A|^2 <= C (∫ |beta_sym|^2 + |mu|(Omega)^2),
/// A the skew average of beta.
struct KornSample {
  double skew2 = 0.0;   // ∫ |beta_skew|^2 (before normalization)
  double sym2 = 0.0;    // ∫ |beta_sym|^2
  double area = 0.0;
  Matrix2 skew_avg = Matrix2::Zero();
  double mass = 0.0;    // |mu|(Omega)
  std::string descriptor;

  /// ∫ |beta_skew - A|^2
  double skew2_normalized() const;
};

KornSample korn_sample(const LimitStrain& beta, double mass, const Domain2D& omega, double h = 1.0 / 16.0,
                       int rule_order = 4);
/// Field of a minimized configuration: log-polar rule on the hard-core annuli,
/// masked rule elsewhere; mass = sum |xi_i|.
KornSample korn_sample(const StrainField& field, const DislocationConfig& mu, const SimParams& p = {});

/// ∫|beta_skew - A|^2 / (∫|beta_sym|^2 + mass^2); 0 when the denominator is 0.
double korn_ratio(const KornSample& s);

enum class KornFamily { symmetric, gradient_polynomials, dislocation_fields, mixed };
std::string to_string(KornFamily f);
KornFamily korn_family_from_string(const std::string& s);

struct KornOptions {
  int degree = 4;               // polynomial degree of u (gradients) or beta (symmetric)
  double h = 1.0 / 16.0;        // quadrature mesh for polynomial samples
  // power steps of the normalized skew form applied to each random start
  int refine_steps = 3;
  // dislocation samples
  ElasticTensor tensor = ElasticTensor::isotropic(1.0, 1.0);
  int dislocations = 10;
  double eps = 1e-3;
  double rho = 0.05;
  SimParams sim = coarse_sim();
  int mixed_dislocation_samples = 20;  // dislocation samples added to the mixed family
  int threads = 1;

  static SimParams coarse_sim() {
    SimParams p;
    p.h = 1.0 / 24.0;
    p.direct_total = false;
    return p;
  }
};

struct KornSweep {
  KornFamily family;
  std::uint64_t seed = 0;
  double empirical_c = 0.0;
  std::size_t worst_index = 0;
  std::string worst_descriptor;
  std::vector<double> ratios;  // in sample order
  std::vector<std::string> descriptors;
};

/// Sample i of a family is generated from its own generator seeded by
/// (seed, family, i), so sweeps are order independent. The mixed family is
/// the gradient samples followed by `mixed_dislocation_samples` dislocation
/// samples with the same seeds.
KornSweep korn_sweep(KornFamily family, std::size_t n_samples, std::uint64_t seed, const Domain2D& omega,
                     const KornOptions& opt = {});

/// Regenerates a single sample of a family from its descriptor components.
KornSample korn_replay(KornFamily family, std::uint64_t seed, std::size_t index, const Domain2D& omega,
                       const KornOptions& opt = {});

/// Random configuration used by the dislocation family (exposed for tests).
DislocationConfig random_configuration(std::uint64_t sample_seed, const Domain2D& omega, const KornOptions& opt);

}  // namespace disloc
