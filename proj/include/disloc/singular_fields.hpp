#pragma once

#include "disloc/elastic_tensor.hpp"
#include "disloc/types.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace disloc {

/// Angular part of a (-1)-homogeneous field beta(r, theta) = Gamma(theta) / r,
/// sampled at n equispaced angles theta_j = 2 pi j / n.
///
/// Internally each sample is split into radial and tangential columns,
/// Gamma = g_r ⊗ e_r + g_t ⊗ e_theta; `at` interpolates those columns with
/// periodic cubic Hermite splines.
class AngularProfile {
 public:
  AngularProfile() = default;
  explicit AngularProfile(std::vector<Matrix2> samples);

  /// Samples fn(theta) at n angles.
  static AngularProfile sample(const std::function<Matrix2(double)>& fn, int n = 256);

  std::size_t size() const { return samples_.size(); }
  const std::vector<Matrix2>& samples() const { return samples_; }
  double angle(std::size_t j) const { return kTwoPi * static_cast<double>(j) / static_cast<double>(size()); }
  Matrix2 at(double theta) const;

  /// Replaces the radial columns by their angular mean and shifts the
  /// tangential columns so the circulation is exactly xi. The resulting
  /// Gamma(theta)/r is curl free away from the origin.
  AngularProfile made_admissible(const Vec2& xi) const;

  /// Circulation of Gamma(theta)/r around the origin (trapezoidal rule).
  Vec2 circulation() const;

  /// CSV rows: theta, G11, G12, G21, G22.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<Matrix2> samples_;
  std::vector<Vec2> gr_, gt_;    // radial / tangential columns per sample
  std::vector<Vec2> dgr_, dgt_;  // derivatives per unit index step
  void prepare();
};

enum class FieldKind { toy, k_hat, k_tilde, beta_r2_isotropic, profile };

/// Closed-form singular strain field carrying a circulation around x0.
///
/// toy:       b ⊗ t / (2 pi r)             (t ccw unit tangent)
/// k_hat:     xi ⊗ J(x - x0) / (2 pi r^2)
/// k_tilde:   xi ⊗ J(x - x0) / (2 pi r_eps^2) on B_{r_eps}(x0), zero outside
/// beta_r2:   plane-strain edge dislocation field of an isotropic medium
/// profile:   Gamma(theta) / r from a sampled AngularProfile
///
/// toy and k_hat coincide as functions; they are kept separate for bookkeeping.
class SingularField {
 public:
  static SingularField toy(const Vec2& b, const Vec2& x0);
  static SingularField k_hat(const Vec2& xi, const Vec2& x0);
  static SingularField k_tilde(const Vec2& xi, const Vec2& x0, double r_eps);
  static SingularField beta_r2_isotropic(const ElasticTensor& c, const Vec2& xi, const Vec2& x0 = Vec2::Zero());
  static SingularField from_profile(AngularProfile profile, const Vec2& x0 = Vec2::Zero());

  FieldKind kind() const { return kind_; }
  const Vec2& center() const { return x0_; }
  const Vec2& charge() const { return xi_; }
  double radius() const { return r_eps_; }
  /// True for fields whose value is singular at the center.
  bool singular() const { return kind_ != FieldKind::k_tilde; }

  /// Throws std::domain_error at the center of a singular field.
  Matrix2 operator()(const Vec2& x) const;
  /// No center check; the caller guarantees x != x0.
  Matrix2 eval(const Vec2& x) const;

  /// Gamma(theta) = r beta(x0 + r e_theta); not defined for k_tilde.
  AngularProfile profile(int n = 256) const;

  /// Same field translated to a new center.
  SingularField moved_to(const Vec2& x0) const;

 private:
  SingularField() = default;
  FieldKind kind_ = FieldKind::k_hat;
  Vec2 x0_ = Vec2::Zero();
  Vec2 xi_ = Vec2::Zero();
  double r_eps_ = 0.0;
  // beta_r2: amplitude, rotation of the charge direction, Poisson ratio
  double amp_ = 0.0, cos_ = 1.0, sin_ = 0.0, nu_ = 0.0;
  std::shared_ptr<const AngularProfile> profile_;
};

/// Sum of singular fields; evaluator x -> sum_i f_i(x).
Matrix2 evaluate_sum(std::span<const SingularField> fields, const Vec2& x);

/// Row-wise circulation  ∮ beta · t ds  on the ccw circle of given center and
/// radius, trapezoidal rule with n_quad points. `singular_points` are checked
/// against the circle: a point closer than 1e-9 * radius to it is rejected.
Vec2 circulation(const std::function<Matrix2(const Vec2&)>& field, const Vec2& center, double radius, int n_quad,
                 std::span<const Vec2> singular_points = {});
Vec2 circulation(const SingularField& field, const Vec2& center, double radius, int n_quad);
Vec2 circulation(std::span<const SingularField> fields, const Vec2& center, double radius, int n_quad);

/// psi(xi) = ∫_0^{2 pi} W(Gamma(theta)) dtheta, trapezoidal rule.
double psi_from_profile(const ElasticTensor& c, const AngularProfile& g);

}  // namespace disloc
