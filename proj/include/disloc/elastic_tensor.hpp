#pragma once

#include "disloc/types.hpp"

#include <array>
#include <string_view>
#include <utility>

namespace disloc {

enum class TensorMode { isotropic, general, toy };

std::string_view to_string(TensorMode mode);

/// Planar elasticity tensor C acting on 2x2 matrices, with W(xi) = 1/2 C xi : xi.
///
/// Three flavours:
///  - isotropic: Lame pair (lambda, mu), W = mu |xi^sym|^2 + lambda/2 (tr xi)^2
///  - general:   16 entries C_ijkl; minor symmetries are enforced at construction
///  - toy:       W(xi) = |xi|^2 on the full matrix. Not coercive in the sym sense;
///               only meant for the closed-form screw-like oracles.
///
/// Immutable after construction.
class ElasticTensor {
 public:
  static ElasticTensor isotropic(double lambda, double mu);
  /// Entries in row-major order, index i*8 + j*4 + k*2 + l.
  static ElasticTensor general(const std::array<double, 16>& entries);
  static ElasticTensor toy();

  TensorMode mode() const { return mode_; }
  bool coercive() const { return mode_ != TensorMode::toy; }

  /// Lame parameters; only meaningful in isotropic mode.
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  /// Plane-strain Poisson ratio lambda / (2 (lambda + mu)); isotropic mode only.
  double poisson() const { return lambda_ / (2.0 * (lambda_ + mu_)); }

  double operator()(int i, int j, int k, int l) const { return c_[index(i, j, k, l)]; }
  const std::array<double, 16>& entries() const { return c_; }

  /// (C xi)_ij = C_ijkl xi_kl
  Matrix2 apply(const Matrix2& xi) const;
  double energy_density(const Matrix2& xi) const;

  /// True when C_ijkl == C_klij up to roundoff. Not required; W only uses the
  /// symmetric part of the quadratic form.
  bool major_symmetric() const { return major_symmetric_; }

  /// (c1, c2) with c1 |xi^sym|^2 <= C xi : xi <= c2 |xi^sym|^2.
  /// Throws ConfigError in toy mode.
  std::pair<double, double> coercivity_constants() const;

  /// Tensor of the rotated material, C'_ijkl = R_ia R_jb R_kc R_ld C_abcd.
  ElasticTensor rotated(double angle) const;

 private:
  ElasticTensor() = default;
  static constexpr int index(int i, int j, int k, int l) { return i * 8 + j * 4 + k * 2 + l; }
  void finalize();

  TensorMode mode_ = TensorMode::toy;
  double lambda_ = 0.0;
  double mu_ = 0.0;
  std::array<double, 16> c_{};
  bool major_symmetric_ = true;
  double c1_ = 0.0;
  double c2_ = 0.0;
};

}  // namespace disloc
