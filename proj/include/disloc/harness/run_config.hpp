#pragma once

#include "disloc/burgers.hpp"
#include "disloc/dislocation_sim.hpp"
#include "disloc/elastic_tensor.hpp"
#include "disloc/korn.hpp"
#include "disloc/limit_measure.hpp"
#include "disloc/mesh.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace disloc::harness {

inline constexpr int kSchemaVersion = 1;

/// Axis-aligned density region of a target measure.
struct TargetRect {
  Vec2 lo;
  Vec2 hi;
  Vec2 xi;
  bool operator==(const TargetRect&) const = default;
};

/// Run configuration, read from `key = value` lines (`#` starts a comment).
/// Every key has a default; unknown or repeated keys are rejected.
struct RunConfig {
  int schema_version = kSchemaVersion;

  // material and lattice
  std::string tensor = "toy";  // toy | isotropic | general
  double lambda = 1.0;
  double mu = 1.0;
  std::array<double, 16> tensor_entries{};  // general mode, C_ijkl row-major
  std::string burgers = "square";           // square | hexagonal
  std::string domain = "disk";              // disk | rectangle
  std::vector<double> domain_params{0.0, 0.0, 1.0};  // cx,cy,r or x0,y0,x1,y1

  // scales and meshes
  std::vector<double> eps{1e-2, 1e-3};
  double rho = 0.0;  // simulate; 0 picks eps^gamma
  double gamma = 0.5;
  std::string rho_mode = "gamma";  // sweep: gamma | recovery
  double h = 1.0 / 48.0;
  int n_theta = 128;

  // cell
  Vec2 xi = Vec2(1.0, 0.0);
  bool cell_limit = false;

  // phi
  double table_radius = 4.0;
  int phi_samples = 360;
  std::vector<Vec2> phi_xi{Vec2(1, 0), Vec2(0, 1), Vec2(1, 1)};
  int z_max = 3;

  // simulate
  std::vector<Dislocation> dislocations{{Vec2::Zero(), Vec2(1, 0)}};

  // sweep
  std::vector<std::string> regimes{"critical"};
  std::vector<TargetRect> target{{Vec2(0, 0), Vec2(1, 1), Vec2(1, 0)}};
  bool gap = false;
  std::string gap_beta = "auto";  // auto | compatible | zero; auto = zero for dilute, else compatible

  // korn
  std::string korn_family = "gradient-polynomials";
  int korn_samples = 500;
  int korn_degree = 4;
  int korn_refine_steps = 3;
  double korn_h = 1.0 / 16.0;
  int korn_dislocations = 10;
  double korn_eps = 1e-3;
  double korn_rho = 0.05;
  int korn_mixed_dislocation_samples = 20;

  // execution (not part of the config hash)
  std::uint64_t seed = 7;
  int threads = 0;  // 0 = available cores
  std::string out = "out";

  bool operator==(const RunConfig&) const = default;

  /// Throws ConfigError with the line number on malformed input.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);
  /// Canonical text with every key; parse(to_text()) == *this.
  std::string to_text() const;
  /// FNV-1a of the canonical text without the execution keys, 16 hex digits.
  std::string hash() const;

  ElasticTensor make_tensor() const;
  BurgersSystem make_burgers() const;
  Domain2D make_domain() const;
  LimitMeasure make_target() const;
  KornOptions korn_options() const;
  int resolved_threads() const;
};

}  // namespace disloc::harness
