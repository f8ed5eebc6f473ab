#include "disloc/korn.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <fstream>

using namespace disloc;

namespace {

const Domain2D kDisk = Domain2D::unit_disk();

double baseline_constant() {
  std::ifstream in(std::string(DISLOC_DATA_DIR) + "/korn_baseline.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in).at("empirical_c").get<double>();
}

}  // namespace

TEST_CASE("korn ratio of closed-form fields") {
  Matrix2 s;
  s << 1.0, 0.3, 0.3, -2.0;
  CHECK(korn_ratio(korn_sample(LimitStrain::constant(s), 0.0, kDisk)) == 0.0);

  // constant rotation: normalized away, denominator 0
  Matrix2 w;
  w << 0.0, -1.0, 1.0, 0.0;
  CHECK(korn_ratio(korn_sample(LimitStrain::constant(w), 0.0, kDisk)) == 0.0);

  // u = (xy, 0) on the unit disk: ∫|skew|^2 = pi/8, ∫|sym|^2 = 3 pi/8
  const auto b = LimitStrain::field([](const Vec2& x) {
    Matrix2 m;
    m << x.y(), x.x(), 0.0, 0.0;
    return m;
  });
  const KornSample k = korn_sample(b, 0.0, kDisk, 1.0 / 32.0);
  CHECK(k.skew2_normalized() == doctest::Approx(kPi / 8.0).epsilon(5e-3));
  CHECK(k.sym2 == doctest::Approx(3.0 * kPi / 8.0).epsilon(5e-3));
  CHECK(korn_ratio(k) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("korn numerator invariance and scaling") {
  const auto b = LimitStrain::field([](const Vec2& x) {
    Matrix2 m;
    m << std::sin(x.x()), x.y() * x.y(), std::cos(x.x() + x.y()), x.x() * x.y();
    return m;
  });
  Matrix2 s;
  s << 0.7, -0.2, -0.2, 1.1;
  const auto shifted = LimitStrain::field([&](const Vec2& x) { return Matrix2(b(x) + s); });
  const auto scaled = LimitStrain::field([&](const Vec2& x) { return Matrix2(2.5 * b(x)); });
  const KornSample k0 = korn_sample(b, 0.4, kDisk);
  const KornSample k1 = korn_sample(shifted, 0.4, kDisk);
  const KornSample k2 = korn_sample(scaled, 1.0, kDisk);
  CHECK(k1.skew2_normalized() == doctest::Approx(k0.skew2_normalized()).epsilon(1e-12));
  CHECK(k1.sym2 != doctest::Approx(k0.sym2));
  CHECK(korn_ratio(k2) == doctest::Approx(korn_ratio(k0)).epsilon(1e-12));
}

TEST_CASE("korn sweeps: symmetric, gradient stability, mixed superset, replay") {
  const KornSweep sym = korn_sweep(KornFamily::symmetric, 200, 7, kDisk);
  CHECK(sym.empirical_c == 0.0);

  std::vector<double> c;
  for (std::uint64_t seed : {7, 8, 9}) c.push_back(korn_sweep(KornFamily::gradient_polynomials, 500, seed, kDisk).empirical_c);
  for (double v : c) {
    CHECK(std::isfinite(v));
    CHECK(std::abs(v - c[0]) <= 0.05 * c[0]);
  }

  const KornSweep g = korn_sweep(KornFamily::gradient_polynomials, 50, 3, kDisk);
  KornOptions o;
  o.mixed_dislocation_samples = 2;
  const KornSweep m = korn_sweep(KornFamily::mixed, 50, 3, kDisk, o);
  CHECK(m.empirical_c >= g.empirical_c);
  CHECK(m.ratios.size() == 52);

  const KornSample r = korn_replay(KornFamily::gradient_polynomials, 3, g.worst_index, kDisk);
  CHECK(korn_ratio(r) == g.empirical_c);
  CHECK(r.descriptor == g.worst_descriptor);
  CHECK_THROWS_AS(korn_sweep(KornFamily::symmetric, 0, 7, kDisk), ConfigError);
  CHECK_THROWS_AS(korn_family_from_string("nope"), ConfigError);
  CHECK(korn_family_from_string("dislocation-fields") == KornFamily::dislocation_fields);
}

TEST_CASE("dislocation fields stay under the stored constant") {
  const double c = baseline_constant();
  KornOptions o;
  const DislocationConfig cfg = random_configuration(42, kDisk, o);
  CHECK(cfg.count() == 10);
  for (std::size_t i = 0; i < cfg.count(); ++i) {
    CHECK(kDisk.boundary_distance(cfg.dislocations[i].x) >= o.rho);
    for (std::size_t j = 0; j < i; ++j) CHECK((cfg.dislocations[i].x - cfg.dislocations[j].x).norm() >= 2 * o.rho);
  }
  const KornSweep d = korn_sweep(KornFamily::dislocation_fields, 4, 11, kDisk, o);
  for (double r : d.ratios) {
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
    CHECK(r <= c);
  }
}
