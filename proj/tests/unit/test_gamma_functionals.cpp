#include "disloc/gamma_functionals.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace disloc;

namespace {

LimitStrain skew_linear() {
  return LimitStrain::field([](const Vec2& x) {
    Matrix2 m;
    m << 0, x.x() - 0.5, -(x.x() - 0.5), 0;
    return m;
  });
}

LimitStrain smooth_gradient() {
  // grad of u = (sin x cos y, x^2 y)
  return LimitStrain::field([](const Vec2& x) {
    Matrix2 m;
    m << std::cos(x.x()) * std::cos(x.y()), -std::sin(x.x()) * std::sin(x.y()), 2 * x.x() * x.y(), x.x() * x.x();
    return m;
  });
}

const Domain2D kSquare = Domain2D::unit_square();

}  // namespace

TEST_CASE("weak curl residual: gradients, point charges, smeared cores") {
  CHECK(weak_curl_residual(smooth_gradient(), LimitMeasure::zero(), kSquare).relative() < 1e-12);

  const Vec2 x0(0.37, 0.52), xi(1, 0.5);
  const auto k = SingularField::k_hat(xi, x0);
  const auto kb = LimitStrain::field([k](const Vec2& x) { return k.eval(x); }, {x0});
  CHECK(weak_curl_residual(kb, LimitMeasure::dirac({{x0, xi}}), kSquare).relative() < 1e-7);
  CHECK(weak_curl_residual(kb, LimitMeasure::zero(), kSquare).relative() > 0.1);

  // Curl of the disc field is its uniform density minus the same charge on
  // the rim circle.
  const double r = 0.1;
  const auto kt = SingularField::k_tilde(xi, x0, r);
  const auto ktb = LimitStrain::field([kt](const Vec2& x) { return kt.eval(x); });
  DislocationConfig one{{{x0, xi}}, 1e-3, 0.2};
  CurlSource src = smeared_measure(one, r);
  for (const auto& c : circle_measure(one, r).circles) src.circles.push_back({c.center, c.radius, -c.xi});
  double prev = 1.0;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    CurlOptions o;
    o.h = h;
    const double rel = weak_curl_residual(ktb, src, kSquare, o).relative();
    CHECK(rel < prev);
    prev = rel;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("limit functional F") {
  const auto c = ElasticTensor::isotropic(1, 1);
  const PsiTable table = build_psi_table(c, BurgersSystem::square(), 4.0);
  const auto e1dx = LimitMeasure::uniform_rectangle(Vec2(1, 0), Vec2(0, 0), Vec2(1, 1));

  const FValue zero = evaluate_F(LimitMeasure::zero(), LimitStrain::zero(), c, table, kSquare);
  CHECK(zero.finite);
  CHECK(zero.value == 0.0);

  const FValue f = evaluate_F(e1dx, skew_linear(), c, table, kSquare);
  REQUIRE(f.finite);
  CHECK(f.plastic == doctest::Approx(phi(Vec2(1, 0), table).value).epsilon(1e-12));
  CHECK(f.elastic == doctest::Approx(0.0).epsilon(1e-14));

  const FValue bad = evaluate_F(e1dx, LimitStrain::zero(), c, table, kSquare);
  CHECK_FALSE(bad.finite);
  CHECK(bad.violated == "Curl beta = mu");
  CHECK(bad.residual > 0.1);
  CHECK(std::isinf(bad.or_infinity()));

  // Re-partition invariance and 1-homogeneity.
  const auto split = LimitMeasure::density({{{Vec2(0, 0), Vec2(1, 0), Vec2(1, 0.3), Vec2(0, 0.3)}, Vec2(1, 0)},
                                            {{Vec2(0, 0.3), Vec2(1, 0.3), Vec2(1, 1), Vec2(0, 1)}, Vec2(1, 0)}});
  CHECK(std::abs(evaluate_F(split, skew_linear(), c, table, kSquare).value - f.value) <= 1e-12);
  CHECK(plastic_energy(e1dx.scaled(2.0), table) == doctest::Approx(2.0 * plastic_energy(e1dx, table)).epsilon(1e-14));

  // F >= F_super(beta_sym) on a compatible pair with elastic energy.
  const auto sheared = LimitStrain::field([](const Vec2& x) {
    Matrix2 m;
    m << 0.2, x.x() - 0.5 + 0.1, -(x.x() - 0.5), 0.3 * x.y();
    return m;
  });
  const FValue fs = evaluate_F(e1dx, sheared, c, table, kSquare);
  REQUIRE(fs.finite);
  const auto sym_part = LimitStrain::field([&](const Vec2& x) { return sym(sheared(x)); });
  CHECK(fs.value >= evaluate_F_super(sym_part, c, kSquare));
}

TEST_CASE("toy plastic term of a diagonal density") {
  const auto toy = ElasticTensor::toy();
  const PsiTable table = build_psi_table(PsiForm::toy(), BurgersSystem::square(), 4.0);
  const auto mu = LimitMeasure::uniform_rectangle(Vec2(1, 1), Vec2(0, 0), Vec2(1, 1));
  const auto beta = LimitStrain::field([](const Vec2& x) {
    Matrix2 m;
    m << 0, x.x(), 0, x.x();
    return m;
  });
  const FValue f = evaluate_F(mu, beta, toy, table, kSquare);
  REQUIRE(f.finite);
  CHECK(f.plastic == doctest::Approx(2.0 / kTwoPi).epsilon(1e-12));
}

TEST_CASE("dilute and super functionals") {
  const auto c = ElasticTensor::isotropic(1, 1);
  const PsiTable table = build_psi_table(c, BurgersSystem::square(), 4.0);
  const auto e1dx = LimitMeasure::uniform_rectangle(Vec2(1, 0), Vec2(0, 0), Vec2(1, 1));

  const FValue g = evaluate_F_dilute(e1dx, smooth_gradient(), c, table, kSquare);
  REQUIRE(g.finite);
  CHECK(g.value == doctest::Approx(elastic_energy(smooth_gradient(), c, kSquare) + plastic_energy(e1dx, table)));
  CHECK_FALSE(evaluate_F_dilute(e1dx, skew_linear(), c, table, kSquare).finite);
  CHECK(evaluate_F_dilute(e1dx, LimitStrain::zero(), c, table, kSquare).value ==
        doctest::Approx(phi(Vec2(1, 0), table).value).epsilon(1e-12));

  CHECK(evaluate_F_super(LimitStrain::constant(Matrix2::Identity()), c, kSquare) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(evaluate_F_super(LimitStrain::zero(), c, kSquare) == 0.0);
  Matrix2 e;
  e << 0.1, 0.05, 0.05, -0.2;
  CHECK(evaluate_F_super(LimitStrain::constant(e), c, kSquare) ==
        doctest::Approx(c.energy_density(e)).epsilon(1e-12));
  CHECK_THROWS_AS(evaluate_F_super(skew_linear(), c, kSquare), ConfigError);
}

TEST_CASE("rescaled energies") {
  const double eps = 1e-3, l = std::log(1.0 / eps), n = 5.0;
  EnergyReport r;
  r.total = l * l;
  CHECK(rescaled_energy(r, Regime::critical, n, eps) == doctest::Approx(1.0));
  r.total = n * l;
  CHECK(rescaled_energy(r, Regime::dilute, n, eps) == doctest::Approx(1.0));
  r.total = n * n;
  CHECK(rescaled_energy(r, Regime::super, n, eps) == doctest::Approx(1.0));
}

TEST_CASE("minimal compatible strain and gamma gap") {
  const auto c = ElasticTensor::isotropic(1, 1);
  const PsiTable table = build_psi_table(c, BurgersSystem::square(), 4.0);
  const auto e1dx = LimitMeasure::uniform_rectangle(Vec2(1, 0), Vec2(0, 0), Vec2(1, 1));
  const CompatibleStrain bmin = minimal_compatible_strain(e1dx, c, kSquare);
  CHECK(bmin.energy < 1e-3);  // a zero-energy skew field is compatible
  CHECK(weak_curl_residual(bmin.beta, e1dx, kSquare).relative() < 0.05);

  // No dislocations: the gap is the quadrature error of the elastic term.
  const auto rows = gamma_gap(LimitMeasure::zero(), smooth_gradient(), c, Regime::critical, {1e-2, 1e-3}, table,
                              kSquare);
  REQUIRE(rows.size() == 2);
  for (const GapRow& r : rows) {
    CHECK(r.count == 0);
    CHECK(std::abs(r.gap_pct) < 1e-6);
  }
  std::ostringstream os;
  write_gap_csv(os, rows);
  CHECK(os.str().rfind("eps,N_eps,discrete,limit,gap,gap_pct\n", 0) == 0);

  CHECK_THROWS_AS(gamma_gap(e1dx, LimitStrain::zero(), c, Regime::critical, {1e-2}, table, kSquare), ConfigError);
}
