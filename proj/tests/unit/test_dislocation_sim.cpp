#include "disloc/dislocation_sim.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>

using namespace disloc;

TEST_CASE("mesh: area, boundary orientation, point location") {
  for (const Domain2D& d : {Domain2D::unit_square(), Domain2D::unit_disk(),
                            Domain2D::polygon({Vec2(0, 0), Vec2(2, 0), Vec2(2, 1), Vec2(1, 2), Vec2(0, 1)})}) {
    const TriMesh m = TriMesh::build(d, 0.1);
    // inscribed polygon for the disk
    CHECK(m.total_area() == doctest::Approx(d.area()).epsilon(d.shape() == Domain2D::Shape::disk ? 0.01 : 1e-12));
    double signed_area = 0.0;
    for (const auto& e : m.boundary_edges()) {
      const Vec2 a = m.nodes()[e[0]], b = m.nodes()[e[1]];
      signed_area += 0.5 * (a.x() * b.y() - a.y() * b.x());
    }
    CHECK(signed_area == doctest::Approx(m.total_area()).epsilon(1e-12));
    for (std::size_t t = 0; t < m.n_triangles(); t += 7) {
      const auto c = m.corners(static_cast<int>(t));
      const Vec2 x = (c[0] + c[1] + c[2]) / 3.0;
      const PointLocation loc = m.locate(x);
      REQUIRE(loc.tri >= 0);
      const auto cc = m.corners(loc.tri);
      const Vec2 back = loc.bary[0] * cc[0] + loc.bary[1] * cc[1] + loc.bary[2] * cc[2];
      CHECK((back - x).norm() < 1e-12);
    }
  }
}

TEST_CASE("toy single dislocation on the unit disk matches the log law") {
  for (double eps : {1e-2, 1e-3}) {
    DislocationConfig mu{{{Vec2::Zero(), Vec2(1, 0)}}, eps, std::sqrt(eps)};
    const auto t0 = std::chrono::steady_clock::now();
    const SimResult r = minimize_energy(Domain2D::unit_disk(), mu, ElasticTensor::toy());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double expected = std::log(1.0 / eps) / kTwoPi;
    CHECK(r.report.total == doctest::Approx(expected).epsilon(0.03));
    CHECK(r.report.direct_total == doctest::Approx(r.report.total).epsilon(0.01));
    CHECK(r.report.self / r.report.total == doctest::Approx(0.5).epsilon(0.1));
    CHECK(secs < 60.0);
  }
}

TEST_CASE("circulation of the minimizer equals the enclosed charge") {
  const DislocationConfig mu{{{Vec2(0.3, 0.5), Vec2(1, 0)}, {Vec2(0.7, 0.5), Vec2(0, -1)}}, 1e-3, 0.05};
  const SimResult r = minimize_energy(Domain2D::unit_square(), mu, ElasticTensor::isotropic(1, 1));
  CHECK((r.field.circulation(Vec2(0.3, 0.5), 0.1) - Vec2(1, 0)).norm() < 1e-6);
  CHECK((r.field.circulation(Vec2(0.5, 0.5), 0.35) - Vec2(1, -1)).norm() < 1e-6);
  CHECK(r.field.circulation(Vec2(0.5, 0.15), 0.08).norm() < 1e-6);
  CHECK_THROWS_AS(r.field.circulation(Vec2(0.3, 0.5), 0.0005), ConfigError);
  CHECK(r.field(Vec2(0.3, 0.5) + Vec2(1e-4, 0)).norm() == 0.0);
  CHECK(r.solve_residual < 1e-8);
}

TEST_CASE("dipole interaction energy grows with separation") {
  const auto c = ElasticTensor::isotropic(1, 1);
  double prev = -1.0;
  for (double d : {0.1, 0.2, 0.4}) {
    const DislocationConfig mu{{{Vec2(0.5 - d / 2, 0.5), Vec2(1, 0)}, {Vec2(0.5 + d / 2, 0.5), Vec2(-1, 0)}},
                               1e-3, 0.03};
    const SimResult r = minimize_energy(Domain2D::unit_square(), mu, c);
    CHECK(r.report.total > prev);
    prev = r.report.total;
  }
}

TEST_CASE("energy is quadratic in the charges") {
  const auto c = ElasticTensor::isotropic(1, 1);
  const DislocationConfig a{{{Vec2(0.4, 0.5), Vec2(1, 0)}, {Vec2(0.6, 0.5), Vec2(0, 1)}}, 1e-2, 0.05};
  DislocationConfig b = a;
  for (auto& d : b.dislocations) d.xi *= 2.0;
  const double ea = minimize_energy(Domain2D::unit_square(), a, c).report.total;
  const double eb = minimize_energy(Domain2D::unit_square(), b, c).report.total;
  CHECK(eb == doctest::Approx(4.0 * ea).epsilon(1e-9));
}

TEST_CASE("validate_config reports each violation") {
  const auto sq = Domain2D::unit_square();
  const BurgersSystem s = BurgersSystem::square();
  const DislocationConfig ok{{{Vec2(0.25, 0.5), Vec2(1, 0)}, {Vec2(0.75, 0.5), Vec2(0, 1)}}, 1e-3, 0.2};
  CHECK(validate_config(sq, ok, &s).empty());
  DislocationConfig close = ok;
  close.dislocations[1].x = Vec2(0.55, 0.5);
  const auto v = validate_config(sq, close, &s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::separation);
  DislocationConfig edge = ok;
  edge.dislocations[0].x = Vec2(0.1, 0.5);
  CHECK(validate_config(sq, edge, &s).at(0).kind == Violation::Kind::containment);
  DislocationConfig frac = ok;
  frac.dislocations[0].xi = Vec2(0.5, 0);
  CHECK(validate_config(sq, frac, &s).at(0).kind == Violation::Kind::charge);
  DislocationConfig scales = ok;
  scales.eps = 0.3;
  CHECK(validate_config(sq, scales).at(0).kind == Violation::Kind::scales);
  CHECK_THROWS_AS(minimize_energy(sq, close, ElasticTensor::toy()), ConfigError);
}

TEST_CASE("recovery lattice for e1 dx on the unit square") {
  const PsiTable table = build_psi_table(PsiForm::toy(), BurgersSystem::square(), 4.0);
  const auto target = LimitMeasure::uniform_rectangle(Vec2(1, 0), Vec2(0, 0), Vec2(1, 1));
  const RecoveryResult r = recovery_sequence(target, 100.0, Domain2D::unit_square(), table);
  CHECK(r.config.count() == 100);
  CHECK(r.r_eps.at(0) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(r.config.rho == doctest::Approx(0.05).epsilon(1e-12));
  DislocationConfig cfg = r.config;
  cfg.eps = 1e-3;
  CHECK(validate_config(Domain2D::unit_square(), cfg, &table.system()).empty());
  for (const auto& d : r.config.dislocations) CHECK((d.xi - Vec2(1, 0)).norm() == 0.0);

  // Non-lattice direction: mixed generators with phi frequencies.
  const auto diag = LimitMeasure::uniform_rectangle(Vec2(1, 1), Vec2(0, 0), Vec2(1, 1));
  const RecoveryResult rd = recovery_sequence(diag, 50.0, Domain2D::unit_square(), table);
  Vec2 sum = Vec2::Zero();
  for (const auto& d : rd.config.dislocations) sum += d.xi;
  CHECK(std::abs(sum.x() - sum.y()) <= 1.0);
  CHECK_THROWS_AS(recovery_sequence(target, 0.01, Domain2D::unit_square(), table), ConfigError);
}

TEST_CASE("log-log slope") {
  CHECK(loglog_slope({1, 2, 4}, {3, 12, 48}) == doctest::Approx(2.0));
  CHECK(std::isnan(loglog_slope({1}, {1})));
}
