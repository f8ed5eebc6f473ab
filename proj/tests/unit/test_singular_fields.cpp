#include "disloc/quadrature.hpp"
#include "disloc/singular_fields.hpp"

#include <doctest.h>

#include <random>

using namespace disloc;

TEST_CASE("toy field values and circulation") {
  const auto f = SingularField::toy(Vec2(1, 0), Vec2::Zero());
  // rows are b_i t: b = e1 puts the tangent in the first row
  CHECK((f(Vec2(1, 0)) - outer(Vec2(1, 0), Vec2(0, 1)) / kTwoPi).norm() < 1e-15);
  CHECK((f(Vec2(0, 1)) + outer(Vec2(1, 0), Vec2(1, 0)) / kTwoPi).norm() < 1e-15);
  for (double r : {0.01, 0.3, 2.0}) CHECK((circulation(f, Vec2::Zero(), r, 64) - Vec2(1, 0)).norm() < 1e-12);
  CHECK_THROWS_AS(f(Vec2::Zero()), std::domain_error);
  CHECK_THROWS_AS(SingularField::toy(Vec2::Zero(), Vec2::Zero()), ConfigError);
}

TEST_CASE("k_hat and k_tilde") {
  const auto f = SingularField::k_hat(Vec2(0, 1), Vec2::Zero());
  CHECK((f(Vec2(1, 0)) - outer(Vec2(0, 1), Vec2(0, 1)) / kTwoPi).norm() < 1e-15);
  const Vec2 xi(0.3, -1.7);
  const auto g = SingularField::k_hat(xi, Vec2(0.2, 0.1));
  CHECK((circulation(g, Vec2(0.2, 0.1), 0.5, 256) - xi).norm() < 1e-10);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ur(1e-4, 10.0);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n)
    worst = std::max(worst, (circulation(g, Vec2(0.2, 0.1), ur(rng), 32) - xi).norm());
  CHECK(worst < 1e-9);

  const auto t = SingularField::k_tilde(xi, Vec2::Zero(), 0.2);
  CHECK(t(Vec2(0.3, 0)).norm() == 0.0);
  CHECK((t(Vec2(0.1, 0)) - outer(xi, Vec2(0, 0.1)) / (kTwoPi * 0.04)).norm() < 1e-14);
  CHECK_NOTHROW(t(Vec2::Zero()));
  CHECK_THROWS_AS(SingularField::k_tilde(xi, Vec2::Zero(), 0.0), ConfigError);
}

TEST_CASE("circulation additivity and gradients") {
  const std::vector<SingularField> fs = {SingularField::k_hat(Vec2(1, 0), Vec2(-0.2, 0)),
                                         SingularField::k_hat(Vec2(0.5, 2), Vec2(0.3, 0.1))};
  const Vec2 both = circulation(fs, Vec2::Zero(), 1.0, 256);
  CHECK((both - Vec2(1.5, 2)).norm() < 1e-10);
  const Vec2 one = circulation(fs, Vec2(-0.2, 0), 0.2, 256);
  CHECK((one - Vec2(1, 0)).norm() < 1e-10);
  auto grad = [](const Vec2& x) {
    Matrix2 g;
    g << std::cos(x.x()) * x.y(), std::sin(x.x()), 2 * x.x() * x.y(), x.x() * x.x();
    return g;  // gradient of (sin(x) y, x^2 y)
  };
  CHECK(circulation(grad, Vec2(0.4, -0.3), 0.7, 64).norm() < 1e-12);
  const std::vector<Vec2> pts = {Vec2(1, 0)};
  CHECK_THROWS_AS(circulation(grad, Vec2::Zero(), 1.0, 64, pts), ConfigError);
  CHECK_THROWS_AS(circulation(grad, Vec2::Zero(), 1.0, 8), ConfigError);
}

TEST_CASE("k_tilde weak curl is the uniform density inside the support") {
  // <curl beta_(i), phi> = ∫ beta_(i) . (d2 phi, -d1 phi) for a bump phi in B_r
  const double r = 0.5;
  const Vec2 xi(1.0, -2.0);
  const auto t = SingularField::k_tilde(xi, Vec2::Zero(), r);
  const Vec2 c(0.1, -0.05);
  const double s = 0.05;
  auto phi = [&](const Vec2& x) { return std::exp(-(x - c).squaredNorm() / (2 * s * s)); };
  Vec2 pairing = Vec2::Zero();
  double mass = 0.0;
  const int n = 40;
  const double h = 2.0 * r / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 p0(-r + i * h, -r + j * h);
      const quad::Triangle t1 = {p0, p0 + Vec2(h, 0), p0 + Vec2(h, h)};
      const quad::Triangle t2 = {p0, p0 + Vec2(h, h), p0 + Vec2(0, h)};
      for (const auto& tri : {t1, t2})
        quad::integrate_masked(tri, {}, {}, quad::MaskedOptions{6, 0, 0.125, 2.0}, [&](const Vec2& x, double w) {
          const double p = phi(x);
          const Vec2 gp = -(x - c) / (s * s) * p;
          pairing += w * t(x) * Vec2(gp.y(), -gp.x());
          mass += w * p;
        });
    }
  const Vec2 expected = xi / (kPi * r * r) * mass;
  CHECK((pairing - expected).norm() < 1e-6 * expected.norm());
}

TEST_CASE("isotropic whole-plane field") {
  const auto c = ElasticTensor::isotropic(1.0, 1.0);
  const Vec2 xi(0.6, 0.8);
  const auto f = SingularField::beta_r2_isotropic(c, xi);
  CHECK((circulation(f, Vec2::Zero(), 1.0, 256) - xi).norm() < 1e-10);
  CHECK((circulation(f, Vec2::Zero(), 0.01, 256) - xi).norm() < 1e-10);
  CHECK_THROWS_AS(SingularField::beta_r2_isotropic(ElasticTensor::toy(), xi), ConfigError);

  // homogeneity of degree -1: r beta(r, theta) does not depend on r
  for (double th : {0.1, 1.3, 4.0}) {
    const Vec2 e = unit_direction(th);
    CHECK((0.01 * f(0.01 * e) - 7.0 * f(7.0 * e)).norm() < 1e-13);
  }

  // Div C beta by central differences on a ring of points; the residual
  // shrinks at least linearly with the step.
  auto div_residual = [&](double h) {
    double worst = 0.0;
    for (int k = 0; k < 16; ++k) {
      const Vec2 x = 0.5 * unit_direction(0.3 + kTwoPi * k / 16);
      Vec2 d = Vec2::Zero();
      for (int a = 0; a < 2; ++a) {
        Vec2 e = Vec2::Zero();
        e(a) = h;
        const Matrix2 dc = (c.apply(f(x + e)) - c.apply(f(x - e))) / (2 * h);
        d += dc.col(a);
      }
      worst = std::max(worst, d.norm());
    }
    return worst;
  };
  const double r1 = div_residual(1e-2), r2 = div_residual(5e-3);
  CHECK(r1 < 1e-2);
  MESSAGE("divergence residual order " << std::log2(r1 / r2));
  CHECK(std::log2(r1 / r2) >= 1.0);

  // psi from the profile matches mu / (4 pi (1 - nu)) |xi|^2 for an edge dislocation
  const double nu = c.poisson();
  const double expected = c.mu() / (4.0 * kPi * (1.0 - nu));
  const auto prof = f.profile();
  CHECK(psi_from_profile(c, prof) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(psi_from_profile(c, SingularField::beta_r2_isotropic(c, 2.0 * xi).profile()) ==
        doctest::Approx(4.0 * expected).epsilon(1e-10));
  // a profile field reproduces the closed form between samples
  const auto pf = SingularField::from_profile(prof);
  double worst = 0.0;
  for (double th = 0.01; th < kTwoPi; th += 0.37) worst = std::max(worst, (pf(unit_direction(th)) - f(unit_direction(th))).norm());
  CHECK(worst < 1e-5);
}

TEST_CASE("psi_from_profile toy and zero") {
  const auto toy = ElasticTensor::toy();
  const auto prof = SingularField::toy(Vec2(0, 1), Vec2::Zero()).profile(64);
  CHECK(psi_from_profile(toy, prof) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-14));
  const AngularProfile zero(std::vector<Matrix2>(64, Matrix2::Zero()));
  CHECK(psi_from_profile(toy, zero) == 0.0);
}

TEST_CASE("made_admissible restores curl-free structure and circulation") {
  const auto c = ElasticTensor::isotropic(1.0, 1.0);
  const Vec2 xi(1, 0);
  const auto exact = SingularField::beta_r2_isotropic(c, xi).profile(128);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 1e-3);
  std::vector<Matrix2> noisy = exact.samples();
  for (auto& m : noisy) m += (Matrix2() << nd(rng), nd(rng), nd(rng), nd(rng)).finished();
  const auto fixed = AngularProfile(noisy).made_admissible(xi);
  CHECK((fixed.circulation() - xi).norm() < 1e-14);
  // radial columns constant => zero circulation on loops avoiding the origin
  const auto f = SingularField::from_profile(fixed);
  CHECK(circulation(f, Vec2(2.0, 0.5), 0.7, 512).norm() < 1e-6);
  CHECK((circulation(f, Vec2(0.1, 0.0), 0.7, 512) - xi).norm() < 1e-6);
}

TEST_CASE("toy energy on an annulus and the min-prob lower bound") {
  const auto f = SingularField::toy(Vec2(1, 0), Vec2::Zero());
  const double eps = 1e-3;
  double e = 0.0;
  quad::integrate_annulus(Vec2::Zero(), eps, 1.0, 0.25, 16, 4, [&](const Vec2& x, double w) { e += w * f(x).squaredNorm(); });
  CHECK(e / std::abs(std::log(eps)) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-6));

  const auto c = ElasticTensor::isotropic(1.0, 1.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const std::vector<SingularField> fields = {f, SingularField::k_hat(Vec2(0.3, 0.4), Vec2::Zero()),
                                             SingularField::beta_r2_isotropic(c, Vec2(0.3, -1.0))};
  for (const auto& g : fields)
    for (int n = 0; n < 5; ++n) {
      Matrix2 a;
      a << u(rng), u(rng), u(rng), u(rng);
      double val = 0.0;
      quad::integrate_annulus(Vec2::Zero(), 0.1, 0.9, 0.2, 32, 4, [&](const Vec2& x, double w) { val += w * (g(x) - a).squaredNorm(); });
      CHECK(val >= g.charge().squaredNorm() * std::log(9.0) / kTwoPi - 1e-9);
    }
}
