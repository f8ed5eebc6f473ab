#include "disloc/gamma_functionals.hpp"

#include "disloc/csv.hpp"
#include "disloc/p1_elasticity.hpp"
#include "disloc/parallel.hpp"
#include "disloc/quadrature.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <ostream>

namespace disloc {

LimitStrain LimitStrain::zero() { return constant(Matrix2::Zero()); }

LimitStrain LimitStrain::constant(const Matrix2& m) {
  return {[m](const Vec2&) { return m; }, {}};
}

LimitStrain LimitStrain::field(std::function<Matrix2(const Vec2&)> fn, std::vector<Vec2> singular_points) {
  if (!fn) throw ConfigError("LimitStrain needs a callable");
  return {std::move(fn), std::move(singular_points)};
}

LimitStrain LimitStrain::piecewise_constant(std::shared_ptr<const TriMesh> mesh, std::vector<Matrix2> values) {
  if (!mesh || values.size() != mesh->n_triangles()) throw ConfigError("one value per triangle is required");
  auto vals = std::make_shared<const std::vector<Matrix2>>(std::move(values));
  return {[mesh, vals](const Vec2& x) {
            const PointLocation loc = mesh->locate(x, 1e-9);
            if (loc.tri < 0) throw ConfigError("point outside the strain mesh");
            return (*vals)[loc.tri];
          },
          {}};
}

CurlSource CurlSource::from(const LimitMeasure& mu) {
  CurlSource s;
  if (mu.is_dirac()) {
    s.diracs = mu.masses();
  } else if (!mu.regions().empty()) {
    s.density = [mu](const Vec2& x) { return mu.density_at(x); };
  }
  return s;
}

namespace {

quad::Triangle corners_of(const TriMesh& mesh, int t) {
  const auto c = mesh.corners(t);
  return {c[0], c[1], c[2]};
}

// P1 basis values at x inside triangle t.
std::array<double, 3> bary(const TriMesh& mesh, int t, const Vec2& x) {
  const auto c = mesh.corners(t);
  const Vec2 g = (c[0] + c[1] + c[2]) / 3.0;
  const auto& gr = mesh.grads(t);
  return {1.0 / 3.0 + gr[0].dot(x - g), 1.0 / 3.0 + gr[1].dot(x - g), 1.0 / 3.0 + gr[2].dot(x - g)};
}

// Calls cb(x, w, t) over the mesh, refining near the given singular points.
template <class Callback>
void integrate_mesh(const TriMesh& mesh, const std::vector<Vec2>& points, int rule_order, Callback&& cb) {
  const quad::MaskedOptions opt{rule_order, 24, 0.125, 2.0};
  std::vector<Vec2> near;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const int ti = static_cast<int>(t);
    const quad::Triangle tri = corners_of(mesh, ti);
    const double diam = mesh.diameter(ti);
    near.clear();
    for (const Vec2& p : points)
      if (quad::distance_to_triangle(p, tri) < opt.point_ratio * diam) near.push_back(p);
    quad::integrate_masked(tri, {}, near, opt, [&](const Vec2& x, double w) { cb(x, w, ti); });
  }
}

Vec2 j_grad(const Vec2& g) { return Vec2(g.y(), -g.x()); }

}  // namespace

double CurlSource::mass_bound(const Domain2D&, const TriMesh& mesh) const {
  double m = 0.0;
  for (const DiracMass& d : diracs) m += d.xi.norm();
  for (const Circle& c : circles) m += c.xi.norm();
  if (density) integrate_mesh(mesh, {}, 4, [&](const Vec2& x, double w, int) { m += w * density(x).norm(); });
  return m;
}

CurlResidual weak_curl_residual(const LimitStrain& beta, const CurlSource& mu, const Domain2D& omega,
                                const CurlOptions& opt) {
  const TriMesh mesh = TriMesh::build(omega, opt.h);
  std::vector<int> interior;
  const Eigen::SparseMatrix<double> lap = p1_dirichlet_laplacian(mesh, interior);
  const Eigen::Index m = lap.rows();
  Eigen::VectorXd r0 = Eigen::VectorXd::Zero(m), r1 = Eigen::VectorXd::Zero(m);
  double l2 = 0.0;

  integrate_mesh(mesh, beta.singular_points, opt.rule_order, [&](const Vec2& x, double w, int t) {
    const Matrix2 b = beta(x);
    l2 += w * b.squaredNorm();
    const auto& tri = mesh.triangles()[t];
    const auto& g = mesh.grads(t);
    std::array<double, 3> phi{};
    Vec2 dens = Vec2::Zero();
    if (mu.density) {
      phi = bary(mesh, t, x);
      dens = mu.density(x);
    }
    for (int a = 0; a < 3; ++a) {
      const int ia = interior[tri[a]];
      if (ia < 0) continue;
      const Vec2 jg = j_grad(g[a]);
      r0(ia) += w * (b(0, 0) * jg.x() + b(0, 1) * jg.y() - phi[a] * dens.x());
      r1(ia) += w * (b(1, 0) * jg.x() + b(1, 1) * jg.y() - phi[a] * dens.y());
    }
  });

  auto point_charge = [&](const Vec2& x, const Vec2& q) {
    const PointLocation loc = mesh.locate(x, 1e-9);
    if (loc.tri < 0) return;  // outside Omega: no interior test function sees it
    const auto& tri = mesh.triangles()[loc.tri];
    for (int a = 0; a < 3; ++a) {
      const int ia = interior[tri[a]];
      if (ia < 0) continue;
      r0(ia) -= loc.bary[a] * q.x();
      r1(ia) -= loc.bary[a] * q.y();
    }
  };
  for (const DiracMass& d : mu.diracs) point_charge(d.x, d.xi);
  for (const CurlSource::Circle& c : mu.circles)
    for (int k = 0; k < opt.circle_points; ++k) {
      const double th = kTwoPi * (k + 0.5) / opt.circle_points;
      point_charge(c.center + c.radius * Vec2(std::cos(th), std::sin(th)), c.xi / opt.circle_points);
    }

  CurlResidual out;
  if (m > 0) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(lap);
    if (ldlt.info() != Eigen::Success) throw SolverError("Laplace factorization failed");
    out.norm = std::sqrt(std::max(0.0, r0.dot(ldlt.solve(r0)) + r1.dot(ldlt.solve(r1))));
  }
  out.scale = std::sqrt(l2) + mu.mass_bound(omega, mesh);
  return out;
}

CurlResidual weak_curl_residual(const LimitStrain& beta, const LimitMeasure& mu, const Domain2D& omega,
                                const CurlOptions& opt) {
  return weak_curl_residual(beta, CurlSource::from(mu), omega, opt);
}

FValue FValue::infinite(std::string violated, double residual) {
  FValue f;
  f.finite = false;
  f.value = std::numeric_limits<double>::infinity();
  f.violated = std::move(violated);
  f.residual = residual;
  return f;
}

double elastic_energy(const LimitStrain& beta, const ElasticTensor& c, const Domain2D& omega,
                      const CurlOptions& opt) {
  const TriMesh mesh = TriMesh::build(omega, opt.h);
  double e = 0.0;
  integrate_mesh(mesh, beta.singular_points, opt.rule_order,
                 [&](const Vec2& x, double w, int) { e += w * c.energy_density(beta(x)); });
  return e;
}

double plastic_energy(const LimitMeasure& mu, const PsiTable& table) {
  double p = 0.0;
  for (const DensityRegion& r : mu.regions())
    if (r.xi.norm() > 0.0) p += phi(r.xi, table).value * polygon_area(r.polygon);
  for (const DiracMass& d : mu.masses())
    if (d.xi.norm() > 0.0) p += phi(d.xi, table).value;
  return p;
}

namespace {

FValue evaluate_gated(const LimitMeasure& mu, const LimitStrain& beta, const ElasticTensor& c,
                      const PsiTable& table, const Domain2D& omega, const CurlOptions& opt, bool dilute) {
  const CurlResidual res =
      dilute ? weak_curl_residual(beta, CurlSource{}, omega, opt) : weak_curl_residual(beta, mu, omega, opt);
  if (res.relative() > opt.rel_tol) return FValue::infinite(dilute ? "Curl beta = 0" : "Curl beta = mu", res.relative());
  if (!dilute && mu.is_dirac() && !mu.empty())
    return FValue::infinite("square-integrable strain with point curl", res.relative());
  FValue f;
  f.residual = res.relative();
  f.elastic = elastic_energy(beta, c, omega, opt);
  f.plastic = plastic_energy(mu, table);
  f.value = f.elastic + f.plastic;
  return f;
}

}  // namespace

FValue evaluate_F(const LimitMeasure& mu, const LimitStrain& beta, const ElasticTensor& c, const PsiTable& table,
                  const Domain2D& omega, const CurlOptions& opt) {
  return evaluate_gated(mu, beta, c, table, omega, opt, false);
}

FValue evaluate_F_dilute(const LimitMeasure& mu, const LimitStrain& beta, const ElasticTensor& c,
                         const PsiTable& table, const Domain2D& omega, const CurlOptions& opt) {
  return evaluate_gated(mu, beta, c, table, omega, opt, true);
}

double evaluate_F_super(const LimitStrain& beta_sym, const ElasticTensor& c, const Domain2D& omega,
                        const CurlOptions& opt) {
  const TriMesh mesh = TriMesh::build(omega, opt.h);
  double e = 0.0;
  integrate_mesh(mesh, beta_sym.singular_points, opt.rule_order, [&](const Vec2& x, double w, int) {
    const Matrix2 b = beta_sym(x);
    if ((b - b.transpose()).norm() > 1e-12 * std::max(1.0, b.norm()))
      throw ConfigError("evaluate_F_super needs a symmetric field");
    e += w * c.energy_density(b);
  });
  return e;
}

CompatibleStrain minimal_compatible_strain(const LimitMeasure& mu, const ElasticTensor& c, const Domain2D& omega,
                                           double h) {
  if (mu.is_dirac() && !mu.empty()) throw ConfigError("minimal compatible strain needs a density measure");
  auto mesh = std::make_shared<const TriMesh>(TriMesh::build(omega, h));
  const std::size_t nt = mesh->n_triangles();
  std::vector<Matrix2> beta(nt, Matrix2::Zero());

  if (!mu.empty()) {
    // Particular solution: rows J grad g_i with -Lap g_i = mu_i (Dirichlet).
    std::vector<int> interior;
    const Eigen::SparseMatrix<double> lap = p1_dirichlet_laplacian(*mesh, interior);
    Eigen::VectorXd b0 = Eigen::VectorXd::Zero(lap.rows()), b1 = b0;
    integrate_mesh(*mesh, {}, 4, [&](const Vec2& x, double w, int t) {
      const Vec2 d = mu.density_at(x);
      const auto phi = bary(*mesh, t, x);
      const auto& tri = mesh->triangles()[t];
      for (int a = 0; a < 3; ++a)
        if (interior[tri[a]] >= 0) {
          b0(interior[tri[a]]) += w * phi[a] * d.x();
          b1(interior[tri[a]]) += w * phi[a] * d.y();
        }
    });
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(lap);
    if (ldlt.info() != Eigen::Success) throw SolverError("Laplace factorization failed");
    const Eigen::VectorXd g0 = ldlt.solve(b0), g1 = ldlt.solve(b1);
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& tri = mesh->triangles()[t];
      const auto& gr = mesh->grads(static_cast<int>(t));
      Vec2 d0 = Vec2::Zero(), d1 = Vec2::Zero();
      for (int a = 0; a < 3; ++a) {
        const int ia = interior[tri[a]];
        if (ia < 0) continue;
        d0 += g0(ia) * gr[a];
        d1 += g1(ia) * gr[a];
      }
      beta[t].row(0) = j_grad(d0).transpose();
      beta[t].row(1) = j_grad(d1).transpose();
    }

    // Elastic corrector: minimize ∫ W(beta + grad w).
    const SymTensor cs(c);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * mesh->n_nodes()));
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& tri = mesh->triangles()[t];
      const auto& gr = mesh->grads(static_cast<int>(t));
      const Matrix2 s = cs.apply(beta[t]);
      const double area = mesh->area(static_cast<int>(t));
      for (int a = 0; a < 3; ++a) f.segment<2>(2 * tri[a]) += area * (s * gr[a]);
    }
    const NeumannSolve sol = p1_neumann_solve(*mesh, c, p1_stiffness(*mesh, c), std::move(f));
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& tri = mesh->triangles()[t];
      const auto& gr = mesh->grads(static_cast<int>(t));
      for (int a = 0; a < 3; ++a) beta[t] += outer(sol.u[tri[a]], gr[a]);
    }
  }

  CompatibleStrain out;
  for (std::size_t t = 0; t < nt; ++t) out.energy += mesh->area(static_cast<int>(t)) * c.energy_density(beta[t]);
  out.beta = LimitStrain::piecewise_constant(mesh, std::move(beta));
  return out;
}

CurlSource smeared_measure(const DislocationConfig& mu, double r) {
  if (!(r > 0.0)) throw ConfigError("smearing radius must be positive");
  CurlSource s;
  const auto ds = std::make_shared<const std::vector<Dislocation>>(mu.dislocations);
  const double area = kPi * r * r;
  s.density = [ds, r, area](const Vec2& x) {
    Vec2 v = Vec2::Zero();
    for (const Dislocation& d : *ds)
      if ((x - d.x).squaredNorm() < r * r) v += d.xi / area;
    return v;
  };
  return s;
}

CurlSource circle_measure(const DislocationConfig& mu, double r) {
  if (!(r > 0.0)) throw ConfigError("circle radius must be positive");
  CurlSource s;
  for (const Dislocation& d : mu.dislocations) s.circles.push_back({d.x, r, d.xi});
  return s;
}

std::vector<GapRow> gamma_gap(const LimitMeasure& mu, const LimitStrain& beta, const ElasticTensor& c,
                              Regime regime, const std::vector<double>& eps_list, const PsiTable& table,
                              const Domain2D& omega, const GapOptions& opt) {
  if (!mu.is_density()) throw ConfigError("gamma_gap needs a locally constant density target");

  double limit = 0.0, extra = 0.0;
  if (regime == Regime::dilute) {
    const FValue f = evaluate_F_dilute(mu, beta, c, table, omega, opt.curl);
    if (!f.finite) throw ConfigError("gamma_gap: strain violates " + f.violated);
    limit = f.value;
    extra = f.elastic;
  } else {
    const FValue f = evaluate_F(mu, beta, c, table, omega, opt.curl);
    if (!f.finite) throw ConfigError("gamma_gap: strain violates " + f.violated);
    const CompatibleStrain bmin = minimal_compatible_strain(mu, c, omega, opt.compat_h);
    const LimitStrain diff = LimitStrain::field(
        [&beta, b = bmin.beta](const Vec2& x) { return Matrix2(beta(x) - b(x)); }, beta.singular_points);
    extra = elastic_energy(diff, c, omega, opt.curl);
    if (regime == Regime::critical) {
      limit = f.value;
    } else {
      const LimitStrain bs =
          LimitStrain::field([&beta](const Vec2& x) { return sym(beta(x)); }, beta.singular_points);
      limit = evaluate_F_super(bs, c, omega, opt.curl);
    }
  }

  return parallel_map(eps_list.size(), opt.threads, [&](std::size_t i) {
    const double eps = eps_list[i];
    const double n = regime_count(regime, eps);
    const double l = std::abs(std::log(eps));
    double e = 0.0;
    std::size_t count = 0;
    if (!mu.empty()) {
      RecoveryResult rec = recovery_sequence(mu, n, omega, table);
      DislocationConfig cfg = rec.config;
      cfg.eps = eps;
      if (!opt.rho_recovery) cfg.rho = rho_gamma(eps, opt.gamma);
      SimParams sp = opt.sim;
      sp.direct_total = false;
      e = minimize_energy(omega, cfg, c, sp).report.total;
      count = cfg.count();
    }
    // beta_eps = minimizer + s (beta - beta_min); the added gradient part is
    // orthogonal to the minimizer, so its energy s^2 * extra adds directly.
    double discrete = 0.0;
    switch (regime) {
      case Regime::dilute: discrete = e / (n * l) + extra; break;
      case Regime::critical: discrete = (e + n * n * extra) / (l * l); break;
      case Regime::super: discrete = e / (n * n) + extra; break;
    }
    const double gap = discrete - limit;
    const double pct = limit != 0.0 ? 100.0 * gap / limit : std::numeric_limits<double>::quiet_NaN();
    return GapRow{eps, n, count, discrete, limit, gap, pct};
  });
}

void write_gap_csv(std::ostream& os, const std::vector<GapRow>& rows) {
  os << "eps,N_eps,discrete,limit,gap,gap_pct\n";
  for (const GapRow& r : rows) csv::row(os, {r.eps, r.n_eps, r.discrete, r.limit, r.gap, r.gap_pct});
}

}  // namespace disloc
