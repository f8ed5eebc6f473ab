#include "disloc/dislocation_sim.hpp"

#include "disloc/p1_elasticity.hpp"
#include "disloc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace disloc {

double DislocationConfig::total_variation() const {
  double s = 0.0;
  for (const Dislocation& d : dislocations) s += d.xi.norm();
  return s;
}

double rho_gamma(double eps, double gamma) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  return std::pow(eps, gamma);
}

double rho_recovery(double lambda_total, double n_eps) {
  if (!(lambda_total > 0.0 && n_eps > 0.0)) throw ConfigError("rho_recovery needs Lambda > 0 and N > 0");
  return 1.0 / (2.0 * std::sqrt(lambda_total * n_eps));
}

namespace {

bool in_span(const Vec2& xi, const BurgersSystem& s) {
  if (xi.norm() <= 1e-12 * s.max_norm()) return true;
  const double radius = std::max(xi.norm(), s.max_norm()) * (1.0 + 1e-9);
  for (const LatticeVector& lv : s.lattice_ball(radius))
    if ((lv.value - xi).norm() <= 1e-9 * s.max_norm()) return true;
  return false;
}

}  // namespace

std::vector<Violation> validate_config(const Domain2D& omega, const DislocationConfig& mu,
                                       const BurgersSystem* system) {
  std::vector<Violation> out;
  auto add = [&](Violation::Kind k, int i, int j, const std::string& msg) { out.push_back({k, i, j, msg}); };
  if (!(mu.eps > 0.0) || !(mu.rho > mu.eps) || !std::isfinite(mu.rho)) {
    std::ostringstream m;
    m << "need 0 < eps < rho, got eps = " << mu.eps << ", rho = " << mu.rho;
    add(Violation::Kind::scales, -1, -1, m.str());
  }
  const double tol = 1e-12;
  const auto& ds = mu.dislocations;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Vec2& x = ds[i].x;
    if (!omega.contains(x) || omega.boundary_distance(x) < mu.rho * (1.0 - tol)) {
      std::ostringstream m;
      m << "B_rho(x_" << i << ") is not contained in the domain";
      add(Violation::Kind::containment, static_cast<int>(i), -1, m.str());
    }
    if (system && !in_span(ds[i].xi, *system)) {
      std::ostringstream m;
      m << "charge of dislocation " << i << " is not in the Burgers lattice";
      add(Violation::Kind::charge, static_cast<int>(i), -1, m.str());
    }
  }
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t j = i + 1; j < ds.size(); ++j)
      if ((ds[i].x - ds[j].x).norm() < 2.0 * mu.rho * (1.0 - tol)) {
        std::ostringstream m;
        m << "dislocations " << i << " and " << j << " are closer than 2 rho";
        add(Violation::Kind::separation, static_cast<int>(i), static_cast<int>(j), m.str());
      }
  return out;
}

// ---------------------------------------------------------------- StrainField

StrainField::StrainField(std::shared_ptr<const TriMesh> mesh, ElasticTensor c, std::vector<SingularField> singular,
                         std::vector<Vec2> u, double eps)
    : mesh_(std::move(mesh)), c_(std::move(c)), singular_(std::move(singular)), u_(std::move(u)), eps_(eps) {
  if (!mesh_) throw ConfigError("StrainField needs a mesh");
  if (u_.size() != mesh_->n_nodes()) throw ConfigError("nodal displacement size does not match the mesh");
}

std::vector<Vec2> StrainField::centers() const {
  std::vector<Vec2> out;
  out.reserve(singular_.size());
  for (const SingularField& s : singular_) out.push_back(s.center());
  return out;
}

bool StrainField::in_core(const Vec2& x) const {
  for (const SingularField& s : singular_)
    if ((x - s.center()).squaredNorm() < eps_ * eps_) return true;
  return false;
}

Matrix2 StrainField::singular_part(const Vec2& x) const {
  Matrix2 m = Matrix2::Zero();
  for (const SingularField& s : singular_) m += s.eval(x);
  return m;
}

Matrix2 StrainField::corrector_gradient(int tri) const {
  const auto& t = mesh_->triangles()[tri];
  const auto& g = mesh_->grads(tri);
  Matrix2 m = Matrix2::Zero();
  for (int a = 0; a < 3; ++a) m += outer(u_[t[a]], g[a]);
  return m;
}

Matrix2 StrainField::corrector_gradient(const Vec2& x) const {
  const PointLocation loc = mesh_->locate(x, 1e-9);
  if (loc.tri < 0) throw ConfigError("point outside the mesh");
  return corrector_gradient(loc.tri);
}

Matrix2 StrainField::operator()(const Vec2& x) const {
  if (in_core(x)) return Matrix2::Zero();
  return singular_part(x) + corrector_gradient(x) - skew_offset_;
}

Vec2 StrainField::circulation(const Vec2& center, double radius, int n_quad) const {
  for (const SingularField& s : singular_)
    if (std::abs((s.center() - center).norm() - radius) <= eps_)
      throw ConfigError("circulation circle crosses a dislocation core");
  const std::vector<Vec2> cs = centers();
  const Vec2 sing =
      disloc::circulation([this](const Vec2& x) { return Matrix2(singular_part(x) - skew_offset_); }, center, radius,
                          n_quad, cs);
  // Line integral of grad u along the inscribed polygon through the same
  // nodes: a telescoping sum of interpolated displacements.
  auto u_at = [&](const Vec2& x) {
    const PointLocation loc = mesh_->locate(x, 1e-9);
    if (loc.tri < 0) throw ConfigError("circulation circle leaves the domain");
    const auto& t = mesh_->triangles()[loc.tri];
    return Vec2(loc.bary[0] * u_[t[0]] + loc.bary[1] * u_[t[1]] + loc.bary[2] * u_[t[2]]);
  };
  Vec2 corr = Vec2::Zero();
  Vec2 first = Vec2::Zero(), prev = Vec2::Zero();
  for (int k = 0; k < n_quad; ++k) {
    const double th = kTwoPi * k / n_quad;
    const Vec2 u = u_at(center + radius * Vec2(std::cos(th), std::sin(th)));
    if (k == 0)
      first = u;
    else
      corr += u - prev;
    prev = u;
  }
  corr += first - prev;
  return sing + corr;
}

// ---------------------------------------------------------------- regimes

std::string to_string(Regime r) {
  switch (r) {
    case Regime::dilute: return "dilute";
    case Regime::critical: return "critical";
    case Regime::super: return "super";
  }
  return "dilute";
}

Regime regime_from_string(const std::string& s) {
  if (s == "dilute") return Regime::dilute;
  if (s == "critical") return Regime::critical;
  if (s == "super") return Regime::super;
  throw ConfigError("unknown regime '" + s + "' (expected dilute, critical or super)");
}

double regime_count(Regime r, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  const double l = std::abs(std::log(eps));
  switch (r) {
    case Regime::dilute: return std::sqrt(l);
    case Regime::critical: return l;
    case Regime::super: return l * l;
  }
  return l;
}

double rescaled_energy(const EnergyReport& report, Regime regime, double n_eps, double eps) {
  const double l = std::abs(std::log(eps));
  switch (regime) {
    case Regime::dilute: return report.total / (n_eps * l);
    case Regime::critical: return report.total / (l * l);
    case Regime::super: return report.total / (n_eps * n_eps);
  }
  return report.total;
}

// ---------------------------------------------------------------- minimization

namespace {

// Profiles of the whole-plane field for unit charges e1, e2, per tensor.
std::pair<std::shared_ptr<const AngularProfile>, std::shared_ptr<const AngularProfile>> unit_profiles(
    const ElasticTensor& c) {
  static std::mutex m;
  static std::map<std::array<double, 16>, std::pair<std::shared_ptr<const AngularProfile>,
                                                    std::shared_ptr<const AngularProfile>>>
      cache;
  {
    std::lock_guard lock(m);
    auto it = cache.find(c.entries());
    if (it != cache.end()) return it->second;
  }
  auto p1 = std::make_shared<const AngularProfile>(profile_from_cell(c, Vec2(1, 0)));
  auto p2 = std::make_shared<const AngularProfile>(profile_from_cell(c, Vec2(0, 1)));
  std::lock_guard lock(m);
  return cache.emplace(c.entries(), std::make_pair(p1, p2)).first->second;
}

SingularField make_singular(const ElasticTensor& c, const Dislocation& d) {
  switch (c.mode()) {
    case TensorMode::toy:
      return SingularField::k_hat(d.xi, d.x);
    case TensorMode::isotropic:
      return SingularField::beta_r2_isotropic(c, d.xi, d.x);
    case TensorMode::general: {
      const auto [p1, p2] = unit_profiles(c);
      std::vector<Matrix2> s(p1->size());
      for (std::size_t j = 0; j < s.size(); ++j) s[j] = d.xi.x() * p1->samples()[j] + d.xi.y() * p2->samples()[j];
      return SingularField::from_profile(AngularProfile(std::move(s)), d.x);
    }
  }
  return SingularField::k_hat(d.xi, d.x);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

struct Accumulated {
  double self = 0.0, inter = 0.0;
  std::vector<double> per_self;
  Matrix2 skew_integral = Matrix2::Zero();
  double area = 0.0;
};

// Energy of beta (without the skew offset, which W does not see for
// coercive tensors) plus the skew integral and area of Omega_eps.
Accumulated accumulate(const StrainField& f, double rho, const SimParams& p, bool with_offset) {
  Accumulated acc;
  const ElasticTensor& c = f.tensor();
  const Matrix2 a = with_offset ? f.skew_offset() : Matrix2::Zero();
  for (const SingularField& s : f.singular()) {
    double e = 0.0;
    quad::integrate_annulus(s.center(), f.eps(), rho, p.self_ds, p.self_theta_panels, p.self_gauss,
                            [&](const Vec2& x, double w) {
                              const Matrix2 b = f.singular_part(x) + f.corrector_gradient(x);
                              e += w * c.energy_density(b - a);
                              acc.skew_integral += w * skew(b);
                              acc.area += w;
                            });
    acc.per_self.push_back(e);
    acc.self += e;
  }
  f.integrate(p, rho, [&](const Vec2& x, double w, int tri) {
    const Matrix2 b = f.singular_part(x) + f.corrector_gradient(tri);
    acc.inter += w * c.energy_density(b - a);
    acc.skew_integral += w * skew(b);
    acc.area += w;
  });
  return acc;
}

void fill_rescaled(EnergyReport& r) {
  r.rescaled_dilute = rescaled_energy(r, Regime::dilute, r.n_eps, r.eps);
  r.rescaled_critical = rescaled_energy(r, Regime::critical, r.n_eps, r.eps);
  r.rescaled_super = rescaled_energy(r, Regime::super, r.n_eps, r.eps);
}

}  // namespace

EnergyReport split_energy(const StrainField& field, const DislocationConfig& mu, double rho, const SimParams& p) {
  if (!(rho > field.eps())) throw ConfigError("split_energy needs rho > eps");
  const Accumulated acc = accumulate(field, rho, p, true);
  EnergyReport r;
  r.self = acc.self;
  r.inter = acc.inter;
  r.total = acc.self + acc.inter;
  r.per_dislocation_self = acc.per_self;
  r.eps = field.eps();
  r.rho = rho;
  r.n_eps = static_cast<double>(mu.count());
  if (p.direct_total) {
    double e = 0.0;
    const Matrix2 a = field.skew_offset();
    field.integrate(p, field.eps(), [&](const Vec2& x, double w, int tri) {
      e += w * field.tensor().energy_density(field.singular_part(x) + field.corrector_gradient(tri) - a);
    });
    r.direct_total = e;
  }
  if (r.n_eps > 0.0 && r.eps < 1.0) fill_rescaled(r);
  return r;
}

SimResult minimize_energy(const Domain2D& omega, const DislocationConfig& mu, const ElasticTensor& c,
                          const SimParams& p) {
  const auto violations = validate_config(omega, mu);
  if (!violations.empty()) {
    std::string msg = "invalid dislocation configuration:";
    for (std::size_t i = 0; i < std::min<std::size_t>(violations.size(), 4); ++i) msg += " " + violations[i].message + ";";
    if (violations.size() > 4) msg += " and " + std::to_string(violations.size() - 4) + " more";
    throw ConfigError(msg);
  }
  auto mesh = std::make_shared<const TriMesh>(TriMesh::build(omega, p.h));
  const std::size_t n = mesh->n_nodes();
  const SymTensor cs(c);

  std::vector<SingularField> singular;
  for (const Dislocation& d : mu.dislocations) singular.push_back(make_singular(c, d));
  auto sing_at = [&](const Vec2& x) {
    Matrix2 m = Matrix2::Zero();
    for (const SingularField& s : singular) m += s.eval(x);
    return m;
  };

  const std::vector<Eigen::Triplet<double>> trip = p1_stiffness(*mesh, c);

  // Load f_a = ∫_{Omega_eps} C S : grad phi_a, moved to the boundaries since
  // the singular fields are in equilibrium.
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * n));
  const quad::Rule1D& eg = quad::gauss01(p.edge_gauss);
  for (const auto& e : mesh->boundary_edges()) {
    const Vec2 xa = mesh->nodes()[e[0]], xb = mesh->nodes()[e[1]];
    const double len = (xb - xa).norm();
    const Vec2 nu = -rot90((xb - xa) / len);
    double dmin = std::numeric_limits<double>::infinity();
    for (const Dislocation& d : mu.dislocations) dmin = std::min(dmin, point_segment_distance(d.x, xa, xb));
    const int pieces = std::clamp(static_cast<int>(std::ceil(4.0 * len / dmin)), 1, 512);
    for (int k = 0; k < pieces; ++k)
      for (std::size_t q = 0; q < eg.x.size(); ++q) {
        const double s = (k + eg.x[q]) / pieces;
        const double w = eg.w[q] * len / pieces;
        const Vec2 tr = cs.apply(sing_at(xa + s * (xb - xa))) * nu;
        f.segment<2>(2 * e[0]) += w * (1.0 - s) * tr;
        f.segment<2>(2 * e[1]) += w * s * tr;
      }
  }
  const int nc = p.core_circle_points;
  for (const Dislocation& d : mu.dislocations)
    for (int k = 0; k < nc; ++k) {
      const double th = kTwoPi * k / nc;
      const Vec2 er(std::cos(th), std::sin(th));
      const Vec2 x = d.x + mu.eps * er;
      const PointLocation loc = mesh->locate(x, p.h);
      if (loc.tri < 0) throw SolverError("core circle point not located in the mesh");
      const Vec2 tr = cs.apply(sing_at(x)) * (-er);
      const double w = kTwoPi * mu.eps / nc;
      const auto& tri = mesh->triangles()[loc.tri];
      for (int a = 0; a < 3; ++a) f.segment<2>(2 * tri[a]) += w * loc.bary[a] * tr;
    }

  NeumannSolve sol = p1_neumann_solve(*mesh, c, trip, std::move(f));
  const double residual = sol.residual;
  std::vector<Vec2> nodal = std::move(sol.u);

  StrainField field(mesh, c, std::move(singular), std::move(nodal), mu.eps);
  const double rho = mu.rho;
  if (c.coercive()) {
    // The skew average is energy free; subtract it so beta has zero mean rotation.
    SimParams q = p;
    q.direct_total = false;
    const Accumulated acc = accumulate(field, rho, q, false);
    field.set_skew_offset(acc.skew_integral / acc.area);
  }
  EnergyReport report = split_energy(field, mu, rho, p);
  return SimResult{std::move(field), std::move(report), residual};
}

// ---------------------------------------------------------------- recovery

namespace {

bool closed_contains(const std::vector<Vec2>& poly, const Vec2& x, double tol) {
  return point_in_polygon(x, poly) || polygon_boundary_distance(x, poly) <= tol;
}

}  // namespace

RecoveryResult recovery_sequence(const LimitMeasure& target, double n_eps, const Domain2D& omega,
                                 const PsiTable& table) {
  if (!target.is_density()) throw ConfigError("recovery lattice needs a locally constant density target");
  if (!(n_eps > 0.0)) throw ConfigError("recovery lattice needs N > 0");
  RecoveryResult out;
  double rmin = std::numeric_limits<double>::infinity();
  for (const DensityRegion& reg : target.regions()) {
    if (reg.xi.norm() == 0.0) {
      out.r_eps.push_back(0.0);
      out.counts.push_back(0);
      continue;
    }
    const PhiCertificate cert = phi(reg.xi, table);
    double lam = 0.0;
    for (const PhiTerm& t : cert.terms) lam += t.lambda;
    const double r = rho_recovery(lam, n_eps);
    const double side = 2.0 * r;
    const double tol = 1e-9 * side;
    out.lambda_total = std::max(out.lambda_total, lam);
    out.r_eps.push_back(r);

    Vec2 lo = reg.polygon.front(), hi = lo;
    for (const Vec2& v : reg.polygon) lo = lo.cwiseMin(v), hi = hi.cwiseMax(v);
    std::vector<Vec2> centers;
    const long i0 = static_cast<long>(std::floor(lo.x() / side)), i1 = static_cast<long>(std::ceil(hi.x() / side));
    const long j0 = static_cast<long>(std::floor(lo.y() / side)), j1 = static_cast<long>(std::ceil(hi.y() / side));
    for (long j = j0; j < j1; ++j)
      for (long i = i0; i < i1; ++i) {
        const Vec2 c((i + 0.5) * side, (j + 0.5) * side);
        bool ok = point_in_polygon(c, reg.polygon);
        for (int sx = -1; ok && sx <= 1; ++sx)
          for (int sy = -1; ok && sy <= 1; ++sy)
            if (!closed_contains(reg.polygon, c + r * Vec2(sx, sy), tol)) ok = false;
        if (ok) ok = omega.contains(c) && omega.boundary_distance(c) >= r - tol;
        if (ok) centers.push_back(c);
      }

    // Largest-remainder quotas, then a low-discrepancy interleaving.
    const std::size_t m = centers.size();
    const std::size_t nk = cert.terms.size();
    std::vector<std::size_t> quota(nk, 0);
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t given = 0;
    for (std::size_t k = 0; k < nk; ++k) {
      const double exact = static_cast<double>(m) * cert.terms[k].lambda / lam;
      quota[k] = static_cast<std::size_t>(std::floor(exact));
      given += quota[k];
      rem.emplace_back(exact - quota[k], k);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t q = 0; given < m && q < rem.size(); ++q, ++given) ++quota[rem[q].second];
    std::vector<std::size_t> used(nk, 0);
    for (std::size_t s = 0; s < m; ++s) {
      std::size_t best = nk;
      double lag = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < nk; ++k) {
        if (used[k] >= quota[k]) continue;
        const double v = static_cast<double>(quota[k]) * static_cast<double>(s + 1) / static_cast<double>(m) -
                         static_cast<double>(used[k]);
        if (v > lag) lag = v, best = k;
      }
      ++used[best];
      out.config.dislocations.push_back({centers[s], cert.terms[best].vector});
    }
    out.counts.push_back(m);
    if (m > 0) rmin = std::min(rmin, r);
  }
  if (out.config.dislocations.empty())
    throw ConfigError("N is too small: no square of the recovery lattice fits in the target regions");
  out.config.rho = rmin;
  out.config.eps = 0.0;
  return out;
}

// ---------------------------------------------------------------- sweep

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("loglog_slope: size mismatch");
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw ConfigError("loglog_slope needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

SweepResult scaling_sweep(Regime regime, const ElasticTensor& c, const Domain2D& omega,
                          const std::vector<double>& eps_list, const LimitMeasure& target, const PsiTable& table,
                          const SweepOptions& opt) {
  SweepResult out;
  out.regime = regime;
  out.rows = parallel_map(eps_list.size(), opt.threads, [&](std::size_t i) {
    const double eps = eps_list[i];
    const double n_eps = regime_count(regime, eps);
    RecoveryResult rec = recovery_sequence(target, n_eps, omega, table);
    DislocationConfig cfg = rec.config;
    cfg.eps = eps;
    if (!opt.rho_recovery) cfg.rho = rho_gamma(eps, opt.gamma);
    const SimResult sim = minimize_energy(omega, cfg, c, opt.sim);
    return SweepRow{eps, n_eps, cfg.count(), cfg.rho, sim.report.self, sim.report.inter, sim.report.total};
  });
  std::vector<double> nlog, n, m, es, ei;
  for (const SweepRow& r : out.rows) {
    nlog.push_back(r.n_eps * std::abs(std::log(r.eps)));
    n.push_back(r.n_eps);
    m.push_back(static_cast<double>(r.count));
    es.push_back(r.e_self);
    ei.push_back(r.e_inter);
  }
  out.exponent_self_vs_nlog = loglog_slope(nlog, es);
  out.exponent_inter_vs_n = loglog_slope(n, ei);
  out.exponent_inter_vs_count = loglog_slope(m, ei);
  return out;
}

}  // namespace disloc
