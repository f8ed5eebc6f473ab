#include "disloc/relaxation_phi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace disloc {

namespace {

PsiForm polarize(double p1, double p2, double p12, std::string source) {
  PsiForm f;
  f.q << p1, 0.5 * (p12 - p1 - p2), 0.5 * (p12 - p1 - p2), p2;
  f.source = std::move(source);
  return f;
}

}  // namespace

PsiForm PsiForm::toy() {
  PsiForm f;
  f.q = Matrix2::Identity() / kTwoPi;
  f.source = "toy-analytic";
  return f;
}

PsiForm PsiForm::from_profile(const ElasticTensor& c) {
  auto psi = [&](const Vec2& xi) { return psi_from_profile(c, SingularField::beta_r2_isotropic(c, xi).profile()); };
  return polarize(psi(Vec2(1, 0)), psi(Vec2(0, 1)), psi(Vec2(1, 1)), "profile-quadrature");
}

PsiForm PsiForm::from_cell(const ElasticTensor& c, const CellMeshParams& p) {
  auto psi = [&](const Vec2& xi) { return psi_limit(c, xi, p).value; };
  return polarize(psi(Vec2(1, 0)), psi(Vec2(0, 1)), psi(Vec2(1, 1)), "cell-extrapolated");
}

PsiForm PsiForm::for_tensor(const ElasticTensor& c, const CellMeshParams& p) {
  switch (c.mode()) {
    case TensorMode::toy:
      return toy();
    case TensorMode::isotropic:
      return from_profile(c);
    case TensorMode::general:
      return from_cell(c, p);
  }
  return toy();
}

PsiTable::PsiTable(PsiForm form, BurgersSystem system, double radius)
    : form_(std::move(form)), system_(std::move(system)), radius_(radius) {
  for (LatticeVector& lv : system_.lattice_ball(radius)) {
    const double v = form_(lv.value);
    if (!(v > 0.0)) throw ConfigError("psi must be positive on nonzero lattice vectors");
    entries_.push_back({std::move(lv), v});
  }
}

double PsiTable::min_efficiency() const {
  double m = std::numeric_limits<double>::infinity();
  for (const PsiEntry& e : entries_) m = std::min(m, e.psi / e.xi.value.norm());
  return m;
}

PsiTable build_psi_table(const PsiForm& form, const BurgersSystem& system, double radius) {
  PsiTable t(form, system, radius);
  double eff = 0.0;
  for (const Vec2& b : system.vectors()) eff = std::max(eff, form(b) / b.norm());
  const double inner = radius - system.max_norm();
  for (const PsiEntry& e : t.entries()) {
    const double n = e.xi.value.norm();
    if (n <= inner) continue;
    if (e.psi / n < 2.0 * eff) {
      std::ostringstream msg;
      msg << "psi table radius " << radius << " insufficient: boundary vector (" << e.xi.value.x() << ", "
          << e.xi.value.y() << ") has psi/|xi| = " << e.psi / n << " < 2 * " << eff;
      throw ConfigError(msg.str());
    }
  }
  return t;
}

PsiTable build_psi_table(const ElasticTensor& c, const BurgersSystem& system, double radius) {
  return build_psi_table(PsiForm::for_tensor(c), system, radius);
}

namespace {

struct Column {
  Vec2 v;
  double cost;
  std::vector<int> coeffs;
};

PhiCertificate solve_two_column_lp(const Vec2& xi, const std::vector<Column>& cols) {
  PhiCertificate cert;
  cert.xi = xi;
  if (xi.norm() == 0.0) return cert;

  const double inf = std::numeric_limits<double>::infinity();
  double best = inf;
  std::array<double, 4> best_key{};
  std::size_t bk = 0, bl = 0;
  double bla = 0.0, blb = 0.0;
  bool found = false;
  for (std::size_t k = 0; k < cols.size(); ++k)
    for (std::size_t l = k + 1; l < cols.size(); ++l) {
      const Vec2& a = cols[k].v;
      const Vec2& b = cols[l].v;
      const double det = a.x() * b.y() - a.y() * b.x();
      if (std::abs(det) <= 1e-12 * a.norm() * b.norm()) continue;
      const double la = (xi.x() * b.y() - xi.y() * b.x()) / det;
      const double lb = (a.x() * xi.y() - a.y() * xi.x()) / det;
      if (la < -1e-12 || lb < -1e-12) continue;
      const double val = std::max(la, 0.0) * cols[k].cost + std::max(lb, 0.0) * cols[l].cost;
      const std::array<double, 4> key = {std::abs(a.x()), std::abs(a.y()), std::abs(b.x()), std::abs(b.y())};
      const double tol = 1e-12 * std::max(1.0, std::abs(val));
      if (!found || val < best - tol || (std::abs(val - best) <= tol && key < best_key)) {
        best = found ? std::min(best, val) : val;
        best_key = key;
        bk = k;
        bl = l;
        bla = std::max(la, 0.0);
        blb = std::max(lb, 0.0);
        found = true;
      }
    }
  if (!found) throw SolverError("phi: no feasible decomposition; generators do not span R^2");

  const Column& ca = cols[bk];
  const Column& cb = cols[bl];
  cert.value = bla * ca.cost + blb * cb.cost;
  if (bla > 1e-15) cert.terms.push_back({ca.v, ca.coeffs, bla, ca.cost});
  if (blb > 1e-15) cert.terms.push_back({cb.v, cb.coeffs, blb, cb.cost});
  Vec2 recon = bla * ca.v + blb * cb.v;
  cert.feasibility_residual = (recon - xi).norm();
  Matrix2 m;
  m.row(0) = ca.v.transpose();
  m.row(1) = cb.v.transpose();
  cert.dual = m.inverse() * Vec2(ca.cost, cb.cost);
  double worst = 0.0;
  for (const Column& c : cols) worst = std::max(worst, cert.dual.dot(c.v) - c.cost);
  cert.optimality_residual = worst;
  return cert;
}

}  // namespace

PhiCertificate phi(const Vec2& xi, const PsiTable& table) {
  std::vector<Column> cols;
  cols.reserve(table.entries().size());
  for (const PsiEntry& e : table.entries()) cols.push_back({e.xi.value, e.psi, e.xi.coeffs});
  return solve_two_column_lp(xi, cols);
}

BurgersReport check_burgers_condition(const PsiTable& table, int z_max) {
  if (z_max < 0) throw ConfigError("z_max must be nonnegative");
  const auto& s = table.system().vectors();
  const std::size_t n = s.size();
  std::vector<double> psi_b(n);
  for (std::size_t i = 0; i < n; ++i) psi_b[i] = table.form()(s[i]);

  struct Best {
    double cost;
    std::vector<int> z;
    Vec2 v;
  };
  std::map<std::pair<long long, long long>, Best> best;
  const double unit = 1e-9 * table.system().max_norm();
  BurgersReport rep;
  rep.z_max = z_max;

  std::vector<int> z(n, -z_max);
  while (true) {
    Vec2 v = Vec2::Zero();
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v += z[i] * s[i];
      cost += std::abs(z[i]) * psi_b[i];
    }
    const auto key = std::make_pair(std::llround(v.x() / unit), std::llround(v.y() / unit));
    auto it = best.find(key);
    if (it == best.end())
      best.emplace(key, Best{cost, z, v});
    else if (cost < it->second.cost)
      it->second = Best{cost, z, v};
    ++rep.combinations;
    std::size_t i = 0;
    while (i < n && z[i] == z_max) z[i++] = -z_max;
    if (i == n) break;
    ++z[i];
  }

  double worst = 0.0;
  for (const auto& [key, b] : best) {
    const double pv = table.form()(b.v);
    const double deficit = b.cost - pv;
    if (deficit > 1e-12 * std::max(1.0, b.cost) && deficit > worst) {
      worst = deficit;
      rep.holds = false;
      rep.z = b.z;
      rep.vector = b.v;
      rep.psi_value = pv;
      rep.split_value = b.cost;
    }
  }
  return rep;
}

PhiCertificate phi_reduced(const Vec2& xi, const PsiTable& table, const BurgersReport& report) {
  if (!report.holds) throw ConfigError("phi_reduced requires the Burgers condition to hold");
  std::vector<Column> cols;
  std::map<std::pair<long long, long long>, bool> seen;
  const double unit = 1e-9 * table.system().max_norm();
  for (const Vec2& b : table.system().vectors())
    for (int sign : {1, -1}) {
      const Vec2 v = sign * b;
      const auto key = std::make_pair(std::llround(v.x() / unit), std::llround(v.y() / unit));
      if (seen.count(key)) continue;
      seen[key] = true;
      cols.push_back({v, table.form()(v), {}});
    }
  return solve_two_column_lp(xi, cols);
}

std::vector<LatticeVector> burgers_set_diagnostic(const PsiTable& table, double tol) {
  std::vector<LatticeVector> out;
  for (const PsiEntry& e : table.entries())
    if (std::abs(phi(e.xi.value, table).value - e.psi) <= tol * e.psi) out.push_back(e.xi);
  return out;
}

void write_phi_polar_csv(std::ostream& os, const PsiTable& table, int n) {
  char buf[96];
  for (int j = 0; j < n; ++j) {
    const double th = kTwoPi * j / n;
    std::snprintf(buf, sizeof buf, "%.16e,%.16e\n", th, phi(unit_direction(th), table).value);
    os << buf;
  }
}

}  // namespace disloc
