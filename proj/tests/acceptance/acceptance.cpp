// One PASS/FAIL line per acceptance criterion. Arguments select criteria
// (default: all). Exit status is nonzero when any selected criterion fails.
#include "disloc/annulus_cell.hpp"
#include "disloc/dislocation_sim.hpp"
#include "disloc/gamma_functionals.hpp"
#include "disloc/korn.hpp"
#include "disloc/relaxation_phi.hpp"
#include "disloc/singular_fields.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace disloc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string list(const std::vector<double>& v, const char* f = "%.4g") {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt(f, x);
  return s;
}

// 1. toy single-dislocation energy on the unit disk
Outcome toy_energy() {
  bool ok = true;
  std::string d;
  for (double eps : {1e-2, 1e-3}) {
    const auto t0 = Clock::now();
    DislocationConfig mu;
    mu.dislocations = {{Vec2::Zero(), Vec2(1, 0)}};
    mu.eps = eps;
    mu.rho = rho_gamma(eps, 0.5);
    const double e = minimize_energy(Domain2D::unit_disk(), mu, ElasticTensor::toy()).report.total;
    const double ref = std::log(1.0 / eps) / kTwoPi;
    const double rel = std::abs(e - ref) / ref, sec = seconds_since(t0);
    ok &= rel <= 0.03 && sec <= 60.0;
    d += "eps=" + fmt("%g", eps) + " E=" + fmt("%.6f", e) + " ref=" + fmt("%.6f", ref) + " rel=" +
         fmt("%.2e", rel) + " t=" + fmt("%.1fs", sec) + "; ";
  }
  return {ok, d + "tol 3%, 60 s"};
}

// 2. hard-core share of the toy energy at rho = eps^0.5
Outcome self_share() {
  bool ok = true;
  std::string d;
  for (double eps : {1e-2, 1e-3}) {
    DislocationConfig mu;
    mu.dislocations = {{Vec2::Zero(), Vec2(1, 0)}};
    mu.eps = eps;
    mu.rho = rho_gamma(eps, 0.5);
    const EnergyReport r = minimize_energy(Domain2D::unit_disk(), mu, ElasticTensor::toy()).report;
    const double share = r.self / r.total;
    ok &= std::abs(share - 0.5) <= 0.05;
    d += "eps=" + fmt("%g", eps) + " share=" + fmt("%.4f", share) + "; ";
  }
  return {ok, d + "target 0.5 +- 0.05"};
}

// 3. cell limit vs the whole-plane profile, and the rate bound
Outcome cell_limit() {
  const auto c = ElasticTensor::isotropic(1.0, 1.0);
  const Vec2 xi(1, 0);
  const PsiLimit lim = psi_limit(c, xi);
  const double profile = psi_from_profile(c, SingularField::beta_r2_isotropic(c, xi).profile());
  const double rel = std::abs(lim.value - profile) / profile;
  std::vector<double> scaled;
  for (std::size_t k = 0; k < lim.eps.size(); ++k)
    scaled.push_back(std::abs(lim.psi_eps[k] - profile) * std::abs(std::log(lim.eps[k])));
  bool monotone = true;
  for (std::size_t k = 1; k < scaled.size(); ++k) monotone &= scaled[k] <= scaled[k - 1];
  return {rel <= 0.01 && monotone, "psi_limit=" + fmt("%.8f", lim.value) + " profile=" + fmt("%.8f", profile) +
                                       " rel=" + fmt("%.2e", rel) + " (tol 1%); |psi_eps-psi||log eps| = " +
                                       list(scaled) + (monotone ? " non-increasing" : " NOT non-increasing")};
}

// Primal brute force over all 2-column bases (and single columns) of the table.
double brute_phi(const Vec2& xi, const PsiTable& t) {
  const auto& e = t.entries();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : e) {
    const Vec2 v = a.xi.value;
    const double lam = xi.dot(v) / v.squaredNorm();
    if (lam >= 0.0 && (lam * v - xi).norm() <= 1e-12 * std::max(1.0, xi.norm())) best = std::min(best, lam * a.psi);
  }
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      Matrix2 m;
      m.col(0) = e[i].xi.value;
      m.col(1) = e[j].xi.value;
      if (std::abs(m.determinant()) < 1e-12) continue;
      const Vec2 lam = m.inverse() * xi;
      if (lam.x() < -1e-14 || lam.y() < -1e-14) continue;
      best = std::min(best, std::max(0.0, lam.x()) * e[i].psi + std::max(0.0, lam.y()) * e[j].psi);
    }
  return best;
}

// 4. phi oracle equivalence, homogeneity and convexity for the toy square system
Outcome phi_oracle() {
  const PsiTable t = build_psi_table(PsiForm::toy(), BurgersSystem::square(), 4.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0), us(0.05, 10.0), ul(0.0, 1.0);
  double worst_closed = 0.0, worst_brute = 0.0;
  for (int n = 0; n < 100; ++n) {
    const Vec2 xi(u(rng), u(rng));
    const double p = phi(xi, t).value;
    const double closed = (std::abs(xi.x()) + std::abs(xi.y())) / kTwoPi;
    worst_closed = std::max(worst_closed, std::abs(p - closed) / closed);
    worst_brute = std::max(worst_brute, std::abs(p - brute_phi(xi, t)) / closed);
  }
  double worst_hom = 0.0, worst_cvx = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const Vec2 a(u(rng), u(rng)), b(u(rng), u(rng));
    const double s = us(rng), l = ul(rng);
    const double pa = phi(a, t).value, pb = phi(b, t).value;
    worst_hom = std::max(worst_hom, std::abs(phi(s * a, t).value - s * pa) / std::max(s * pa, 1e-300));
    const double mid = phi(l * a + (1 - l) * b, t).value;
    worst_cvx = std::max(worst_cvx, (mid - (l * pa + (1 - l) * pb)) / std::max(pa + pb, 1e-300));
  }
  const bool ok = worst_closed <= 1e-9 && worst_brute <= 1e-9 && worst_hom <= 1e-9 && worst_cvx <= 1e-9;
  return {ok, "max rel err vs closed form " + fmt("%.1e", worst_closed) + ", vs brute force " +
                  fmt("%.1e", worst_brute) + " (100 probes); homogeneity " + fmt("%.1e", worst_hom) +
                  ", convexity excess " + fmt("%.1e", worst_cvx) + " (1000 probes); tol 1e-9"};
}

LimitMeasure opposed_layers(double k) {
  return LimitMeasure::density({{{Vec2(0, 0), Vec2(1, 0), Vec2(1, 0.5), Vec2(0, 0.5)}, Vec2(k, 0)},
                                {{Vec2(0, 0.5), Vec2(1, 0.5), Vec2(1, 1), Vec2(0, 1)}, Vec2(-k, 0)}});
}

// 5. scaling regimes at desk scale
Outcome scaling() {
  const auto t0 = Clock::now();
  const auto c = ElasticTensor::isotropic(1.0, 1.0);
  const auto sq = Domain2D::unit_square();
  const std::vector<double> eps = {1e-2, 3e-3, 1e-3};
  const PsiTable table = build_psi_table(c, BurgersSystem::square(), 6.0);

  SweepOptions sup;
  sup.rho_recovery = true;
  const SweepResult s = scaling_sweep(Regime::super, c, sq, eps, opposed_layers(4.0), table, sup);
  const bool super_ok = std::abs(s.exponent_inter_vs_n - 2.0) <= 0.15;

  SweepOptions dil;
  dil.gamma = 0.5;
  const SweepResult d =
      scaling_sweep(Regime::dilute, c, sq, eps, LimitMeasure::uniform_rectangle(Vec2(1, 0), Vec2(0, 0), Vec2(1, 1)),
                    table, dil);
  std::vector<double> per;
  for (const SweepRow& r : d.rows) per.push_back(r.e_self / (static_cast<double>(r.count) * std::abs(std::log(r.eps))));
  double mean = 0.0;
  for (double v : per) mean += v / static_cast<double>(per.size());
  double spread = 0.0;
  for (double v : per) spread = std::max(spread, std::abs(v - mean) / mean);
  const bool dilute_ok = spread <= 0.10;
  const double sec = seconds_since(t0);
  std::vector<double> counts;
  for (const SweepRow& r : s.rows) counts.push_back(static_cast<double>(r.count));
  return {super_ok && dilute_ok && sec <= 1800.0,
          "super: exponent vs N " + fmt("%.3f", s.exponent_inter_vs_n) + " (2.0 +- 0.15; vs realized count " +
              fmt("%.3f", s.exponent_inter_vs_count) + ", counts " + list(counts, "%.0f") +
              "); dilute: E_self/(N|log eps|) = " + list(per) + ", max deviation " + fmt("%.1f%%", 100 * spread) +
              " (10%); t=" + fmt("%.0fs", sec) + " (1800 s)"};
}

// 6. Gamma-limsup gap for mu = e1 dx on the unit square
Outcome gamma_limsup() {
  const auto c = ElasticTensor::isotropic(1.0, 1.0);
  const auto sq = Domain2D::unit_square();
  const PsiTable table = build_psi_table(c, BurgersSystem::square(), 4.0);
  const auto mu = LimitMeasure::uniform_rectangle(Vec2(1, 0), Vec2(0, 0), Vec2(1, 1));
  // curl (0, x1 - 1/2; -(x1 - 1/2), 0) = e1 and W = 0: the minimal compatible strain
  const auto beta = LimitStrain::field([](const Vec2& x) {
    Matrix2 m;
    m << 0.0, x.x() - 0.5, -(x.x() - 0.5), 0.0;
    return m;
  });
  const auto rows = gamma_gap(mu, beta, c, Regime::critical, {1e-2, 3e-3, 1e-3}, table, sq);
  std::vector<double> pct, counts;
  for (const GapRow& r : rows) {
    pct.push_back(r.gap_pct);
    counts.push_back(static_cast<double>(r.count));
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < rows.size(); ++k) decreasing &= std::abs(rows[k].gap) < std::abs(rows[k - 1].gap);
  const bool within = std::abs(rows.back().gap_pct) <= 15.0;
  return {within && decreasing, "limit F=" + fmt("%.6f", rows.front().limit) + "; gap% at eps 1e-2 3e-3 1e-3 = " +
                                    list(pct) + " (|gap| <= 15% at 1e-3: " + (within ? "yes" : "no") +
                                    "; decreasing: " + (decreasing ? "yes" : "no") + "); realized counts " +
                                    list(counts, "%.0f") + " vs N_eps " + list({rows[0].n_eps, rows[1].n_eps, rows[2].n_eps})};
}

// 7. Korn property suite
Outcome korn() {
  const auto disk = Domain2D::unit_disk();
  const double c_sym = korn_sweep(KornFamily::symmetric, 500, 7, disk).empirical_c;
  std::vector<double> cs;
  for (std::uint64_t seed : {7, 8, 9}) cs.push_back(korn_sweep(KornFamily::gradient_polynomials, 500, seed, disk).empirical_c);
  double mean = 0.0;
  for (double v : cs) mean += v / 3.0;
  double spread = 0.0;
  for (double v : cs) spread = std::max(spread, std::abs(v - mean) / mean);

  std::ifstream in(std::string(DISLOC_DATA_DIR) + "/korn_baseline.json");
  const double baseline = nlohmann::json::parse(in).at("empirical_c").get<double>();
  const KornSweep d = korn_sweep(KornFamily::dislocation_fields, 20, 7, disk);
  const double worst = *std::max_element(d.ratios.begin(), d.ratios.end());
  const bool ok = c_sym == 0.0 && spread <= 0.05 && worst <= baseline;
  return {ok, "symmetric C=" + fmt("%g", c_sym) + "; gradient C (seeds 7 8 9) = " + list(cs, "%.5f") +
                  ", max deviation " + fmt("%.2f%%", 100 * spread) + " (5%); dislocation max ratio " +
                  fmt("%.4f", worst) + " over 20 samples <= stored C " + fmt("%.4f", baseline)};
}

// 8. byte-identical CLI reruns
std::map<std::string, std::string> csv_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv") {
      std::ifstream in(e.path(), std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      out[e.path().filename().string()] = ss.str();
    }
  return out;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "disloc_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"cell", "schema_version = 1\neps = 1e-2, 1e-3\nn_theta = 64\n"},
      {"phi", "schema_version = 1\ntable_radius = 4\nphi_samples = 90\n"},
      {"simulate", "schema_version = 1\neps = 1e-2\nh = 0.05\ndislocations = 0.3,0,1,0;-0.3,0,-1,0\nrho = 0.1\n"},
      {"sweep",
       "schema_version = 1\ntensor = isotropic\ndomain = unit-square\neps = 1e-2,3e-3\nregimes = dilute,super\n"
       "h = 0.05\ngap = true\n"},
      {"korn", "schema_version = 1\nkorn_family = mixed\nkorn_samples = 200\nkorn_mixed_dislocation_samples = 3\n"},
  };
  bool ok = true;
  std::size_t files = 0;
  std::string d;
  for (const auto& [cmd, text] : runs) {
    const fs::path cfg = root / (cmd + ".cfg");
    std::ofstream(cfg) << text;
    std::map<std::string, std::string> out[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path dir = root / (cmd + std::to_string(k));
      const std::string call = std::string("\"") + DISLOC_CLI_PATH + "\" " + cmd + " --config \"" + cfg.string() +
                               "\" --out \"" + dir.string() + "\" --seed 7" + (cmd == "phi" ? " --check-burgers" : "") +
                               " > \"" + (root / (cmd + ".log")).string() + "\" 2>&1";
      const int rc = std::system(call.c_str());
      if (rc != 0) {
        ok = false;
        d += cmd + " exited " + std::to_string(rc) + "; ";
        break;
      }
      out[k] = csv_files(dir);
    }
    if (out[0].empty() || out[0] != out[1]) {
      ok = false;
      d += cmd + " differs; ";
    }
    files += out[0].size();
  }
  return {ok, d + std::to_string(files) + " CSV payloads over 5 commands compared byte for byte"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"toy single-dislocation energy", toy_energy},
      {"self-energy concentration", self_share},
      {"cell-limit consistency", cell_limit},
      {"phi oracle equivalence", phi_oracle},
      {"scaling regimes", scaling},
      {"gamma-limsup gap", gamma_limsup},
      {"Korn property suite", korn},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d [%s]: %s | %s\n", id, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
