#include "disloc/harness/commands.hpp"

#include "disloc/annulus_cell.hpp"
#include "disloc/csv.hpp"
#include "disloc/gamma_functionals.hpp"
#include "disloc/korn.hpp"
#include "disloc/parallel.hpp"
#include "disloc/relaxation_phi.hpp"

#include <json.hpp>
#include <openssl/sha.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace disloc::harness {

namespace fs = std::filesystem;

std::string ResultRecord::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = config_hash;
  j["input_hash"] = input_hash;
  j["payloads"] = payloads;
  j["seconds"] = seconds;
  return j.dump(2) + "\n";
}

std::string git_blob_hash(const std::string& text) {
  const std::string blob = "blob " + std::to_string(text.size()) + std::string(1, '\0') + text;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  std::string hex;
  char buf[3];
  for (unsigned char b : digest) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    hex += buf;
  }
  return hex;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"cell", "phi", "simulate", "sweep", "korn"};
  return names;
}

namespace {

using csv::number;

// Collects CSV payloads; each starts with the config hash comment and a header.
class Writer {
 public:
  Writer(const RunConfig& cfg, ResultRecord& rec) : dir_(cfg.out), hash_(cfg.hash()), rec_(rec) {}

  std::ostringstream& open(const std::string& name, const std::string& header) {
    files_.push_back({name, std::make_unique<std::ostringstream>()});
    *files_.back().second << "# config_hash=" << hash_ << "\n" << header << "\n";
    return *files_.back().second;
  }

  void flush() {
    for (auto& [name, os] : files_) {
      std::ofstream f(dir_ / name, std::ios::binary);
      f << os->str();
      if (!f) throw ConfigError("cannot write " + (dir_ / name).string());
      rec_.payloads.push_back(name);
    }
  }

 private:
  fs::path dir_;
  std::string hash_;
  ResultRecord& rec_;
  std::vector<std::pair<std::string, std::unique_ptr<std::ostringstream>>> files_;
};

void line(std::ostream& os, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const std::string& c : cells) {
    os << (first ? "" : ",") << c;
    first = false;
  }
  os << '\n';
}

void cmd_cell(const RunConfig& cfg, Writer& w) {
  if (cfg.eps.empty()) return;
  const ElasticTensor c = cfg.make_tensor();
  CellMeshParams p;
  p.n_theta = cfg.n_theta;
  const auto sols = parallel_map(cfg.eps.size(), cfg.resolved_threads(),
                                 [&](std::size_t i) { return solve_cell(c, cfg.xi, cfg.eps[i], p); });
  auto& os = w.open("cell.csv", "xi1,xi2,eps,psi_eps,energy,residual,iterations");
  for (const CellSolution& s : sols)
    line(os, {number(s.xi.x()), number(s.xi.y()), number(s.eps), number(s.value), number(s.energy),
              number(s.residual), std::to_string(s.iterations)});
  if (cfg.cell_limit) {
    const PsiLimit lim = psi_limit(c, cfg.xi, p);
    auto& ls = w.open("psi_limit.csv", "eps,psi_eps,richardson");
    for (std::size_t k = 0; k < lim.eps.size(); ++k)
      csv::row(ls, {lim.eps[k], lim.psi_eps[k], k == 0 ? std::nan("") : lim.richardson[k - 1]});
    auto& ss = w.open("psi_limit_summary.csv", "psi,rate_constant,profile_value");
    csv::row(ss, {lim.value, lim.rate_constant, lim.profile_value});
  }
}

void cmd_phi(const RunConfig& cfg, const CommandFlags& flags, Writer& w) {
  const PsiTable table = build_psi_table(cfg.make_tensor(), cfg.make_burgers(), cfg.table_radius);
  auto& polar = w.open("phi_polar.csv", "angle,phi");
  write_phi_polar_csv(polar, table, cfg.phi_samples);
  auto& cert = w.open("phi_certificates.csv",
                      "xi1,xi2,phi,dual1,dual2,feasibility_residual,optimality_residual,decomposition");
  for (const Vec2& xi : cfg.phi_xi) {
    const PhiCertificate pc = phi(xi, table);
    std::string dec;
    for (const PhiTerm& t : pc.terms)
      dec += (dec.empty() ? "" : " ") + number(t.lambda) + "*(" + number(t.vector.x()) + " " +
             number(t.vector.y()) + ")";
    line(cert, {number(xi.x()), number(xi.y()), number(pc.value), number(pc.dual.x()), number(pc.dual.y()),
                number(pc.feasibility_residual), number(pc.optimality_residual), dec});
  }
  if (flags.check_burgers) {
    const BurgersReport r = check_burgers_condition(table, cfg.z_max);
    auto& b = w.open("burgers.csv", "holds,z_max,combinations,witness1,witness2,psi,split");
    line(b, {r.holds ? "1" : "0", std::to_string(r.z_max), std::to_string(r.combinations),
             number(r.holds ? std::nan("") : r.vector.x()), number(r.holds ? std::nan("") : r.vector.y()),
             number(r.holds ? std::nan("") : r.psi_value), number(r.holds ? std::nan("") : r.split_value)});
  }
}

void cmd_simulate(const RunConfig& cfg, Writer& w) {
  if (cfg.eps.size() != 1) throw ConfigError("simulate takes exactly one eps value");
  DislocationConfig mu;
  mu.dislocations = cfg.dislocations;
  mu.eps = cfg.eps[0];
  mu.rho = cfg.rho > 0.0 ? cfg.rho : rho_gamma(mu.eps, cfg.gamma);
  const Domain2D omega = cfg.make_domain();
  const BurgersSystem system = cfg.make_burgers();
  std::string listing;
  const auto violations = validate_config(omega, mu, &system);
  for (const Violation& v : violations) listing += "\n  " + v.message;
  if (!violations.empty()) throw ConfigError("invalid dislocation configuration:" + listing);

  SimParams p;
  p.h = cfg.h;
  auto& os = w.open("simulate.csv", "eps,rho,count,total,direct_total,self,inter,solve_residual");
  auto& cores = w.open("simulate_cores.csv", "index,x,y,xi1,xi2,self");
  if (mu.count() == 0) {
    line(os, {number(mu.eps), number(mu.rho), "0", number(0.0), number(0.0), number(0.0), number(0.0), number(0.0)});
    return;
  }
  const SimResult r = minimize_energy(omega, mu, cfg.make_tensor(), p);
  const EnergyReport& e = r.report;
  line(os, {number(mu.eps), number(mu.rho), std::to_string(mu.count()), number(e.total), number(e.direct_total),
            number(e.self), number(e.inter), number(r.solve_residual)});
  for (std::size_t i = 0; i < mu.count(); ++i) {
    const Dislocation& d = mu.dislocations[i];
    line(cores, {std::to_string(i), number(d.x.x()), number(d.x.y()), number(d.xi.x()), number(d.xi.y()),
                 number(e.per_dislocation_self[i])});
  }
}

void cmd_sweep(const RunConfig& cfg, Writer& w) {
  const ElasticTensor c = cfg.make_tensor();
  const Domain2D omega = cfg.make_domain();
  const LimitMeasure target = cfg.make_target();
  const PsiTable table = build_psi_table(c, cfg.make_burgers(), cfg.table_radius);
  SweepOptions opt;
  opt.gamma = cfg.gamma;
  opt.rho_recovery = cfg.rho_mode == "recovery";
  opt.threads = cfg.resolved_threads();
  opt.sim.h = cfg.h;
  opt.sim.direct_total = false;

  std::ostringstream* fit = nullptr;
  for (const std::string& name : cfg.regimes) {
    const Regime regime = regime_from_string(name);
    const SweepResult s = scaling_sweep(regime, c, omega, cfg.eps, target, table, opt);
    auto& os = w.open("sweep_" + name + ".csv", "eps,N_eps,count,rho,e_self,e_inter,e_total,rescaled");
    for (const SweepRow& r : s.rows) {
      EnergyReport rep;
      rep.total = r.e_total;
      line(os, {number(r.eps), number(r.n_eps), std::to_string(r.count), number(r.rho), number(r.e_self),
                number(r.e_inter), number(r.e_total), number(rescaled_energy(rep, regime, r.n_eps, r.eps))});
    }
    if (s.rows.size() >= 2) {
      if (!fit) fit = &w.open("sweep_fit.csv", "regime,exponent_self_vs_nlog,exponent_inter_vs_n,exponent_inter_vs_count");
      line(*fit, {name, number(s.exponent_self_vs_nlog), number(s.exponent_inter_vs_n),
                  number(s.exponent_inter_vs_count)});
    }
    if (cfg.gap) {
      GapOptions g;
      g.sim = opt.sim;
      g.rho_recovery = opt.rho_recovery;
      g.gamma = cfg.gamma;
      g.threads = opt.threads;
      // the discrete compatible strain passes the curl gate on its own mesh
      g.compat_h = cfg.h;
      g.curl.h = cfg.h;
      const bool compatible =
          cfg.gap_beta == "compatible" || (cfg.gap_beta == "auto" && regime != Regime::dilute);
      const LimitStrain beta = compatible ? minimal_compatible_strain(target, c, omega, g.compat_h).beta : LimitStrain::zero();
      auto& gs = w.open("gap_" + name + ".csv", "eps,N_eps,discrete,limit,gap,gap_pct");
      std::ostringstream body;
      write_gap_csv(body, gamma_gap(target, beta, c, regime, cfg.eps, table, omega, g));
      const std::string text = body.str();
      gs << text.substr(text.find('\n') + 1);  // header already written
    }
  }
}

void cmd_korn(const RunConfig& cfg, Writer& w) {
  const KornFamily family = korn_family_from_string(cfg.korn_family);
  const KornSweep s = korn_sweep(family, static_cast<std::size_t>(cfg.korn_samples), cfg.seed, cfg.make_domain(),
                                 cfg.korn_options());
  auto& os = w.open("korn.csv", "index,ratio,descriptor");
  for (std::size_t i = 0; i < s.ratios.size(); ++i) line(os, {std::to_string(i), number(s.ratios[i]), s.descriptors[i]});
  auto& sum = w.open("korn_summary.csv", "family,seed,samples,empirical_c,worst_index,worst_descriptor");
  line(sum, {to_string(family), std::to_string(cfg.seed), std::to_string(s.ratios.size()), number(s.empirical_c),
             std::to_string(s.worst_index), s.worst_descriptor});
}

}  // namespace

ResultRecord run_command(const std::string& name, const RunConfig& cfg, const CommandFlags& flags) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultRecord rec;
  rec.command = name;
  rec.config_hash = cfg.hash();
  const std::string text = cfg.to_text();
  rec.input_hash = git_blob_hash(text);

  Writer w(cfg, rec);
  if (name == "cell") cmd_cell(cfg, w);
  else if (name == "phi") cmd_phi(cfg, flags, w);
  else if (name == "simulate") cmd_simulate(cfg, w);
  else if (name == "sweep") cmd_sweep(cfg, w);
  else if (name == "korn") cmd_korn(cfg, w);
  else throw ConfigError("unknown command '" + name + "'");

  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.out + "': " + ec.message());
  w.flush();
  std::ofstream(fs::path(cfg.out) / "config.txt", std::ios::binary) << text;
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream(fs::path(cfg.out) / "result.json", std::ios::binary) << rec.to_json();
  return rec;
}

}  // namespace disloc::harness
