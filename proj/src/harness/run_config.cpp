#include "disloc/harness/run_config.hpp"

#include "disloc/parallel.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace disloc::harness {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

long long to_int(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("expected an integer, got '" + s + "'");
  return v;
}

std::vector<double> to_doubles(const std::string& s, std::size_t n = 0) {
  std::vector<double> out;
  if (!s.empty())
    for (const std::string& p : split(s, ',')) out.push_back(to_double(p));
  if (n > 0 && out.size() != n)
    throw ConfigError("expected " + std::to_string(n) + " comma-separated numbers, got '" + s + "'");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

std::vector<std::vector<double>> to_tuples(const std::string& s, std::size_t n) {
  std::vector<std::vector<double>> out;
  if (s.empty()) return out;
  for (const std::string& part : split(s, ';')) out.push_back(to_doubles(part, n));
  return out;
}

std::string one_of(const std::string& s, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (s == a) return s;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : " | ") + a;
  throw ConfigError("expected one of " + list + ", got '" + s + "'");
}

bool to_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("expected true or false, got '" + s + "'");
}

// Key table: reader and writer per key, in canonical order.
struct Key {
  const char* name;
  bool hashed;
  std::function<void(RunConfig&, const std::string&)> read;
  std::function<std::string(const RunConfig&)> write;
};

template <class T>
Key int_key(const char* name, T RunConfig::*m, bool hashed = true) {
  return {name, hashed, [m](RunConfig& c, const std::string& v) { c.*m = static_cast<T>(to_int(v)); },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

Key real_key(const char* name, double RunConfig::*m) {
  return {name, true, [m](RunConfig& c, const std::string& v) { c.*m = to_double(v); },
          [m](const RunConfig& c) { return fmt(c.*m); }};
}

Key bool_key(const char* name, bool RunConfig::*m) {
  return {name, true, [m](RunConfig& c, const std::string& v) { c.*m = to_bool(v); },
          [m](const RunConfig& c) { return std::string(c.*m ? "true" : "false"); }};
}

Key choice_key(const char* name, std::string RunConfig::*m, std::initializer_list<const char*> allowed) {
  std::vector<const char*> list(allowed);
  return {name, true,
          [m, list](RunConfig& c, const std::string& v) {
            for (const char* a : list)
              if (v == a) {
                c.*m = v;
                return;
              }
            std::string s;
            for (const char* a : list) s += std::string(s.empty() ? "" : " | ") + a;
            throw ConfigError("expected one of " + s + ", got '" + v + "'");
          },
          [m](const RunConfig& c) { return c.*m; }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      int_key("schema_version", &RunConfig::schema_version),
      choice_key("tensor", &RunConfig::tensor, {"toy", "isotropic", "general"}),
      real_key("lambda", &RunConfig::lambda),
      real_key("mu", &RunConfig::mu),
      {"tensor_entries", true,
       [](RunConfig& c, const std::string& v) {
         const auto d = to_doubles(v, 16);
         std::copy(d.begin(), d.end(), c.tensor_entries.begin());
       },
       [](const RunConfig& c) { return join({c.tensor_entries.begin(), c.tensor_entries.end()}); }},
      choice_key("burgers", &RunConfig::burgers, {"square", "hexagonal"}),
      {"domain", true,
       [](RunConfig& c, const std::string& v) {
         if (v == "unit-disk") {
           c.domain = "disk";
           c.domain_params = {0.0, 0.0, 1.0};
           return;
         }
         if (v == "unit-square") {
           c.domain = "rectangle";
           c.domain_params = {0.0, 0.0, 1.0, 1.0};
           return;
         }
         const auto open = v.find('(');
         if (open == std::string::npos || v.back() != ')')
           throw ConfigError("domain must be unit-disk, unit-square, disk(cx,cy,r) or rectangle(x0,y0,x1,y1)");
         const std::string shape = one_of(trim(v.substr(0, open)), {"disk", "rectangle"});
         const auto p = to_doubles(v.substr(open + 1, v.size() - open - 2), shape == "disk" ? 3 : 4);
         c.domain = shape;
         c.domain_params = p;
       },
       [](const RunConfig& c) { return c.domain + "(" + join(c.domain_params) + ")"; }},
      {"eps", true, [](RunConfig& c, const std::string& v) { c.eps = to_doubles(v); },
       [](const RunConfig& c) { return join(c.eps); }},
      real_key("rho", &RunConfig::rho),
      real_key("gamma", &RunConfig::gamma),
      choice_key("rho_mode", &RunConfig::rho_mode, {"gamma", "recovery"}),
      real_key("h", &RunConfig::h),
      int_key("n_theta", &RunConfig::n_theta),
      {"xi", true,
       [](RunConfig& c, const std::string& v) {
         const auto d = to_doubles(v, 2);
         c.xi = Vec2(d[0], d[1]);
       },
       [](const RunConfig& c) { return join({c.xi.x(), c.xi.y()}); }},
      bool_key("cell_limit", &RunConfig::cell_limit),
      real_key("table_radius", &RunConfig::table_radius),
      int_key("phi_samples", &RunConfig::phi_samples),
      {"phi_xi", true,
       [](RunConfig& c, const std::string& v) {
         c.phi_xi.clear();
         for (const auto& t : to_tuples(v, 2)) c.phi_xi.emplace_back(t[0], t[1]);
       },
       [](const RunConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.phi_xi.size(); ++i)
           s += (i ? ";" : "") + join({c.phi_xi[i].x(), c.phi_xi[i].y()});
         return s;
       }},
      int_key("z_max", &RunConfig::z_max),
      {"dislocations", true,
       [](RunConfig& c, const std::string& v) {
         c.dislocations.clear();
         for (const auto& t : to_tuples(v, 4)) c.dislocations.push_back({Vec2(t[0], t[1]), Vec2(t[2], t[3])});
       },
       [](const RunConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.dislocations.size(); ++i) {
           const auto& d = c.dislocations[i];
           s += (i ? ";" : "") + join({d.x.x(), d.x.y(), d.xi.x(), d.xi.y()});
         }
         return s;
       }},
      {"regimes", true,
       [](RunConfig& c, const std::string& v) {
         c.regimes.clear();
         if (v.empty()) return;
         for (const std::string& r : split(v, ',')) c.regimes.push_back(one_of(r, {"dilute", "critical", "super"}));
       },
       [](const RunConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.regimes.size(); ++i) s += (i ? "," : "") + c.regimes[i];
         return s;
       }},
      {"target", true,
       [](RunConfig& c, const std::string& v) {
         c.target.clear();
         for (const auto& t : to_tuples(v, 6)) c.target.push_back({Vec2(t[0], t[1]), Vec2(t[2], t[3]), Vec2(t[4], t[5])});
       },
       [](const RunConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.target.size(); ++i) {
           const auto& t = c.target[i];
           s += (i ? ";" : "") + join({t.lo.x(), t.lo.y(), t.hi.x(), t.hi.y(), t.xi.x(), t.xi.y()});
         }
         return s;
       }},
      bool_key("gap", &RunConfig::gap),
      choice_key("gap_beta", &RunConfig::gap_beta, {"auto", "compatible", "zero"}),
      choice_key("korn_family", &RunConfig::korn_family,
                 {"symmetric", "gradient-polynomials", "dislocation-fields", "mixed"}),
      int_key("korn_samples", &RunConfig::korn_samples),
      int_key("korn_degree", &RunConfig::korn_degree),
      int_key("korn_refine_steps", &RunConfig::korn_refine_steps),
      real_key("korn_h", &RunConfig::korn_h),
      int_key("korn_dislocations", &RunConfig::korn_dislocations),
      real_key("korn_eps", &RunConfig::korn_eps),
      real_key("korn_rho", &RunConfig::korn_rho),
      int_key("korn_mixed_dislocation_samples", &RunConfig::korn_mixed_dislocation_samples),
      int_key("seed", &RunConfig::seed),
      int_key("threads", &RunConfig::threads, false),
      {"out", false, [](RunConfig& c, const std::string& v) { c.out = v; }, [](const RunConfig& c) { return c.out; }},
  };
  return table;
}

void validate(const RunConfig& c) {
  if (c.h <= 0.0 || c.korn_h <= 0.0) throw ConfigError("mesh sizes must be positive");
  for (double e : c.eps)
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("eps values must lie in (0, 1)");
  if (c.n_theta < 8) throw ConfigError("n_theta must be at least 8");
  if (c.phi_samples < 1) throw ConfigError("phi_samples must be positive");
  if (c.z_max < 1) throw ConfigError("z_max must be positive");
  if (c.korn_samples < 1) throw ConfigError("korn_samples must be at least 1");
  if (c.korn_degree < 1) throw ConfigError("korn_degree must be at least 1");
  if (c.korn_refine_steps < 0 || c.korn_dislocations < 0 || c.korn_mixed_dislocation_samples < 0)
    throw ConfigError("korn counts must be non-negative");
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::map<std::string, const Key*> by_name;
  for (const Key& k : keys()) by_name[k.name] = &k;
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const auto it = by_name.find(key);
    if (it == by_name.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "repeated key '" + key + "'");
    try {
      it->second->read(c, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  if (!seen.count("schema_version")) throw ConfigError("missing schema_version");
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
  validate(c);
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::to_text() const {
  std::string s;
  for (const Key& k : keys()) s += std::string(k.name) + " = " + k.write(*this) + "\n";
  return s;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const Key& k : keys()) {
    if (!k.hashed) continue;
    for (char ch : std::string(k.name) + "=" + k.write(*this) + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ElasticTensor RunConfig::make_tensor() const {
  if (tensor == "toy") return ElasticTensor::toy();
  if (tensor == "isotropic") return ElasticTensor::isotropic(lambda, mu);
  return ElasticTensor::general(tensor_entries);
}

BurgersSystem RunConfig::make_burgers() const {
  return burgers == "hexagonal" ? BurgersSystem::hexagonal() : BurgersSystem::square();
}

Domain2D RunConfig::make_domain() const {
  const auto& p = domain_params;
  if (domain == "disk") return Domain2D::disk(Vec2(p[0], p[1]), p[2]);
  return Domain2D::rectangle(Vec2(p[0], p[1]), Vec2(p[2], p[3]));
}

LimitMeasure RunConfig::make_target() const {
  std::vector<DensityRegion> regions;
  for (const TargetRect& t : target)
    regions.push_back({{t.lo, Vec2(t.hi.x(), t.lo.y()), t.hi, Vec2(t.lo.x(), t.hi.y())}, t.xi});
  return regions.empty() ? LimitMeasure::zero() : LimitMeasure::density(std::move(regions));
}

KornOptions RunConfig::korn_options() const {
  KornOptions o;
  o.degree = korn_degree;
  o.refine_steps = korn_refine_steps;
  o.h = korn_h;
  o.tensor = make_tensor();
  o.dislocations = korn_dislocations;
  o.eps = korn_eps;
  o.rho = korn_rho;
  o.mixed_dislocation_samples = korn_mixed_dislocation_samples;
  o.threads = resolved_threads();
  return o;
}

int RunConfig::resolved_threads() const { return threads > 0 ? threads : default_threads(); }

}  // namespace disloc::harness
