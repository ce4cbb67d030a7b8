#include "camr/bench/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace camr {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string u = upper(v);
  if (u == "1" || u == "TRUE" || u == "YES" || u == "ON") return true;
  if (u == "0" || u == "FALSE" || u == "NO" || u == "OFF") return false;
  throw ConfigError("'" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(17);
  o << x;
  return o.str();
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    if constexpr (std::is_same_v<T, double>) s += fmt(xs[i]);
    else s += std::to_string(xs[i]);
  }
  return s;
}

struct Key {
  std::function<void(BenchConfig&, const std::string& key, const std::string&)> set;
  std::function<std::string(const BenchConfig&)> get;
};

Key number(double BenchConfig::*field) {
  return {[field](BenchConfig& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); },
          [field](const BenchConfig& c) { return fmt(c.*field); }};
}

template <class Get>
Key number_at(Get get) {
  return {[get](BenchConfig& c, const std::string& k, const std::string& v) { get(c) = to_double(k, v); },
          [get](const BenchConfig& c) { return fmt(get(const_cast<BenchConfig&>(c))); }};
}

template <class Get>
Key integer_at(Get get) {
  return {[get](BenchConfig& c, const std::string& k, const std::string& v) { get(c) = to_int(k, v); },
          [get](const BenchConfig& c) { return std::to_string(get(const_cast<BenchConfig&>(c))); }};
}

template <class Get>
Key boolean_at(Get get) {
  return {[get](BenchConfig& c, const std::string& k, const std::string& v) { get(c) = to_bool(k, v); },
          [get](const BenchConfig& c) { return std::string(get(const_cast<BenchConfig&>(c)) ? "true" : "false"); }};
}

template <class Get>
Key int_list_at(Get get) {
  return {[get](BenchConfig& c, const std::string& k, const std::string& v) {
            std::vector<int> xs;
            for (const auto& s : split_list(v)) xs.push_back(to_int(k, s));
            get(c) = std::move(xs);
          },
          [get](const BenchConfig& c) { return join(get(const_cast<BenchConfig&>(c))); }};
}

template <class Get>
Key double_list_at(Get get) {
  return {[get](BenchConfig& c, const std::string& k, const std::string& v) {
            std::vector<double> xs;
            for (const auto& s : split_list(v)) xs.push_back(to_double(k, s));
            get(c) = std::move(xs);
          },
          [get](const BenchConfig& c) { return join(get(const_cast<BenchConfig&>(c))); }};
}

const std::vector<std::pair<std::string, Key>>& keys() {
  static const std::vector<std::pair<std::string, Key>> table = [] {
    std::vector<std::pair<std::string, Key>> t;
    t.emplace_back("mode", Key{[](BenchConfig& c, const std::string&, const std::string& v) { c.mode = parse_mode(v); },
                               [](const BenchConfig& c) { return to_string(c.mode); }});
    t.emplace_back("radius", number_at([](BenchConfig& c) -> double& { return c.hertz.radius; }));
    t.emplace_back("gap", number_at([](BenchConfig& c) -> double& { return c.hertz.gap; }));
    t.emplace_back("alpha", number_at([](BenchConfig& c) -> double& { return c.hertz.alpha; }));
    t.emplace_back("n0", integer_at([](BenchConfig& c) -> int& { return c.hertz.n0; }));
    t.emplace_back("geom_order", integer_at([](BenchConfig& c) -> int& { return c.hertz.geom_order; }));
    t.emplace_back("young_modulus_1", number_at([](BenchConfig& c) -> double& { return c.hertz.lower.young_modulus; }));
    t.emplace_back("poisson_ratio_1", number_at([](BenchConfig& c) -> double& { return c.hertz.lower.poisson_ratio; }));
    t.emplace_back("young_modulus_2", number_at([](BenchConfig& c) -> double& { return c.hertz.upper.young_modulus; }));
    t.emplace_back("poisson_ratio_2", number_at([](BenchConfig& c) -> double& { return c.hertz.upper.poisson_ratio; }));
    t.emplace_back("e_global", number_at([](BenchConfig& c) -> double& { return c.amr.targets.e_global; }));
    t.emplace_back("e_local", number_at([](BenchConfig& c) -> double& { return c.amr.targets.e_local; }));
    t.emplace_back("delta", number_at([](BenchConfig& c) -> double& { return c.amr.targets.delta; }));
    t.emplace_back("n_max", integer_at([](BenchConfig& c) -> int& { return c.amr.targets.n_max; }));
    t.emplace_back("penalty_factor", number_at([](BenchConfig& c) -> double& { return c.amr.penalty.factor; }));
    t.emplace_back("penalty_inverse_h", boolean_at([](BenchConfig& c) -> bool& { return c.amr.penalty.inverse_h_min; }));
    t.emplace_back("l_max", integer_at([](BenchConfig& c) -> int& { return c.amr.l_max; }));
    t.emplace_back("pcg_tol", number_at([](BenchConfig& c) -> double& { return c.amr.pcg.rel_tol; }));
    t.emplace_back("pcg_max_iter", integer_at([](BenchConfig& c) -> int& { return c.amr.pcg.max_iter; }));
    t.emplace_back("ranks", integer_at([](BenchConfig& c) -> int& { return c.amr.ranks; }));
    t.emplace_back("c", number_at([](BenchConfig& c) -> double& { return c.amr.c; }));
    t.emplace_back("order", integer_at([](BenchConfig& c) -> int& { return c.order; }));
    t.emplace_back("uniform_levels", integer_at([](BenchConfig& c) -> int& { return c.uniform_levels; }));
    t.emplace_back("penalty_factors", double_list_at([](BenchConfig& c) -> std::vector<double>& { return c.penalty_factors; }));
    t.emplace_back("sweep_level", integer_at([](BenchConfig& c) -> int& { return c.sweep_level; }));
    t.emplace_back("sweep_levels", int_list_at([](BenchConfig& c) -> std::vector<int>& { return c.sweep_levels; }));
    t.emplace_back("sweep_reference_factor", number(&BenchConfig::sweep_reference_factor));
    t.emplace_back("slope_min_factor", number(&BenchConfig::slope_min_factor));
    t.emplace_back("slope_max_factor", number(&BenchConfig::slope_max_factor));
    t.emplace_back("q1_levels", int_list_at([](BenchConfig& c) -> std::vector<int>& { return c.q1_levels; }));
    t.emplace_back("q2_levels", int_list_at([](BenchConfig& c) -> std::vector<int>& { return c.q2_levels; }));
    t.emplace_back("reference_order", integer_at([](BenchConfig& c) -> int& { return c.reference_order; }));
    t.emplace_back("reference_level", integer_at([](BenchConfig& c) -> int& { return c.reference_level; }));
    t.emplace_back("convergence_amr", boolean_at([](BenchConfig& c) -> bool& { return c.convergence_amr; }));
    t.emplace_back("reference_a", number(&BenchConfig::reference_a));
    t.emplace_back("reference_p_o", number(&BenchConfig::reference_p_o));
    t.emplace_back("write_vtk", boolean_at([](BenchConfig& c) -> bool& { return c.write_vtk; }));
    t.emplace_back("out_dir", Key{[](BenchConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
                                  [](const BenchConfig& c) { return c.out_dir; }});
    return t;
  }();
  return table;
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Amr1: return "AMR1";
    case RunMode::Amr2: return "AMR2";
    case RunMode::Uniform: return "UNIFORM";
    case RunMode::PenaltySweep: return "PENALTY_SWEEP";
    case RunMode::Convergence: return "CONVERGENCE";
  }
  return "?";
}

RunMode parse_mode(const std::string& name) {
  const std::string u = upper(trim(name));
  for (RunMode m : all_modes())
    if (to_string(m) == u) return m;
  throw ConfigError("unknown run mode '" + name + "'");
}

const std::vector<RunMode>& all_modes() {
  static const std::vector<RunMode> modes{RunMode::Amr1, RunMode::Amr2, RunMode::Uniform, RunMode::PenaltySweep,
                                          RunMode::Convergence};
  return modes;
}

std::string describe(RunMode mode) {
  switch (mode) {
    case RunMode::Amr1: return "ZZ equidistribution marking, global stop on gamma <= e_global";
    case RunMode::Amr2: return "LOC marking, local stop on marked area fraction <= delta";
    case RunMode::Uniform: return "uniform refinement, levels 0..uniform_levels, order 1 or 2";
    case RunMode::PenaltySweep: return "interpenetration vs k_N on a fixed mesh, and vs h at fixed k_N";
    case RunMode::Convergence: return "energy-norm errors of uniform Q1/Q2 and AMR Q1 against a fine reference";
  }
  return "";
}

void BenchConfig::validate() const {
  hertz.validate();
  if (hertz.n0 < 2) throw ConfigError("n0 must be at least 2");
  if (hertz.geom_order < 1) throw ConfigError("geom_order must be at least 1");
  amr.targets.validate();
  if (amr.l_max < 1) throw ConfigError("l_max must be at least 1");
  if (!(amr.pcg.rel_tol > 0.0 && amr.pcg.rel_tol < 1.0)) throw ConfigError("pcg_tol must be in (0,1)");
  if (amr.pcg.max_iter < 0) throw ConfigError("pcg_max_iter must be non-negative");
  if (amr.ranks < 1) throw ConfigError("ranks must be positive");
  if (!(amr.c > 0.0)) throw ConfigError("c must be positive");
  if (!amr.penalty.inverse_h_min && !(amr.penalty.factor > 0.0)) throw ConfigError("penalty_factor must be positive");
  if (order != 1 && order != 2) throw ConfigError("order must be 1 or 2");
  if (uniform_levels < 0) throw ConfigError("uniform_levels must be non-negative");
  if (penalty_factors.empty()) throw ConfigError("penalty_factors is empty");
  for (double f : penalty_factors)
    if (!(f > 0.0)) throw ConfigError("penalty factors must be positive");
  if (sweep_level < 0) throw ConfigError("sweep_level must be non-negative");
  for (int l : sweep_levels)
    if (l < 0) throw ConfigError("sweep_levels must be non-negative");
  if (!(sweep_reference_factor > 0.0)) throw ConfigError("sweep_reference_factor must be positive");
  if (!(slope_min_factor > 0.0 && slope_max_factor > slope_min_factor))
    throw ConfigError("need 0 < slope_min_factor < slope_max_factor");
  if (reference_order != 1 && reference_order != 2) throw ConfigError("reference_order must be 1 or 2");
  for (const auto* levels : {&q1_levels, &q2_levels})
    for (int l : *levels)
      if (l < 0) throw ConfigError("study levels must be non-negative");
  if (reference_a < 0.0 || reference_p_o < 0.0) throw ConfigError("reference Hertz values must be non-negative");
  if ((reference_a > 0.0) != (reference_p_o > 0.0))
    throw ConfigError("reference_a and reference_p_o must be given together");
  if (out_dir.empty()) throw ConfigError("out_dir is empty");
}

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    out.emplace_back(key, value);
  }
  return out;
}

void apply_setting(BenchConfig& config, const std::string& key, const std::string& value) {
  const std::string k = trim(key);
  if (k == "young_modulus" || k == "poisson_ratio") {
    apply_setting(config, k + "_1", value);
    apply_setting(config, k + "_2", value);
    return;
  }
  if (k == "delta0") return apply_setting(config, "gap", value);
  for (const auto& [name, handler] : keys())
    if (name == k) {
      handler.set(config, k, trim(value));
      return;
    }
  throw ConfigError("unknown config key '" + k + "'");
}

BenchConfig config_from_text(const std::string& text, const std::vector<std::string>& overrides) {
  BenchConfig config;
  for (const auto& [k, v] : parse_key_values(text)) apply_setting(config, k, v);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
    apply_setting(config, o.substr(0, eq), o.substr(eq + 1));
  }
  config.validate();
  return config;
}

BenchConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_text(text.str(), overrides);
}

std::string dump(const BenchConfig& config) {
  std::string out;
  for (const auto& [name, handler] : keys()) out += name + " = " + handler.get(config) + "\n";
  return out;
}

}  // namespace camr
