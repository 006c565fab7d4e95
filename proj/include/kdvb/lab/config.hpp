#pragma once

// Experiment configuration: TOML in, validated typed sections out. Unknown
// keys and tables are rejected with their dotted path.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "kdvb/errors.hpp"
#include "kdvb/grid.hpp"

namespace kdvb::lab {

struct ConfigError : InvalidArgument {
  ConfigError(const std::string& path, const std::string& msg)
      : InvalidArgument("config: " + path + ": " + msg), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct GridSection {
  double L = 1.0;
  int n = 128;
};

struct TimeSection {
  double T = 1.0;
  int nt = 128;
};

struct OmegaSection {
  double l1 = -0.5, l2 = 0.5;
  std::vector<double> l_list;  // nested chain (-l, l)
  Interval interval() const { return {l1, l2}; }
};

struct SimulateSection {
  std::string initial = "mode";  // mode | random | zero
  int mode = 1;
  std::string source = "none";   // none | smooth
  int random_states = 100;
  std::vector<int> residual_n_list{64, 128, 256};
  int expm_n = 16;
  std::vector<int> expm_nt_list{64, 128, 256};
  std::vector<double> b_list{1.0 / 3.0, 0.5, 1.0};
  int weighted_n = 256;
  int weighted_nt = 100;
  std::vector<double> thetas{0.25, 0.5, 1.0};
  std::vector<int> smoothing_n_list{64, 128, 256};
};

struct ObservabilitySection {
  std::vector<int> n_list{64, 128, 256};  // nt = n for each
  std::vector<double> taus{1e-10, 1e-8};
  double reference_tau = 1e-10;
  int oracle_n = 8;
  int oracle_nt = 16;
  int sample_trials = 100;
};

struct CarlemanSection {
  std::optional<std::vector<double>> s;  // empty: automatic s*
  std::vector<double> multiples{1, 2, 4, 8};
  int coefficient_samples = 10000;
  int trials = 50;
  int scan_nx = 200;
  int scan_nt = 200;
  int weight_samples = 100000;
};

struct ControlSection {
  double tau = 1e-10;
  double cg_tol = 1e-6;
  int cg_max = 500;
  std::vector<std::string> modes{"null", "steering", "cutoff", "half-line"};
  int oracle_n = 32;
};

struct CutoffSection {
  int n = 128;
  double T = 2.0;
  int nt = 256;
  double eps = 0.25;
  std::optional<double> eps_prime;
};

struct HalfLineSection {
  double b = 1.0 / 3.0;
  double X = 8.0;
  int n = 128;
  double T = 4.0;
  int nt = 256;
  double eps = 1.5;
  double omega_lo = -6.0, omega_hi = -0.16;
  int cg_max = 2000;
};

struct ExperimentConfig {
  std::string experiment;
  std::string name;
  std::uint64_t seed = 1;
  GridSection grid;
  TimeSection time;
  OmegaSection omega;
  SimulateSection simulate;
  ObservabilitySection observability;
  CarlemanSection carleman;
  ControlSection control;
  CutoffSection cutoff;
  HalfLineSection half_line;
  std::string source_path;
};

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k{"simulate", "observability", "carleman", "control"};
  return k;
}

namespace detail {

// Reads keys of one table and remembers which were consumed.
class TableReader {
 public:
  TableReader(const toml::table* t, std::string path) : t_(t), path_(std::move(path)) {}

  bool present() const { return t_ != nullptr; }
  bool has(const std::string& key) const { return t_ && t_->contains(key); }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double real(const std::string& key, double def) {
    const toml::node* n = node(key);
    if (!n) return def;
    if (auto v = n->value<double>()) return *v;
    throw ConfigError(at(key), "expected a number");
  }
  std::optional<double> maybe_real(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return real(key, 0);
  }
  std::int64_t integer(const std::string& key, std::int64_t def) {
    const toml::node* n = node(key);
    if (!n) return def;
    if (n->is_integer()) return *n->value<std::int64_t>();
    throw ConfigError(at(key), "expected an integer");
  }
  std::string string(const std::string& key, const std::string& def) {
    const toml::node* n = node(key);
    if (!n) return def;
    if (auto v = n->value<std::string>()) return *v;
    throw ConfigError(at(key), "expected a string");
  }
  std::vector<double> reals(const std::string& key, const std::vector<double>& def) {
    const toml::node* n = node(key);
    if (!n) return def;
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < a->size(); ++i) {
      auto v = (*a)[i].value<double>();
      if (!v) throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(*v);
    }
    return out;
  }
  std::vector<int> ints(const std::string& key, const std::vector<int>& def) {
    const toml::node* n = node(key);
    if (!n) return def;
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(at(key), "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < a->size(); ++i) {
      if (!(*a)[i].is_integer()) throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected an integer");
      out.push_back(static_cast<int>(*(*a)[i].value<std::int64_t>()));
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& key, const std::vector<std::string>& def) {
    const toml::node* n = node(key);
    if (!n) return def;
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(at(key), "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < a->size(); ++i) {
      auto v = (*a)[i].value<std::string>();
      if (!v) throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(*v);
    }
    return out;
  }
  const toml::node* raw(const std::string& key) { return node(key); }

  void reject_unknown() const {
    if (!t_) return;
    for (const auto& [k, v] : *t_) {
      const std::string key(k.str());
      if (!seen_.count(key)) throw ConfigError(at(key), v.is_table() ? "unknown table" : "unknown key");
    }
  }

 private:
  const toml::node* node(const std::string& key) {
    seen_.insert(key);
    return t_ ? t_->get(key) : nullptr;
  }
  const toml::table* t_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void positive(double v, const std::string& path) {
  if (!(v > 0) || !std::isfinite(v)) throw ConfigError(path, "must be positive");
}
inline void at_least(std::int64_t v, std::int64_t lo, const std::string& path) {
  if (v < lo) throw ConfigError(path, "must be at least " + std::to_string(lo));
}

}  // namespace detail

// Tables each experiment may carry besides grid/time/omega.
inline std::set<std::string> allowed_sections(const std::string& experiment) {
  if (experiment == "simulate") return {"simulate"};
  if (experiment == "observability") return {"observability"};
  if (experiment == "carleman") return {"carleman"};
  if (experiment == "control") return {"control", "cutoff", "half_line"};
  return {};
}

inline ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>") {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(source, os.str());
  }
  using detail::TableReader;
  ExperimentConfig c;
  c.source_path = source;
  TableReader top(&root, "");
  c.experiment = top.string("experiment", "");
  bool known = false;
  for (const auto& k : experiment_kinds()) known = known || k == c.experiment;
  if (!known) throw ConfigError("experiment", "must be one of simulate, observability, carleman, control");
  c.name = top.string("name", c.experiment);
  if (c.name.empty() || c.name.find_first_of("/\\ ") != std::string::npos)
    throw ConfigError("name", "must be a plain file stem");
  const auto seed = top.integer("seed", 1);
  detail::at_least(seed, 0, "seed");
  c.seed = static_cast<std::uint64_t>(seed);

  auto table = [&](const std::string& key) -> const toml::table* {
    const toml::node* n = top.raw(key);
    if (!n) return nullptr;
    if (!n->is_table()) throw ConfigError(key, "expected a table");
    return n->as_table();
  };
  const auto sections = allowed_sections(c.experiment);
  auto section = [&](const std::string& key) -> const toml::table* {
    const toml::table* t = table(key);
    if (t && !sections.count(key)) throw ConfigError(key, "not used by experiment " + c.experiment);
    return t;
  };

  {
    TableReader r(table("grid"), "grid");
    c.grid.L = r.real("L", c.grid.L);
    c.grid.n = static_cast<int>(r.integer("n", c.grid.n));
    r.reject_unknown();
    detail::positive(c.grid.L, "grid.L");
    detail::at_least(c.grid.n, 8, "grid.n");
  }
  {
    TableReader r(table("time"), "time");
    c.time.T = r.real("T", c.time.T);
    c.time.nt = static_cast<int>(r.integer("nt", c.time.nt));
    r.reject_unknown();
    detail::positive(c.time.T, "time.T");
    detail::at_least(c.time.nt, 1, "time.nt");
  }
  {
    TableReader r(table("omega"), "omega");
    const double L = c.grid.L;
    if (r.has("l") && (r.has("l1") || r.has("l2"))) throw ConfigError("omega", "give either l or (l1, l2)");
    if (r.has("l")) {
      const double l = r.real("l", 0);
      c.omega.l1 = -l;
      c.omega.l2 = l;
    } else if (r.has("l1") || r.has("l2")) {
      if (!(r.has("l1") && r.has("l2"))) throw ConfigError("omega", "l1 and l2 must be given together");
      c.omega.l1 = r.real("l1", 0);
      c.omega.l2 = r.real("l2", 0);
    } else {
      c.omega.l1 = -L / 2;
      c.omega.l2 = L / 2;
    }
    c.omega.l_list = r.reals("l_list", {});
    r.reject_unknown();
    if (!(c.omega.l1 > -L && c.omega.l1 < c.omega.l2 && c.omega.l2 < L))
      throw ConfigError("omega", "need -L < l1 < l2 < L");
    for (std::size_t i = 0; i < c.omega.l_list.size(); ++i) {
      const double l = c.omega.l_list[i];
      if (!(l > 0 && l < L)) throw ConfigError("omega.l_list[" + std::to_string(i) + "]", "need 0 < l < L");
      if (i > 0 && !(l > c.omega.l_list[i - 1])) throw ConfigError("omega.l_list", "must be increasing");
    }
  }
  {
    TableReader r(section("simulate"), "simulate");
    auto& s = c.simulate;
    s.initial = r.string("initial", s.initial);
    s.mode = static_cast<int>(r.integer("mode", s.mode));
    s.source = r.string("source", s.source);
    s.random_states = static_cast<int>(r.integer("random_states", s.random_states));
    s.residual_n_list = r.ints("residual_n_list", s.residual_n_list);
    s.expm_n = static_cast<int>(r.integer("expm_n", s.expm_n));
    s.expm_nt_list = r.ints("expm_nt_list", s.expm_nt_list);
    s.b_list = r.reals("b_list", s.b_list);
    s.weighted_n = static_cast<int>(r.integer("weighted_n", s.weighted_n));
    s.weighted_nt = static_cast<int>(r.integer("weighted_nt", s.weighted_nt));
    s.thetas = r.reals("thetas", s.thetas);
    s.smoothing_n_list = r.ints("smoothing_n_list", s.smoothing_n_list);
    r.reject_unknown();
    if (s.initial != "mode" && s.initial != "random" && s.initial != "zero")
      throw ConfigError("simulate.initial", "must be mode, random or zero");
    if (s.source != "none" && s.source != "smooth") throw ConfigError("simulate.source", "must be none or smooth");
    detail::at_least(s.mode, 1, "simulate.mode");
    detail::at_least(s.random_states, 1, "simulate.random_states");
    detail::at_least(s.expm_n, 8, "simulate.expm_n");
    detail::at_least(s.weighted_n, 8, "simulate.weighted_n");
    detail::at_least(s.weighted_nt, 1, "simulate.weighted_nt");
    if (s.residual_n_list.size() < 2) throw ConfigError("simulate.residual_n_list", "need at least two sizes");
    for (int n : s.residual_n_list) detail::at_least(n, 8, "simulate.residual_n_list");
    if (s.expm_nt_list.size() < 2) throw ConfigError("simulate.expm_nt_list", "need at least two step counts");
    for (int n : s.expm_nt_list) detail::at_least(n, 1, "simulate.expm_nt_list");
    for (double b : s.b_list)
      if (!(b >= 0)) throw ConfigError("simulate.b_list", "exponents must be nonnegative");
    for (double th : s.thetas)
      if (th != 0.25 && th != 0.5 && th != 1.0) throw ConfigError("simulate.thetas", "supported values are 0.25, 0.5, 1");
    for (int n : s.smoothing_n_list) detail::at_least(n, 8, "simulate.smoothing_n_list");
  }
  {
    TableReader r(section("observability"), "observability");
    auto& o = c.observability;
    o.n_list = r.ints("n_list", o.n_list);
    o.taus = r.reals("taus", o.taus);
    o.reference_tau = r.real("reference_tau", o.reference_tau);
    o.oracle_n = static_cast<int>(r.integer("oracle_n", o.oracle_n));
    o.oracle_nt = static_cast<int>(r.integer("oracle_nt", o.oracle_nt));
    o.sample_trials = static_cast<int>(r.integer("sample_trials", o.sample_trials));
    r.reject_unknown();
    if (o.n_list.empty()) throw ConfigError("observability.n_list", "must not be empty");
    for (int n : o.n_list) detail::at_least(n, 8, "observability.n_list");
    for (double t : o.taus)
      if (!(t >= 0)) throw ConfigError("observability.taus", "must be nonnegative");
    if (!(o.reference_tau >= 0)) throw ConfigError("observability.reference_tau", "must be nonnegative");
    detail::at_least(o.oracle_n, 8, "observability.oracle_n");
    detail::at_least(o.oracle_nt, 1, "observability.oracle_nt");
    detail::at_least(o.sample_trials, 1, "observability.sample_trials");
  }
  {
    TableReader r(section("carleman"), "carleman");
    auto& k = c.carleman;
    if (r.has("s")) {
      const toml::node* n = r.raw("s");
      if (n->is_string()) {
        if (*n->value<std::string>() != "auto") throw ConfigError("carleman.s", "must be \"auto\" or a list");
      } else {
        k.s = r.reals("s", {});
        if (k.s->empty()) throw ConfigError("carleman.s", "list must not be empty");
        for (double s : *k.s)
          if (!(s > 0)) throw ConfigError("carleman.s", "values must be positive");
      }
    }
    k.multiples = r.reals("multiples", k.multiples);
    k.coefficient_samples = static_cast<int>(r.integer("coefficient_samples", k.coefficient_samples));
    k.trials = static_cast<int>(r.integer("trials", k.trials));
    k.scan_nx = static_cast<int>(r.integer("scan_nx", k.scan_nx));
    k.scan_nt = static_cast<int>(r.integer("scan_nt", k.scan_nt));
    k.weight_samples = static_cast<int>(r.integer("weight_samples", k.weight_samples));
    r.reject_unknown();
    for (double m : k.multiples)
      if (!(m >= 1)) throw ConfigError("carleman.multiples", "multiples of s* must be >= 1");
    detail::at_least(k.coefficient_samples, 1, "carleman.coefficient_samples");
    detail::at_least(k.trials, 1, "carleman.trials");
    detail::at_least(k.scan_nx, 4, "carleman.scan_nx");
    detail::at_least(k.scan_nt, 1, "carleman.scan_nt");
    detail::at_least(k.weight_samples, 1, "carleman.weight_samples");
  }
  {
    TableReader r(section("control"), "control");
    auto& k = c.control;
    k.tau = r.real("tau", k.tau);
    k.cg_tol = r.real("cg_tol", k.cg_tol);
    k.cg_max = static_cast<int>(r.integer("cg_max", k.cg_max));
    k.modes = r.strings("modes", k.modes);
    k.oracle_n = static_cast<int>(r.integer("oracle_n", k.oracle_n));
    r.reject_unknown();
    if (!(k.tau >= 0)) throw ConfigError("control.tau", "must be nonnegative");
    detail::positive(k.cg_tol, "control.cg_tol");
    detail::at_least(k.cg_max, 1, "control.cg_max");
    detail::at_least(k.oracle_n, 8, "control.oracle_n");
    for (const auto& m : k.modes)
      if (m != "null" && m != "steering" && m != "cutoff" && m != "half-line")
        throw ConfigError("control.modes", "unknown mode " + m);
  }
  {
    TableReader r(section("cutoff"), "cutoff");
    auto& k = c.cutoff;
    k.n = static_cast<int>(r.integer("n", k.n));
    k.T = r.real("T", k.T);
    k.nt = static_cast<int>(r.integer("nt", k.nt));
    k.eps = r.real("eps", k.eps);
    k.eps_prime = r.maybe_real("eps_prime");
    r.reject_unknown();
    detail::at_least(k.n, 8, "cutoff.n");
    detail::positive(k.T, "cutoff.T");
    detail::at_least(k.nt, 1, "cutoff.nt");
    const double ep = k.eps_prime.value_or(0.5 * (k.eps + k.T / 2));
    if (!(k.eps > 0 && k.eps < ep && ep < k.T / 2)) throw ConfigError("cutoff", "need 0 < eps < eps' < T/2");
  }
  {
    TableReader r(section("half_line"), "half_line");
    auto& w = c.half_line;
    w.b = r.real("b", w.b);
    w.X = r.real("X", w.X);
    w.n = static_cast<int>(r.integer("n", w.n));
    w.T = r.real("T", w.T);
    w.nt = static_cast<int>(r.integer("nt", w.nt));
    w.eps = r.real("eps", w.eps);
    w.omega_lo = r.real("omega_lo", w.omega_lo);
    w.omega_hi = r.real("omega_hi", w.omega_hi);
    w.cg_max = static_cast<int>(r.integer("cg_max", w.cg_max));
    r.reject_unknown();
    if (!(w.b >= 1.0 / 3.0 - 1e-15)) throw ConfigError("half_line.b", "out of scope: the exponent must be at least 1/3");
    detail::positive(w.X, "half_line.X");
    detail::at_least(w.n, 8, "half_line.n");
    detail::positive(w.T, "half_line.T");
    detail::at_least(w.nt, 1, "half_line.nt");
    detail::positive(w.eps, "half_line.eps");
    detail::at_least(w.cg_max, 1, "half_line.cg_max");
    if (!(-w.X < w.omega_lo && w.omega_lo < w.omega_hi && w.omega_hi <= 0))
      throw ConfigError("half_line", "need -X < omega_lo < omega_hi <= 0");
  }
  top.reject_unknown();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.filename().string());
}

inline double eps_prime(const ExperimentConfig& c) {
  return c.cutoff.eps_prime.value_or(0.5 * (c.cutoff.eps + c.cutoff.T / 2));
}

// Effective configuration, every default filled in. Only the sections the
// experiment reads are echoed.
inline nlohmann::ordered_json config_echo(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = c.experiment;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["grid"] = {{"L", c.grid.L}, {"n", c.grid.n}};
  j["time"] = {{"T", c.time.T}, {"nt", c.time.nt}};
  j["omega"] = {{"l1", c.omega.l1}, {"l2", c.omega.l2}, {"l_list", c.omega.l_list}};
  if (c.experiment == "simulate") {
    const auto& s = c.simulate;
    j["simulate"] = {{"initial", s.initial},         {"mode", s.mode},
                     {"source", s.source},           {"random_states", s.random_states},
                     {"residual_n_list", s.residual_n_list}, {"expm_n", s.expm_n},
                     {"expm_nt_list", s.expm_nt_list}, {"b_list", s.b_list},
                     {"weighted_n", s.weighted_n},   {"weighted_nt", s.weighted_nt},
                     {"thetas", s.thetas},           {"smoothing_n_list", s.smoothing_n_list}};
  } else if (c.experiment == "observability") {
    const auto& o = c.observability;
    j["observability"] = {{"n_list", o.n_list},     {"taus", o.taus},           {"reference_tau", o.reference_tau},
                          {"oracle_n", o.oracle_n}, {"oracle_nt", o.oracle_nt}, {"sample_trials", o.sample_trials}};
  } else if (c.experiment == "carleman") {
    const auto& k = c.carleman;
    nlohmann::ordered_json s = "auto";
    if (k.s) s = *k.s;
    j["carleman"] = {{"s", s},
                     {"multiples", k.multiples},
                     {"coefficient_samples", k.coefficient_samples},
                     {"trials", k.trials},
                     {"scan_nx", k.scan_nx},
                     {"scan_nt", k.scan_nt},
                     {"weight_samples", k.weight_samples}};
  } else if (c.experiment == "control") {
    const auto& k = c.control;
    j["control"] = {{"tau", k.tau}, {"cg_tol", k.cg_tol}, {"cg_max", k.cg_max}, {"modes", k.modes},
                    {"oracle_n", k.oracle_n}};
    j["cutoff"] = {{"n", c.cutoff.n}, {"T", c.cutoff.T}, {"nt", c.cutoff.nt}, {"eps", c.cutoff.eps}, {"eps_prime", eps_prime(c)}};
    const auto& w = c.half_line;
    j["half_line"] = {{"b", w.b},     {"X", w.X},         {"n", w.n},
                     {"T", w.T},     {"nt", w.nt},       {"eps", w.eps},
                     {"omega_lo", w.omega_lo}, {"omega_hi", w.omega_hi}, {"cg_max", w.cg_max}};
  }
  return j;
}

}  // namespace kdvb::lab
