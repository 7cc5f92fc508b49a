#include "netmfg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace netmfg {

ConfigError::ConfigError(int line, const std::string& key, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (key.empty() ? "" : "'" + key + "': ") + message),
      line_(line),
      key_(key) {}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct Ctx {
  const std::string& key;
  int line;
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(line, key, msg); }
};

long long parse_int(const std::string& v, const Ctx& ctx) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) ctx.fail("expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& v, const Ctx& ctx) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) ctx.fail("expected an unsigned integer, got '" + v + "'");
  return out;
}

double parse_real(const std::string& v, const Ctx& ctx) {
  if (v.empty()) ctx.fail("expected a number");
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size()) ctx.fail("expected a number, got '" + v + "'");
  return out;
}

int bounded_int(const std::string& v, const Ctx& ctx, long long lo) {
  const long long x = parse_int(v, ctx);
  if (x < lo || x > 2'000'000'000LL) ctx.fail("out of range: " + v);
  return static_cast<int>(x);
}

double real_in(const std::string& v, const Ctx& ctx, double lo, bool lo_open, double hi, bool hi_open) {
  const double x = parse_real(v, ctx);
  const bool ok_lo = lo_open ? x > lo : x >= lo;
  const bool ok_hi = hi_open ? x < hi : x <= hi;
  if (!ok_lo || !ok_hi) {
    ctx.fail("out of range: " + v + " not in " + (lo_open ? "(" : "[") + format_double(lo) + ", " +
             format_double(hi) + (hi_open ? ")" : "]"));
  }
  return x;
}

template <typename E>
E choice(const std::string& v, const Ctx& ctx, std::initializer_list<std::pair<const char*, E>> options) {
  std::string allowed;
  for (const auto& [name, value] : options) {
    if (v == name) return value;
    allowed += allowed.empty() ? name : std::string("|") + name;
  }
  ctx.fail("expected one of " + allowed + ", got '" + v + "'");
}

struct KeySpec {
  std::function<void(ExperimentConfig&, const std::string&, const Ctx&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

constexpr double kInf = 1e308;

const std::map<std::string, KeySpec>& registry() {
  static const std::map<std::string, KeySpec> keys = [] {
    std::map<std::string, KeySpec> m;
    auto int_key = [&](const char* name, int Hyperparams::*field, long long lo) {
      m[name] = {[=](ExperimentConfig& c, const std::string& v, const Ctx& ctx) { c.hp.*field = bounded_int(v, ctx, lo); },
                 [=](const ExperimentConfig& c) { return std::to_string(c.hp.*field); }};
    };
    auto real_key = [&](const char* name, double Hyperparams::*field, double lo, bool lo_open, double hi,
                        bool hi_open) {
      m[name] = {[=](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                   c.hp.*field = real_in(v, ctx, lo, lo_open, hi, hi_open);
                 },
                 [=](const ExperimentConfig& c) { return format_double(c.hp.*field); }};
    };

    int_key("K", &Hyperparams::K, 0);
    int_key("M_pg", &Hyperparams::M_pg, 0);
    int_key("M_td", &Hyperparams::M_td, 0);
    int_key("C", &Hyperparams::C, 0);
    int_key("L", &Hyperparams::L, 0);
    int_key("E", &Hyperparams::E, 0);
    real_key("gamma", &Hyperparams::gamma, 0.0, false, 1.0, true);
    real_key("beta", &Hyperparams::beta, 0.0, true, kInf, false);
    real_key("eta", &Hyperparams::eta, 0.0, true, kInf, false);
    real_key("lambda", &Hyperparams::lambda, 0.0, false, kInf, false);
    real_key("p_inf", &Hyperparams::p_inf, 0.0, true, 1.0, false);
    real_key("delta_mix", &Hyperparams::delta_mix, 0.0, true, 1.0, false);
    real_key("broadcast_radius_fraction", &Hyperparams::broadcast_radius_fraction, 0.0, false, 1.0, false);
    real_key("fail_prob", &Hyperparams::fail_prob, 0.0, false, 1.0, false);

    m["n_agents"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                       c.hp.n_agents = static_cast<std::size_t>(bounded_int(v, ctx, 1));
                     },
                     [](const ExperimentConfig& c) { return std::to_string(c.hp.n_agents); }};
    m["beta_schedule"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                            c.hp.beta_schedule = choice<BetaSchedule::Kind>(
                                v, ctx, {{"fixed", BetaSchedule::Kind::Fixed}, {"theoretical", BetaSchedule::Kind::Theoretical}});
                          },
                          [](const ExperimentConfig& c) {
                            return std::string(c.hp.beta_schedule == BetaSchedule::Kind::Fixed ? "fixed" : "theoretical");
                          }};
    m["tau_schedule"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                           c.hp.tau.kind = choice<TauSchedule::Kind>(v, ctx,
                                                                     {{"annealed", TauSchedule::Kind::Annealed},
                                                                      {"fixed", TauSchedule::Kind::Fixed},
                                                                      {"max", TauSchedule::Kind::MaxSelection}});
                         },
                         [](const ExperimentConfig& c) {
                           switch (c.hp.tau.kind) {
                             case TauSchedule::Kind::Annealed: return std::string("annealed");
                             case TauSchedule::Kind::Fixed: return std::string("fixed");
                             case TauSchedule::Kind::MaxSelection: return std::string("max");
                           }
                           return std::string();
                         }};
    m["tau_value"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                        c.hp.tau.value = real_in(v, ctx, 0.0, true, kInf, false);
                      },
                      [](const ExperimentConfig& c) { return format_double(c.hp.tau.value); }};
    m["architecture"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                           c.hp.architecture = choice<Architecture>(v, ctx,
                                                                    {{"centralised", Architecture::Centralised},
                                                                     {"independent", Architecture::Independent},
                                                                     {"networked", Architecture::Networked}});
                         },
                         [](const ExperimentConfig& c) { return to_string(c.hp.architecture); }};
    m["algorithm"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                        c.hp.algorithm = choice<Algorithm>(
                            v, ctx, {{"replay", Algorithm::Replay}, {"theoretical", Algorithm::Theoretical}});
                      },
                      [](const ExperimentConfig& c) { return to_string(c.hp.algorithm); }};
    m["sigma_mode"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                         c.hp.sigma_mode = choice<SigmaMode>(
                             v, ctx, {{"index", SigmaMode::AgentIndex}, {"return", SigmaMode::Return}});
                       },
                       [](const ExperimentConfig& c) { return to_string(c.hp.sigma_mode); }};
    m["population_add_k"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                               if (!c.hp.population_add) c.hp.population_add = PopulationEvent{};
                               c.hp.population_add->k_add = bounded_int(v, ctx, 0);
                             },
                             [](const ExperimentConfig& c) {
                               return std::to_string(c.hp.population_add ? c.hp.population_add->k_add : 0);
                             }};
    m["population_add_n"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                               if (!c.hp.population_add) c.hp.population_add = PopulationEvent{};
                               c.hp.population_add->n_add = static_cast<std::size_t>(bounded_int(v, ctx, 0));
                             },
                             [](const ExperimentConfig& c) {
                               return std::to_string(c.hp.population_add ? c.hp.population_add->n_add : 0);
                             }};
    m["game"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                   c.game = choice<GameKind::Kind>(
                       v, ctx, {{"cluster", GameKind::Kind::Cluster}, {"target_agreement", GameKind::Kind::TargetAgreement}});
                 },
                 [](const ExperimentConfig& c) {
                   return std::string(c.game == GameKind::Kind::Cluster ? "cluster" : "target_agreement");
                 }};
    m["targets"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                      c.targets.clear();
                      if (v == "corners") return;
                      std::stringstream ss(v);
                      std::string item;
                      while (std::getline(ss, item, ',')) {
                        const long long s = parse_int(trim(item), ctx);
                        if (s < 0) ctx.fail("negative target index");
                        c.targets.push_back(static_cast<StateIndex>(s));
                      }
                      if (c.targets.empty()) ctx.fail("empty target list");
                    },
                    [](const ExperimentConfig& c) {
                      if (c.targets.empty()) return std::string("corners");
                      std::string out;
                      for (StateIndex s : c.targets) out += (out.empty() ? "" : ",") + std::to_string(s);
                      return out;
                    }};
    m["grid_width"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                         c.grid.width = static_cast<std::size_t>(bounded_int(v, ctx, 1));
                       },
                       [](const ExperimentConfig& c) { return std::to_string(c.grid.width); }};
    m["grid_height"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                          c.grid.height = static_cast<std::size_t>(bounded_int(v, ctx, 1));
                        },
                        [](const ExperimentConfig& c) { return std::to_string(c.grid.height); }};
    m["trials"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) { c.trials = bounded_int(v, ctx, 1); },
                   [](const ExperimentConfig& c) { return std::to_string(c.trials); }};
    m["base_seed"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) { c.base_seed = parse_u64(v, ctx); },
                      [](const ExperimentConfig& c) { return std::to_string(c.base_seed); }};
    m["exploitability_every"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                                   c.metrics.exploitability_every = bounded_int(v, ctx, 0);
                                 },
                                 [](const ExperimentConfig& c) { return std::to_string(c.metrics.exploitability_every); }};
    m["exploitability_loops"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                                   c.metrics.exploitability_loops = bounded_int(v, ctx, 1);
                                 },
                                 [](const ExperimentConfig& c) { return std::to_string(c.metrics.exploitability_loops); }};
    m["output_dir"] = {[](ExperimentConfig& c, const std::string& v, const Ctx& ctx) {
                         if (v.empty()) ctx.fail("empty path");
                         c.output_dir = v;
                       },
                       [](const ExperimentConfig& c) { return c.output_dir; }};
    return m;
  }();
  return keys;
}

}  // namespace

GameKind ExperimentConfig::game_kind() const {
  if (game == GameKind::Kind::Cluster) return GameKind::cluster();
  return GameKind::target_agreement(grid, targets);
}

Hyperparams ExperimentConfig::trial_hyperparams(int index) const {
  Hyperparams out = hp;
  out.seed = base_seed + static_cast<std::uint64_t>(index);
  return out;
}

void ExperimentConfig::validate() const {
  try {
    hp.validate();
    grid.validate();
    game_kind().validate(grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, "", e.what());
  }
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line) {
  const auto& keys = registry();
  const auto it = keys.find(key);
  if (it == keys.end()) throw ConfigError(line, key, "unknown key");
  it->second.set(cfg, value, Ctx{key, line});
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::set<std::string> seen;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "", "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "", "missing key");
    if (!seen.insert(key).second) throw ConfigError(line_no, key, "duplicate key");
    set_config_value(cfg, key, value, line_no);
  }
  cfg.validate();
  return cfg;
}

std::string serialise_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [key, spec] : registry()) out += key + " = " + spec.get(cfg) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [key, spec] : registry()) out.push_back(key);
  return out;
}

std::string config_digest(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [key, spec] : registry()) {
    if (key == "output_dir") continue;
    const std::string line = key + "=" + spec.get(cfg) + "\n";
    for (unsigned char c : line) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace netmfg
