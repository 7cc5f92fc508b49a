#include "netmfg/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <regex>

#include "netmfg/csv_io.hpp"
#include "netmfg/orchestrator.hpp"

namespace fs = std::filesystem;

namespace netmfg {

fs::path resolve_output_dir(const ExperimentConfig& cfg, const RunOverrides& ov) {
  if (ov.out_dir) return *ov.out_dir;
  fs::path dir = cfg.output_dir;
  if (dir.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root && *root) dir = fs::path(root) / dir;
  }
  return dir;
}

void execute_runs(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  cfg.validate();
  fs::create_directories(dir);
  const std::string digest = config_digest(cfg);
  const GameKind game = cfg.game_kind();
  std::vector<RunLog> logs;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const Hyperparams hp = cfg.trial_hyperparams(trial);
    RunLog run = run_experiment(hp, game, cfg.grid, cfg.metrics);
    run.set_config_digest(digest);
    const fs::path path = dir / ("trial_" + std::to_string(hp.seed) + ".csv");
    write_file(path, trial_csv(run));
    log << "wrote " << path.string() << "\n";
    logs.push_back(std::move(run));
  }
  write_file(dir / "aggregate.csv", aggregate_csv(aggregate_trials(logs)));
  write_file(dir / "config.txt", serialise_config(cfg));
  log << "wrote " << (dir / "aggregate.csv").string() << "\n";
}

namespace {

struct ValueList {
  std::string key;
  std::vector<std::string> values;
};

ValueList parse_list(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(0, text, "expected key=v1,v2,...");
  ValueList list{text.substr(0, eq), {}};
  std::string rest = text.substr(eq + 1);
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto comma = rest.find(',', start);
    const std::string v = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (v.empty()) throw ConfigError(0, list.key, "empty value in list");
    list.values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return list;
}

std::string directory_name(const std::string& name) {
  std::string out = name.empty() ? "base" : name;
  for (char& c : out) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')) c = '_';
  }
  return out;
}

// Multi-key variant names contain commas.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<SweepVariant> expand_sweep(const ExperimentConfig& base, const std::vector<std::string>& vary,
                                       const std::vector<std::string>& also) {
  std::vector<SweepVariant> variants{{"", "", base}};
  for (const auto& text : vary) {
    const ValueList list = parse_list(text);
    std::vector<SweepVariant> next;
    for (const auto& v : variants) {
      for (const auto& value : list.values) {
        SweepVariant child = v;
        set_config_value(child.cfg, list.key, value);
        child.name += (child.name.empty() ? "" : ",") + list.key + "=" + value;
        child.label += (child.label.empty() ? "" : ",") + value;
        next.push_back(std::move(child));
      }
    }
    variants = std::move(next);
  }
  for (const auto& text : also) {
    const ValueList list = parse_list(text);
    for (const auto& value : list.values) {
      SweepVariant extra{list.key + "=" + value, value, base};
      set_config_value(extra.cfg, list.key, value);
      variants.push_back(std::move(extra));
    }
  }
  for (auto& v : variants) v.cfg.validate();
  return variants;
}

void execute_sweep(const std::vector<SweepVariant>& variants, const fs::path& dir, std::ostream& log) {
  fs::create_directories(dir);
  std::string manifest = "variant,label,digest,aggregate_csv\n";
  for (const auto& v : variants) {
    const std::string sub = directory_name(v.name);
    execute_runs(v.cfg, dir / sub, log);
    manifest += csv_field(v.name) + "," + csv_field(v.label) + "," + config_digest(v.cfg) + "," + sub +
                "/aggregate.csv\n";
  }
  write_file(dir / "manifest.csv", manifest);
  log << "wrote " << (dir / "manifest.csv").string() << "\n";
}

void execute_aggregate(const fs::path& dir, const fs::path& out, std::ostream& log) {
  const ExperimentConfig cfg = parse_config(read_file(dir / "config.txt"));
  const std::string digest = config_digest(cfg);
  std::vector<fs::path> files;
  const std::regex pattern("trial_([0-9]+)\\.csv");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (std::regex_match(entry.path().filename().string(), pattern)) files.push_back(entry.path());
  }
  if (files.empty()) throw std::runtime_error("no trial_*.csv files in " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<RunLog> logs;
  for (const auto& f : files) {
    std::smatch m;
    const std::string name = f.filename().string();
    std::regex_match(name, m, pattern);
    logs.push_back(parse_trial_csv(read_file(f), std::stoull(m[1].str()), digest));
  }
  write_file(out, aggregate_csv(aggregate_trials(logs)));
  log << "wrote " << out.string() << " from " << logs.size() << " trials\n";
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Networked mean-field game learning simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string out_dir;

  auto* run = app.add_subcommand("run", "Run all trials of a config");
  run->add_option("--config", config_path, "Config file (key = value)")->required();
  run->add_option("--trials", trials, "Override the number of trials");
  run->add_option("--seed", seed, "Override base_seed");
  run->add_option("--out", out_dir, "Output directory (default: output_dir from the config)");

  std::vector<std::string> vary;
  std::vector<std::string> also;
  auto* sweep = app.add_subcommand("sweep", "Run a set of config variants");
  sweep->add_option("--config", config_path, "Base config file")->required();
  sweep->add_option("--vary", vary, "key=v1,v2,... (cross product across flags)");
  sweep->add_option("--also", also, "key=v1,v2,... (one extra variant per value)");
  sweep->add_option("--trials", trials, "Override the number of trials");
  sweep->add_option("--seed", seed, "Override base_seed");
  sweep->add_option("--out", out_dir, "Output directory");

  std::string agg_dir;
  std::string agg_out;
  auto* aggregate = app.add_subcommand("aggregate", "Recompute aggregate.csv from trial CSVs");
  aggregate->add_option("--dir", agg_dir, "Directory holding config.txt and trial_*.csv")->required();
  aggregate->add_option("--out", agg_out, "Output path (default: <dir>/aggregate.csv)");

  std::vector<const char*> argv{"netmfg"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return code;
  }

  try {
    RunOverrides ov;
    ov.trials = trials;
    ov.seed = seed;
    if (!out_dir.empty()) ov.out_dir = out_dir;

    if (*aggregate) {
      const fs::path dir = agg_dir;
      execute_aggregate(dir, agg_out.empty() ? dir / "aggregate.csv" : fs::path(agg_out), out);
      return 0;
    }

    ExperimentConfig cfg = parse_config(read_file(config_path));
    if (trials) set_config_value(cfg, "trials", std::to_string(*trials));
    if (seed) cfg.base_seed = *seed;
    const fs::path dir = resolve_output_dir(cfg, ov);
    if (*run) {
      execute_runs(cfg, dir, out);
    } else {
      execute_sweep(expand_sweep(cfg, vary, also), dir, out);
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace netmfg
