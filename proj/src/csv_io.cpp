#include "netmfg/csv_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "netmfg/config.hpp"

namespace netmfg {

std::string trial_csv(const RunLog& log) {
  std::vector<MetricRow> rows(log.rows().begin(), log.rows().end());
  std::stable_sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
    return a.k != b.k ? a.k < b.k : a.metric < b.metric;
  });
  std::string out = "k,metric,value\n";
  for (const auto& row : rows) {
    out += std::to_string(row.k) + "," + to_string(row.metric) + "," + format_double(row.value) + "\n";
  }
  return out;
}

std::string aggregate_csv(std::span<const AggregateRow> rows) {
  std::string out = "k,metric,mean,std,n_trials\n";
  for (const auto& row : rows) {
    out += std::to_string(row.k) + "," + to_string(row.metric) + "," + format_double(row.mean) + "," +
           format_double(row.std) + "," + std::to_string(row.n_trials) + "\n";
  }
  return out;
}

RunLog parse_trial_csv(const std::string& text, std::uint64_t seed, std::string digest) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "k,metric,value") throw std::runtime_error("trial csv: bad header");
  RunLog log(seed, std::move(digest));
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw std::runtime_error("trial csv: malformed line " + std::to_string(line_no));
    try {
      const int k = std::stoi(line.substr(0, c1));
      const Metric metric = metric_from_string(line.substr(c1 + 1, c2 - c1 - 1));
      const std::string value = line.substr(c2 + 1);
      char* end = nullptr;
      const double v = std::strtod(value.c_str(), &end);
      if (value.empty() || end != value.c_str() + value.size()) throw std::invalid_argument("bad value");
      log.record(k, metric, v);
    } catch (const std::exception& e) {
      throw std::runtime_error("trial csv: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace netmfg
