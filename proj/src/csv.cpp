#include "roughmle/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "roughmle/errors.hpp"

namespace roughmle {

namespace {

template <typename T>
std::string optional_field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

double parse_double(const std::string& text, int lineno) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("line " + std::to_string(lineno) + ": cannot parse '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error("double formatting failed");
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_results_csv(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  os << kResultsHeader << '\n';
  for (const auto& r : rows) {
    os << r.experiment << ',' << format_double(r.H) << ',' << optional_field(r.epsilon) << ','
       << optional_field(r.alpha) << ',' << optional_field(r.delta) << ',' << optional_field(r.n)
       << ',' << optional_field(r.M) << ',' << r.stat << ',' << format_double(r.value) << ','
       << optional_field(r.se) << ',' << r.seed_base << '\n';
  }
}

void write_spectral_csv(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  struct Entry {
    double norm = 0.0;
    double ratio = 0.0;
    double log2_ratio = 0.0;
  };
  std::vector<std::pair<double, std::size_t>> order;
  std::map<std::pair<double, std::size_t>, Entry> entries;
  for (const auto& r : rows) {
    if (r.experiment != "spectral_norm" || !r.n) continue;
    const auto key = std::make_pair(r.H, *r.n);
    if (!entries.contains(key)) order.push_back(key);
    auto& e = entries[key];
    if (r.stat == "inv_spectral_norm") e.norm = r.value;
    if (r.stat == "ratio") e.ratio = r.value;
    if (r.stat == "log2_ratio") e.log2_ratio = r.value;
  }
  os << kSpectralHeader << '\n';
  for (const auto& key : order) {
    const auto& e = entries[key];
    const double beta = std::max(1.0, 2.0 * key.first);
    os << format_double(key.first) << ',' << key.second << ',' << format_double(beta) << ','
       << format_double(e.norm) << ',' << format_double(e.ratio) << ','
       << format_double(e.log2_ratio) << '\n';
  }
}

void write_path_csv(std::ostream& os, const MultiscalePaths& paths, std::size_t stride) {
  if (stride == 0) throw ConfigError("path output stride must be positive");
  os << kPathHeader << '\n';
  for (std::size_t k = 0; k < paths.slow.size(); k += stride) {
    os << format_double(paths.slow.times[k]) << ',' << format_double(paths.slow.values[k]) << ','
       << format_double(paths.fast.values[k]) << ',' << format_double(paths.driver.values[k])
       << '\n';
  }
}

TimeSeries read_time_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("'" + path + "' is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "t" || header[1] != "x") {
    throw ConfigError("'" + path + "' must start with a 't,x' header");
  }
  TimeSeries ts;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 2) throw ConfigError("line " + std::to_string(lineno) + ": need t,x");
    ts.t.push_back(parse_double(fields[0], lineno));
    ts.x.push_back(parse_double(fields[1], lineno));
  }
  if (ts.t.size() < 2) throw ConfigError("time series needs at least two rows");
  const double step = ts.t[1] - ts.t[0];
  if (!(step > 0.0)) throw ConfigError("time stamps must increase");
  for (std::size_t k = 1; k < ts.t.size(); ++k) {
    if (std::fabs(ts.t[k] - ts.t[k - 1] - step) > 1e-9 * std::max(1.0, std::fabs(ts.t[k]))) {
      throw ConfigError("time stamps are not uniform at row " + std::to_string(k + 1));
    }
  }
  return ts;
}

}  // namespace roughmle
