#include "roughmle/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "roughmle/errors.hpp"

namespace roughmle {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> split_list(const std::string& raw) {
  std::string body = trim(raw);
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') throw ConfigError("unterminated list '" + raw + "'");
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> items;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(unquote(item));
  }
  return items;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid value '" + text + "' for key '" + key + "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& raw) {
  std::vector<T> out;
  for (const auto& item : split_list(raw)) out.push_back(parse_number<T>(key, item));
  return out;
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& key_in,
                        const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string value = unquote(trim(value_in));
  if (key == "experiment") {
    cfg.experiment = parse_experiment(value);
  } else if (key == "H") {
    cfg.H = parse_list<double>(key, value);
  } else if (key == "epsilon" || key == "eps") {
    cfg.epsilon = parse_list<double>(key, value);
  } else if (key == "alpha") {
    cfg.alpha = parse_list<double>(key, value);
  } else if (key == "n") {
    cfg.n = parse_list<std::size_t>(key, value);
  } else if (key == "delta_halvings") {
    cfg.delta_halvings = parse_list<int>(key, value);
  } else if (key == "M") {
    cfg.M = parse_number<std::size_t>(key, value);
  } else if (key == "sigma") {
    cfg.sigma = parse_number<double>(key, value);
  } else if (key == "T") {
    cfg.T = parse_number<double>(key, value);
  } else if (key == "seed_base" || key == "seed") {
    cfg.seed_base = parse_number<std::uint64_t>(key, value);
  } else if (key == "parallelism") {
    cfg.parallelism = value == "auto" ? 0 : parse_number<std::size_t>(key, value);
  } else if (key == "kappa") {
    cfg.kappa = parse_number<int>(key, value);
  } else if (key == "burn_in" || key == "burn_in_multiple") {
    cfg.burn_in_multiple = parse_number<double>(key, value);
  } else if (key == "scheme") {
    cfg.scheme = parse_scheme(value);
  } else if (key == "x0") {
    cfg.x0 = parse_number<double>(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;  // blank or a table header
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_config_entry(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace roughmle
