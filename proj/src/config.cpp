#include "pdsplit/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "pdsplit/errors.hpp"

namespace pdsplit {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": '" + value + "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size() || (!value.empty() && value[0] == '-')) {
      throw std::invalid_argument(value);
    }
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("config: bad unsigned integer for " + key + ": '" +
                      value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + value + "'");
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  config.algorithms.clear();
  config.sweep_conditioning.clear();

  std::istringstream in(text);
  std::string line;
  std::string section;
  std::set<std::string> seen;

  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: malformed section: " + line);
      section = line.substr(1, line.size() - 2);
      if (section != "problem" && section != "run" &&
          section != "stepsizes" && section != "sweep") {
        throw ConfigError("config: unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected 'key = value': " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qualified = section + "." + key;
    if (!seen.insert(qualified).second) {
      throw ConfigError("config: duplicate key " + qualified);
    }

    if (section == "problem") {
      if (key == "regime") {
        config.regime = regime_from_string(value);
      } else if (key == "d_x") {
        config.d_x = parse_long(qualified, value);
      } else if (key == "d_y") {
        config.d_y = parse_long(qualified, value);
      } else if (key == "seed") {
        config.seed = parse_u64(qualified, value);
      } else if (key == "conditioning") {
        config.conditioning = parse_double(qualified, value);
      } else if (key == "mu_g") {
        config.mu_g = parse_double(qualified, value);
      } else if (key == "mu_hstar") {
        config.mu_hstar = parse_double(qualified, value);
      } else if (key == "l1_weight") {
        config.l1_weight = parse_double(qualified, value);
      } else {
        throw ConfigError("config: unknown key " + qualified);
      }
    } else if (section == "run") {
      if (key == "algs") {
        for (const std::string& name : split_list(value)) {
          config.algorithms.push_back(algorithm_from_string(name));
        }
      } else if (key == "max_iters") {
        config.max_iters = parse_long(qualified, value);
      } else if (key == "kkt_tol") {
        config.kkt_tol = parse_double(qualified, value);
      } else if (key == "slack") {
        config.slack = parse_double(qualified, value);
      } else if (key == "out") {
        config.out_dir = value;
      } else if (key == "timing") {
        config.timing = parse_bool(qualified, value);
      } else {
        throw ConfigError("config: unknown key " + qualified);
      }
    } else if (section == "stepsizes") {
      if (key == "eta_x") {
        config.eta_x = parse_double(qualified, value);
      } else if (key == "eta_y") {
        config.eta_y = parse_double(qualified, value);
      } else if (key == "eta_z") {
        config.eta_z = parse_double(qualified, value);
      } else {
        throw ConfigError("config: unknown key " + qualified);
      }
    } else if (section == "sweep") {
      if (key == "conditioning") {
        for (const std::string& item : split_list(value)) {
          config.sweep_conditioning.push_back(parse_double(qualified, item));
        }
      } else {
        throw ConfigError("config: unknown key " + qualified);
      }
    } else {
      throw ConfigError("config: key outside any section: " + line);
    }
  }
  return config;
}

std::string emit_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "[problem]\n";
  out << "regime = " << to_string(config.regime) << "\n";
  out << "d_x = " << config.d_x << "\n";
  out << "d_y = " << config.d_y << "\n";
  out << "seed = " << config.seed << "\n";
  out << "conditioning = " << fmt_double(config.conditioning) << "\n";
  out << "mu_g = " << fmt_double(config.mu_g) << "\n";
  out << "mu_hstar = " << fmt_double(config.mu_hstar) << "\n";
  out << "l1_weight = " << fmt_double(config.l1_weight) << "\n";
  out << "\n[run]\n";
  out << "algs = ";
  for (std::size_t i = 0; i < config.algorithms.size(); ++i) {
    if (i) out << ",";
    out << to_string(config.algorithms[i]);
  }
  out << "\n";
  out << "max_iters = " << config.max_iters << "\n";
  out << "kkt_tol = " << fmt_double(config.kkt_tol) << "\n";
  out << "slack = " << fmt_double(config.slack) << "\n";
  out << "out = " << config.out_dir << "\n";
  out << "timing = " << (config.timing ? "true" : "false") << "\n";
  if (config.eta_x || config.eta_y || config.eta_z) {
    out << "\n[stepsizes]\n";
    if (config.eta_x) out << "eta_x = " << fmt_double(*config.eta_x) << "\n";
    if (config.eta_y) out << "eta_y = " << fmt_double(*config.eta_y) << "\n";
    if (config.eta_z) out << "eta_z = " << fmt_double(*config.eta_z) << "\n";
  }
  if (!config.sweep_conditioning.empty()) {
    out << "\n[sweep]\n";
    out << "conditioning = ";
    for (std::size_t i = 0; i < config.sweep_conditioning.size(); ++i) {
      if (i) out << ",";
      out << fmt_double(config.sweep_conditioning[i]);
    }
    out << "\n";
  }
  return out.str();
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace pdsplit
