#include "pdsplit/trace.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pdsplit/errors.hpp"

namespace pdsplit {

namespace {

constexpr const char* kHeader = "iter,lyapunov,envelope,kkt,wall_ns";

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw ConfigError("write failed for " + path);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, ',')) fields.push_back(item);
  return fields;
}

}  // namespace

std::string trace_to_csv(const std::vector<LyapunovRecord>& trace) {
  std::string out = kHeader;
  out += '\n';
  char buf[256];
  for (const LyapunovRecord& rec : trace) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%" PRIu64 "\n",
                  rec.k, rec.value, rec.envelope, rec.kkt, rec.wall_ns);
    out += buf;
  }
  return out;
}

void write_trace_file(const std::string& path,
                      const std::vector<LyapunovRecord>& trace) {
  write_text_file(path, trace_to_csv(trace));
}

std::vector<LyapunovRecord> trace_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    throw ConfigError("trace: expected header '" + std::string(kHeader) +
                      "', got '" + line + "'");
  }
  std::vector<LyapunovRecord> trace;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 5) {
      throw ConfigError("trace: expected 5 fields, got " +
                        std::to_string(fields.size()) + " in '" + line + "'");
    }
    try {
      LyapunovRecord rec;
      std::size_t pos = 0;
      rec.k = std::stol(fields[0], &pos);
      if (pos != fields[0].size()) throw std::invalid_argument(fields[0]);
      rec.value = std::stod(fields[1], &pos);
      if (pos != fields[1].size()) throw std::invalid_argument(fields[1]);
      rec.envelope = std::stod(fields[2], &pos);
      if (pos != fields[2].size()) throw std::invalid_argument(fields[2]);
      rec.kkt = std::stod(fields[3], &pos);
      if (pos != fields[3].size()) throw std::invalid_argument(fields[3]);
      rec.wall_ns = std::stoull(fields[4], &pos);
      if (pos != fields[4].size()) throw std::invalid_argument(fields[4]);
      trace.push_back(rec);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("trace: malformed row '" + line + "'");
    }
  }
  return trace;
}

std::vector<LyapunovRecord> read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return trace_from_csv(buffer.str());
}

std::string metadata_to_json(const TraceMetadata& meta) {
  nlohmann::json j;
  j["algorithm"] = meta.algorithm;
  j["regime"] = meta.regime;
  j["seed"] = meta.seed;

  nlohmann::json steps;
  steps["eta_x"] = meta.stepsizes.eta_x;
  if (meta.stepsizes.eta_y) steps["eta_y"] = *meta.stepsizes.eta_y;
  steps["eta_z"] = meta.stepsizes.eta_z;
  j["stepsizes"] = steps;

  nlohmann::json rate;
  rate["theta"] = meta.rate.theta;
  rate["no_linear_rate"] = meta.rate.no_linear_rate;
  nlohmann::json components = nlohmann::json::object();
  for (const auto& [name, value] : meta.rate.components) {
    components[name] = value;
  }
  rate["components"] = components;
  j["rate"] = rate;

  j["envelope_claimed"] = meta.envelope_claimed;
  j["fallback_stepsizes"] = meta.fallback;
  j["timing"] = meta.timing;
  j["reference_kkt"] = meta.reference_kkt;

  nlohmann::json constants;
  constants["L_f"] = meta.L_f;
  constants["mu_g"] = meta.mu_g;
  constants["L_g"] = meta.L_g;
  constants["mu_hstar"] = meta.mu_hstar;
  if (meta.K_norm) constants["K_norm"] = *meta.K_norm;
  if (meta.lambda_min) constants["lambda_min"] = *meta.lambda_min;
  if (meta.lambda_min_pos) constants["lambda_min_pos"] = *meta.lambda_min_pos;
  j["constants"] = constants;

  return j.dump(2) + "\n";
}

void write_metadata_file(const std::string& path, const TraceMetadata& meta) {
  write_text_file(path, metadata_to_json(meta));
}

}  // namespace pdsplit
