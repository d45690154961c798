#pragma once

// Trace serialization: per-iteration CSV files and a JSON metadata sidecar
// describing the run that produced them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdsplit/solvers.hpp"
#include "pdsplit/stepsizes.hpp"

namespace pdsplit {

// CSV layout: header "iter,lyapunov,envelope,kkt,wall_ns", one row per
// recorded iteration, doubles with 17 significant digits.
std::string trace_to_csv(const std::vector<LyapunovRecord>& trace);
void write_trace_file(const std::string& path,
                      const std::vector<LyapunovRecord>& trace);

// Strict inverse of trace_to_csv: the header must match exactly and every
// row must have the five expected fields.
std::vector<LyapunovRecord> trace_from_csv(const std::string& text);
std::vector<LyapunovRecord> read_trace_file(const std::string& path);

// Everything needed to interpret a trace without re-running the solver.
struct TraceMetadata {
  std::string algorithm;
  std::string regime;
  std::uint64_t seed = 0;
  StepSizes stepsizes;
  RateBound rate;
  bool envelope_claimed = false;  // whether the contraction bound applies
  bool fallback = false;          // closed-form stepsizes were unavailable
  bool timing = false;
  double reference_kkt = 0.0;     // certified residual of the reference point

  // Problem constants. The operator fields are absent for two-function
  // problems; lambda_min_pos is only computed for linearly constrained ones.
  double L_f = 0.0;
  double mu_g = 0.0;
  double L_g = 0.0;
  double mu_hstar = 0.0;
  std::optional<double> K_norm;
  std::optional<double> lambda_min;
  std::optional<double> lambda_min_pos;
};

std::string metadata_to_json(const TraceMetadata& meta);
void write_metadata_file(const std::string& path, const TraceMetadata& meta);

}  // namespace pdsplit
