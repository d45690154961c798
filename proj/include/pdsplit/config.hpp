#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdsplit/solvers.hpp"
#include "pdsplit/stepsizes.hpp"

namespace pdsplit {

// Flat sectioned key-value experiment description. parse_config(emit_config(c))
// reproduces c exactly (doubles are emitted with 17 significant digits).
struct ExperimentConfig {
  // [problem]
  Regime regime = Regime::smooth_h;
  long d_x = 20;
  long d_y = 10;
  std::uint64_t seed = 1;
  double conditioning = 16.0;
  double mu_g = 1.0;
  double mu_hstar = 1.0;
  double l1_weight = 0.1;

  // [run]
  std::vector<AlgorithmId> algorithms;  // empty = every applicable algorithm
  long max_iters = 300;
  double kkt_tol = 0.0;  // 0 disables the KKT stop rule
  double slack = 1e-7;   // relative slack for envelope verification
  std::string out_dir = "traces";
  bool timing = false;   // off by default so traces are byte-identical

  // [stepsizes] — explicit overrides for the anchored algorithms; absent
  // entries resolve to the regime's closed-form values.
  std::optional<double> eta_x;
  std::optional<double> eta_y;
  std::optional<double> eta_z;

  // [sweep]
  std::vector<double> sweep_conditioning;

  bool operator==(const ExperimentConfig&) const = default;
};

// Strict parser: unknown sections or keys, malformed numbers, and duplicate
// keys are ConfigError.
ExperimentConfig parse_config(const std::string& text);
std::string emit_config(const ExperimentConfig& config);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace pdsplit
