// Benchmark driver for the composite-splitting library.
//
//   pdbench run     <config>   run every applicable algorithm, write traces
//   pdbench verify  <config>   check contraction envelopes and reductions
//   pdbench rates   <config>   sweep conditioning, predicted vs measured
//   pdbench spectra <matrix>   print the spectral summary of a matrix file
//
// Exit codes: 0 success, 1 verification failure or divergence,
// 2 configuration or feasibility error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pdsplit/config.hpp"
#include "pdsplit/harness.hpp"

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"composite-splitting benchmark driver"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<long> max_iters;
  std::optional<std::string> out_dir;
  std::optional<std::string> algs;
  bool timing = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config file")
        ->required();
    sub->add_option("--seed", seed, "override the instance seed");
    sub->add_option("--max-iters", max_iters, "override the iteration budget");
    sub->add_option("--out", out_dir, "override the output directory");
    sub->add_option("--algs", algs,
                    "override the algorithm list (comma separated)");
    sub->add_flag("--timing", timing,
                  "record wall-clock nanoseconds in traces");
  };

  CLI::App* run_cmd =
      app.add_subcommand("run", "run algorithms and write trace files");
  add_common(run_cmd);
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "check contraction envelopes and reduction identities");
  add_common(verify_cmd);
  CLI::App* rates_cmd = app.add_subcommand(
      "rates", "sweep conditioning and compare predicted vs measured");
  add_common(rates_cmd);

  std::string matrix_path;
  CLI::App* spectra_cmd = app.add_subcommand(
      "spectra", "print the spectral summary of a plain-text matrix");
  spectra_cmd
      ->add_option("matrix", matrix_path,
                   "matrix file: first line \"rows cols\", then one line per row")
      ->required();

  CLI11_PARSE(app, argc, argv);

  return pdsplit::run_guarded(
      [&]() -> int {
        if (spectra_cmd->parsed()) {
          return pdsplit::cmd_spectra(matrix_path, std::cout);
        }
        pdsplit::ExperimentConfig config =
            pdsplit::load_config_file(config_path);
        if (seed) config.seed = *seed;
        if (max_iters) config.max_iters = *max_iters;
        if (out_dir) config.out_dir = *out_dir;
        if (timing) config.timing = true;
        if (algs) {
          config.algorithms.clear();
          std::istringstream in(*algs);
          std::string item;
          while (std::getline(in, item, ',')) {
            item = trim(item);
            if (!item.empty()) {
              config.algorithms.push_back(
                  pdsplit::algorithm_from_string(item));
            }
          }
        }
        if (run_cmd->parsed()) return pdsplit::cmd_run(config, std::cout);
        if (verify_cmd->parsed()) return pdsplit::cmd_verify(config, std::cout);
        if (rates_cmd->parsed()) return pdsplit::cmd_rates(config, std::cout);
        return 2;
      },
      std::cerr);
}
