#pragma once

// Benchmark harness: turns an ExperimentConfig into generated instances,
// per-algorithm stepsizes and rate bounds, solver runs, trace files, and the
// CLI subcommands built on top of them.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pdsplit/config.hpp"
#include "pdsplit/contraction.hpp"
#include "pdsplit/generators.hpp"
#include "pdsplit/problem.hpp"
#include "pdsplit/solvers.hpp"
#include "pdsplit/stepsizes.hpp"
#include "pdsplit/trace.hpp"

namespace pdsplit {

// Constants read off the problem handles and the operator's spectral summary.
// L_g is absent when g is not smooth; the operator fields are absent for
// two-function problems.
struct ProblemConstants {
  double L_f = 0.0;
  double mu_g = 0.0;
  double mu_hstar = 0.0;
  std::optional<double> L_g;
  std::optional<double> K_norm;
  std::optional<double> lambda_min;
  std::optional<double> lambda_min_pos;
};

ProblemConstants problem_constants(const CompositeProblem& problem);

struct ResolvedRun {
  StepSizes ss;
  RateBound rate;
  bool fallback = false;          // closed-form rule inapplicable; neutral
                                  // feasible stepsizes substituted
  bool envelope_claimed = false;  // a geometric envelope is asserted
};

// Stepsizes for the anchored schemes: the regime's closed-form values (or a
// neutral feasible fallback when their hypotheses fail, e.g. mu_g = 0),
// overridden by any explicit [stepsizes] entries, then validated against the
// regime's feasibility constraint. Throws InfeasibleError naming the violated
// constraint.
ResolvedRun resolve_anchored(const CompositeProblem& problem, Regime regime,
                             const ExperimentConfig& config);

// Per-algorithm resolution. Anchored schemes share resolve_anchored.
// Baselines always run with eta_z = 1 (the exact-reduction point) and ignore
// [stepsizes] overrides:
//   pgd        eta_x = 1/L_f                      (claims the two-function rate)
//   cv1, cv2   eta_x = 1/(2 L_f), eta_y = L_f/||K||^2 in the smooth regime,
//              eta_x = 1/(8 L_f), eta_y = L_f/||K||^2 otherwise   (claim rates)
//   frb        eta_x = 1/(4 L_f)                                  (no claim)
//   pdtr1/2    eta_x = 1/(4 L_f), eta_y = L_f/||K||^2             (no claim)
//   cp         eta_x = min{0.95/||K||, 1/(2 L_f)}, eta_y = 1/(2||K||^2 eta_x)
//                                                                 (no claim)
// Unclaimed baselines still satisfy the smooth-regime constraint so the
// recorded merit stays nonnegative.
ResolvedRun resolve_for_algorithm(const CompositeProblem& problem,
                                  Regime regime, AlgorithmId alg,
                                  const ExperimentConfig& config);

// Algorithms admissible for the problem shape. Two-function problems admit
// {apgd, apge, pgd, frb}; primal-dual problems admit the eight primal-dual
// schemes plus cp when both f and g are quadratic-family. A non-empty request
// is validated entry by entry (ConfigError otherwise).
std::vector<AlgorithmId> applicable_algorithms(
    const CompositeProblem& problem, const std::vector<AlgorithmId>& requested);

// First recorded iteration with value <= eps_rel * value at k = 0; -1 if the
// trace never gets there.
long measured_iterations(const std::vector<LyapunovRecord>& trace,
                         double eps_rel);

// Deterministic starting primal point for a seed (the dual starts at zero and
// the anchor at x0; init() applies both defaults).
Vec starting_point(const CompositeProblem& problem, std::uint64_t seed);

// Largest componentwise deviation between the anchored scheme and its
// baseline over `iters` steps from the shared start, both run with the same
// stepsizes (which should have eta_z = 1 for the identity to be exact).
double max_reduction_deviation(const CompositeProblem& problem,
                               AlgorithmId anchored, AlgorithmId baseline,
                               const StepSizes& ss, const Vec& x0, long iters);

// Generated instance plus its certified reference solution and constants.
struct PreparedExperiment {
  CompositeProblem problem;
  ReferenceSolution reference;
  ProblemConstants constants;
};

PreparedExperiment prepare(const ExperimentConfig& config,
                           double reference_tol = 1e-10);

// Subcommands. Each prints to `out` and returns a process exit code:
// 0 on success, 1 when a verification check fails.
int cmd_run(const ExperimentConfig& config, std::ostream& out);
int cmd_verify(const ExperimentConfig& config, std::ostream& out);
int cmd_rates(const ExperimentConfig& config, std::ostream& out);
int cmd_spectra(const std::string& matrix_path, std::ostream& out);

// Runs body(), mapping the exception taxonomy onto exit codes: ConfigError,
// InfeasibleError and invalid_argument (bad shapes or parameters) exit 2;
// DivergenceError and any other runtime failure exit 1.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace pdsplit
