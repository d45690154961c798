#include "pdsplit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "pdsplit/errors.hpp"
#include "pdsplit/prng.hpp"

namespace pdsplit {

namespace {

constexpr std::uint64_t kStartSalt = 0x9E3779B97F4A7C15ULL;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

RateBound unclaimed_rate() {
  RateBound rate;
  rate.theta = 1.0;
  rate.no_linear_rate = true;
  return rate;
}

// Feasible stepsizes that need none of the closed-form hypotheses: they put
// the regime constraint at its boundary but claim no contraction factor.
StepSizes neutral_stepsizes(Regime regime, const ProblemConstants& c) {
  StepSizes ss;
  ss.regime = regime;
  const double root = std::sqrt(c.L_f);
  ss.eta_x = 1.0 / root;
  const double ksq = c.K_norm.value_or(0.0) * c.K_norm.value_or(0.0);
  switch (regime) {
    case Regime::two_function:
      ss.eta_z = 1.0 / root;
      break;
    case Regime::smooth_h:
      ss.eta_y = ksq > 0.0 ? 1.0 / (2.0 * ksq * ss.eta_x) : 1.0;
      ss.eta_z = 1.0 / (2.0 * c.L_f * ss.eta_x);
      break;
    case Regime::nonsmooth_h:
    case Regime::linear_constraint:
      ss.eta_y = ksq > 0.0 ? 1.0 / (8.0 * ksq * ss.eta_x) : 1.0;
      ss.eta_z = 1.0 / (8.0 * c.L_f * ss.eta_x);
      break;
  }
  return ss;
}

RateBound rate_for(Regime regime, const StepSizes& ss,
                   const ProblemConstants& c) {
  const double inf = std::numeric_limits<double>::infinity();
  switch (regime) {
    case Regime::two_function:
      return theta_two_function(ss, c.mu_g);
    case Regime::smooth_h:
      return theta_smooth(ss, c.mu_g, c.mu_hstar);
    case Regime::nonsmooth_h:
      return theta_nonsmooth(ss, c.mu_g, c.L_g.value_or(inf), c.L_f,
                             c.lambda_min.value_or(0.0));
    case Regime::linear_constraint:
      return theta_nonsmooth(ss, c.mu_g, c.L_g.value_or(inf), c.L_f,
                             c.lambda_min_pos.value_or(0.0));
  }
  throw std::invalid_argument("unknown regime");
}

void check_regime_shape(const CompositeProblem& problem, Regime regime) {
  const bool pd = regime != Regime::two_function;
  if (pd != problem.primal_dual()) {
    throw ConfigError(std::string("regime ") + to_string(regime) +
                      " does not match the problem shape");
  }
}

void require_positive_steps(const StepSizes& ss) {
  const bool ok = ss.eta_x > 0.0 && ss.eta_z > 0.0 &&
                  (!ss.eta_y || *ss.eta_y > 0.0);
  if (!ok) throw InfeasibleError("stepsizes must be positive");
}

TraceMetadata make_metadata(const ExperimentConfig& config, AlgorithmId alg,
                            const ResolvedRun& rr,
                            const PreparedExperiment& prep) {
  TraceMetadata meta;
  meta.algorithm = to_string(alg);
  meta.regime = to_string(config.regime);
  meta.seed = config.seed;
  meta.stepsizes = rr.ss;
  meta.rate = rr.rate;
  meta.envelope_claimed = rr.envelope_claimed;
  meta.fallback = rr.fallback;
  meta.timing = config.timing;
  meta.reference_kkt = prep.reference.kkt_residual;
  meta.L_f = prep.constants.L_f;
  meta.mu_g = prep.constants.mu_g;
  meta.L_g = prep.constants.L_g.value_or(0.0);
  meta.mu_hstar = prep.constants.mu_hstar;
  meta.K_norm = prep.constants.K_norm;
  meta.lambda_min = prep.constants.lambda_min;
  meta.lambda_min_pos = prep.constants.lambda_min_pos;
  return meta;
}

}  // namespace

ProblemConstants problem_constants(const CompositeProblem& problem) {
  ProblemConstants c;
  c.L_f = problem.f.profile()->L;
  c.mu_g = problem.g.strong_convexity();
  if (problem.g.smooth()) c.L_g = problem.g.profile()->L;
  if (problem.h && problem.h->smooth() && problem.h->profile()->L > 0.0) {
    c.mu_hstar = conjugate_strong_convexity(*problem.h);
  }
  if (problem.spectral) {
    c.K_norm = problem.spectral->op_norm;
    c.lambda_min = problem.spectral->lambda_min;
    c.lambda_min_pos = problem.spectral->lambda_min_pos;
  }
  return c;
}

ResolvedRun resolve_anchored(const CompositeProblem& problem, Regime regime,
                             const ExperimentConfig& config) {
  check_regime_shape(problem, regime);
  const ProblemConstants c = problem_constants(problem);
  const double inf = std::numeric_limits<double>::infinity();

  ResolvedRun rr;
  try {
    switch (regime) {
      case Regime::two_function:
        rr.ss = stepsizes_two_function(c.L_f, c.mu_g);
        break;
      case Regime::smooth_h:
        rr.ss = stepsizes_smooth(c.L_f, c.mu_g, c.mu_hstar,
                                 c.K_norm.value_or(0.0));
        break;
      case Regime::nonsmooth_h:
        rr.ss = stepsizes_nonsmooth(c.L_f, c.L_g.value_or(inf), c.mu_g,
                                    c.K_norm.value_or(0.0),
                                    c.lambda_min.value_or(0.0));
        break;
      case Regime::linear_constraint:
        rr.ss = stepsizes_linear_constraint(c.L_f, c.L_g.value_or(inf), c.mu_g,
                                            c.K_norm.value_or(0.0),
                                            c.lambda_min_pos.value_or(0.0));
        break;
    }
  } catch (const InfeasibleError&) {
    rr.ss = neutral_stepsizes(regime, c);
    rr.fallback = true;
  }

  if (config.eta_x) rr.ss.eta_x = *config.eta_x;
  if (config.eta_z) rr.ss.eta_z = *config.eta_z;
  if (config.eta_y) {
    if (regime == Regime::two_function) {
      throw ConfigError("eta_y override set for a two-function regime");
    }
    rr.ss.eta_y = *config.eta_y;
  }
  require_positive_steps(rr.ss);
  if (const auto violation =
          feasibility_violation(rr.ss, c.L_f, c.K_norm.value_or(0.0))) {
    throw InfeasibleError(*violation);
  }

  rr.rate = rate_for(regime, rr.ss, c);
  rr.envelope_claimed = !rr.rate.no_linear_rate;
  return rr;
}

ResolvedRun resolve_for_algorithm(const CompositeProblem& problem,
                                  Regime regime, AlgorithmId alg,
                                  const ExperimentConfig& config) {
  if (is_anchored(alg)) return resolve_anchored(problem, regime, config);
  check_regime_shape(problem, regime);
  const ProblemConstants c = problem_constants(problem);
  const double ksq = c.K_norm.value_or(0.0) * c.K_norm.value_or(0.0);

  ResolvedRun rr;
  rr.ss.eta_z = 1.0;
  switch (alg) {
    case AlgorithmId::PGD:
      rr.ss.regime = Regime::two_function;
      rr.ss.eta_x = 1.0 / c.L_f;
      rr.rate = theta_two_function(rr.ss, c.mu_g);
      break;
    case AlgorithmId::FRB:
      rr.ss.regime = Regime::two_function;
      rr.ss.eta_x = 1.0 / (4.0 * c.L_f);
      rr.rate = unclaimed_rate();
      break;
    case AlgorithmId::CV1:
    case AlgorithmId::CV2:
      if (regime == Regime::smooth_h) {
        rr.ss.regime = Regime::smooth_h;
        rr.ss.eta_x = 1.0 / (2.0 * c.L_f);
      } else {
        rr.ss.regime = regime;
        rr.ss.eta_x = 1.0 / (8.0 * c.L_f);
      }
      rr.ss.eta_y = ksq > 0.0 ? c.L_f / ksq : 1.0;
      rr.rate = rate_for(regime, rr.ss, c);
      break;
    case AlgorithmId::PDTR1:
    case AlgorithmId::PDTR2:
      rr.ss.regime = Regime::smooth_h;
      rr.ss.eta_x = 1.0 / (4.0 * c.L_f);
      rr.ss.eta_y = ksq > 0.0 ? c.L_f / ksq : 1.0;
      rr.rate = unclaimed_rate();
      break;
    case AlgorithmId::CP:
      rr.ss.regime = Regime::smooth_h;
      if (c.K_norm.value_or(0.0) > 0.0) {
        rr.ss.eta_x = std::min(0.95 / *c.K_norm, 1.0 / (2.0 * c.L_f));
        rr.ss.eta_y = 1.0 / (2.0 * ksq * rr.ss.eta_x);
      } else {
        rr.ss.eta_x = 1.0 / (2.0 * c.L_f);
        rr.ss.eta_y = 1.0;
      }
      rr.rate = unclaimed_rate();
      break;
    default:
      throw std::invalid_argument("resolve_for_algorithm: unknown baseline");
  }
  require_positive_steps(rr.ss);
  if (const auto violation = feasibility_violation(
          rr.ss, c.L_f, c.K_norm.value_or(0.0))) {
    throw InfeasibleError(*violation);
  }
  rr.envelope_claimed = !rr.rate.no_linear_rate;
  return rr;
}

std::vector<AlgorithmId> applicable_algorithms(
    const CompositeProblem& problem,
    const std::vector<AlgorithmId>& requested) {
  std::vector<AlgorithmId> admissible;
  if (problem.primal_dual()) {
    admissible = {AlgorithmId::ACV1,  AlgorithmId::ACV2, AlgorithmId::APDTR1,
                  AlgorithmId::APDTR2, AlgorithmId::CV1,  AlgorithmId::CV2,
                  AlgorithmId::PDTR1, AlgorithmId::PDTR2};
    if (as_quadratic_form(problem.f) && as_quadratic_form(problem.g)) {
      admissible.push_back(AlgorithmId::CP);
    }
  } else {
    admissible = {AlgorithmId::APGD, AlgorithmId::APGE, AlgorithmId::PGD,
                  AlgorithmId::FRB};
  }
  if (requested.empty()) return admissible;
  for (AlgorithmId alg : requested) {
    if (std::find(admissible.begin(), admissible.end(), alg) ==
        admissible.end()) {
      throw ConfigError(std::string("algorithm ") + to_string(alg) +
                        " is not applicable to this problem");
    }
  }
  return requested;
}

long measured_iterations(const std::vector<LyapunovRecord>& trace,
                         double eps_rel) {
  if (trace.empty()) return -1;
  const double target = eps_rel * trace.front().value;
  for (const LyapunovRecord& rec : trace) {
    if (rec.value <= target) return rec.k;
  }
  return -1;
}

Vec starting_point(const CompositeProblem& problem, std::uint64_t seed) {
  SplitMix64 rng(seed ^ kStartSalt);
  return random_vector(problem.dx(), rng);
}

double max_reduction_deviation(const CompositeProblem& problem,
                               AlgorithmId anchored, AlgorithmId baseline,
                               const StepSizes& ss, const Vec& x0,
                               long iters) {
  SolverState a = init(problem, anchored, x0);
  SolverState b = init(problem, baseline, x0);
  double dev = 0.0;
  for (long k = 0; k < iters; ++k) {
    a = step(problem, ss, a);
    b = step(problem, ss, b);
    dev = std::max(dev, (a.x - b.x).lpNorm<Eigen::Infinity>());
    dev = std::max(dev, (a.z - b.z).lpNorm<Eigen::Infinity>());
    if (a.y && b.y) {
      dev = std::max(dev, (*a.y - *b.y).lpNorm<Eigen::Infinity>());
    }
  }
  return dev;
}

PreparedExperiment prepare(const ExperimentConfig& config,
                           double reference_tol) {
  GeneratorOptions opts;
  opts.mu_g = config.mu_g;
  opts.mu_hstar = config.mu_hstar;
  opts.l1_weight = config.l1_weight;
  CompositeProblem problem =
      generate_problem(config.regime, config.d_x, config.d_y, config.seed,
                       config.conditioning, opts);
  ReferenceSolution ref = solve_reference(problem, reference_tol);
  ProblemConstants constants = problem_constants(problem);
  return PreparedExperiment{std::move(problem), std::move(ref),
                            std::move(constants)};
}

namespace {

RunResult run_algorithm(const PreparedExperiment& prep,
                        const ExperimentConfig& config, AlgorithmId alg,
                        const ResolvedRun& rr, long max_iters) {
  StandardEvaluator eval(prep.problem, rr.ss, alg, prep.reference, rr.rate);
  SolverState state0 = init(prep.problem, alg,
                            starting_point(prep.problem, config.seed));
  StopRule stop;
  stop.max_iters = max_iters;
  if (config.kkt_tol > 0.0) stop.kkt_tol = config.kkt_tol;
  return run(prep.problem, alg, rr.ss, state0, stop, &eval, config.timing);
}

void print_instance_line(const ExperimentConfig& config,
                         const PreparedExperiment& prep, std::ostream& out) {
  out << "instance: regime=" << to_string(config.regime)
      << " d_x=" << config.d_x;
  if (config.regime != Regime::two_function) out << " d_y=" << config.d_y;
  out << " seed=" << config.seed << " conditioning=" << config.conditioning
      << " reference_kkt=" << fmt("%.3e", prep.reference.kkt_residual) << "\n";
}

}  // namespace

int cmd_run(const ExperimentConfig& config, std::ostream& out) {
  const PreparedExperiment prep = prepare(config);
  const std::vector<AlgorithmId> algs =
      applicable_algorithms(prep.problem, config.algorithms);
  std::filesystem::create_directories(config.out_dir);
  print_instance_line(config, prep, out);

  for (AlgorithmId alg : algs) {
    const ResolvedRun rr =
        resolve_for_algorithm(prep.problem, config.regime, alg, config);
    const RunResult res = run_algorithm(prep, config, alg, rr,
                                        config.max_iters);
    const std::string base =
        (std::filesystem::path(config.out_dir) / to_string(alg)).string();
    write_trace_file(base + ".csv", res.trace);
    write_metadata_file(base + ".json", make_metadata(config, alg, rr, prep));

    const LyapunovRecord& last = res.trace.back();
    char line[256];
    std::snprintf(line, sizeof line,
                  "%-7s rows=%-4zu final_merit=%-12.5e final_kkt=%-12.5e "
                  "theta=%s%s\n",
                  to_string(alg), res.trace.size(), last.value, last.kkt,
                  rr.rate.no_linear_rate ? "none " : fmt("%.6f", rr.rate.theta).c_str(),
                  rr.fallback ? " (fallback stepsizes)" : "");
    out << line;
  }
  out << "wrote " << algs.size() << " trace pairs to " << config.out_dir
      << "\n";
  return 0;
}

int cmd_verify(const ExperimentConfig& config, std::ostream& out) {
  const PreparedExperiment prep = prepare(config);
  const std::vector<AlgorithmId> algs =
      applicable_algorithms(prep.problem, config.algorithms);
  print_instance_line(config, prep, out);

  int exit_code = 0;
  out << "algorithm  theta      claimed  iters_to_1e-6  violations  "
         "final_kkt\n";
  for (AlgorithmId alg : algs) {
    const ResolvedRun rr =
        resolve_for_algorithm(prep.problem, config.regime, alg, config);
    const RunResult res = run_algorithm(prep, config, alg, rr,
                                        config.max_iters);
    const ContractionReport report =
        verify_contraction(res.trace, rr.rate, config.slack);

    const long hit = measured_iterations(res.trace, 1e-6);
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %-10s %-8s %-14s %-11zu %.3e\n",
                  to_string(alg),
                  rr.rate.no_linear_rate ? "-" : fmt("%.6f", rr.rate.theta).c_str(),
                  rr.envelope_claimed ? "yes" : "no",
                  hit < 0 ? "-" : std::to_string(hit).c_str(),
                  report.violations.size(), res.trace.back().kkt);
    out << line;

    if (!report.pass()) {
      exit_code = 1;
      const long k = report.violations.front();
      out << "envelope violation: algorithm=" << to_string(alg) << " k=" << k
          << " value=" << fmt("%.17g", res.trace[static_cast<size_t>(k)].value)
          << " bound=" << fmt("%.17g", res.trace[static_cast<size_t>(k)].envelope)
          << "\n";
    }
  }

  // Exact-reduction identities at the baseline stepsizes (eta_z = 1, shared
  // start): the anchored scheme must reproduce its baseline to round-off.
  struct Pair {
    AlgorithmId anchored;
    AlgorithmId baseline;
  };
  std::vector<Pair> pairs;
  if (config.regime == Regime::two_function) {
    pairs = {{AlgorithmId::APGD, AlgorithmId::PGD}};
  } else {
    pairs = {{AlgorithmId::ACV1, AlgorithmId::CV1},
             {AlgorithmId::ACV2, AlgorithmId::CV2}};
  }
  const Vec x0 = starting_point(prep.problem, config.seed);
  for (const Pair& pair : pairs) {
    const ResolvedRun base = resolve_for_algorithm(
        prep.problem, config.regime, pair.baseline, config);
    const double dev = max_reduction_deviation(
        prep.problem, pair.anchored, pair.baseline, base.ss, x0, 50);
    const bool ok = dev <= 1e-12;
    if (!ok) exit_code = 1;
    out << "reduction " << to_string(pair.anchored) << " == "
        << to_string(pair.baseline) << ": max deviation "
        << fmt("%.3e", dev) << " (tol 1.000e-12): "
        << (ok ? "pass" : "FAIL") << "\n";
  }

  out << (exit_code == 0 ? "verify: all checks passed\n"
                         : "verify: FAILED\n");
  return exit_code;
}

int cmd_rates(const ExperimentConfig& config, std::ostream& out) {
  if (config.sweep_conditioning.empty()) {
    throw ConfigError("rates requires a [sweep] conditioning list");
  }
  std::filesystem::create_directories(config.out_dir);
  std::string csv = "conditioning,algorithm,theta,predicted_iters,measured_iters\n";
  out << "conditioning  algorithm  theta      predicted  measured\n";

  for (double conditioning : config.sweep_conditioning) {
    ExperimentConfig point = config;
    point.conditioning = conditioning;
    const PreparedExperiment prep = prepare(point);
    std::vector<AlgorithmId> algs;
    for (AlgorithmId alg :
         applicable_algorithms(prep.problem, point.algorithms)) {
      if (is_anchored(alg)) algs.push_back(alg);
    }
    for (AlgorithmId alg : algs) {
      const ResolvedRun rr =
          resolve_for_algorithm(prep.problem, point.regime, alg, point);
      const long predicted = rr.rate.no_linear_rate
                                 ? -1
                                 : predicted_iterations(rr.rate, 1e-6);
      const long budget =
          std::max(point.max_iters, predicted > 0 ? 2 * predicted : 0);
      const RunResult res = run_algorithm(prep, point, alg, rr, budget);
      const long measured = measured_iterations(res.trace, 1e-6);

      char row[256];
      std::snprintf(row, sizeof row, "%.17g,%s,%.17g,%ld,%ld\n", conditioning,
                    to_string(alg), rr.rate.theta, predicted, measured);
      csv += row;
      char line[256];
      std::snprintf(line, sizeof line, "%-13.6g %-10s %-10.6f %-10ld %ld\n",
                    conditioning, to_string(alg), rr.rate.theta, predicted,
                    measured);
      out << line;
    }
  }
  const std::string path =
      (std::filesystem::path(config.out_dir) / "rates.csv").string();
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open " + path + " for writing");
  file << csv;
  out << "wrote " << path << "\n";
  return 0;
}

int cmd_spectra(const std::string& matrix_path, std::ostream& out) {
  const Mat A = read_matrix_file(matrix_path);
  const LinearMap K(A);
  const SpectralSummary s = spectral_summary(K);
  out << "rows " << A.rows() << " cols " << A.cols() << "\n";
  out << "op_norm = " << fmt("%.17g", s.op_norm) << "\n";
  out << "lambda_min = " << fmt("%.17g", s.lambda_min) << "\n";
  out << "lambda_min_pos = "
      << (s.lambda_min_pos ? fmt("%.17g", *s.lambda_min_pos) : "none") << "\n";
  return 0;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pdsplit
