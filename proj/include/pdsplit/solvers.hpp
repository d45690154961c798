#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdsplit/problem.hpp"
#include "pdsplit/stepsizes.hpp"

namespace pdsplit {

// Iteration schemes. The first six carry an auxiliary anchor sequence z that
// is pulled toward a scheme-specific target by damped averaging; the rest are
// classical baselines (proximal gradient, reflected/forward-reflected
// gradient, primal-dual splitting, and a primal-dual method with the smooth
// term folded into the proximal step).
enum class AlgorithmId {
  APGD,
  APGE,
  ACV1,
  ACV2,
  APDTR1,
  APDTR2,
  PGD,
  FRB,
  CV1,
  CV2,
  PDTR1,
  PDTR2,
  CP,
};

const char* to_string(AlgorithmId alg);
AlgorithmId algorithm_from_string(const std::string& name);
std::vector<AlgorithmId> all_algorithms();

// True for algorithms that operate on f + g + h(Kx) and carry a dual vector.
bool is_primal_dual(AlgorithmId alg);
// True for the six schemes with an anchor sequence z.
bool is_anchored(AlgorithmId alg);

struct SolverState {
  AlgorithmId alg = AlgorithmId::APGD;
  Vec x;
  std::optional<Vec> y;  // dual iterate; present iff the problem has h and K
  Vec z;                 // anchor iterate (mirrors x for non-anchored schemes)
  long k = 0;

  // Cached gradients so reflected updates cost one fresh gradient per step.
  // grad_z holds the gradient of f at z (APGE/APDTR1/APDTR2); grad_prev holds
  // the gradient of f at the previous primal iterate (FRB/PDTR1/PDTR2).
  Vec grad_z;
  Vec grad_prev;
};

// Builds the k=0 state. z0 defaults to x0, y0 defaults to the zero vector.
// For problems whose h is an indicator of a single point (linear constraints
// in disguise), y0 is orthogonally projected onto the range of K so the dual
// iterates stay in that range. Supplying y0 for a two-function algorithm is
// an error, as is any dimension mismatch.
SolverState init(const CompositeProblem& problem, AlgorithmId alg,
                 const Vec& x0,
                 const std::optional<Vec>& y0 = std::nullopt,
                 const std::optional<Vec>& z0 = std::nullopt);

// One iteration of each scheme. Pure: state in, state out with k+1.
SolverState step_apgd(const CompositeProblem& problem, const StepSizes& ss,
                      const SolverState& state);
SolverState step_apge(const CompositeProblem& problem, const StepSizes& ss,
                      const SolverState& state);
SolverState step_acv1(const CompositeProblem& problem, const StepSizes& ss,
                      const SolverState& state);
SolverState step_acv2(const CompositeProblem& problem, const StepSizes& ss,
                      const SolverState& state);
SolverState step_apdtr1(const CompositeProblem& problem, const StepSizes& ss,
                        const SolverState& state);
SolverState step_apdtr2(const CompositeProblem& problem, const StepSizes& ss,
                        const SolverState& state);
SolverState step_baseline(const CompositeProblem& problem, const StepSizes& ss,
                          const SolverState& state, AlgorithmId alg);

// Dispatches on state.alg.
SolverState step(const CompositeProblem& problem, const StepSizes& ss,
                 const SolverState& state);

struct StopRule {
  long max_iters = 1000;
  std::optional<double> kkt_tol;      // stop once the KKT residual falls below
  std::optional<double> lyap_rel_tol; // stop once value <= tol * value at k=0
};

struct LyapunovRecord {
  long k = 0;
  double value = 0.0;     // merit value at iteration k
  double envelope = 0.0;  // theta^k times the merit value at k=0
  double kkt = 0.0;       // KKT residual at iteration k
  std::uint64_t wall_ns = 0;
};

// Supplies the per-iteration diagnostics recorded by run(). Implemented by
// the certification module; declared here so the solver loop does not depend
// on it. theta() >= 1 signals that no geometric envelope is claimed.
class TraceEvaluator {
 public:
  virtual ~TraceEvaluator() = default;
  virtual double lyapunov(const SolverState& state) const = 0;
  virtual double kkt(const SolverState& state) const = 0;
  virtual double theta() const = 0;
};

struct RunResult {
  SolverState state;
  std::vector<LyapunovRecord> trace;
};

// Runs up to stop.max_iters steps, recording one LyapunovRecord per iterate
// (including k=0, so the trace holds at most max_iters+1 rows). Deterministic:
// identical inputs produce bit-identical outputs; wall_ns is recorded only
// when timing is true and is zero otherwise. Throws DivergenceError carrying
// the iteration index if an iterate goes non-finite. Threshold-based stop
// rules require an evaluator. With no evaluator the diagnostic columns are
// recorded as zero.
RunResult run(const CompositeProblem& problem, AlgorithmId alg,
              const StepSizes& ss, const SolverState& state0,
              const StopRule& stop, const TraceEvaluator* eval = nullptr,
              bool timing = false);

}  // namespace pdsplit
