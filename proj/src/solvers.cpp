#include "pdsplit/solvers.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "pdsplit/errors.hpp"

namespace pdsplit {

const char* to_string(AlgorithmId alg) {
  switch (alg) {
    case AlgorithmId::APGD: return "apgd";
    case AlgorithmId::APGE: return "apge";
    case AlgorithmId::ACV1: return "acv1";
    case AlgorithmId::ACV2: return "acv2";
    case AlgorithmId::APDTR1: return "apdtr1";
    case AlgorithmId::APDTR2: return "apdtr2";
    case AlgorithmId::PGD: return "pgd";
    case AlgorithmId::FRB: return "frb";
    case AlgorithmId::CV1: return "cv1";
    case AlgorithmId::CV2: return "cv2";
    case AlgorithmId::PDTR1: return "pdtr1";
    case AlgorithmId::PDTR2: return "pdtr2";
    case AlgorithmId::CP: return "cp";
  }
  return "?";
}

AlgorithmId algorithm_from_string(const std::string& name) {
  for (AlgorithmId alg : all_algorithms()) {
    if (name == to_string(alg)) return alg;
  }
  throw ConfigError("unknown algorithm: " + name);
}

std::vector<AlgorithmId> all_algorithms() {
  return {AlgorithmId::APGD,   AlgorithmId::APGE,  AlgorithmId::ACV1,
          AlgorithmId::ACV2,   AlgorithmId::APDTR1, AlgorithmId::APDTR2,
          AlgorithmId::PGD,    AlgorithmId::FRB,   AlgorithmId::CV1,
          AlgorithmId::CV2,    AlgorithmId::PDTR1, AlgorithmId::PDTR2,
          AlgorithmId::CP};
}

bool is_primal_dual(AlgorithmId alg) {
  switch (alg) {
    case AlgorithmId::APGD:
    case AlgorithmId::APGE:
    case AlgorithmId::PGD:
    case AlgorithmId::FRB:
      return false;
    default:
      return true;
  }
}

bool is_anchored(AlgorithmId alg) {
  switch (alg) {
    case AlgorithmId::APGD:
    case AlgorithmId::APGE:
    case AlgorithmId::ACV1:
    case AlgorithmId::ACV2:
    case AlgorithmId::APDTR1:
    case AlgorithmId::APDTR2:
      return true;
    default:
      return false;
  }
}

namespace {

// Damped averaging of z toward a target: z' = (z + eta_z * target) / (1 + eta_z).
Vec damp(const Vec& z, const Vec& target, double eta_z) {
  return (z + eta_z * target) / (1.0 + eta_z);
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0)) {
    throw std::invalid_argument(std::string("stepsize ") + name +
                                " must be positive");
  }
}

double eta_y_of(const StepSizes& ss) {
  if (!ss.eta_y) {
    throw std::invalid_argument("primal-dual step requires eta_y");
  }
  require_positive(*ss.eta_y, "eta_y");
  return *ss.eta_y;
}

void check_two_function(const CompositeProblem& problem,
                        const SolverState& state) {
  if (problem.primal_dual() || state.y.has_value()) {
    throw std::invalid_argument(
        "two-function step applied to a primal-dual problem/state");
  }
}

void check_primal_dual(const CompositeProblem& problem,
                       const SolverState& state) {
  if (!problem.primal_dual() || !state.y.has_value()) {
    throw std::invalid_argument(
        "primal-dual step requires h, K, and a dual iterate");
  }
}

// prox_{gamma (f+g)}(v) when both f and g are quadratic-family: one SPD solve.
Vec fused_quadratic_prox(const FunctionHandle& f, const FunctionHandle& g,
                         double gamma, const Vec& v) {
  auto fq = as_quadratic_form(f);
  auto gq = as_quadratic_form(g);
  if (!fq || !gq) {
    throw std::invalid_argument(
        "cp baseline needs quadratic-family f and g (its fused proximal step "
        "is a single linear solve)");
  }
  const Eigen::Index n = f.dim();
  Mat M = Mat::Identity(n, n) + gamma * (fq->Q + gq->Q);
  Vec rhs = v + gamma * (fq->r + gq->r);
  return M.ldlt().solve(rhs);
}

void check_finite(const SolverState& state) {
  bool ok = state.x.allFinite() && state.z.allFinite();
  if (ok && state.y) ok = state.y->allFinite();
  if (!ok) {
    throw DivergenceError(state.k,
                          "non-finite iterate at iteration " +
                              std::to_string(state.k) +
                              " (stepsizes likely violate the feasibility "
                              "constraint for this problem)");
  }
}

}  // namespace

SolverState init(const CompositeProblem& problem, AlgorithmId alg,
                 const Vec& x0, const std::optional<Vec>& y0,
                 const std::optional<Vec>& z0) {
  const bool pd = is_primal_dual(alg);
  if (pd && !problem.primal_dual()) {
    throw std::invalid_argument(std::string(to_string(alg)) +
                                " requires a problem with h and K");
  }
  if (!pd && problem.primal_dual()) {
    throw std::invalid_argument(std::string(to_string(alg)) +
                                " handles f+g only; this problem has h and K");
  }
  if (!pd && y0.has_value()) {
    throw std::invalid_argument(
        "y0 supplied for a two-function algorithm");
  }
  if (x0.size() != problem.dx()) {
    throw DimensionError("init: x0 has size " + std::to_string(x0.size()) +
                         ", expected " + std::to_string(problem.dx()));
  }
  if (z0 && z0->size() != problem.dx()) {
    throw DimensionError("init: z0 has size " + std::to_string(z0->size()) +
                         ", expected " + std::to_string(problem.dx()));
  }

  SolverState state;
  state.alg = alg;
  state.x = x0;
  state.z = z0 ? *z0 : x0;
  state.k = 0;

  if (pd) {
    Vec y = y0 ? *y0 : Vec::Zero(problem.dy());
    if (y.size() != problem.dy()) {
      throw DimensionError("init: y0 has size " + std::to_string(y.size()) +
                           ", expected " + std::to_string(problem.dy()));
    }
    // Point-indicator h encodes a linear constraint; keep the dual iterate in
    // the range of K, where the dual strong-convexity argument lives.
    if (problem.h->kind() == FuncKind::IndicatorPoint) {
      y = range_projector(*problem.K) * y;
    }
    state.y = std::move(y);
  }

  switch (alg) {
    case AlgorithmId::APGE:
    case AlgorithmId::APDTR1:
    case AlgorithmId::APDTR2:
      state.grad_z = problem.f.gradient(state.z);
      break;
    case AlgorithmId::FRB:
    case AlgorithmId::PDTR1:
    case AlgorithmId::PDTR2:
      // Reflected baselines bootstrap the previous iterate as x itself.
      state.grad_prev = problem.f.gradient(state.x);
      break;
    default:
      break;
  }
  return state;
}

SolverState step_apgd(const CompositeProblem& problem, const StepSizes& ss,
                      const SolverState& state) {
  check_two_function(problem, state);
  require_positive(ss.eta_x, "eta_x");
  require_positive(ss.eta_z, "eta_z");
  SolverState next = state;
  Vec grad = problem.f.gradient(state.z);
  next.x = problem.g.prox(ss.eta_x, state.x - ss.eta_x * grad);
  next.z = damp(state.z, 2.0 * next.x - state.x, ss.eta_z);
  next.k = state.k + 1;
  return next;
}

SolverState step_apge(const CompositeProblem& problem, const StepSizes& ss,
                      const SolverState& state) {
  check_two_function(problem, state);
  require_positive(ss.eta_x, "eta_x");
  require_positive(ss.eta_z, "eta_z");
  SolverState next = state;
  next.z = damp(state.z, state.x, ss.eta_z);
  Vec grad_new = problem.f.gradient(next.z);
  next.x = problem.g.prox(ss.eta_x,
                          state.x - ss.eta_x * (2.0 * grad_new - state.grad_z));
  next.grad_z = std::move(grad_new);
  next.k = state.k + 1;
  return next;
}

SolverState step_acv1(const CompositeProblem& problem, const StepSizes& ss,
                      const SolverState& state) {
  check_primal_dual(problem, state);
  require_positive(ss.eta_x, "eta_x");
  require_positive(ss.eta_z, "eta_z");
  const double eta_y = eta_y_of(ss);
  SolverState next = state;
  Vec grad = problem.f.gradient(state.z);
  next.x = problem.g.prox(
      ss.eta_x,
      state.x - ss.eta_x * problem.K->apply_adjoint(*state.y) -
          ss.eta_x * grad);
  Vec x_ref = 2.0 * next.x - state.x;
  next.y = problem.h->prox_conjugate(eta_y,
                                     *state.y + eta_y * problem.K->apply(x_ref));
  next.z = damp(state.z, x_ref, ss.eta_z);
  next.k = state.k + 1;
  return next;
}

SolverState step_acv2(const CompositeProblem& problem, const StepSizes& ss,
                      const SolverState& state) {
  check_primal_dual(problem, state);
  require_positive(ss.eta_x, "eta_x");
  require_positive(ss.eta_z, "eta_z");
  const double eta_y = eta_y_of(ss);
  SolverState next = state;
  next.y = problem.h->prox_conjugate(
      eta_y, *state.y + eta_y * problem.K->apply(state.x));
  Vec grad = problem.f.gradient(state.z);
  next.x = problem.g.prox(
      ss.eta_x,
      state.x - ss.eta_x * problem.K->apply_adjoint(2.0 * *next.y - *state.y) -
          ss.eta_x * grad);
  next.z = damp(state.z, 2.0 * next.x - state.x, ss.eta_z);
  next.k = state.k + 1;
  return next;
}

SolverState step_apdtr1(const CompositeProblem& problem, const StepSizes& ss,
                        const SolverState& state) {
  check_primal_dual(problem, state);
  require_positive(ss.eta_x, "eta_x");
  require_positive(ss.eta_z, "eta_z");
  const double eta_y = eta_y_of(ss);
  SolverState next = state;
  next.z = damp(state.z, state.x, ss.eta_z);
  Vec grad_new = problem.f.gradient(next.z);
  next.x = problem.g.prox(
      ss.eta_x,
      state.x - ss.eta_x * problem.K->apply_adjoint(*state.y) -
          ss.eta_x * (2.0 * grad_new - state.grad_z));
  next.y = problem.h->prox_conjugate(
      eta_y, *state.y + eta_y * problem.K->apply(2.0 * next.x - state.x));
  next.grad_z = std::move(grad_new);
  next.k = state.k + 1;
  return next;
}

SolverState step_apdtr2(const CompositeProblem& problem, const StepSizes& ss,
                        const SolverState& state) {
  check_primal_dual(problem, state);
  require_positive(ss.eta_x, "eta_x");
  require_positive(ss.eta_z, "eta_z");
  const double eta_y = eta_y_of(ss);
  SolverState next = state;
  next.y = problem.h->prox_conjugate(
      eta_y, *state.y + eta_y * problem.K->apply(state.x));
  next.z = damp(state.z, state.x, ss.eta_z);
  Vec grad_new = problem.f.gradient(next.z);
  next.x = problem.g.prox(
      ss.eta_x,
      state.x - ss.eta_x * problem.K->apply_adjoint(2.0 * *next.y - *state.y) -
          ss.eta_x * (2.0 * grad_new - state.grad_z));
  next.grad_z = std::move(grad_new);
  next.k = state.k + 1;
  return next;
}

SolverState step_baseline(const CompositeProblem& problem, const StepSizes& ss,
                          const SolverState& state, AlgorithmId alg) {
  require_positive(ss.eta_x, "eta_x");
  SolverState next = state;
  next.alg = alg;
  next.k = state.k + 1;
  switch (alg) {
    case AlgorithmId::PGD: {
      check_two_function(problem, state);
      Vec grad = problem.f.gradient(state.x);
      next.x = problem.g.prox(ss.eta_x, state.x - ss.eta_x * grad);
      next.z = next.x;
      return next;
    }
    case AlgorithmId::FRB: {
      check_two_function(problem, state);
      Vec grad = problem.f.gradient(state.x);
      next.x = problem.g.prox(
          ss.eta_x, state.x - ss.eta_x * (2.0 * grad - state.grad_prev));
      next.grad_prev = std::move(grad);
      next.z = state.x;
      return next;
    }
    case AlgorithmId::CV1: {
      check_primal_dual(problem, state);
      const double eta_y = eta_y_of(ss);
      Vec grad = problem.f.gradient(state.x);
      next.x = problem.g.prox(
          ss.eta_x,
          state.x - ss.eta_x * problem.K->apply_adjoint(*state.y) -
              ss.eta_x * grad);
      next.y = problem.h->prox_conjugate(
          eta_y, *state.y + eta_y * problem.K->apply(2.0 * next.x - state.x));
      next.z = next.x;
      return next;
    }
    case AlgorithmId::CV2: {
      check_primal_dual(problem, state);
      const double eta_y = eta_y_of(ss);
      next.y = problem.h->prox_conjugate(
          eta_y, *state.y + eta_y * problem.K->apply(state.x));
      Vec grad = problem.f.gradient(state.x);
      next.x = problem.g.prox(
          ss.eta_x,
          state.x -
              ss.eta_x * problem.K->apply_adjoint(2.0 * *next.y - *state.y) -
              ss.eta_x * grad);
      next.z = next.x;
      return next;
    }
    case AlgorithmId::PDTR1: {
      check_primal_dual(problem, state);
      const double eta_y = eta_y_of(ss);
      Vec grad = problem.f.gradient(state.x);
      next.x = problem.g.prox(
          ss.eta_x,
          state.x - ss.eta_x * problem.K->apply_adjoint(*state.y) -
              ss.eta_x * (2.0 * grad - state.grad_prev));
      next.y = problem.h->prox_conjugate(
          eta_y, *state.y + eta_y * problem.K->apply(2.0 * next.x - state.x));
      next.grad_prev = std::move(grad);
      next.z = state.x;
      return next;
    }
    case AlgorithmId::PDTR2: {
      check_primal_dual(problem, state);
      const double eta_y = eta_y_of(ss);
      next.y = problem.h->prox_conjugate(
          eta_y, *state.y + eta_y * problem.K->apply(state.x));
      Vec grad = problem.f.gradient(state.x);
      next.x = problem.g.prox(
          ss.eta_x,
          state.x -
              ss.eta_x * problem.K->apply_adjoint(2.0 * *next.y - *state.y) -
              ss.eta_x * (2.0 * grad - state.grad_prev));
      next.grad_prev = std::move(grad);
      next.z = state.x;
      return next;
    }
    case AlgorithmId::CP: {
      check_primal_dual(problem, state);
      const double eta_y = eta_y_of(ss);
      next.x = fused_quadratic_prox(
          problem.f, problem.g, ss.eta_x,
          state.x - ss.eta_x * problem.K->apply_adjoint(*state.y));
      next.y = problem.h->prox_conjugate(
          eta_y, *state.y + eta_y * problem.K->apply(2.0 * next.x - state.x));
      next.z = next.x;
      return next;
    }
    default:
      throw std::invalid_argument(
          std::string("step_baseline: not a baseline algorithm: ") +
          to_string(alg));
  }
}

SolverState step(const CompositeProblem& problem, const StepSizes& ss,
                 const SolverState& state) {
  switch (state.alg) {
    case AlgorithmId::APGD: return step_apgd(problem, ss, state);
    case AlgorithmId::APGE: return step_apge(problem, ss, state);
    case AlgorithmId::ACV1: return step_acv1(problem, ss, state);
    case AlgorithmId::ACV2: return step_acv2(problem, ss, state);
    case AlgorithmId::APDTR1: return step_apdtr1(problem, ss, state);
    case AlgorithmId::APDTR2: return step_apdtr2(problem, ss, state);
    default: return step_baseline(problem, ss, state, state.alg);
  }
}

RunResult run(const CompositeProblem& problem, AlgorithmId alg,
              const StepSizes& ss, const SolverState& state0,
              const StopRule& stop, const TraceEvaluator* eval, bool timing) {
  if (state0.alg != alg) {
    throw std::invalid_argument("run: state0 was initialized for " +
                                std::string(to_string(state0.alg)) +
                                ", not " + to_string(alg));
  }
  if (stop.max_iters < 0) {
    throw std::invalid_argument("run: max_iters must be nonnegative");
  }
  if (!eval && (stop.kkt_tol || stop.lyap_rel_tol)) {
    throw std::invalid_argument(
        "run: threshold stop rules require a trace evaluator");
  }

  RunResult result;
  result.state = state0;
  check_finite(result.state);
  result.trace.reserve(static_cast<std::size_t>(stop.max_iters) + 1);

  const double theta = eval ? eval->theta() : 1.0;
  const double value0 = eval ? eval->lyapunov(state0) : 0.0;

  LyapunovRecord rec0;
  rec0.k = 0;
  rec0.value = value0;
  rec0.envelope = value0;
  rec0.kkt = eval ? eval->kkt(state0) : 0.0;
  result.trace.push_back(rec0);

  for (long k = 0; k < stop.max_iters; ++k) {
    std::uint64_t wall_ns = 0;
    if (timing) {
      auto t0 = std::chrono::steady_clock::now();
      result.state = step(problem, ss, result.state);
      auto t1 = std::chrono::steady_clock::now();
      wall_ns = static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
              .count());
    } else {
      result.state = step(problem, ss, result.state);
    }
    check_finite(result.state);

    LyapunovRecord rec;
    rec.k = result.state.k;
    rec.value = eval ? eval->lyapunov(result.state) : 0.0;
    rec.envelope =
        value0 * std::pow(theta, static_cast<double>(result.state.k));
    rec.kkt = eval ? eval->kkt(result.state) : 0.0;
    rec.wall_ns = wall_ns;
    result.trace.push_back(rec);

    if (stop.kkt_tol && rec.kkt <= *stop.kkt_tol) break;
    if (stop.lyap_rel_tol && rec.value <= *stop.lyap_rel_tol * value0) break;
  }
  return result;
}

}  // namespace pdsplit
