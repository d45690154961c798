#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "helpers.hpp"
#include "pdsplit/contraction.hpp"
#include "pdsplit/errors.hpp"
#include "pdsplit/generators.hpp"
#include "pdsplit/harness.hpp"
#include "pdsplit/solvers.hpp"
#include "pdsplit/trace.hpp"

using namespace pdsplit;
using helpers::vec1;

namespace {

SolverState scalar_pd_start(const CompositeProblem& problem, AlgorithmId alg) {
  return init(problem, alg, vec1(1.0), vec1(1.0), vec1(1.0));
}

}  // namespace

TEST_CASE("algorithm names round-trip") {
  for (AlgorithmId alg : all_algorithms()) {
    CHECK(algorithm_from_string(to_string(alg)) == alg);
  }
  CHECK_THROWS(algorithm_from_string("gradient_descent"));
  CHECK(is_anchored(AlgorithmId::APGD));
  CHECK(is_anchored(AlgorithmId::APDTR2));
  CHECK_FALSE(is_anchored(AlgorithmId::CP));
  CHECK(is_primal_dual(AlgorithmId::ACV1));
  CHECK_FALSE(is_primal_dual(AlgorithmId::FRB));
}

TEST_CASE("frozen two-step values: anchored primal-dual schemes") {
  // f = x^2/2, g = 0, h* = y^2/2, K = 1, every stepsize 1/2, start (1,1,1).
  const CompositeProblem problem = helpers::scalar_pd_problem();
  const StepSizes ss = helpers::all_half_steps();
  const double third = 1.0 / 3.0;

  SUBCASE("primal-first splitting") {
    SolverState s = scalar_pd_start(problem, AlgorithmId::ACV1);
    s = step_acv1(problem, ss, s);
    CHECK(s.x[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK((*s.y)[0] == doctest::Approx(third).epsilon(1e-15));
    CHECK(s.z[0] == doctest::Approx(third).epsilon(1e-15));
    CHECK(s.k == 1);
    s = step_acv1(problem, ss, s);
    CHECK(s.x[0] == doctest::Approx(-third).epsilon(1e-15));
    CHECK((*s.y)[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.z[0] == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("dual-first splitting") {
    SolverState s = scalar_pd_start(problem, AlgorithmId::ACV2);
    s = step_acv2(problem, ss, s);
    CHECK(s.x[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK((*s.y)[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.z[0] == doctest::Approx(third).epsilon(1e-15));
    s = step_acv2(problem, ss, s);
    CHECK(s.x[0] == doctest::Approx(-third).epsilon(1e-15));
    CHECK((*s.y)[0] == doctest::Approx(2.0 * third).epsilon(1e-15));
    CHECK(s.z[0] == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("primal-first with reflected gradient") {
    SolverState s = scalar_pd_start(problem, AlgorithmId::APDTR1);
    s = step_apdtr1(problem, ss, s);
    CHECK(s.x[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK((*s.y)[0] == doctest::Approx(third).epsilon(1e-15));
    CHECK(s.z[0] == doctest::Approx(1.0).epsilon(1e-15));
    s = step_apdtr1(problem, ss, s);
    CHECK(s.x[0] == doctest::Approx(-third).epsilon(1e-15));
    CHECK((*s.y)[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.z[0] == doctest::Approx(2.0 * third).epsilon(1e-15));
  }
  SUBCASE("dual-first with reflected gradient") {
    SolverState s = scalar_pd_start(problem, AlgorithmId::APDTR2);
    s = step_apdtr2(problem, ss, s);
    CHECK(s.x[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK((*s.y)[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.z[0] == doctest::Approx(1.0).epsilon(1e-15));
    s = step_apdtr2(problem, ss, s);
    CHECK(s.x[0] == doctest::Approx(-third).epsilon(1e-15));
    CHECK((*s.y)[0] == doctest::Approx(2.0 * third).epsilon(1e-15));
    CHECK(s.z[0] == doctest::Approx(2.0 * third).epsilon(1e-15));
  }
}

TEST_CASE("frozen two-step values: two-function schemes") {
  const CompositeProblem problem = helpers::scalar_tf_problem();

  SUBCASE("damped gradient scheme at unit stepsizes") {
    StepSizes ss = helpers::steps(1.0, std::nullopt, 1.0,
                                  Regime::two_function);
    SolverState s = init(problem, AlgorithmId::APGD, vec1(1.0));
    s = step_apgd(problem, ss, s);
    CHECK(s.x[0] == 0.0);
    CHECK(s.z[0] == 0.0);
    s = step_apgd(problem, ss, s);
    CHECK(s.x[0] == 0.0);
    CHECK(s.z[0] == 0.0);
  }
  SUBCASE("extrapolated-gradient scheme") {
    StepSizes ss = helpers::steps(0.5, std::nullopt, 1.0,
                                  Regime::two_function);
    SolverState s = init(problem, AlgorithmId::APGE, vec1(1.0));
    s = step_apge(problem, ss, s);
    CHECK(s.z[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.x[0] == doctest::Approx(0.5).epsilon(1e-15));
    s = step_apge(problem, ss, s);
    CHECK(s.z[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(s.x[0] == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("forward-reflected baseline") {
    StepSizes ss = helpers::steps(0.5, std::nullopt, 1.0,
                                  Regime::two_function);
    SolverState s = init(problem, AlgorithmId::FRB, vec1(1.0));
    s = step_baseline(problem, ss, s, AlgorithmId::FRB);
    CHECK(s.x[0] == doctest::Approx(0.5).epsilon(1e-15));
    s = step_baseline(problem, ss, s, AlgorithmId::FRB);
    CHECK(s.x[0] == doctest::Approx(0.5).epsilon(1e-15));
    s = step_baseline(problem, ss, s, AlgorithmId::FRB);
    CHECK(s.x[0] == doctest::Approx(0.25).epsilon(1e-15));
  }
}

TEST_CASE("exact reductions at unit anchor damping") {
  SUBCASE("two-function pair") {
    const CompositeProblem problem =
        generate_problem(Regime::two_function, 10, 0, 17, 16.0);
    const double L = problem.f.profile()->L;
    const StepSizes ss =
        helpers::steps(1.0 / L, std::nullopt, 1.0, Regime::two_function);
    const Vec x0 = starting_point(problem, 17);
    CHECK(max_reduction_deviation(problem, AlgorithmId::APGD,
                                  AlgorithmId::PGD, ss, x0, 50) <= 1e-12);
  }
  SUBCASE("primal-dual pairs") {
    const CompositeProblem problem =
        generate_problem(Regime::smooth_h, 10, 5, 18, 16.0);
    const double L = problem.f.profile()->L;
    const double opn = problem.spectral->op_norm;
    const StepSizes ss =
        helpers::steps(1.0 / (2.0 * L), L / (opn * opn), 1.0);
    const Vec x0 = starting_point(problem, 18);
    CHECK(max_reduction_deviation(problem, AlgorithmId::ACV1,
                                  AlgorithmId::CV1, ss, x0, 50) <= 1e-12);
    CHECK(max_reduction_deviation(problem, AlgorithmId::ACV2,
                                  AlgorithmId::CV2, ss, x0, 50) <= 1e-12);
  }
}

TEST_CASE("asymptotic reductions at huge anchor damping") {
  // With eta_z so large that z tracks its target almost exactly, the
  // extrapolated schemes approach their reflected ancestors. A formal limit
  // only, hence the loose tolerance.
  SUBCASE("two-function pair") {
    const CompositeProblem problem =
        generate_problem(Regime::two_function, 8, 0, 23, 4.0);
    const double L = problem.f.profile()->L;
    const StepSizes ss =
        helpers::steps(1.0 / (4.0 * L), std::nullopt, 1e8,
                       Regime::two_function);
    const Vec x0 = starting_point(problem, 23);
    CHECK(max_reduction_deviation(problem, AlgorithmId::APGE,
                                  AlgorithmId::FRB, ss, x0, 10) <= 1e-6);
  }
  SUBCASE("primal-dual pairs") {
    const CompositeProblem problem =
        generate_problem(Regime::smooth_h, 8, 4, 29, 4.0);
    const double L = problem.f.profile()->L;
    const double opn = problem.spectral->op_norm;
    const StepSizes ss =
        helpers::steps(1.0 / (4.0 * L), L / (opn * opn), 1e8);
    const Vec x0 = starting_point(problem, 29);
    CHECK(max_reduction_deviation(problem, AlgorithmId::APDTR1,
                                  AlgorithmId::PDTR1, ss, x0, 10) <= 1e-6);
    CHECK(max_reduction_deviation(problem, AlgorithmId::APDTR2,
                                  AlgorithmId::PDTR2, ss, x0, 10) <= 1e-6);
  }
}

TEST_CASE("per-step oracle call counts") {
  CompositeProblem problem = helpers::scalar_pd_problem();
  auto counts = std::make_shared<OracleCounts>();
  problem.f.attach_counter(counts);
  problem.g.attach_counter(counts);
  problem.h->attach_counter(counts);
  problem.K->attach_counter(counts);
  const StepSizes ss = helpers::all_half_steps();

  SUBCASE("primal-first splitting: one of each oracle per step") {
    SolverState s = scalar_pd_start(problem, AlgorithmId::ACV1);
    *counts = OracleCounts{};
    s = step_acv1(problem, ss, s);
    CHECK(counts->grad == 1);
    CHECK(counts->prox == 1);
    CHECK(counts->prox_conj == 1);
    CHECK(counts->k_apply == 1);
    CHECK(counts->k_adjoint == 1);
  }
  SUBCASE("reflected scheme reuses the cached anchor gradient") {
    SolverState s = scalar_pd_start(problem, AlgorithmId::APDTR1);
    *counts = OracleCounts{};
    s = step_apdtr1(problem, ss, s);
    s = step_apdtr1(problem, ss, s);
    CHECK(counts->grad == 2);  // one fresh gradient per step
  }
}

TEST_CASE("reference points are fixed points of every scheme") {
  SUBCASE("primal-dual problem") {
    const CompositeProblem problem =
        generate_problem(Regime::smooth_h, 8, 4, 31, 4.0);
    const ReferenceSolution ref = solve_reference(problem, 1e-12);
    const StepSizes ss =
        stepsizes_smooth(problem.f.profile()->L, 1.0, 1.0,
                         problem.spectral->op_norm);
    for (AlgorithmId alg :
         {AlgorithmId::ACV1, AlgorithmId::ACV2, AlgorithmId::APDTR1,
          AlgorithmId::APDTR2, AlgorithmId::CV1, AlgorithmId::CV2,
          AlgorithmId::PDTR1, AlgorithmId::PDTR2}) {
      CAPTURE(to_string(alg));
      SolverState s = init(problem, alg, ref.x_star, ref.y_star, ref.z_star);
      const SolverState next = step(problem, ss, s);
      CHECK((next.x - ref.x_star).lpNorm<Eigen::Infinity>() <= 1e-9);
      CHECK((*next.y - *ref.y_star).lpNorm<Eigen::Infinity>() <= 1e-9);
      CHECK((next.z - ref.z_star).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
  }
  SUBCASE("two-function problem") {
    const CompositeProblem problem =
        generate_problem(Regime::two_function, 8, 0, 37, 4.0);
    const ReferenceSolution ref = solve_reference(problem, 1e-12);
    const StepSizes ss = stepsizes_two_function(problem.f.profile()->L, 1.0);
    for (AlgorithmId alg : {AlgorithmId::APGD, AlgorithmId::APGE,
                            AlgorithmId::PGD, AlgorithmId::FRB}) {
      CAPTURE(to_string(alg));
      SolverState s =
          init(problem, alg, ref.x_star, std::nullopt, ref.z_star);
      const SolverState next = step(problem, ss, s);
      CHECK((next.x - ref.x_star).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
  }
}

TEST_CASE("infeasible stepsizes produce a divergence error with its index") {
  // A merely-convex g gives a nonexpansive prox, so nothing tames the
  // exploding forward step.
  GeneratorOptions opts;
  opts.mu_g = 0.0;
  const CompositeProblem problem =
      generate_problem(Regime::two_function, 8, 0, 41, 16.0, opts);
  const double L = problem.f.profile()->L;
  const StepSizes ss =
      helpers::steps(1e6 / L, std::nullopt, 1.0, Regime::two_function);
  SolverState s0 = init(problem, AlgorithmId::APGD,
                        starting_point(problem, 41));
  StopRule stop;
  stop.max_iters = 200;
  try {
    (void)run(problem, AlgorithmId::APGD, ss, s0, stop, nullptr, false);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.iteration > 0);
    CHECK(e.iteration <= 200);
  }
}

TEST_CASE("run honors iteration budgets and stop thresholds") {
  const CompositeProblem problem =
      generate_problem(Regime::two_function, 8, 0, 43, 4.0);
  const StepSizes ss = stepsizes_two_function(problem.f.profile()->L, 1.0);
  const SolverState s0 =
      init(problem, AlgorithmId::APGD, starting_point(problem, 43));

  SUBCASE("zero budget records exactly the start") {
    StopRule stop;
    stop.max_iters = 0;
    const RunResult res =
        run(problem, AlgorithmId::APGD, ss, s0, stop, nullptr, false);
    REQUIRE(res.trace.size() == 1);
    CHECK(res.trace[0].k == 0);
    CHECK(res.state.k == 0);
  }
  SUBCASE("thresholds require an evaluator") {
    StopRule stop;
    stop.kkt_tol = 1e-6;
    CHECK_THROWS_AS(
        run(problem, AlgorithmId::APGD, ss, s0, stop, nullptr, false),
        std::invalid_argument);
  }
  SUBCASE("kkt threshold cuts the run short") {
    const ReferenceSolution ref = solve_reference(problem, 1e-12);
    const RateBound rate = theta_two_function(ss, 1.0);
    StandardEvaluator eval(problem, ss, AlgorithmId::APGD, ref, rate);
    StopRule stop;
    stop.max_iters = 400;
    stop.kkt_tol = 1e-6;
    const RunResult res =
        run(problem, AlgorithmId::APGD, ss, s0, stop, &eval, false);
    CHECK(res.trace.size() < 400);
    CHECK(res.trace.back().kkt <= 1e-6);
  }
}

TEST_CASE("runs are deterministic and timing stays opt-in") {
  const ExperimentConfig config = [] {
    ExperimentConfig c;
    c.regime = Regime::smooth_h;
    c.d_x = 8;
    c.d_y = 4;
    c.seed = 47;
    c.conditioning = 4.0;
    c.max_iters = 60;
    return c;
  }();
  const PreparedExperiment prep = prepare(config);
  const ResolvedRun rr =
      resolve_anchored(prep.problem, config.regime, config);
  const Vec x0 = starting_point(prep.problem, config.seed);
  StopRule stop;
  stop.max_iters = config.max_iters;

  StandardEvaluator eval(prep.problem, rr.ss, AlgorithmId::ACV1,
                         prep.reference, rr.rate);
  const RunResult a = run(prep.problem, AlgorithmId::ACV1, rr.ss,
                          init(prep.problem, AlgorithmId::ACV1, x0), stop,
                          &eval, false);
  const RunResult b = run(prep.problem, AlgorithmId::ACV1, rr.ss,
                          init(prep.problem, AlgorithmId::ACV1, x0), stop,
                          &eval, false);
  CHECK(trace_to_csv(a.trace) == trace_to_csv(b.trace));
  for (const LyapunovRecord& rec : a.trace) CHECK(rec.wall_ns == 0);

  const RunResult timed = run(prep.problem, AlgorithmId::ACV1, rr.ss,
                              init(prep.problem, AlgorithmId::ACV1, x0), stop,
                              &eval, true);
  bool any_nonzero = false;
  for (const LyapunovRecord& rec : timed.trace) {
    if (rec.k > 0 && rec.wall_ns > 0) any_nonzero = true;
  }
  CHECK(any_nonzero);
}

TEST_CASE("init validates shapes and projects constrained duals") {
  const CompositeProblem tf =
      generate_problem(Regime::two_function, 6, 0, 53, 4.0);
  CHECK_THROWS(init(tf, AlgorithmId::APGD, Vec::Ones(5)));
  CHECK_THROWS(init(tf, AlgorithmId::APGD, Vec::Ones(6), Vec::Ones(3)));
  CHECK_THROWS(init(tf, AlgorithmId::ACV1, Vec::Ones(6)));

  const CompositeProblem pd = generate_problem(Regime::smooth_h, 6, 3, 59, 4.0);
  CHECK_THROWS(init(pd, AlgorithmId::APGD, Vec::Ones(6)));
  CHECK_THROWS(init(pd, AlgorithmId::ACV1, Vec::Ones(6), Vec::Ones(2)));
  const SolverState s = init(pd, AlgorithmId::ACV1, Vec::Ones(6));
  REQUIRE(s.y.has_value());
  CHECK(s.y->size() == 3);
  CHECK(s.y->norm() == 0.0);
  CHECK(s.z == Vec::Ones(6));

  // Constrained problems keep the dual inside ran(K).
  const CompositeProblem lc = helpers::constrained_rank_deficient(61);
  const Mat P = range_projector(*lc.K);
  SplitMix64 rng(7);
  const Vec y_raw = random_vector(lc.dy(), rng);
  const SolverState cs = init(lc, AlgorithmId::ACV1, Vec::Ones(lc.dx()), y_raw);
  CHECK((*cs.y - P * y_raw).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("folded-prox baseline needs quadratic-family structure") {
  // With an l1 primal part g, the fused prox is unavailable.
  const CompositeProblem problem =
      generate_problem(Regime::smooth_h, 6, 3, 67, 4.0);
  REQUIRE(problem.g.kind() == FuncKind::ElasticReg);
  const StepSizes ss = helpers::steps(0.1, 0.1, 1.0);
  SolverState s = init(problem, AlgorithmId::CP, Vec::Ones(6));
  CHECK_THROWS(step_baseline(problem, ss, s, AlgorithmId::CP));

  // With quadratic-family f and g it runs and stays a fixed point at the
  // reference.
  const CompositeProblem ok = generate_problem(Regime::nonsmooth_h, 6, 3, 71, 4.0);
  REQUIRE(as_quadratic_form(ok.g).has_value());
  const ReferenceSolution ref = solve_reference(ok, 1e-12);
  SolverState fs = init(ok, AlgorithmId::CP, ref.x_star, ref.y_star);
  const StepSizes cps = helpers::steps(0.3 / ok.spectral->op_norm,
                                       0.3 / ok.spectral->op_norm, 1.0);
  const SolverState next = step_baseline(ok, cps, fs, AlgorithmId::CP);
  CHECK((next.x - ref.x_star).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK((*next.y - *ref.y_star).lpNorm<Eigen::Infinity>() <= 1e-9);
}
