#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pdsplit/errors.hpp"
#include "pdsplit/stepsizes.hpp"

using namespace pdsplit;

namespace {

double component(const RateBound& rate, const std::string& name) {
  for (const auto& [label, value] : rate.components) {
    if (label == name) return value;
  }
  FAIL("missing rate component: " << name);
  return 0.0;
}

}  // namespace

TEST_CASE("regime names round-trip and reject unknowns") {
  for (Regime regime :
       {Regime::two_function, Regime::smooth_h, Regime::nonsmooth_h,
        Regime::linear_constraint}) {
    CHECK(regime_from_string(to_string(regime)) == regime);
  }
  CHECK_THROWS_AS(regime_from_string("sideways"), ConfigError);
}

TEST_CASE("two-function rule: closed form, equality constraint, theta") {
  const double L = 4.0, mu = 1.0;
  const StepSizes ss = stepsizes_two_function(L, mu);
  CHECK(ss.eta_x == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ss.eta_z == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_FALSE(ss.eta_y.has_value());
  CHECK_FALSE(feasibility_violation(ss, L, 0.0).has_value());

  const RateBound rate = theta_two_function(ss, mu);
  CHECK(component(rate, "primal") == doctest::Approx(1.0 / 1.5).epsilon(1e-15));
  CHECK(component(rate, "z-damping") ==
        doctest::Approx(0.8).epsilon(1e-15));
  CHECK(rate.theta == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_FALSE(rate.no_linear_rate);

  CHECK_THROWS_AS(stepsizes_two_function(4.0, 0.0), InfeasibleError);
  CHECK_THROWS_AS(stepsizes_two_function(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("smooth rule reproduces the worked example") {
  // L_f=4, mu_g=1, mu_hstar=1, ||K||=1.
  const StepSizes ss = stepsizes_smooth(4.0, 1.0, 1.0, 1.0);
  CHECK(ss.eta_x == doctest::Approx(0.5).epsilon(1e-15));
  REQUIRE(ss.eta_y.has_value());
  CHECK(*ss.eta_y == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ss.eta_z == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_FALSE(feasibility_violation(ss, 4.0, 1.0).has_value());

  const RateBound rate = theta_smooth(ss, 1.0, 1.0);
  CHECK(rate.theta == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(component(rate, "z-damping") ==
        doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(component(rate, "primal") ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(component(rate, "dual") == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("nonsmooth rule at all-ones constants: frozen 40-digit oracle") {
  const StepSizes ss = stepsizes_nonsmooth(1.0, 1.0, 1.0, 1.0, 1.0);
  CHECK(ss.eta_x ==
        doctest::Approx(0.70710678118654752440).epsilon(1e-16));
  CHECK(*ss.eta_y ==
        doctest::Approx(0.17677669529663688110).epsilon(1e-16));
  CHECK(ss.eta_z ==
        doctest::Approx(0.17677669529663688110).epsilon(1e-16));
  CHECK_FALSE(feasibility_violation(ss, 1.0, 1.0).has_value());

  const RateBound rate = theta_nonsmooth(ss, 1.0, 1.0, 1.0, 1.0);
  CHECK(component(rate, "primal") ==
        doctest::Approx(0.73879612503625855749).epsilon(1e-15));
  CHECK(component(rate, "coupling") ==
        doctest::Approx(0.99688473520249221184).epsilon(1e-15));
  CHECK(component(rate, "dual") ==
        doctest::Approx(0.99560002793062959808).epsilon(1e-15));
  CHECK(component(rate, "z-damping") ==
        doctest::Approx(0.91878969685838771346).epsilon(1e-15));
  CHECK(rate.theta ==
        doctest::Approx(0.99688473520249221184).epsilon(1e-15));
}

TEST_CASE("linear-constraint rule shares the nonsmooth formulas") {
  const StepSizes a = stepsizes_nonsmooth(2.0, 1.5, 1.0, 3.0, 0.8);
  const StepSizes b = stepsizes_linear_constraint(2.0, 1.5, 1.0, 3.0, 0.8);
  CHECK(a.eta_x == b.eta_x);
  CHECK(*a.eta_y == *b.eta_y);
  CHECK(a.eta_z == b.eta_z);
  CHECK(a.regime == Regime::nonsmooth_h);
  CHECK(b.regime == Regime::linear_constraint);
}

TEST_CASE("nonsmooth rule rejects broken hypotheses") {
  CHECK_THROWS_AS(stepsizes_nonsmooth(1.0, 1.0, 0.0, 1.0, 1.0),
                  InfeasibleError);
  CHECK_THROWS_AS(stepsizes_nonsmooth(1.0, 0.5, 1.0, 1.0, 1.0),
                  InfeasibleError);  // L_g < mu_g
  CHECK_THROWS_AS(stepsizes_nonsmooth(1.0, 1.0, 1.0, 1.0, 0.0),
                  InfeasibleError);  // lambda_min = 0
  CHECK_THROWS_AS(stepsizes_linear_constraint(1.0, 1.0, 1.0, 0.0, 1.0),
                  InfeasibleError);  // ||K|| = 0
}

TEST_CASE("feasibility violations carry the constraint that failed") {
  StepSizes tf;
  tf.regime = Regime::two_function;
  tf.eta_x = 1.0;
  tf.eta_z = 2.0;
  const auto v1 = feasibility_violation(tf, 1.0, 0.0);
  REQUIRE(v1.has_value());
  CHECK(v1->find("two-function constraint violated") != std::string::npos);

  StepSizes sm;
  sm.regime = Regime::smooth_h;
  sm.eta_x = 1.0;
  sm.eta_y = 1.0;
  sm.eta_z = 1.0;
  const auto v2 = feasibility_violation(sm, 1.0, 1.0);
  REQUIRE(v2.has_value());
  CHECK(v2->find("smooth constraint violated") != std::string::npos);

  StepSizes ns;
  ns.regime = Regime::nonsmooth_h;
  ns.eta_x = 1.0;
  ns.eta_y = 1.0;
  ns.eta_z = 1e-9;
  const auto v3 = feasibility_violation(ns, 1e-9, 1.0);
  REQUIRE(v3.has_value());
  CHECK(v3->find("8*||K||^2*eta_x*eta_y") != std::string::npos);

  // Equality is allowed (relative slack).
  StepSizes eq;
  eq.regime = Regime::two_function;
  eq.eta_x = 0.5;
  eq.eta_z = 0.5;
  CHECK_FALSE(feasibility_violation(eq, 4.0, 0.0).has_value());
}

TEST_CASE("theta decreases as strong convexity grows") {
  const StepSizes ss = stepsizes_two_function(4.0, 1.0);
  const double t1 = theta_two_function(ss, 1.0).theta;
  const double t2 = theta_two_function(ss, 2.0).theta;
  CHECK(t2 <= t1);

  const StepSizes sm = stepsizes_smooth(4.0, 1.0, 1.0, 1.0);
  CHECK(theta_smooth(sm, 2.0, 2.0).theta <= theta_smooth(sm, 1.0, 1.0).theta);
}

TEST_CASE("vanishing strong convexity flags the absence of a linear rate") {
  StepSizes ss;
  ss.regime = Regime::two_function;
  ss.eta_x = 0.5;
  ss.eta_z = 0.5;
  const RateBound rate = theta_two_function(ss, 0.0);
  CHECK(rate.theta == 1.0);
  CHECK(rate.no_linear_rate);
  CHECK(predicted_iterations(rate, 1e-6) == -1);
}

TEST_CASE("predicted iterations: frozen value and validation") {
  RateBound rate;
  rate.theta = 0.5;
  rate.no_linear_rate = false;
  // ceil(ceil(1/(1-theta)) * ln(1e6)) = ceil(2 * 13.8155...) = 28.
  CHECK(predicted_iterations(rate, 1e-6) == 28);
  CHECK_THROWS_AS(predicted_iterations(rate, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(predicted_iterations(rate, 1.0), std::invalid_argument);
}
