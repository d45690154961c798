#pragma once

// Stepsize selection rules, feasibility validation of the contraction
// constraints, and the theoretical contraction factor theta.

#include <optional>
#include <string>
#include <vector>

namespace pdsplit {

enum class Regime { two_function, smooth_h, nonsmooth_h, linear_constraint };

const char* to_string(Regime regime);
Regime regime_from_string(const std::string& name);

struct StepSizes {
  double eta_x = 0.0;
  std::optional<double> eta_y;  // absent for two-function problems
  double eta_z = 0.0;
  Regime regime = Regime::two_function;
};

// Contraction factor with the labeled max-arguments that produced it.
struct RateBound {
  double theta = 1.0;
  std::vector<std::pair<std::string, double>> components;
  bool no_linear_rate = false;  // set when theta == 1 (no strong convexity)
};

// Feasibility of the regime's stepsize constraint:
//   two_function:      L_f eta_x eta_z <= 1
//   smooth_h:          ||K||^2 eta_x eta_y + L_f eta_x eta_z <= 1
//   nonsmooth_h /
//   linear_constraint: 8 ||K||^2 eta_x eta_y <= 1 and 8 L_f eta_x eta_z <= 1
// Returns a description of the violated constraint, or nullopt if feasible.
std::optional<std::string> feasibility_violation(const StepSizes& ss,
                                                 double L_f, double K_norm,
                                                 double rel_slack = 1e-12);

// eta_x = 1/sqrt(L_f mu_g), eta_z = sqrt(mu_g/L_f);
// the constraint L_f eta_x eta_z = 1 holds with equality.
StepSizes stepsizes_two_function(double L_f, double mu_g);

// eta_x = min{1/sqrt(L_f mu_g), sqrt(mu_hstar/(||K||^2 mu_g))},
// eta_y = (1/2) sqrt(mu_g/(||K||^2 mu_hstar)), eta_z = (1/2) sqrt(mu_g/L_f).
StepSizes stepsizes_smooth(double L_f, double mu_g, double mu_hstar,
                           double K_norm);

// eta_x = min{1/sqrt(L_f mu_g), sqrt(lam_min/||K||^2)/sqrt((L_g+L_f) mu_g)},
// eta_y = 1/(8 ||K||^2 eta_x), eta_z = 1/(8 L_f eta_x). Requires L_g >= mu_g > 0
// and lam_min > 0.
StepSizes stepsizes_nonsmooth(double L_f, double L_g, double mu_g,
                              double K_norm, double lam_min);

// Same formulas with the smallest positive eigenvalue of K K^T.
StepSizes stepsizes_linear_constraint(double L_f, double L_g, double mu_g,
                                      double K_norm, double lam_min_pos);

// theta = max{1/(1+mu_g eta_x), 2/(2+eta_z)}; components {primal, z-damping}.
RateBound theta_two_function(const StepSizes& ss, double mu_g);

// theta = max{1/(1+mu_g eta_x), 1/(1+mu_hstar eta_y), 2/(2+eta_z)}.
RateBound theta_smooth(const StepSizes& ss, double mu_g, double mu_hstar);

// theta = max{2/(2+mu_g eta_x), 40/(40+lam eta_x eta_y),
//             20/(20+(lam/(L_g+L_f)) eta_y), 2/(2+eta_z)}.
RateBound theta_nonsmooth(const StepSizes& ss, double mu_g, double L_g,
                          double L_f, double lam);

// Iterations sufficient for theta^k <= eps: ceil(1/(1-theta)) * log(1/eps),
// rounded up. Returns -1 when no linear rate is available (theta == 1).
long predicted_iterations(const RateBound& rate, double eps);

}  // namespace pdsplit
