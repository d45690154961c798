#include "pdsplit/stepsizes.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "pdsplit/errors.hpp"

namespace pdsplit {

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::two_function: return "two_function";
    case Regime::smooth_h: return "smooth_h";
    case Regime::nonsmooth_h: return "nonsmooth_h";
    case Regime::linear_constraint: return "linear_constraint";
  }
  return "?";
}

Regime regime_from_string(const std::string& name) {
  if (name == "two_function") return Regime::two_function;
  if (name == "smooth_h") return Regime::smooth_h;
  if (name == "nonsmooth_h") return Regime::nonsmooth_h;
  if (name == "linear_constraint") return Regime::linear_constraint;
  throw ConfigError("unknown regime: " + name);
}

std::optional<std::string> feasibility_violation(const StepSizes& ss,
                                                 double L_f, double K_norm,
                                                 double rel_slack) {
  const double budget = 1.0 + rel_slack;
  switch (ss.regime) {
    case Regime::two_function: {
      const double lhs = L_f * ss.eta_x * ss.eta_z;
      if (lhs > budget) {
        return "two-function constraint violated: L_f*eta_x*eta_z = " +
               std::to_string(lhs) + " > 1";
      }
      return std::nullopt;
    }
    case Regime::smooth_h: {
      if (!ss.eta_y) return "smooth regime requires eta_y";
      const double lhs =
          K_norm * K_norm * ss.eta_x * *ss.eta_y + L_f * ss.eta_x * ss.eta_z;
      if (lhs > budget) {
        return "smooth constraint violated: ||K||^2*eta_x*eta_y + "
               "L_f*eta_x*eta_z = " +
               std::to_string(lhs) + " > 1";
      }
      return std::nullopt;
    }
    case Regime::nonsmooth_h:
    case Regime::linear_constraint: {
      if (!ss.eta_y) return "nonsmooth regime requires eta_y";
      const double lhs1 = 8.0 * K_norm * K_norm * ss.eta_x * *ss.eta_y;
      const double lhs2 = 8.0 * L_f * ss.eta_x * ss.eta_z;
      if (lhs1 > budget) {
        return "nonsmooth constraint violated: 8*||K||^2*eta_x*eta_y = " +
               std::to_string(lhs1) + " > 1";
      }
      if (lhs2 > budget) {
        return "nonsmooth constraint violated: 8*L_f*eta_x*eta_z = " +
               std::to_string(lhs2) + " > 1";
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

StepSizes stepsizes_two_function(double L_f, double mu_g) {
  if (!(L_f > 0.0)) throw std::invalid_argument("stepsizes: L_f must be positive");
  if (!(mu_g > 0.0)) {
    throw InfeasibleError("strong convexity of g required (mu_g > 0)");
  }
  StepSizes ss;
  ss.regime = Regime::two_function;
  ss.eta_x = 1.0 / std::sqrt(L_f * mu_g);
  ss.eta_z = std::sqrt(mu_g / L_f);
  return ss;
}

StepSizes stepsizes_smooth(double L_f, double mu_g, double mu_hstar,
                           double K_norm) {
  if (!(L_f > 0.0) || !(mu_g > 0.0) || !(mu_hstar > 0.0) || !(K_norm > 0.0)) {
    throw InfeasibleError(
        "smooth-regime stepsizes require L_f, mu_g, mu_hstar, ||K|| > 0");
  }
  StepSizes ss;
  ss.regime = Regime::smooth_h;
  ss.eta_x = std::min(1.0 / std::sqrt(L_f * mu_g),
                      std::sqrt(mu_hstar / (K_norm * K_norm * mu_g)));
  ss.eta_y = 0.5 * std::sqrt(mu_g / (K_norm * K_norm * mu_hstar));
  ss.eta_z = 0.5 * std::sqrt(mu_g / L_f);
  assert(!feasibility_violation(ss, L_f, K_norm));
  return ss;
}

namespace {

StepSizes nonsmooth_family(double L_f, double L_g, double mu_g, double K_norm,
                           double lam, Regime regime, const char* lam_name) {
  if (!(L_f > 0.0) || !(K_norm > 0.0)) {
    throw InfeasibleError("nonsmooth-regime stepsizes require L_f, ||K|| > 0");
  }
  if (!(lam > 0.0)) {
    throw InfeasibleError(std::string("nonsmooth-regime stepsizes require ") +
                          lam_name + " > 0");
  }
  if (!(mu_g > 0.0) || L_g < mu_g) {
    throw InfeasibleError(
        "nonsmooth-regime stepsizes require L_g >= mu_g > 0");
  }
  StepSizes ss;
  ss.regime = regime;
  ss.eta_x = std::min(1.0 / std::sqrt(L_f * mu_g),
                      std::sqrt(lam / (K_norm * K_norm)) /
                          std::sqrt((L_g + L_f) * mu_g));
  ss.eta_y = 1.0 / (8.0 * K_norm * K_norm * ss.eta_x);
  ss.eta_z = 1.0 / (8.0 * L_f * ss.eta_x);
  return ss;
}

}  // namespace

StepSizes stepsizes_nonsmooth(double L_f, double L_g, double mu_g,
                              double K_norm, double lam_min) {
  return nonsmooth_family(L_f, L_g, mu_g, K_norm, lam_min,
                          Regime::nonsmooth_h, "lambda_min(KK^T)");
}

StepSizes stepsizes_linear_constraint(double L_f, double L_g, double mu_g,
                                      double K_norm, double lam_min_pos) {
  return nonsmooth_family(L_f, L_g, mu_g, K_norm, lam_min_pos,
                          Regime::linear_constraint,
                          "lambda_min_pos(KK^T)");
}

namespace {

RateBound finish(std::vector<std::pair<std::string, double>> components) {
  RateBound rb;
  rb.components = std::move(components);
  rb.theta = 0.0;
  for (const auto& [name, value] : rb.components) {
    rb.theta = std::max(rb.theta, value);
  }
  rb.no_linear_rate = !(rb.theta < 1.0);
  return rb;
}

}  // namespace

RateBound theta_two_function(const StepSizes& ss, double mu_g) {
  return finish({{"primal", 1.0 / (1.0 + mu_g * ss.eta_x)},
                 {"z-damping", 2.0 / (2.0 + ss.eta_z)}});
}

RateBound theta_smooth(const StepSizes& ss, double mu_g, double mu_hstar) {
  const double eta_y = ss.eta_y.value_or(0.0);
  return finish({{"primal", 1.0 / (1.0 + mu_g * ss.eta_x)},
                 {"dual", 1.0 / (1.0 + mu_hstar * eta_y)},
                 {"z-damping", 2.0 / (2.0 + ss.eta_z)}});
}

RateBound theta_nonsmooth(const StepSizes& ss, double mu_g, double L_g,
                          double L_f, double lam) {
  const double eta_y = ss.eta_y.value_or(0.0);
  return finish(
      {{"primal", 2.0 / (2.0 + mu_g * ss.eta_x)},
       {"coupling", 40.0 / (40.0 + lam * ss.eta_x * eta_y)},
       {"dual", 20.0 / (20.0 + (lam / (L_g + L_f)) * eta_y)},
       {"z-damping", 2.0 / (2.0 + ss.eta_z)}});
}

long predicted_iterations(const RateBound& rate, double eps) {
  if (rate.no_linear_rate) return -1;
  if (!(eps > 0.0) || eps >= 1.0) {
    throw std::invalid_argument("predicted_iterations: eps must be in (0,1)");
  }
  const double factor = std::ceil(1.0 / (1.0 - rate.theta));
  return static_cast<long>(std::ceil(factor * std::log(1.0 / eps)));
}

}  // namespace pdsplit
