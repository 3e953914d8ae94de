#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "govgame/dynamics.hpp"
#include "govgame/params.hpp"

namespace govgame {

struct IntegratorConfig {
  double t_end = 1000.0;
  double atol = 1e-9;
  double rtol = 1e-7;
  double initial_step = 1e-3;
  // 0 means t_end / 500.
  double sample_dt = 0.0;
  // Stop early once the max-norm of the rhs drops below this.
  double equilibrium_tol = 1e-9;
  long max_steps = 10'000'000;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PopulationState> states;
  bool converged = false;       // equilibrium_tol reached before t_end
  double final_residual = 0.0;  // max-norm of rhs at the final state
};

class IntegrationError : public std::runtime_error {
 public:
  explicit IntegrationError(std::string what_arg)
      : std::runtime_error(std::move(what_arg)) {}
};

// Adaptive embedded Runge-Kutta 5(4) with cubic-quintic dense output.
// States are clamped to [0,1]^4 after every accepted step; samples are taken
// at multiples of sample_dt plus t_end. If the equilibrium tolerance is met
// early, remaining sample times are filled with the constant state so the
// trajectory always covers [0, t_end]. Throws IntegrationError (naming the
// time) on step underflow or step-count exhaustion.
Trajectory integrate(Model model, PopulationState initial,
                     const GovernanceParams& params,
                     const IntegratorConfig& config = {});

}  // namespace govgame
