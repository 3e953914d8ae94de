#pragma once

#include <array>

#include "govgame/params.hpp"

namespace govgame {

// Cooperator frequencies: x commentariat, y user (CT), z developer,
// w regulator. Trajectory states live in [0,1]^4; evaluation functions are
// total over R^4 so finite-difference probes just work.
struct PopulationState {
  double x = 0.5;
  double y = 0.5;
  double z = 0.5;
  double w = 0.5;

  double get(Role role) const;
  void set(Role role, double value);

  friend bool operator==(const PopulationState&, const PopulationState&) = default;
};

struct StateDerivative {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
  double dw = 0.0;

  double get(Role role) const;
};

// Expected payoff of `role` playing `action`: the explicit 8-term expectation
// of table payoffs over the other three roles' Bernoulli cooperator
// frequencies. This is the reference definition; closed forms are checked
// against it.
double fitness(Model model, Role role, Action action,
               const PopulationState& state, const GovernanceParams& params);

// fitness(Cooperate) - fitness(Defect), by the 8-term expectation.
double fitness_difference(Model model, Role role, const PopulationState& state,
                          const GovernanceParams& params);

// Algebraic reduction of fitness_difference; used on hot paths (root finding,
// grid scans, censuses). Tests pin |closed - oracle| <= 1e-10.
double closed_form_difference(Model model, Role role,
                              const PopulationState& state,
                              const GovernanceParams& params);

// All four closed-form differences in role order (x, y, z, w).
std::array<double, 4> closed_form_differences(Model model,
                                              const PopulationState& state,
                                              const GovernanceParams& params);

// Jacobian of closed_form_differences wrt (x, y, z, w); row i is the gradient
// of component i.
std::array<std::array<double, 4>, 4> closed_form_jacobian(
    Model model, const PopulationState& state, const GovernanceParams& params);

// Replicator right-hand side: d eta_i = eta_i (1 - eta_i) *
// fitness_difference_i, evaluated by the 8-term expectation.
StateDerivative rhs(Model model, const PopulationState& state,
                    const GovernanceParams& params);

}  // namespace govgame
