#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "govgame/dynamics.hpp"
#include "govgame/params.hpp"

namespace govgame {

// Finite-population setup: one well-mixed population per role.
struct FiniteConfig {
  // Population sizes in role order (commentariat, user, developer,
  // regulator); each must be >= 2.
  std::array<int, 4> sizes = {100, 100, 100, 100};
  double beta = 0.1;  // imitation selection strength, >= 0
  double mu = 1e-3;   // per-step mutation probability, in [0, 1]

  int size(Role role) const { return sizes[static_cast<int>(role)]; }
};

void validate_finite_config(const FiniteConfig& config);

// Probability that an agent with fitness `own` imitates one with fitness
// `other`; logistic in beta * (other - own), overflow-safe.
double fermi_probability(double beta, double own, double other);

// A pure-strategy composition of all four populations: everyone in a role
// plays that role's action. Bijective with profile indices 0..15.
using MonomorphicState = ActionProfile;

// Cooperator-frequency state seen by a focal role when every other population
// is monomorphic per `context` (the focal role's own coordinate is unused by
// the fitness expectation).
PopulationState monomorphic_frequencies(const MonomorphicState& context);

// Probability that a single mutant playing `mutant` fixates in the
// `focal_role` population of size population_size, everyone else locked to
// `context`. Fitnesses are composition-independent here, so the fixation
// probability has the geometric closed form, evaluated overflow-safe; beta=0
// gives exactly 1/population_size. Throws std::invalid_argument when `mutant`
// equals the context action for that role (no mutant).
double fixation_probability(Model model, Role focal_role, Action mutant,
                            const MonomorphicState& context,
                            int population_size, double beta,
                            const GovernanceParams& params);

// Reference evaluation of the same probability as the explicit sum
// (1 + sum_i prod_j T-/T+)^-1 in log space. Used to cross-check the closed
// form; agreement is pinned at 1e-12.
double fixation_probability_series(Model model, Role focal_role, Action mutant,
                                   const MonomorphicState& context,
                                   int population_size, double beta,
                                   const GovernanceParams& params);

// Small-mutation-limit embedded chain over monomorphic states. Optionally
// freeze some roles to a fixed action: frozen roles never mutate, shrinking
// the state space and the per-step divisor (one over the number of active
// populations).
struct MonomorphicChain {
  std::vector<MonomorphicState> states;
  std::vector<Role> active_roles;
  // Row-stochastic: entry (i, j) is the probability of moving from states[i]
  // to states[j] in one mutation epoch.
  Eigen::MatrixXd transition;
};

MonomorphicChain transition_matrix(
    Model model, const FiniteConfig& config, const GovernanceParams& params,
    const std::array<std::optional<Action>, 4>& frozen = {});

class ReducibleChainError : public std::runtime_error {
 public:
  explicit ReducibleChainError(std::string what_arg)
      : std::runtime_error(std::move(what_arg)) {}
};

// Stationary distribution of the chain (least squares on pi' (T - I) = 0 with
// the normalization row appended). Entries below 1e-300 are treated as absent
// edges; if the chain then splits into multiple closed blocks, throws
// ReducibleChainError naming the blocks.
Eigen::VectorXd stationary_distribution(const MonomorphicChain& chain);

struct SimulationConfig {
  std::uint64_t steps = 1'000'000;
  // 0 means steps / 1000 (at least 1).
  std::uint64_t record_every = 0;
  // Initial cooperator fractions per role; counts are rounded.
  PopulationState initial = {0.5, 0.5, 0.5, 0.5};
  std::uint64_t seed = 0;
  // Steps to discard before occupancy accounting.
  std::uint64_t burn_in = 0;
};

struct SimulationResult {
  std::vector<std::uint64_t> steps;
  std::vector<PopulationState> frequencies;
  // Time spent in each monomorphic state (profile index), normalized over
  // the post-burn-in steps that were monomorphic.
  std::array<double, 16> monomorphic_occupancy{};
  std::uint64_t monomorphic_steps = 0;
  std::uint64_t total_steps = 0;
  std::array<int, 4> final_cooperators{};
};

// Stochastic imitation dynamics: per step, pick a population uniformly, pick
// a focal agent uniformly; with probability mu the focal flips strategy,
// otherwise it imitates a uniformly chosen member of its own population with
// the Fermi probability. Fitnesses are the expectations at the current
// empirical frequencies. Deterministic given config.seed.
SimulationResult simulate_agents(Model model, const FiniteConfig& config,
                                 const GovernanceParams& params,
                                 const SimulationConfig& sim);

}  // namespace govgame
