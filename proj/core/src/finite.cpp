#include "govgame/finite.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "govgame/rng.hpp"

namespace govgame {

void validate_finite_config(const FiniteConfig& config) {
  std::vector<std::string> errors;
  for (Role role : kAllRoles) {
    if (config.size(role) < 2) {
      errors.push_back(to_string(role) + " population size must be >= 2");
    }
  }
  if (!(config.beta >= 0.0) || !std::isfinite(config.beta)) {
    errors.push_back("beta must be >= 0 and finite");
  }
  if (!(config.mu >= 0.0 && config.mu <= 1.0)) {
    errors.push_back("mu must be in [0, 1]");
  }
  if (!errors.empty()) {
    std::string what = "invalid finite-population config:";
    for (const auto& e : errors) {
      what += " ";
      what += e;
      what += ";";
    }
    throw std::invalid_argument(what);
  }
}

double fermi_probability(double beta, double own, double other) {
  const double arg = -beta * (other - own);
  // Logistic with saturated tails instead of exp overflow.
  if (arg > 40.0) return std::exp(-arg);
  return 1.0 / (1.0 + std::exp(arg));
}

PopulationState monomorphic_frequencies(const MonomorphicState& context) {
  PopulationState s;
  s.x = context.commentariat == Action::Cooperate ? 1.0 : 0.0;
  s.y = context.user == Action::Cooperate ? 1.0 : 0.0;
  s.z = context.developer == Action::Cooperate ? 1.0 : 0.0;
  s.w = context.regulator == Action::Cooperate ? 1.0 : 0.0;
  return s;
}

namespace {

// Fitness advantage of the mutant over the resident in the frozen context.
double mutant_advantage(Model model, Role focal_role, Action mutant,
                        const MonomorphicState& context,
                        const GovernanceParams& params) {
  const Action resident = context.get(focal_role);
  const PopulationState freqs = monomorphic_frequencies(context);
  const double f_mut = fitness(model, focal_role, mutant, freqs, params);
  const double f_res = fitness(model, focal_role, resident, freqs, params);
  return f_mut - f_res;
}

void require_actual_mutant(Role focal_role, Action mutant,
                           const MonomorphicState& context) {
  if (context.get(focal_role) == mutant) {
    throw std::invalid_argument(
        "mutant action equals the resident action for role " +
        to_string(focal_role));
  }
}

}  // namespace

double fixation_probability(Model model, Role focal_role, Action mutant,
                            const MonomorphicState& context,
                            int population_size, double beta,
                            const GovernanceParams& params) {
  validate_params(params);
  require_actual_mutant(focal_role, mutant, context);
  if (population_size < 2) {
    throw std::invalid_argument("population size must be >= 2");
  }

  const double z = static_cast<double>(population_size);
  if (beta == 0.0) return 1.0 / z;

  const double delta = mutant_advantage(model, focal_role, mutant, context, params);
  const double a = -beta * delta;  // log of the per-step T-/T+ ratio
  if (a == 0.0) return 1.0 / z;

  // rho = (1 - e^a) / (1 - e^(Z a)); expm1 keeps small-|a| accuracy, the
  // log branch avoids overflow when Z a is beyond exp range.
  if (a < 0.0 || z * a < 700.0) {
    return std::expm1(a) / std::expm1(z * a);
  }
  const double log_num = a < 700.0 ? std::log(std::expm1(a)) : a;
  return std::exp(log_num - z * a);  // may underflow to 0, honestly
}

double fixation_probability_series(Model model, Role focal_role, Action mutant,
                                   const MonomorphicState& context,
                                   int population_size, double beta,
                                   const GovernanceParams& params) {
  validate_params(params);
  require_actual_mutant(focal_role, mutant, context);
  if (population_size < 2) {
    throw std::invalid_argument("population size must be >= 2");
  }

  const double delta =
      beta == 0.0
          ? 0.0
          : mutant_advantage(model, focal_role, mutant, context, params);
  const double a = -beta * delta;

  // rho = 1 / sum_{i=0}^{Z-1} e^{a i}, via logsumexp.
  const int z = population_size;
  const double m = std::max(0.0, a * static_cast<double>(z - 1));
  double acc = 0.0;
  for (int i = 0; i < z; ++i) {
    acc += std::exp(a * static_cast<double>(i) - m);
  }
  return std::exp(-(m + std::log(acc)));
}

MonomorphicChain transition_matrix(
    Model model, const FiniteConfig& config, const GovernanceParams& params,
    const std::array<std::optional<Action>, 4>& frozen) {
  validate_params(params);
  validate_finite_config(config);

  MonomorphicChain chain;
  for (Role role : kAllRoles) {
    if (!frozen[static_cast<int>(role)].has_value()) {
      chain.active_roles.push_back(role);
    }
  }
  if (chain.active_roles.empty()) {
    throw std::invalid_argument("at least one role must remain active");
  }

  const int n_active = static_cast<int>(chain.active_roles.size());
  const int n_states = 1 << n_active;

  for (int s = 0; s < n_states; ++s) {
    MonomorphicState state;
    for (Role role : kAllRoles) {
      const auto& f = frozen[static_cast<int>(role)];
      if (f.has_value()) state.set(role, *f);
    }
    for (int k = 0; k < n_active; ++k) {
      const bool defect = (s >> (n_active - 1 - k)) & 1;
      state.set(chain.active_roles[static_cast<std::size_t>(k)],
                defect ? Action::Defect : Action::Cooperate);
    }
    chain.states.push_back(state);
  }

  chain.transition = Eigen::MatrixXd::Zero(n_states, n_states);
  const double divisor = static_cast<double>(n_active);

  for (int i = 0; i < n_states; ++i) {
    const MonomorphicState& from = chain.states[static_cast<std::size_t>(i)];
    double row_sum = 0.0;
    for (int j = 0; j < n_states; ++j) {
      if (j == i) continue;
      const MonomorphicState& to = chain.states[static_cast<std::size_t>(j)];
      // One active role differs by exactly one action.
      Role changed = Role::Commentariat;
      int n_diff = 0;
      for (Role role : chain.active_roles) {
        if (from.get(role) != to.get(role)) {
          changed = role;
          ++n_diff;
        }
      }
      if (n_diff != 1) continue;
      const double rho =
          fixation_probability(model, changed, to.get(changed), from,
                               config.size(changed), config.beta, params);
      const double prob = rho / divisor;
      chain.transition(i, j) = prob;
      row_sum += prob;
    }
    chain.transition(i, i) = 1.0 - row_sum;
  }
  return chain;
}

namespace {

// Strongly connected components by iterative Tarjan; edges are transition
// entries at or above the reducibility threshold.
std::vector<int> scc_labels(const Eigen::MatrixXd& t, double threshold) {
  const int n = static_cast<int>(t.rows());
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  std::vector<int> lowlink(static_cast<std::size_t>(n), 0);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  int next_index = 0;
  int next_label = 0;

  struct Frame {
    int v;
    int next_child;
  };

  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] != -1) continue;
    std::vector<Frame> call_stack{{root, 0}};
    while (!call_stack.empty()) {
      Frame& frame = call_stack.back();
      const int v = frame.v;
      if (frame.next_child == 0) {
        index[static_cast<std::size_t>(v)] = next_index;
        lowlink[static_cast<std::size_t>(v)] = next_index;
        ++next_index;
        stack.push_back(v);
        on_stack[static_cast<std::size_t>(v)] = true;
      }
      bool descended = false;
      while (frame.next_child < n) {
        const int w = frame.next_child++;
        if (w == v || t(v, w) < threshold) continue;
        if (index[static_cast<std::size_t>(w)] == -1) {
          call_stack.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[static_cast<std::size_t>(w)]) {
          lowlink[static_cast<std::size_t>(v)] =
              std::min(lowlink[static_cast<std::size_t>(v)],
                       index[static_cast<std::size_t>(w)]);
        }
      }
      if (descended) continue;
      if (lowlink[static_cast<std::size_t>(v)] ==
          index[static_cast<std::size_t>(v)]) {
        while (true) {
          const int w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = false;
          labels[static_cast<std::size_t>(w)] = next_label;
          if (w == v) break;
        }
        ++next_label;
      }
      call_stack.pop_back();
      if (!call_stack.empty()) {
        Frame& parent = call_stack.back();
        lowlink[static_cast<std::size_t>(parent.v)] =
            std::min(lowlink[static_cast<std::size_t>(parent.v)],
                     lowlink[static_cast<std::size_t>(v)]);
      }
    }
  }
  return labels;
}

std::string state_label(const MonomorphicState& s) {
  return action_label(Role::Commentariat, s.commentariat) + "/" +
         action_label(Role::User, s.user) + "/" +
         action_label(Role::Developer, s.developer) + "/" +
         action_label(Role::Regulator, s.regulator);
}

}  // namespace

Eigen::VectorXd stationary_distribution(const MonomorphicChain& chain) {
  const int n = static_cast<int>(chain.transition.rows());
  constexpr double kEdgeThreshold = 1e-300;

  const std::vector<int> labels = scc_labels(chain.transition, kEdgeThreshold);
  const int n_components =
      1 + *std::max_element(labels.begin(), labels.end());
  if (n_components > 1) {
    std::ostringstream what;
    what << "transition chain is reducible (" << n_components
         << " components):";
    for (int c = 0; c < n_components; ++c) {
      what << " {";
      bool first = true;
      for (int i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)] != c) continue;
        if (!first) what << ", ";
        what << state_label(chain.states[static_cast<std::size_t>(i)]);
        first = false;
      }
      what << "}";
    }
    throw ReducibleChainError(what.str());
  }

  // pi' T = pi'  <=>  (T' - I) pi = 0, plus sum(pi) = 1.
  Eigen::MatrixXd a(n + 1, n);
  a.topRows(n) =
      chain.transition.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.bottomRows(1) = Eigen::RowVectorXd::Ones(n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b(n) = 1.0;

  Eigen::VectorXd pi = a.colPivHouseholderQr().solve(b);
  for (int i = 0; i < n; ++i) {
    if (pi(i) < 0.0 && pi(i) > -1e-12) pi(i) = 0.0;
  }
  const double total = pi.sum();
  if (total > 0.0) pi /= total;
  return pi;
}

SimulationResult simulate_agents(Model model, const FiniteConfig& config,
                                 const GovernanceParams& params,
                                 const SimulationConfig& sim) {
  validate_params(params);
  validate_finite_config(config);

  SplitMix64 rng = make_stream(sim.seed, 0x51D4ULL);
  const std::uint64_t record_every =
      sim.record_every > 0 ? sim.record_every
                           : std::max<std::uint64_t>(1, sim.steps / 1000);

  // cooperators[r] in 0..sizes[r]; agents are exchangeable, so counts are the
  // whole state.
  std::array<int, 4> coop{};
  for (int r = 0; r < 4; ++r) {
    const double f = std::clamp(
        sim.initial.get(kAllRoles[static_cast<std::size_t>(r)]), 0.0, 1.0);
    coop[static_cast<std::size_t>(r)] = static_cast<int>(
        std::lround(f * static_cast<double>(config.sizes[static_cast<std::size_t>(r)])));
  }

  auto frequencies = [&]() {
    PopulationState s;
    s.x = static_cast<double>(coop[0]) / config.sizes[0];
    s.y = static_cast<double>(coop[1]) / config.sizes[1];
    s.z = static_cast<double>(coop[2]) / config.sizes[2];
    s.w = static_cast<double>(coop[3]) / config.sizes[3];
    return s;
  };

  SimulationResult result;
  result.total_steps = sim.steps;
  result.steps.push_back(0);
  result.frequencies.push_back(frequencies());

  std::array<std::uint64_t, 16> occupancy_counts{};
  std::uint64_t monomorphic = 0;

  for (std::uint64_t step = 1; step <= sim.steps; ++step) {
    const int r = static_cast<int>(rng.below(4));
    const int size = config.sizes[static_cast<std::size_t>(r)];
    const int focal_idx = static_cast<int>(rng.below(static_cast<std::uint64_t>(size)));
    const bool focal_coop = focal_idx < coop[static_cast<std::size_t>(r)];

    if (rng.uniform01() < config.mu) {
      coop[static_cast<std::size_t>(r)] += focal_coop ? -1 : 1;
    } else {
      const int other_idx =
          static_cast<int>(rng.below(static_cast<std::uint64_t>(size)));
      const bool other_coop = other_idx < coop[static_cast<std::size_t>(r)];
      if (other_coop != focal_coop) {
        const PopulationState freqs = frequencies();
        const Role role = kAllRoles[static_cast<std::size_t>(r)];
        const double f_focal =
            fitness(model, role,
                    focal_coop ? Action::Cooperate : Action::Defect, freqs,
                    params);
        const double f_other =
            fitness(model, role,
                    other_coop ? Action::Cooperate : Action::Defect, freqs,
                    params);
        if (rng.uniform01() <
            fermi_probability(config.beta, f_focal, f_other)) {
          coop[static_cast<std::size_t>(r)] += focal_coop ? -1 : 1;
        }
      }
    }

    if (step >= sim.burn_in) {
      int profile_index = 0;
      bool is_monomorphic = true;
      for (int k = 0; k < 4 && is_monomorphic; ++k) {
        const int c = coop[static_cast<std::size_t>(k)];
        if (c == 0) {
          profile_index |= 1 << (3 - k);  // all defect
        } else if (c != config.sizes[static_cast<std::size_t>(k)]) {
          is_monomorphic = false;
        }
      }
      if (is_monomorphic) {
        occupancy_counts[static_cast<std::size_t>(profile_index)]++;
        ++monomorphic;
      }
    }

    if (step % record_every == 0 || step == sim.steps) {
      result.steps.push_back(step);
      result.frequencies.push_back(frequencies());
    }
  }

  result.monomorphic_steps = monomorphic;
  if (monomorphic > 0) {
    for (int i = 0; i < 16; ++i) {
      result.monomorphic_occupancy[static_cast<std::size_t>(i)] =
          static_cast<double>(occupancy_counts[static_cast<std::size_t>(i)]) /
          static_cast<double>(monomorphic);
    }
  }
  for (int r = 0; r < 4; ++r) {
    result.final_cooperators[static_cast<std::size_t>(r)] =
        coop[static_cast<std::size_t>(r)];
  }
  return result;
}

}  // namespace govgame
