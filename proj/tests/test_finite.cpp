#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>

#include "govgame/finite.hpp"
#include "govgame/rng.hpp"

using namespace govgame;

namespace {

GovernanceParams fig3_params() {
  GovernanceParams g;
  g.b_i = 1.0;
  g.b_u = 4.0;
  g.b_p = 4.0;
  g.b_r = 4.0;
  g.b_fo = 1.0;
  g.c_i = 0.5;
  g.c_w = 1.0;
  g.epsilon = 0.2;
  g.c_p = 0.5;
  g.u = 1.5;
  g.v = 0.5;
  g.c_r = 0.5;
  g.p_w = 0.5;
  return g;
}

GovernanceParams random_params(std::uint64_t index) {
  SplitMix64 rng = make_stream(905, index);
  GovernanceParams g;
  g.b_i = 4.0 * rng.uniform01();
  g.b_u = 4.0 * rng.uniform01();
  g.b_p = 4.0 * rng.uniform01();
  g.b_r = 4.0 * rng.uniform01();
  g.b_fo = 5.0 * rng.uniform01();
  g.c_i = rng.uniform01();
  g.c_w = rng.uniform01();
  g.c_p = rng.uniform01();
  g.u = 2.0 * rng.uniform01();
  g.v = rng.uniform01();
  g.c_r = rng.uniform01();
  g.epsilon = -2.0 + 3.0 * rng.uniform01();
  g.p_w = rng.uniform01();
  return g;
}

constexpr Model kBoth[] = {Model::InvestigateDevelopers,
                           Model::InvestigateRegulators};

}  // namespace

TEST_CASE("fermi probability is a logistic curve with safe tails") {
  CHECK(fermi_probability(0.0, 3.0, -7.0) == 0.5);
  CHECK(fermi_probability(1.0, 0.0, 0.0) == 0.5);
  // Fitter partner is imitated more often than not.
  CHECK(fermi_probability(1.0, 0.0, 1.0) > 0.5);
  CHECK(fermi_probability(1.0, 1.0, 0.0) < 0.5);
  // Complementary directions sum to one.
  for (double d : {0.1, 3.0, 50.0}) {
    const double forward = fermi_probability(0.7, 0.0, d);
    const double backward = fermi_probability(0.7, d, 0.0);
    CHECK(forward + backward == doctest::Approx(1.0).epsilon(1e-14));
  }
  // Extreme arguments saturate without NaN or overflow.
  const double hi = fermi_probability(2.0, -1e8, 1e8);
  const double lo = fermi_probability(2.0, 1e8, -1e8);
  CHECK(std::isfinite(hi));
  CHECK(std::isfinite(lo));
  CHECK(hi == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lo >= 0.0);
  CHECK(lo < 1e-100);
}

TEST_CASE("neutral fixation is exactly one over the population size") {
  const GovernanceParams g = fig3_params();
  const MonomorphicState all_c;
  for (int z : {2, 3, 50, 200}) {
    CHECK(fixation_probability(Model::InvestigateDevelopers,
                               Role::Commentariat, Action::Defect, all_c, z,
                               0.0, g) == 1.0 / static_cast<double>(z));
  }

  // A zero fitness difference is also neutral: the commentariat advantage in
  // an all-cooperate context is p_w (b_i + c_w) - c_i.
  GovernanceParams tied = fig3_params();
  tied.c_i = tied.p_w * (tied.b_i + tied.c_w);
  CHECK(fixation_probability(Model::InvestigateDevelopers, Role::Commentariat,
                             Action::Defect, all_c, 77, 0.4,
                             tied) == 1.0 / 77.0);
}

TEST_CASE("fixation matches the geometric closed form on a pinned case") {
  // Commentariat defection in an all-cooperate context has advantage
  // c_i - p_w (b_i + c_w); with c_i = 5.5 that is exactly 4.5.
  GovernanceParams g = fig3_params();
  g.c_i = 5.5;
  const MonomorphicState all_c;
  const double rho = fixation_probability(Model::InvestigateDevelopers,
                                          Role::Commentariat, Action::Defect,
                                          all_c, 100, 0.1, g);
  const double want = std::expm1(-0.45) / std::expm1(-45.0);
  CHECK(rho == doctest::Approx(want).epsilon(1e-12));
  CHECK(rho == doctest::Approx(0.3623718483).epsilon(1e-9));
}

TEST_CASE("closed form and series evaluation agree everywhere") {
  for (std::uint64_t k = 0; k < 200; ++k) {
    SplitMix64 rng = make_stream(907, k);
    const GovernanceParams g = random_params(k);
    const Model model = kBoth[k % 2];
    const Role role = kAllRoles[rng.next() % 4];
    const MonomorphicState context =
        MonomorphicState::from_index(static_cast<int>(rng.next() % 16));
    const Action mutant = context.get(role) == Action::Cooperate
                              ? Action::Defect
                              : Action::Cooperate;
    const int z = 2 + static_cast<int>(rng.next() % 199);
    const double beta = 2.0 * rng.uniform01();
    const double closed =
        fixation_probability(model, role, mutant, context, z, beta, g);
    const double series = fixation_probability_series(model, role, mutant,
                                                      context, z, beta, g);
    CAPTURE(k);
    CHECK(std::abs(closed - series) <= 1e-12);
    CHECK(closed >= 0.0);
    CHECK(closed <= 1.0);
  }
}

TEST_CASE("strongly disfavored mutants fix with vanishing probability") {
  // Commentariat cooperation against a non-cooperating user base costs c_i
  // and earns nothing, so the advantage is exactly -c_i.
  GovernanceParams g = fig3_params();
  g.c_i = 5.0;
  MonomorphicState all_d;
  for (Role role : kAllRoles) all_d.set(role, Action::Defect);
  const double rho =
      fixation_probability(Model::InvestigateDevelopers, Role::Commentariat,
                           Action::Cooperate, all_d, 200, 2.0, g);
  const double series = fixation_probability_series(
      Model::InvestigateDevelopers, Role::Commentariat, Action::Cooperate,
      all_d, 200, 2.0, g);
  CHECK(std::isfinite(rho));
  CHECK(rho >= 0.0);
  CHECK(rho < 1e-300);
  CHECK(std::abs(rho - series) <= 1e-300);
}

TEST_CASE("fixation rejects degenerate inputs") {
  const GovernanceParams g = fig3_params();
  const MonomorphicState all_c;
  CHECK_THROWS_AS(fixation_probability(Model::InvestigateDevelopers,
                                       Role::User, Action::Cooperate, all_c,
                                       50, 0.1, g),
                  std::invalid_argument);
  CHECK_THROWS_AS(fixation_probability(Model::InvestigateDevelopers,
                                       Role::User, Action::Defect, all_c, 1,
                                       0.1, g),
                  std::invalid_argument);
}

TEST_CASE("a Monte Carlo jump chain reproduces the closed form") {
  // Constant fitness difference 4.5 as in the pinned case: the embedded jump
  // chain is a biased walk with up-probability 1 / (1 + e^{-beta delta}).
  const double beta = 0.1;
  const double delta = 4.5;
  const int z = 100;
  const double p_up = 1.0 / (1.0 + std::exp(-beta * delta));
  SplitMix64 rng = make_stream(906, 0);
  const int trials = 100000;
  int fixed = 0;
  for (int t = 0; t < trials; ++t) {
    int k = 1;
    while (k > 0 && k < z) {
      k += rng.uniform01() < p_up ? 1 : -1;
    }
    if (k == z) ++fixed;
  }
  const double estimate = static_cast<double>(fixed) / trials;

  GovernanceParams g = fig3_params();
  g.c_i = 5.5;
  const MonomorphicState all_c;
  const double rho = fixation_probability(Model::InvestigateDevelopers,
                                          Role::Commentariat, Action::Defect,
                                          all_c, z, beta, g);
  // 100k trials put three standard errors under 0.005.
  CHECK(std::abs(estimate - rho) < 0.005);
}

TEST_CASE("the full transition matrix has the documented structure") {
  const GovernanceParams g = fig3_params();
  FiniteConfig config;
  config.sizes = {50, 50, 50, 50};
  config.beta = 0.1;
  const MonomorphicChain chain =
      transition_matrix(Model::InvestigateDevelopers, config, g);

  REQUIRE(chain.states.size() == 16);
  REQUIRE(chain.active_roles.size() == 4);
  REQUIRE(chain.transition.rows() == 16);
  REQUIRE(chain.transition.cols() == 16);
  for (int i = 0; i < 16; ++i) {
    CHECK(chain.states[static_cast<std::size_t>(i)].index() == i);
    CHECK(chain.transition.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < 16; ++j) {
      const double entry = chain.transition(i, j);
      CHECK(entry >= 0.0);
      if (i == j) continue;
      const int flips = std::popcount(static_cast<unsigned>(i ^ j));
      if (flips != 1) {
        CHECK(entry == 0.0);
        continue;
      }
      // Identify which role flipped and reproduce the entry directly.
      Role changed = Role::Commentariat;
      const MonomorphicState& from = chain.states[static_cast<std::size_t>(i)];
      const MonomorphicState& to = chain.states[static_cast<std::size_t>(j)];
      for (Role role : kAllRoles) {
        if (from.get(role) != to.get(role)) changed = role;
      }
      const double rho = fixation_probability(Model::InvestigateDevelopers,
                                              changed, to.get(changed), from,
                                              50, 0.1, g);
      CHECK(entry == doctest::Approx(rho / 4.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("freezing the commentariat halves the state count twice") {
  const GovernanceParams g = fig3_params();
  FiniteConfig config;
  config.sizes = {20, 20, 20, 20};
  config.beta = 0.1;
  std::array<std::optional<Action>, 4> frozen{};
  frozen[static_cast<int>(Role::Commentariat)] = Action::Cooperate;
  const MonomorphicChain chain =
      transition_matrix(Model::InvestigateDevelopers, config, g, frozen);

  REQUIRE(chain.states.size() == 8);
  REQUIRE(chain.active_roles.size() == 3);
  CHECK(chain.active_roles[0] == Role::User);
  for (const MonomorphicState& s : chain.states) {
    CHECK(s.commentariat == Action::Cooperate);
  }
  for (int i = 0; i < 8; ++i) {
    CHECK(chain.transition.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // First state is all-cooperate; flipping the regulator is its neighbor at
  // column 1, with divisor three.
  const MonomorphicState& from = chain.states[0];
  CHECK(from == MonomorphicState{});
  MonomorphicState to = from;
  to.regulator = Action::Defect;
  CHECK(chain.states[1] == to);
  const double rho =
      fixation_probability(Model::InvestigateDevelopers, Role::Regulator,
                           Action::Defect, from, 20, 0.1, g);
  CHECK(chain.transition(0, 1) == doctest::Approx(rho / 3.0).epsilon(1e-14));
}

TEST_CASE("unequal population sizes use the mutant role's size") {
  const GovernanceParams g = fig3_params();
  FiniteConfig config;
  config.sizes = {40, 60, 80, 100};
  config.beta = 0.3;
  const MonomorphicChain chain =
      transition_matrix(Model::InvestigateRegulators, config, g);
  // State 0 -> state 2 flips the developer (bit 1), population size 80.
  const double rho =
      fixation_probability(Model::InvestigateRegulators, Role::Developer,
                           Action::Defect, chain.states[0], 80, 0.3, g);
  CHECK(chain.transition(0, 2) == doctest::Approx(rho / 4.0).epsilon(1e-14));
}

TEST_CASE("neutral selection has the uniform stationary distribution") {
  const GovernanceParams g = fig3_params();
  FiniteConfig config;
  config.beta = 0.0;
  const MonomorphicChain chain =
      transition_matrix(Model::InvestigateDevelopers, config, g);
  const Eigen::VectorXd pi = stationary_distribution(chain);
  REQUIRE(pi.size() == 16);
  for (int i = 0; i < 16; ++i) {
    CHECK(pi(i) == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  }
}

TEST_CASE("stationary distributions are stationary, normalized, nonnegative") {
  for (Model model : kBoth) {
    const GovernanceParams g = fig3_params();
    FiniteConfig config;
    config.beta = 0.1;
    const MonomorphicChain chain = transition_matrix(model, config, g);
    const Eigen::VectorXd pi = stationary_distribution(chain);
    CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pi.minCoeff() >= 0.0);
    const Eigen::VectorXd residual =
        chain.transition.transpose() * pi - pi;
    CHECK(residual.lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("a disconnected chain is reported with its block labels") {
  MonomorphicChain chain;
  for (int i = 0; i < 4; ++i) {
    chain.states.push_back(MonomorphicState::from_index(i));
  }
  chain.active_roles = {Role::Developer, Role::Regulator};
  chain.transition = Eigen::MatrixXd::Zero(4, 4);
  chain.transition << 0.5, 0.5, 0.0, 0.0,  //
      0.5, 0.5, 0.0, 0.0,                  //
      0.0, 0.0, 0.5, 0.5,                  //
      0.0, 0.0, 0.5, 0.5;
  CHECK_THROWS_WITH_AS(stationary_distribution(chain),
                       doctest::Contains("C/CT/C/C"), ReducibleChainError);
  CHECK_THROWS_WITH_AS(stationary_distribution(chain),
                       doctest::Contains("C/CT/D/D"), ReducibleChainError);
}

TEST_CASE("agent simulation is reproducible and seed-sensitive") {
  const GovernanceParams g = fig3_params();
  FiniteConfig config;
  config.sizes = {30, 30, 30, 30};
  config.beta = 0.1;
  config.mu = 0.01;
  SimulationConfig sim;
  sim.steps = 20000;
  sim.record_every = 500;
  sim.seed = 9;

  const SimulationResult a = simulate_agents(Model::InvestigateDevelopers,
                                             config, g, sim);
  const SimulationResult b = simulate_agents(Model::InvestigateDevelopers,
                                             config, g, sim);
  REQUIRE(a.steps == b.steps);
  REQUIRE(a.frequencies.size() == b.frequencies.size());
  for (std::size_t i = 0; i < a.frequencies.size(); ++i) {
    CHECK(a.frequencies[i] == b.frequencies[i]);
  }
  CHECK(a.final_cooperators == b.final_cooperators);
  CHECK(a.monomorphic_occupancy == b.monomorphic_occupancy);

  sim.seed = 10;
  const SimulationResult c = simulate_agents(Model::InvestigateDevelopers,
                                             config, g, sim);
  bool any_difference = c.final_cooperators != a.final_cooperators;
  for (std::size_t i = 0; i < a.frequencies.size() && !any_difference; ++i) {
    any_difference = !(a.frequencies[i] == c.frequencies[i]);
  }
  CHECK(any_difference);
}

TEST_CASE("without mutation a monomorphic start never moves") {
  const GovernanceParams g = fig3_params();
  FiniteConfig config;
  config.sizes = {25, 25, 25, 25};
  config.beta = 0.5;
  config.mu = 0.0;
  SimulationConfig sim;
  sim.steps = 5000;
  sim.record_every = 1000;
  sim.initial = {1.0, 1.0, 1.0, 1.0};
  const SimulationResult r = simulate_agents(Model::InvestigateRegulators,
                                             config, g, sim);
  CHECK(r.final_cooperators == std::array<int, 4>{25, 25, 25, 25});
  CHECK(r.monomorphic_occupancy[0] == 1.0);
  for (int i = 1; i < 16; ++i) {
    CHECK(r.monomorphic_occupancy[static_cast<std::size_t>(i)] == 0.0);
  }
  CHECK(r.monomorphic_steps == r.total_steps);
  for (const PopulationState& f : r.frequencies) {
    CHECK(f == PopulationState{1.0, 1.0, 1.0, 1.0});
  }
}

TEST_CASE("simulation recording follows the requested cadence") {
  const GovernanceParams g = fig3_params();
  FiniteConfig config;
  config.sizes = {10, 10, 10, 10};
  SimulationConfig sim;
  sim.steps = 1000;
  sim.record_every = 100;
  const SimulationResult r = simulate_agents(Model::InvestigateDevelopers,
                                             config, g, sim);
  REQUIRE(r.steps.size() == 11);
  CHECK(r.steps.front() == 0);
  CHECK(r.steps.back() == 1000);
  CHECK(r.steps[3] == 300);
  CHECK(r.total_steps == 1000);
  REQUIRE(r.frequencies.size() == 11);
  for (const PopulationState& f : r.frequencies) {
    for (Role role : kAllRoles) {
      const double count = f.get(role) * 10.0;
      CHECK(count == doctest::Approx(std::round(count)).epsilon(1e-12));
    }
  }
}

TEST_CASE("monomorphic frequency mapping is the action indicator") {
  MonomorphicState s;
  s.user = Action::Cooperate;
  s.commentariat = Action::Cooperate;
  s.developer = Action::Defect;
  s.regulator = Action::Cooperate;
  CHECK(monomorphic_frequencies(s) == PopulationState{1.0, 1.0, 0.0, 1.0});
}

TEST_CASE("finite-population config validation names every violation") {
  FiniteConfig config;
  config.sizes = {1, 100, 100, 100};
  config.beta = -0.5;
  config.mu = 1.5;
  CHECK_THROWS_WITH_AS(validate_finite_config(config),
                       doctest::Contains("population size"),
                       std::invalid_argument);
  try {
    validate_finite_config(config);
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("beta") != std::string::npos);
    CHECK(what.find("mu") != std::string::npos);
  }
  FiniteConfig good;
  CHECK_NOTHROW(validate_finite_config(good));
}
