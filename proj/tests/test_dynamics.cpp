#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "govgame/dynamics.hpp"
#include "govgame/params.hpp"
#include "govgame/rng.hpp"

using namespace govgame;

namespace {

// Brute-force expectation over the 8 co-profiles: each other role cooperates
// independently with its population's cooperator frequency.
double oracle_fitness(Model model, Role role, Action action,
                      const PopulationState& s, const GovernanceParams& g) {
  double total = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    ActionProfile profile;
    profile.set(role, action);
    double weight = 1.0;
    int bit = 0;
    for (Role other : kAllRoles) {
      if (other == role) continue;
      const bool cooperates = ((mask >> bit) & 1) == 0;
      profile.set(other, cooperates ? Action::Cooperate : Action::Defect);
      const double freq = s.get(other);
      weight *= cooperates ? freq : 1.0 - freq;
      ++bit;
    }
    total += weight * payoff(model, profile, g).get(role);
  }
  return total;
}

GovernanceParams random_params(std::uint64_t index) {
  SplitMix64 rng = make_stream(902, index);
  GovernanceParams g;
  g.b_i = 4.0 * rng.uniform01();
  g.b_u = 4.0 * rng.uniform01();
  g.b_p = 4.0 * rng.uniform01();
  g.b_r = 4.0 * rng.uniform01();
  g.b_fo = 5.0 * rng.uniform01();
  g.c_i = rng.uniform01();
  g.c_w = rng.uniform01();
  g.epsilon = -2.0 + 3.0 * rng.uniform01();
  g.c_p = rng.uniform01();
  g.u = 5.0 * rng.uniform01();
  g.v = rng.uniform01();
  g.c_r = rng.uniform01();
  g.p_w = rng.uniform01();
  return g;
}

PopulationState random_state(std::uint64_t index) {
  SplitMix64 rng = make_stream(903, index);
  return {rng.uniform01(), rng.uniform01(), rng.uniform01(), rng.uniform01()};
}

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

constexpr Model kBoth[] = {Model::InvestigateDevelopers,
                           Model::InvestigateRegulators};

}  // namespace

TEST_CASE("fitness equals the brute-force expectation") {
  for (std::uint64_t k = 0; k < 30; ++k) {
    const GovernanceParams g = random_params(k);
    const PopulationState s = random_state(k);
    for (Model model : kBoth) {
      for (Role role : kAllRoles) {
        for (Action action : {Action::Cooperate, Action::Defect}) {
          const double got = fitness(model, role, action, s, g);
          const double want = oracle_fitness(model, role, action, s, g);
          CHECK(got == doctest::Approx(want).epsilon(1e-13));
        }
      }
    }
  }
}

TEST_CASE("fitness at a monomorphic state reads off the table row") {
  const GovernanceParams g = fig3_params();
  const PopulationState all_coop{1.0, 1.0, 1.0, 1.0};
  CHECK(fitness(Model::InvestigateDevelopers, Role::Developer,
                Action::Cooperate, all_coop, g) == 3.5);
  // With no adopting users, a cooperating developer always pays c_p.
  const PopulationState no_users{0.5, 0.0, 0.5, 0.5};
  CHECK(fitness(Model::InvestigateDevelopers, Role::Developer,
                Action::Cooperate, no_users, g) == doctest::Approx(-0.5));
}

TEST_CASE("closed forms agree with the expectation to 1e-10") {
  for (std::uint64_t k = 0; k < 200; ++k) {
    const GovernanceParams g = random_params(k);
    const PopulationState s = random_state(k + 1000);
    for (Model model : kBoth) {
      for (Role role : kAllRoles) {
        const double oracle = fitness_difference(model, role, s, g);
        const double closed = closed_form_difference(model, role, s, g);
        const double scale = std::max(1.0, std::abs(oracle));
        CAPTURE(static_cast<int>(model));
        CAPTURE(static_cast<int>(role));
        CHECK(std::abs(closed - oracle) <= 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("closed-form difference worked values") {
  const GovernanceParams g = fig3_params();
  // Commentariat difference at y=1: p_w (b_i + c_w) - c_i = 0.5.
  const PopulationState y1{0.3, 1.0, 0.3, 0.3};
  CHECK(closed_form_difference(Model::InvestigateDevelopers,
                               Role::Commentariat, y1, g) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // User difference at x=1 reduces to b_u * z.
  const PopulationState x1{1.0, 0.4, 0.7, 0.2};
  CHECK(closed_form_difference(Model::InvestigateDevelopers, Role::User, x1,
                               g) == doctest::Approx(4.0 * 0.7).epsilon(1e-14));
  // Model II commentariat difference at y=0 is -c_i.
  const PopulationState y0{0.6, 0.0, 0.8, 0.9};
  CHECK(closed_form_difference(Model::InvestigateRegulators,
                               Role::Commentariat, y0, g) ==
        doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("rhs at the centre of the cube matches frozen values") {
  const GovernanceParams g = fig3_params();
  const PopulationState centre{0.5, 0.5, 0.5, 0.5};
  const StateDerivative d = rhs(Model::InvestigateDevelopers, centre, g);
  CHECK(d.dx == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(d.dy == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(d.dz == doctest::Approx(0.1484375).epsilon(1e-12));
  CHECK(d.dw == doctest::Approx(-0.1171875).epsilon(1e-12));
}

TEST_CASE("rhs vanishes exactly at every vertex") {
  const GovernanceParams g = fig3_params();
  for (Model model : kBoth) {
    for (int v = 0; v < 16; ++v) {
      const PopulationState s{static_cast<double>((v >> 3) & 1),
                              static_cast<double>((v >> 2) & 1),
                              static_cast<double>((v >> 1) & 1),
                              static_cast<double>(v & 1)};
      const StateDerivative d = rhs(model, s, g);
      CHECK(d.dx == 0.0);
      CHECK(d.dy == 0.0);
      CHECK(d.dz == 0.0);
      CHECK(d.dw == 0.0);
    }
  }
}

TEST_CASE("fitness differences scale linearly with payoffs") {
  for (std::uint64_t k = 0; k < 20; ++k) {
    GovernanceParams g = random_params(k);
    const PopulationState s = random_state(k + 2000);
    GovernanceParams doubled = g;
    doubled.b_i *= 2.0;
    doubled.b_u *= 2.0;
    doubled.b_p *= 2.0;
    doubled.b_r *= 2.0;
    doubled.b_fo *= 2.0;
    doubled.c_i *= 2.0;
    doubled.c_w *= 2.0;
    doubled.c_p *= 2.0;
    doubled.u *= 2.0;
    doubled.v *= 2.0;
    doubled.c_r *= 2.0;
    for (Model model : kBoth) {
      for (Role role : kAllRoles) {
        const double base = closed_form_difference(model, role, s, g);
        const double two = closed_form_difference(model, role, s, doubled);
        CHECK(two == doctest::Approx(2.0 * base).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("analytic Jacobian matches central differences") {
  const double h = 1e-5;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const GovernanceParams g = random_params(k);
    const PopulationState s = random_state(k + 3000);
    for (Model model : kBoth) {
      const auto jac = closed_form_jacobian(model, s, g);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          PopulationState plus = s;
          PopulationState minus = s;
          plus.set(kAllRoles[static_cast<std::size_t>(j)],
                   s.get(kAllRoles[static_cast<std::size_t>(j)]) + h);
          minus.set(kAllRoles[static_cast<std::size_t>(j)],
                    s.get(kAllRoles[static_cast<std::size_t>(j)]) - h);
          const double fd =
              (closed_form_differences(model, plus, g)[static_cast<std::size_t>(
                   i)] -
               closed_form_differences(
                   model, minus, g)[static_cast<std::size_t>(i)]) /
              (2.0 * h);
          const double an =
              jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          CAPTURE(static_cast<int>(model));
          CAPTURE(i);
          CAPTURE(j);
          CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(an)));
        }
      }
    }
  }
}

TEST_CASE("state accessors address the right coordinates") {
  PopulationState s{0.1, 0.2, 0.3, 0.4};
  CHECK(s.get(Role::Commentariat) == 0.1);
  CHECK(s.get(Role::User) == 0.2);
  CHECK(s.get(Role::Developer) == 0.3);
  CHECK(s.get(Role::Regulator) == 0.4);
  s.set(Role::Developer, 0.9);
  CHECK(s.z == 0.9);

  const GovernanceParams g = fig3_params();
  const StateDerivative d =
      rhs(Model::InvestigateDevelopers, PopulationState{0.5, 0.5, 0.5, 0.5},
          g);
  CHECK(d.get(Role::Commentariat) == d.dx);
  CHECK(d.get(Role::Regulator) == d.dw);
}
