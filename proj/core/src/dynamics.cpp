#include "govgame/dynamics.hpp"

#include <stdexcept>

namespace govgame {

double PopulationState::get(Role role) const {
  switch (role) {
    case Role::Commentariat: return x;
    case Role::User: return y;
    case Role::Developer: return z;
    case Role::Regulator: return w;
  }
  throw std::logic_error("bad Role");
}

void PopulationState::set(Role role, double value) {
  switch (role) {
    case Role::Commentariat: x = value; return;
    case Role::User: y = value; return;
    case Role::Developer: z = value; return;
    case Role::Regulator: w = value; return;
  }
  throw std::logic_error("bad Role");
}

double StateDerivative::get(Role role) const {
  switch (role) {
    case Role::Commentariat: return dx;
    case Role::User: return dy;
    case Role::Developer: return dz;
    case Role::Regulator: return dw;
  }
  throw std::logic_error("bad Role");
}

double fitness(Model model, Role role, Action action,
               const PopulationState& state, const GovernanceParams& params) {
  // Frequencies of Cooperate per role; the focal role's own frequency never
  // enters its expectation.
  const double coop[4] = {state.x, state.y, state.z, state.w};

  Role others[3];
  int n = 0;
  for (Role r : kAllRoles) {
    if (r != role) {
      others[n++] = r;
    }
  }

  ActionProfile profile;
  profile.set(role, action);

  double total = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    double weight = 1.0;
    for (int k = 0; k < 3; ++k) {
      const bool cooperates = ((mask >> k) & 1) == 0;
      const double f = coop[static_cast<int>(others[k])];
      weight *= cooperates ? f : (1.0 - f);
      profile.set(others[k], cooperates ? Action::Cooperate : Action::Defect);
    }
    if (weight != 0.0) {
      total +=
          weight * detail::payoff_unchecked(model, profile, params).get(role);
    }
  }
  return total;
}

double fitness_difference(Model model, Role role, const PopulationState& state,
                          const GovernanceParams& params) {
  return fitness(model, role, Action::Cooperate, state, params) -
         fitness(model, role, Action::Defect, state, params);
}

double closed_form_difference(Model model, Role role,
                              const PopulationState& state,
                              const GovernanceParams& params) {
  const double x = state.x, y = state.y, z = state.z, w = state.w;
  const auto& p = params;

  if (model == Model::InvestigateDevelopers) {
    switch (role) {
      case Role::Commentariat:
        return y * p.p_w * (p.b_i + p.c_w) - p.c_i;
      case Role::User:
        return p.b_u * (z - (1.0 - x) * p.p_w * (z - (1.0 - z) * p.epsilon));
      case Role::Developer:
        return (x - 1.0) * y * p.p_w * (2.0 * p.b_p - p.u * w) + y * p.b_p -
               p.c_p;
      case Role::Regulator:
        return -(x - 1.0) * y * (z - 1.0) * p.p_w * (p.v - p.b_fo) - p.c_r;
    }
  } else {
    const double q = 1.0 - (1.0 - x) * p.p_w;
    switch (role) {
      case Role::Commentariat:
        return y * p.p_w * (p.b_i + p.c_w) - p.c_i;
      case Role::User:
        return p.b_u * (z + (1.0 - z) * p.epsilon) *
               (w + (1.0 - x) * (1.0 - 2.0 * w) * p.p_w);
      case Role::Developer:
        return -p.c_p + p.u * w * y * q;
      case Role::Regulator:
        return -p.c_r + y * q * (p.b_r + (1.0 - z) * (p.b_fo - p.v)) -
               (1.0 - x) * y * p.p_w * p.b_r;
    }
  }
  throw std::logic_error("bad Role");
}

std::array<double, 4> closed_form_differences(Model model,
                                              const PopulationState& state,
                                              const GovernanceParams& params) {
  return {closed_form_difference(model, Role::Commentariat, state, params),
          closed_form_difference(model, Role::User, state, params),
          closed_form_difference(model, Role::Developer, state, params),
          closed_form_difference(model, Role::Regulator, state, params)};
}

std::array<std::array<double, 4>, 4> closed_form_jacobian(
    Model model, const PopulationState& state, const GovernanceParams& p) {
  const double x = state.x, y = state.y, z = state.z, w = state.w;
  std::array<std::array<double, 4>, 4> jac{};

  if (model == Model::InvestigateDevelopers) {
    jac[0][1] = p.p_w * (p.b_i + p.c_w);

    jac[1][0] = p.b_u * p.p_w * (z - (1.0 - z) * p.epsilon);
    jac[1][2] = p.b_u * (1.0 - (1.0 - x) * p.p_w * (1.0 + p.epsilon));

    jac[2][0] = y * p.p_w * (2.0 * p.b_p - p.u * w);
    jac[2][1] = (x - 1.0) * p.p_w * (2.0 * p.b_p - p.u * w) + p.b_p;
    jac[2][3] = -(x - 1.0) * y * p.p_w * p.u;

    jac[3][0] = -y * (z - 1.0) * p.p_w * (p.v - p.b_fo);
    jac[3][1] = -(x - 1.0) * (z - 1.0) * p.p_w * (p.v - p.b_fo);
    jac[3][2] = -(x - 1.0) * y * p.p_w * (p.v - p.b_fo);
  } else {
    const double q = 1.0 - (1.0 - x) * p.p_w;
    const double e = z + (1.0 - z) * p.epsilon;
    const double m = w + (1.0 - x) * (1.0 - 2.0 * w) * p.p_w;
    const double a = p.b_r + (1.0 - z) * (p.b_fo - p.v);

    jac[0][1] = p.p_w * (p.b_i + p.c_w);

    jac[1][0] = -p.b_u * e * (1.0 - 2.0 * w) * p.p_w;
    jac[1][2] = p.b_u * (1.0 - p.epsilon) * m;
    jac[1][3] = p.b_u * e * (1.0 - 2.0 * (1.0 - x) * p.p_w);

    jac[2][0] = p.u * w * y * p.p_w;
    jac[2][1] = p.u * w * q;
    jac[2][3] = p.u * y * q;

    jac[3][0] = y * p.p_w * (a + p.b_r);
    jac[3][1] = q * a - (1.0 - x) * p.p_w * p.b_r;
    jac[3][2] = -y * q * (p.b_fo - p.v);
  }
  return jac;
}

StateDerivative rhs(Model model, const PopulationState& state,
                    const GovernanceParams& params) {
  StateDerivative d;
  d.dx = state.x * (1.0 - state.x) *
         fitness_difference(model, Role::Commentariat, state, params);
  d.dy = state.y * (1.0 - state.y) *
         fitness_difference(model, Role::User, state, params);
  d.dz = state.z * (1.0 - state.z) *
         fitness_difference(model, Role::Developer, state, params);
  d.dw = state.w * (1.0 - state.w) *
         fitness_difference(model, Role::Regulator, state, params);
  return d;
}

}  // namespace govgame
