#include "govgame/params.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace govgame {

std::string to_string(Model model) {
  return model == Model::InvestigateDevelopers ? "investigate_developers"
                                               : "investigate_regulators";
}

Model model_from_string(const std::string& text) {
  if (text == "investigate_developers" || text == "1") {
    return Model::InvestigateDevelopers;
  }
  if (text == "investigate_regulators" || text == "2") {
    return Model::InvestigateRegulators;
  }
  throw std::invalid_argument(
      "unknown model '" + text +
      "' (expected investigate_developers or investigate_regulators)");
}

std::string to_string(Role role) {
  switch (role) {
    case Role::Commentariat: return "commentariat";
    case Role::User: return "user";
    case Role::Developer: return "developer";
    case Role::Regulator: return "regulator";
  }
  throw std::logic_error("bad Role");
}

std::string action_label(Role role, Action action) {
  if (role == Role::User) {
    return action == Action::Cooperate ? "CT" : "N";
  }
  return action == Action::Cooperate ? "C" : "D";
}

Action action_from_label(Role role, const std::string& text) {
  // Each role only accepts its own vocabulary, so a label pasted onto the
  // wrong role is caught rather than silently mapped.
  if (text == "Cooperate" || text == action_label(role, Action::Cooperate)) {
    return Action::Cooperate;
  }
  if (text == "Defect" || text == action_label(role, Action::Defect)) {
    return Action::Defect;
  }
  throw std::invalid_argument("unknown action label '" + text + "' for role " +
                              to_string(role));
}

Action ActionProfile::get(Role role) const {
  switch (role) {
    case Role::Commentariat: return commentariat;
    case Role::User: return user;
    case Role::Developer: return developer;
    case Role::Regulator: return regulator;
  }
  throw std::logic_error("bad Role");
}

void ActionProfile::set(Role role, Action action) {
  switch (role) {
    case Role::Commentariat: commentariat = action; return;
    case Role::User: user = action; return;
    case Role::Developer: developer = action; return;
    case Role::Regulator: regulator = action; return;
  }
  throw std::logic_error("bad Role");
}

int ActionProfile::index() const {
  auto bit = [](Action a) { return a == Action::Defect ? 1 : 0; };
  return bit(commentariat) * 8 + bit(user) * 4 + bit(developer) * 2 +
         bit(regulator);
}

ActionProfile ActionProfile::from_index(int index) {
  if (index < 0 || index > 15) {
    throw std::out_of_range("profile index must be in 0..15");
  }
  auto act = [](int b) { return b ? Action::Defect : Action::Cooperate; };
  ActionProfile p;
  p.commentariat = act((index >> 3) & 1);
  p.user = act((index >> 2) & 1);
  p.developer = act((index >> 1) & 1);
  p.regulator = act(index & 1);
  return p;
}

double PayoffVector::get(Role role) const {
  switch (role) {
    case Role::Commentariat: return commentariat;
    case Role::User: return user;
    case Role::Developer: return developer;
    case Role::Regulator: return regulator;
  }
  throw std::logic_error("bad Role");
}

namespace {

struct NamedField {
  const char* name;
  double GovernanceParams::* member;
};

constexpr NamedField kFields[] = {
    {"b_i", &GovernanceParams::b_i},     {"b_u", &GovernanceParams::b_u},
    {"b_p", &GovernanceParams::b_p},     {"b_r", &GovernanceParams::b_r},
    {"b_fo", &GovernanceParams::b_fo},   {"c_i", &GovernanceParams::c_i},
    {"c_w", &GovernanceParams::c_w},     {"epsilon", &GovernanceParams::epsilon},
    {"c_p", &GovernanceParams::c_p},     {"u", &GovernanceParams::u},
    {"v", &GovernanceParams::v},         {"c_r", &GovernanceParams::c_r},
    {"p_w", &GovernanceParams::p_w},
};

}  // namespace

std::vector<std::string> validation_errors(const GovernanceParams& params) {
  std::vector<std::string> errors;
  auto require_finite = [&](const char* name, double value) {
    if (!std::isfinite(value)) {
      errors.push_back(std::string(name) + " must be finite");
      return false;
    }
    return true;
  };
  auto require_nonneg = [&](const char* name, double value) {
    if (require_finite(name, value) && value < 0.0) {
      errors.push_back(std::string(name) + " must be >= 0");
    }
  };

  require_finite("b_i", params.b_i);
  require_finite("b_u", params.b_u);
  require_finite("b_p", params.b_p);
  require_finite("b_r", params.b_r);
  require_finite("b_fo", params.b_fo);
  require_nonneg("c_i", params.c_i);
  require_nonneg("c_w", params.c_w);
  require_nonneg("c_p", params.c_p);
  require_nonneg("u", params.u);
  require_nonneg("v", params.v);
  require_nonneg("c_r", params.c_r);
  if (require_finite("epsilon", params.epsilon) && params.epsilon > 1.0) {
    errors.push_back("epsilon must be <= 1");
  }
  if (require_finite("p_w", params.p_w) &&
      (params.p_w < 0.0 || params.p_w > 1.0)) {
    errors.push_back("p_w must be in [0, 1]");
  }
  return errors;
}

ValidatedParams validate_params(const GovernanceParams& params) {
  auto errors = validation_errors(params);
  if (!errors.empty()) {
    std::string what = "invalid parameters:";
    for (const auto& e : errors) {
      what += " ";
      what += e;
      what += ";";
    }
    throw InvalidParamsError(what);
  }
  return ValidatedParams(params);
}

namespace detail {

PayoffVector payoff_unchecked(Model model, const ActionProfile& profile,
                              const GovernanceParams& pr) {
  const double b_i = pr.b_i, b_u = pr.b_u, b_p = pr.b_p, b_r = pr.b_r;
  const double b_fo = pr.b_fo, c_i = pr.c_i, c_w = pr.c_w, eps = pr.epsilon;
  const double c_p = pr.c_p, u = pr.u, v = pr.v, c_r = pr.c_r, p_w = pr.p_w;

  const int idx = profile.index();
  PayoffVector out;
  if (model == Model::InvestigateDevelopers) {
    switch (idx) {
      case 0:  out = {b_i - c_i, b_u, b_p - c_p, b_r - c_r}; break;
      case 1:  out = {b_i - c_i, b_u, b_p - c_p, b_r}; break;
      case 2:  out = {b_i - c_i, 0.0, 0.0, -c_r}; break;
      case 3:  out = {b_i - c_i, 0.0, 0.0, 0.0}; break;
      case 4:  out = {-c_i, 0.0, -c_p, -c_r}; break;
      case 5:  out = {-c_i, 0.0, -c_p, 0.0}; break;
      case 6:  out = {-c_i, 0.0, 0.0, -c_r}; break;
      case 7:  out = {-c_i, 0.0, 0.0, 0.0}; break;
      case 8:
        out = {(1 - p_w) * b_i - p_w * c_w, (1 - p_w) * b_u,
               (1 - p_w) * b_p - c_p, (1 - p_w) * b_r - c_r};
        break;
      case 9:
        out = {(1 - p_w) * b_i - p_w * c_w, (1 - p_w) * b_u,
               (1 - p_w) * b_p - c_p, (1 - p_w) * b_r};
        break;
      case 10:
        out = {(1 - p_w) * b_i - p_w * c_w, p_w * eps * b_u, p_w * (b_p - u),
               p_w * (b_r + b_fo - v) - c_r};
        break;
      case 11:
        out = {(1 - p_w) * b_i - p_w * c_w, p_w * eps * b_u, p_w * b_p,
               p_w * b_r};
        break;
      case 12: out = {0.0, 0.0, -c_p, -c_r}; break;
      case 13: out = {0.0, 0.0, -c_p, 0.0}; break;
      case 14: out = {0.0, 0.0, 0.0, -c_r}; break;
      case 15: out = {0.0, 0.0, 0.0, 0.0}; break;
      default: throw std::logic_error("bad profile index");
    }
  } else {
    switch (idx) {
      case 0:  out = {b_i - c_i, b_u, b_p - c_p, b_r - c_r}; break;
      case 1:  out = {b_i - c_i, 0.0, -c_p, 0.0}; break;
      case 2:
        out = {b_i - c_i, eps * b_u, b_p - u, b_r - c_r - v + b_fo};
        break;
      case 3:  out = {b_i - c_i, 0.0, 0.0, 0.0}; break;
      case 4:  out = {-c_i, 0.0, -c_p, -c_r}; break;
      case 5:  out = {-c_i, 0.0, -c_p, 0.0}; break;
      case 6:  out = {-c_i, 0.0, 0.0, -c_r}; break;
      case 7:  out = {-c_i, 0.0, 0.0, 0.0}; break;
      case 8:
        out = {(1 - p_w) * b_i - p_w * c_w, (1 - p_w) * b_u,
               (1 - p_w) * b_p - c_p, (1 - p_w) * b_r - c_r};
        break;
      case 9:
        out = {(1 - p_w) * b_i - p_w * c_w, p_w * b_u, p_w * b_p - c_p,
               p_w * b_r};
        break;
      case 10:
        out = {(1 - p_w) * b_i - p_w * c_w, (1 - p_w) * eps * b_u,
               (1 - p_w) * (b_p - u),
               (b_r - c_r + b_fo - v) * (1 - p_w) - p_w * c_r};
        break;
      case 11:
        out = {(1 - p_w) * b_i - p_w * c_w, p_w * eps * b_u, p_w * b_p,
               p_w * b_r};
        break;
      case 12: out = {0.0, 0.0, -c_p, -c_r}; break;
      case 13: out = {0.0, 0.0, -c_p, 0.0}; break;
      case 14: out = {0.0, 0.0, 0.0, -c_r}; break;
      case 15: out = {0.0, 0.0, 0.0, 0.0}; break;
      default: throw std::logic_error("bad profile index");
    }
  }
  return out;
}

}  // namespace detail

PayoffVector payoff(Model model, const ActionProfile& profile,
                    const GovernanceParams& params) {
  ValidatedParams checked = validate_params(params);
  return detail::payoff_unchecked(model, profile, checked.get());
}

GovernanceParams params_from_json_text(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed params JSON: ") +
                                e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("params JSON must be an object");
  }
  GovernanceParams params;
  for (const auto& field : kFields) {
    auto it = j.find(field.name);
    if (it == j.end()) {
      throw std::invalid_argument(std::string("params JSON missing key '") +
                                  field.name + "'");
    }
    if (!it->is_number()) {
      throw std::invalid_argument(std::string("params key '") + field.name +
                                  "' must be a number");
    }
    params.*(field.member) = it->get<double>();
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const auto& field : kFields) {
      if (it.key() == field.name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("unknown params key '" + it.key() + "'");
    }
  }
  return params;
}

std::string params_to_json_text(const GovernanceParams& params) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& field : kFields) {
    j[field.name] = params.*(field.member);
  }
  return j.dump(2);
}

}  // namespace govgame
