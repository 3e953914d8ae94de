#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace govgame {

// Which population the commentariat investigates.
enum class Model : std::uint8_t {
  InvestigateDevelopers = 0,
  InvestigateRegulators = 1,
};

std::string to_string(Model model);
Model model_from_string(const std::string& text);

enum class Role : std::uint8_t {
  Commentariat = 0,
  User = 1,
  Developer = 2,
  Regulator = 3,
};

inline constexpr std::array<Role, 4> kAllRoles = {
    Role::Commentariat, Role::User, Role::Developer, Role::Regulator};

std::string to_string(Role role);

// Cooperate means: commentariat investigates carefully, user adopts (CT),
// developer develops safely, regulator regulates.
enum class Action : std::uint8_t {
  Cooperate = 0,
  Defect = 1,
};

// Role-appropriate short label: C/D, except the user's CT/N.
std::string action_label(Role role, Action action);
Action action_from_label(Role role, const std::string& text);

// One pure-strategy profile, one action per role.
struct ActionProfile {
  Action commentariat = Action::Cooperate;
  Action user = Action::Cooperate;
  Action developer = Action::Cooperate;
  Action regulator = Action::Cooperate;

  Action get(Role role) const;
  void set(Role role, Action action);

  // Bijection onto 0..15: commentariat bit 3 (most significant), then user,
  // developer, regulator; Defect = 1.
  int index() const;
  static ActionProfile from_index(int index);

  friend bool operator==(const ActionProfile&, const ActionProfile&) = default;
};

struct PayoffVector {
  double commentariat = 0.0;
  double user = 0.0;
  double developer = 0.0;
  double regulator = 0.0;

  double get(Role role) const;
  friend bool operator==(const PayoffVector&, const PayoffVector&) = default;
};

// Game parameters. All benefits/costs are per-interaction payoffs; p_w is the
// probability weight applied to outcomes in which a defecting commentariat's
// report turns out wrong.
struct GovernanceParams {
  double b_i = 0.0;      // commentariat benefit of accurate reporting
  double b_u = 0.0;      // user benefit of adopting a sound system
  double b_p = 0.0;      // developer benefit of deployment
  double b_r = 0.0;      // regulator benefit
  double b_fo = 0.0;     // regulator benefit from catching unsafe development
  double c_i = 0.0;      // commentariat cost of careful investigation
  double c_w = 0.0;      // commentariat reputational cost of a wrong report
  double epsilon = 0.0;  // user payoff scale for unsafe adoption (<= 1)
  double c_p = 0.0;      // developer cost of safe development
  double u = 0.0;        // developer penalty when caught
  double v = 0.0;        // regulator cost of enforcement
  double c_r = 0.0;      // regulator cost of regulating
  double p_w = 0.0;      // probability a defecting commentariat is wrong

  friend bool operator==(const GovernanceParams&, const GovernanceParams&) = default;
};

// Returns one message per violated bound; empty means valid.
std::vector<std::string> validation_errors(const GovernanceParams& params);

class InvalidParamsError : public std::invalid_argument {
 public:
  explicit InvalidParamsError(std::string what_arg)
      : std::invalid_argument(std::move(what_arg)) {}
};

// Wrapper certifying the bounds were checked: epsilon <= 1, costs and
// penalties (c_i, c_w, c_p, u, v, c_r) >= 0, 0 <= p_w <= 1, all finite.
class ValidatedParams {
 public:
  const GovernanceParams& get() const { return params_; }
  const GovernanceParams* operator->() const { return &params_; }

 private:
  friend ValidatedParams validate_params(const GovernanceParams&);
  explicit ValidatedParams(const GovernanceParams& params) : params_(params) {}
  GovernanceParams params_;
};

// Throws InvalidParamsError naming every violated bound.
ValidatedParams validate_params(const GovernanceParams& params);

// Payoff for every role under one pure-strategy profile. Validates params
// before evaluating.
PayoffVector payoff(Model model, const ActionProfile& profile,
                    const GovernanceParams& params);

namespace detail {
// Table evaluation without the validation pass; callers hold ValidatedParams.
PayoffVector payoff_unchecked(Model model, const ActionProfile& profile,
                              const GovernanceParams& params);
}  // namespace detail

// Strict JSON (flat object, snake_case keys matching the field names):
// all 13 keys required, numbers only, unknown keys rejected.
GovernanceParams params_from_json_text(const std::string& json_text);
std::string params_to_json_text(const GovernanceParams& params);

}  // namespace govgame
