#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "govgame/params.hpp"

namespace govgame {

// Agents sit in a fixed canonical order; slot index is the prompt's listing
// order, not the engine's Role order.
inline constexpr std::array<Role, 4> kAgentSlotRoles = {
    Role::Regulator, Role::Developer, Role::User, Role::Commentariat};

inline constexpr std::array<const char*, 4> kDefaultAgentNames = {
    "regulator", "developer", "user", "commentariat"};

enum class ProviderKind : std::uint8_t {
  Scripted = 0,
  RemoteChat = 1,
};

struct ProviderSpec {
  ProviderKind kind = ProviderKind::Scripted;
  std::string model_name;

  // RemoteChat only.
  std::string endpoint;                         // scheme://host[:port]
  std::string endpoint_path = "/v1/chat/completions";
  std::string credentials_env = "GOVGAME_API_KEY";
  std::optional<double> temperature;
  int timeout_seconds = 60;
  int max_retries = 2;

  // Scripted only: per-agent action sequence, consumed one entry per call
  // and cycled when exhausted.
  std::map<std::string, std::vector<Action>> script;
};

struct GameConfig {
  std::array<std::string, 4> agent_names = {
      kDefaultAgentNames[0], kDefaultAgentNames[1], kDefaultAgentNames[2],
      kDefaultAgentNames[3]};
  std::array<std::optional<std::string>, 4> personalities;
  ProviderSpec provider;
  int n_rounds = 1;
  bool agents_communicate = false;
  bool know_personalities = false;
  std::optional<std::string> stopping_condition;
  // strategy_labels[0] always binds to Cooperate.
  std::array<std::string, 2> strategy_labels = {"Option A", "Option B"};
  // 64 entries: outcome-major (16 outcomes), within an outcome the order is
  // regulator, developer, user, commentariat.
  std::vector<double> weights;
  int n_repetitions = 20;
  // Empty means the built-in template.
  std::string template_text;
};

// Throws std::invalid_argument naming every violated field.
void validate_game_config(const GameConfig& config);

// Outcome k (1-based) corresponds to the action profile with index k-1
// (commentariat the highest bit, regulator the lowest, Defect = 1); the four
// weights per outcome are the regulator, developer, user, and commentariat
// payoffs for that profile.
std::array<double, 64> weights_from_params(Model model,
                                           const GovernanceParams& params);

// Inverse view: per-profile payoff vectors recovered from a weight table.
std::array<PayoffVector, 16> weights_to_payoffs(
    const std::array<double, 64>& weights);

// Shortest round-trip decimal; integers get a trailing ".0"; negative zero
// normalizes to "0.0".
std::string format_weight(double value);

// The prompt template shipped with the engine.
const std::string& default_prompt_template();

// Renders the prompt for one agent slot and round. round_number is 1-based;
// history_text is substituted verbatim ("{}" when empty). Optional template
// lines of the form "{name}: [content]" are kept (content only) when enabled
// and dropped otherwise; the intro block is enabled only when the agent has a
// personality. Unresolved {placeholder} tokens raise std::invalid_argument
// naming the placeholder.
std::string render_prompt(const GameConfig& config, int agent_slot,
                          int round_number, const std::string& history_text);

// Outcome of mapping raw model text to a strategy: exactly one label must
// occur (case-insensitive substring after trimming); both labels present is
// ambiguous, neither is unparseable. error carries the raw text.
struct ParsedChoice {
  std::optional<Action> action;
  std::string error;
};

ParsedChoice parse_choice(const std::string& raw_text,
                          const std::array<std::string, 2>& strategy_labels);

struct CompletionResult {
  bool ok = false;
  std::string text;   // raw response when ok
  std::string error;  // failure description otherwise
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual CompletionResult complete(const std::string& agent_name,
                                    const std::string& prompt) = 0;
};

// Deterministic playback of configured action sequences, rendered as the
// bound strategy labels so the parsing path is exercised.
class ScriptedProvider : public Provider {
 public:
  ScriptedProvider(std::map<std::string, std::vector<Action>> script,
                   std::array<std::string, 2> strategy_labels);
  CompletionResult complete(const std::string& agent_name,
                            const std::string& prompt) override;

 private:
  std::map<std::string, std::vector<Action>> script_;
  std::array<std::string, 2> labels_;
  std::map<std::string, std::size_t> cursor_;
};

// OpenAI-style chat completion endpoint; credentials come only from the
// environment variable named in ProviderSpec. Calls are sequential with
// exponential-backoff retries.
class RemoteChatProvider : public Provider {
 public:
  explicit RemoteChatProvider(ProviderSpec spec);
  CompletionResult complete(const std::string& agent_name,
                            const std::string& prompt) override;

 private:
  ProviderSpec spec_;
};

std::unique_ptr<Provider> make_provider(const ProviderSpec& spec);

struct AgentRoundRecord {
  std::string raw_response;
  std::optional<Action> decision;
  std::string error;  // provider or parse failure; decision absent then
};

struct RepetitionRecord {
  // records[round][slot]
  std::vector<std::array<AgentRoundRecord, 4>> rounds;
  bool complete = true;  // false when any provider call failed
};

struct GameResult {
  std::vector<RepetitionRecord> repetitions;
};

// Runs n_repetitions independent games of n_rounds each. Prompts are rendered
// independently per agent (no communication); provider failures are recorded
// per call and leave the repetition incomplete; parse failures leave that
// decision missing. Deterministic whenever the provider is.
GameResult run_experiment(const GameConfig& config, Provider& provider);
GameResult run_experiment(const GameConfig& config);

struct RoleAggregate {
  std::string role;  // canonical role name for the slot
  // Fraction of parsed decisions equal to Cooperate; NaN when nothing parsed.
  double coop_frequency = 0.0;
  std::int64_t n_parsed = 0;
  std::int64_t n_missing = 0;
};

std::array<RoleAggregate, 4> aggregate(const GameResult& result);

// Strict JSON loader for GameConfig plus the (model, params) pair used to
// derive weights when the config does not override them.
GameConfig game_config_from_json_text(const std::string& json_text);

}  // namespace govgame
