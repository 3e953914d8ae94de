#include "govgame/llm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace govgame {

namespace {

constexpr char kTemplateText[] =
    R"TPL(In a AI ecosystem, the regulator either trusts developers to regulate themselves, allowing faster progress, or requires verification before deployment to ensure safety.
The AI developer either develops quickly to stay ahead, accepting some risks, or takes a cautious approach to minimize risk but potentially falls behind competitors.
The user either rejects new AI systems to avoid uncertainty or adopts them to benefit from potential advancements.
The commentariat investigates the claims of the AI developer. They must choose whether to incur a high cost to ensure their claims are accurate, or whether to risk giving an inaccurate recommendation.

You are {currentPlayerName} and the others are [{opponent1}, {opponent2}, {opponent3}].
{intro}: [You are {personality}.]

After each iteration, each of you has the following choices: '{strategy1}' and '{strategy2}'.
{gameLength}: [There are {nRounds} rounds to decide.]
The current iteration is number {currentRound}.

Outcomes:

1. If the regulator chooses {strategy1}, the developer chooses {strategy1}, the user chooses {strategy1}, and the commentariat chooses {strategy1}
  the regulator gets a payoff of {weight1}, the developer gets {weight2}, the user gets {weight3}, and the commentariat gets {weight4}.

2. If the regulator chooses {strategy2}, the developer chooses {strategy1}, the user chooses {strategy1}, and the commentariat chooses {strategy1}
  the regulator gets a payoff of {weight5}, the developer gets {weight6}, the user gets {weight7}, and the commentariat gets {weight8}.

3. If the regulator chooses {strategy1}, the developer chooses {strategy2}, the user chooses {strategy1}, and the commentariat chooses {strategy1}
  the regulator gets a payoff of {weight9}, the developer gets {weight10}, the user gets {weight11}, and the commentariat gets {weight12}.

4. If the regulator chooses {strategy2}, the developer chooses {strategy2}, the user chooses {strategy1}, and the commentariat chooses {strategy1}
  the regulator gets a payoff of {weight13}, the developer gets {weight14}, the user gets {weight15}, and the commentariat gets {weight16}.

5. If the regulator chooses {strategy1}, the developer chooses {strategy1}, the user chooses {strategy2}, and the commentariat chooses {strategy1}
  the regulator gets a payoff of {weight17}, the developer gets {weight18}, the user gets {weight19}, and the commentariat gets {weight20}.

6. If the regulator chooses {strategy2}, the developer chooses {strategy1}, the user chooses {strategy2}, and the commentariat chooses {strategy1}
  the regulator gets a payoff of {weight21}, the developer gets {weight22}, the user gets {weight23}, and the commentariat gets {weight24}.

7. If the regulator chooses {strategy1}, the developer chooses {strategy2}, the user chooses {strategy2}, and the commentariat chooses {strategy1}
  the regulator gets a payoff of {weight25}, the developer gets {weight26}, the user gets {weight27}, and the commentariat gets {weight28}.

8. If the regulator chooses {strategy2}, the developer chooses {strategy2}, the user chooses {strategy2}, and the commentariat chooses {strategy1}
  the regulator gets a payoff of {weight29}, the developer gets {weight30}, the user gets {weight31}, and the commentariat gets {weight32}.

9. If the regulator chooses {strategy1}, the developer chooses {strategy1}, the user chooses {strategy1}, and the commentariat chooses {strategy2}
  the regulator gets a payoff of {weight33}, the developer gets {weight34}, the user gets {weight35}, and the commentariat gets {weight36}.

10. If the regulator chooses {strategy2}, the developer chooses {strategy1}, the user chooses {strategy1}, and the commentariat chooses {strategy2}
  the regulator gets a payoff of {weight37}, the developer gets {weight38}, the user gets {weight39}, and the commentariat gets {weight40}.

11. If the regulator chooses {strategy1}, the developer chooses {strategy2}, the user chooses {strategy1}, and the commentariat chooses {strategy2}
  the regulator gets a payoff of {weight41}, the developer gets {weight42}, the user gets {weight43}, and the commentariat gets {weight44}.

12. If the regulator chooses {strategy2}, the developer chooses {strategy2}, the user chooses {strategy1}, and the commentariat chooses {strategy2}
  the regulator gets a payoff of {weight45}, the developer gets {weight46}, the user gets {weight47}, and the commentariat gets {weight48}.

13. If the regulator chooses {strategy1}, the developer chooses {strategy1}, the user chooses {strategy2}, and the commentariat chooses {strategy2}
  the regulator gets a payoff of {weight49}, the developer gets {weight50}, the user gets {weight51}, and the commentariat gets {weight52}.

14. If the regulator chooses {strategy2}, the developer chooses {strategy1}, the user chooses {strategy2}, and the commentariat chooses {strategy2}
  the regulator gets a payoff of {weight53}, the developer gets {weight54}, the user gets {weight55}, and the commentariat gets {weight56}.

15. If the regulator chooses {strategy1}, the developer chooses {strategy2}, the user chooses {strategy2}, and the commentariat chooses {strategy2}
  the regulator gets a payoff of {weight57}, the developer gets {weight58}, the user gets {weight59}, and the commentariat gets {weight60}.

16. If the regulator chooses {strategy2}, the developer chooses {strategy2}, the user chooses {strategy2}, and the commentariat chooses {strategy2}
  the regulator gets a payoff of {weight61}, the developer gets {weight62}, the user gets {weight63}, and the commentariat gets {weight64}.

Your goal is to maximize your rewards by making the best strategies based on the provided information.
This is the history of the choices made so far: {history}.
Choose between {strategy1} and {strategy2}.
Output ONLY the choice.
)TPL";

bool is_placeholder_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_placeholder_start_char(char c) {
  return std::isalpha(static_cast<unsigned char>(c));
}

// Extracts {name} starting at text[pos] == '{'; returns the name or empty if
// the brace does not open a well-formed placeholder.
std::string placeholder_at(const std::string& text, std::size_t pos,
                           std::size_t* end) {
  std::size_t i = pos + 1;
  if (i >= text.size() || !is_placeholder_start_char(text[i])) return {};
  std::size_t begin = i;
  while (i < text.size() && is_placeholder_name_char(text[i])) ++i;
  if (i >= text.size() || text[i] != '}') return {};
  *end = i + 1;
  return text.substr(begin, i - begin);
}

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

void validate_game_config(const GameConfig& config) {
  std::vector<std::string> errors;

  for (int i = 0; i < 4; ++i) {
    if (config.agent_names[static_cast<std::size_t>(i)].empty()) {
      errors.push_back("agent_names[" + std::to_string(i) +
                       "] must be nonempty");
    }
    for (int j = i + 1; j < 4; ++j) {
      if (config.agent_names[static_cast<std::size_t>(i)] ==
          config.agent_names[static_cast<std::size_t>(j)]) {
        errors.push_back("agent_names must be distinct ('" +
                         config.agent_names[static_cast<std::size_t>(i)] +
                         "' repeats)");
      }
    }
  }
  if (config.n_rounds < 1) {
    errors.push_back("n_rounds must be >= 1");
  }
  if (config.agents_communicate) {
    errors.push_back(
        "agents_communicate=true is not supported (decisions are independent "
        "and simultaneous)");
  }
  if (config.know_personalities) {
    errors.push_back(
        "know_personalities=true is not supported (the prompt only carries "
        "the agent's own personality)");
  }
  if (config.stopping_condition.has_value()) {
    errors.push_back(
        "stopping_condition is not supported (games run exactly n_rounds)");
  }
  if (config.strategy_labels[0].empty() || config.strategy_labels[1].empty()) {
    errors.push_back("strategy_labels must be nonempty");
  }
  if (config.strategy_labels[0] == config.strategy_labels[1]) {
    errors.push_back("strategy_labels must be distinct");
  }
  if (config.weights.size() != 64) {
    errors.push_back("weights must have exactly 64 entries (got " +
                     std::to_string(config.weights.size()) + ")");
  } else {
    for (std::size_t i = 0; i < 64; ++i) {
      if (!std::isfinite(config.weights[i])) {
        errors.push_back("weights[" + std::to_string(i) + "] must be finite");
        break;
      }
    }
  }
  if (config.n_repetitions < 1) {
    errors.push_back("n_repetitions must be >= 1");
  }

  if (config.provider.kind == ProviderKind::Scripted) {
    for (const auto& name : config.agent_names) {
      auto it = config.provider.script.find(name);
      if (it == config.provider.script.end() || it->second.empty()) {
        errors.push_back("scripted provider needs a nonempty sequence for '" +
                         name + "'");
      }
    }
  } else {
    if (config.provider.endpoint.empty()) {
      errors.push_back("remote provider needs an endpoint");
    }
    if (config.provider.model_name.empty()) {
      errors.push_back("remote provider needs a model_name");
    }
    if (config.provider.timeout_seconds < 1) {
      errors.push_back("timeout_seconds must be >= 1");
    }
    if (config.provider.max_retries < 0) {
      errors.push_back("max_retries must be >= 0");
    }
  }

  if (!errors.empty()) {
    std::string what = "invalid game config:";
    for (const auto& e : errors) {
      what += " ";
      what += e;
      what += ";";
    }
    throw std::invalid_argument(what);
  }
}

std::array<double, 64> weights_from_params(Model model,
                                           const GovernanceParams& params) {
  validate_params(params);
  std::array<double, 64> weights{};
  for (int outcome = 0; outcome < 16; ++outcome) {
    const ActionProfile profile = ActionProfile::from_index(outcome);
    const PayoffVector pv = detail::payoff_unchecked(model, profile, params);
    weights[static_cast<std::size_t>(4 * outcome + 0)] = pv.regulator;
    weights[static_cast<std::size_t>(4 * outcome + 1)] = pv.developer;
    weights[static_cast<std::size_t>(4 * outcome + 2)] = pv.user;
    weights[static_cast<std::size_t>(4 * outcome + 3)] = pv.commentariat;
  }
  return weights;
}

std::array<PayoffVector, 16> weights_to_payoffs(
    const std::array<double, 64>& weights) {
  std::array<PayoffVector, 16> payoffs{};
  for (int outcome = 0; outcome < 16; ++outcome) {
    PayoffVector& pv = payoffs[static_cast<std::size_t>(outcome)];
    pv.regulator = weights[static_cast<std::size_t>(4 * outcome + 0)];
    pv.developer = weights[static_cast<std::size_t>(4 * outcome + 1)];
    pv.user = weights[static_cast<std::size_t>(4 * outcome + 2)];
    pv.commentariat = weights[static_cast<std::size_t>(4 * outcome + 3)];
  }
  return payoffs;
}

std::string format_weight(double value) {
  value += 0.0;  // normalize -0
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  std::string out(buf, res.ptr);
  if (out.find('.') == std::string::npos &&
      out.find('e') == std::string::npos &&
      out.find('n') == std::string::npos) {
    out += ".0";
  }
  return out;
}

const std::string& default_prompt_template() {
  static const std::string text = kTemplateText;
  return text;
}

std::string render_prompt(const GameConfig& config, int agent_slot,
                          int round_number, const std::string& history_text) {
  if (agent_slot < 0 || agent_slot > 3) {
    throw std::invalid_argument("agent_slot must be in 0..3");
  }
  if (round_number < 1 || round_number > config.n_rounds) {
    throw std::invalid_argument("round_number must be in 1..n_rounds");
  }
  if (config.weights.size() != 64) {
    throw std::invalid_argument("config must carry 64 weights");
  }

  const std::string& templ = config.template_text.empty()
                                 ? default_prompt_template()
                                 : config.template_text;

  std::map<std::string, std::string> subst;
  subst["currentPlayerName"] =
      config.agent_names[static_cast<std::size_t>(agent_slot)];
  int opp = 1;
  for (int slot = 0; slot < 4; ++slot) {
    if (slot == agent_slot) continue;
    subst["opponent" + std::to_string(opp++)] =
        config.agent_names[static_cast<std::size_t>(slot)];
  }
  const auto& personality =
      config.personalities[static_cast<std::size_t>(agent_slot)];
  if (personality.has_value()) {
    subst["personality"] = *personality;
  }
  subst["nRounds"] = std::to_string(config.n_rounds);
  subst["currentRound"] = std::to_string(round_number);
  subst["strategy1"] = config.strategy_labels[0];
  subst["strategy2"] = config.strategy_labels[1];
  subst["history"] = history_text;
  for (int i = 0; i < 64; ++i) {
    subst["weight" + std::to_string(i + 1)] =
        format_weight(config.weights[static_cast<std::size_t>(i)]);
  }

  const std::map<std::string, bool> blocks = {
      {"intro", personality.has_value()},
      {"gameLength", true},
  };

  std::ostringstream out;
  std::size_t line_start = 0;
  bool first_line = true;
  while (line_start <= templ.size()) {
    std::size_t line_end = templ.find('\n', line_start);
    std::string line = line_end == std::string::npos
                           ? templ.substr(line_start)
                           : templ.substr(line_start, line_end - line_start);
    const bool last = line_end == std::string::npos;

    // Optional block line: "{name}: [content]".
    bool drop_line = false;
    if (!line.empty() && line.front() == '{') {
      std::size_t name_end = 0;
      const std::string name = placeholder_at(line, 0, &name_end);
      if (!name.empty() && line.compare(name_end, 3, ": [") == 0 &&
          line.back() == ']') {
        auto it = blocks.find(name);
        if (it != blocks.end()) {
          if (it->second) {
            line = line.substr(name_end + 3, line.size() - name_end - 4);
          } else {
            drop_line = true;
          }
        }
      }
    }
    if (!drop_line) {
      // Substitute placeholders left to right without rescanning insertions.
      std::string rendered;
      rendered.reserve(line.size());
      std::size_t i = 0;
      while (i < line.size()) {
        if (line[i] == '{') {
          std::size_t end = 0;
          const std::string name = placeholder_at(line, i, &end);
          if (!name.empty()) {
            auto it = subst.find(name);
            if (it != subst.end()) {
              rendered += it->second;
              i = end;
              continue;
            }
            throw std::invalid_argument("unresolved placeholder '{" + name +
                                        "}' in prompt template");
          }
        }
        rendered += line[i++];
      }
      if (!first_line) out << '\n';
      out << rendered;
      first_line = false;
    }

    if (last) break;
    line_start = line_end + 1;
  }
  return out.str();
}

ParsedChoice parse_choice(const std::string& raw_text,
                          const std::array<std::string, 2>& strategy_labels) {
  const std::string strip_chars = " \t\r\n.,;:!?'\"()[]";
  std::size_t begin = raw_text.find_first_not_of(strip_chars);
  std::size_t end = raw_text.find_last_not_of(strip_chars);
  const std::string trimmed = begin == std::string::npos
                                  ? std::string()
                                  : raw_text.substr(begin, end - begin + 1);
  const std::string haystack = lowercase(trimmed);
  const bool has_first =
      haystack.find(lowercase(strategy_labels[0])) != std::string::npos;
  const bool has_second =
      haystack.find(lowercase(strategy_labels[1])) != std::string::npos;

  ParsedChoice result;
  if (has_first && has_second) {
    result.error = "ambiguous response (both labels present): " + raw_text;
  } else if (has_first) {
    result.action = Action::Cooperate;
  } else if (has_second) {
    result.action = Action::Defect;
  } else {
    result.error = "unrecognized response: " + raw_text;
  }
  return result;
}

ScriptedProvider::ScriptedProvider(
    std::map<std::string, std::vector<Action>> script,
    std::array<std::string, 2> strategy_labels)
    : script_(std::move(script)), labels_(std::move(strategy_labels)) {}

CompletionResult ScriptedProvider::complete(const std::string& agent_name,
                                            const std::string& /*prompt*/) {
  CompletionResult result;
  auto it = script_.find(agent_name);
  if (it == script_.end() || it->second.empty()) {
    result.error = "no scripted actions for agent '" + agent_name + "'";
    return result;
  }
  const std::size_t cursor = cursor_[agent_name]++;
  const Action action = it->second[cursor % it->second.size()];
  result.ok = true;
  result.text = action == Action::Cooperate ? labels_[0] : labels_[1];
  return result;
}

RemoteChatProvider::RemoteChatProvider(ProviderSpec spec)
    : spec_(std::move(spec)) {}

CompletionResult RemoteChatProvider::complete(const std::string& /*agent*/,
                                              const std::string& prompt) {
  CompletionResult result;

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (spec_.endpoint.rfind("https://", 0) == 0) {
    result.error = "https endpoints need a TLS-enabled build";
    return result;
  }
#endif

  nlohmann::json body;
  body["model"] = spec_.model_name;
  body["messages"] =
      nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
  if (spec_.temperature.has_value()) {
    body["temperature"] = *spec_.temperature;
  }
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv(spec_.credentials_env.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error = "request not attempted";
  for (int attempt = 0; attempt <= spec_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::seconds(1L << (attempt - 1)));
    }
    httplib::Client client(spec_.endpoint);
    if (!client.is_valid()) {
      last_error = "invalid endpoint '" + spec_.endpoint + "'";
      continue;
    }
    client.set_connection_timeout(spec_.timeout_seconds, 0);
    client.set_read_timeout(spec_.timeout_seconds, 0);
    client.set_write_timeout(spec_.timeout_seconds, 0);

    auto response = client.Post(spec_.endpoint_path, headers, payload,
                                "application/json");
    if (!response) {
      last_error = "transport error: " + httplib::to_string(response.error());
      continue;
    }
    if (response->status != 200) {
      last_error = "HTTP " + std::to_string(response->status) + ": " +
                   response->body.substr(0, 512);
      continue;
    }
    try {
      const nlohmann::json reply = nlohmann::json::parse(response->body);
      const auto& choices = reply.at("choices");
      if (!choices.is_array() || choices.empty()) {
        last_error = "response has no choices";
        continue;
      }
      result.text = choices[0].at("message").at("content").get<std::string>();
      result.ok = true;
      return result;
    } catch (const std::exception& e) {
      last_error = std::string("bad response body: ") + e.what();
    }
  }
  result.error = last_error;
  return result;
}

std::unique_ptr<Provider> make_provider(const ProviderSpec& spec) {
  if (spec.kind == ProviderKind::Scripted) {
    return std::make_unique<ScriptedProvider>(
        spec.script, std::array<std::string, 2>{"Option A", "Option B"});
  }
  return std::make_unique<RemoteChatProvider>(spec);
}

namespace {

std::string history_string(const GameConfig& config,
                           const RepetitionRecord& rep, int rounds_done) {
  if (rounds_done == 0) return "{}";
  std::ostringstream out;
  out << "{";
  for (int slot = 0; slot < 4; ++slot) {
    if (slot > 0) out << ", ";
    out << config.agent_names[static_cast<std::size_t>(slot)] << ": [";
    for (int r = 0; r < rounds_done; ++r) {
      if (r > 0) out << ", ";
      const auto& record =
          rep.rounds[static_cast<std::size_t>(r)][static_cast<std::size_t>(slot)];
      if (record.decision.has_value()) {
        out << (record.decision == Action::Cooperate
                    ? config.strategy_labels[0]
                    : config.strategy_labels[1]);
      } else {
        out << "unparsed";
      }
    }
    out << "]";
  }
  out << "}";
  return out.str();
}

}  // namespace

GameResult run_experiment(const GameConfig& config, Provider& provider) {
  validate_game_config(config);

  GameResult result;
  result.repetitions.reserve(static_cast<std::size_t>(config.n_repetitions));
  for (int rep = 0; rep < config.n_repetitions; ++rep) {
    RepetitionRecord record;
    record.rounds.resize(static_cast<std::size_t>(config.n_rounds));
    for (int round = 1; round <= config.n_rounds; ++round) {
      const std::string history = history_string(config, record, round - 1);
      for (int slot = 0; slot < 4; ++slot) {
        AgentRoundRecord& cell =
            record.rounds[static_cast<std::size_t>(round - 1)]
                         [static_cast<std::size_t>(slot)];
        const std::string prompt =
            render_prompt(config, slot, round, history);
        const CompletionResult completion = provider.complete(
            config.agent_names[static_cast<std::size_t>(slot)], prompt);
        if (!completion.ok) {
          cell.error = completion.error;
          record.complete = false;
          continue;
        }
        cell.raw_response = completion.text;
        const ParsedChoice parsed =
            parse_choice(completion.text, config.strategy_labels);
        if (parsed.action.has_value()) {
          cell.decision = parsed.action;
        } else {
          cell.error = parsed.error;
        }
      }
    }
    result.repetitions.push_back(std::move(record));
  }
  return result;
}

GameResult run_experiment(const GameConfig& config) {
  validate_game_config(config);
  std::unique_ptr<Provider> provider =
      config.provider.kind == ProviderKind::Scripted
          ? std::make_unique<ScriptedProvider>(config.provider.script,
                                               config.strategy_labels)
          : make_provider(config.provider);
  return run_experiment(config, *provider);
}

std::array<RoleAggregate, 4> aggregate(const GameResult& result) {
  std::array<RoleAggregate, 4> rows;
  for (int slot = 0; slot < 4; ++slot) {
    RoleAggregate& row = rows[static_cast<std::size_t>(slot)];
    row.role = to_string(kAgentSlotRoles[static_cast<std::size_t>(slot)]);
    std::int64_t coop = 0;
    for (const auto& rep : result.repetitions) {
      for (const auto& round : rep.rounds) {
        const auto& cell = round[static_cast<std::size_t>(slot)];
        if (cell.decision.has_value()) {
          ++row.n_parsed;
          if (*cell.decision == Action::Cooperate) ++coop;
        } else {
          ++row.n_missing;
        }
      }
    }
    row.coop_frequency =
        row.n_parsed > 0
            ? static_cast<double>(coop) / static_cast<double>(row.n_parsed)
            : std::numeric_limits<double>::quiet_NaN();
  }
  return rows;
}

GameConfig game_config_from_json_text(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed game config JSON: ") +
                                e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("game config JSON must be an object");
  }

  static const std::vector<std::string> known_keys = {
      "agent_names",  "personalities",      "provider",
      "n_rounds",     "agents_communicate", "know_personalities",
      "stopping_condition", "strategy_labels", "weights",
      "n_repetitions", "model",             "params",
      "template_path"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known_keys.begin(), known_keys.end(), it.key()) ==
        known_keys.end()) {
      throw std::invalid_argument("unknown game config key '" + it.key() +
                                  "'");
    }
  }

  GameConfig config;

  if (j.contains("agent_names")) {
    const auto& names = j["agent_names"];
    if (!names.is_array() || names.size() != 4) {
      throw std::invalid_argument("agent_names must be an array of 4 strings");
    }
    for (int i = 0; i < 4; ++i) {
      config.agent_names[static_cast<std::size_t>(i)] =
          names[static_cast<std::size_t>(i)].get<std::string>();
    }
  }
  if (j.contains("personalities")) {
    const auto& ps = j["personalities"];
    if (!ps.is_array() || ps.size() != 4) {
      throw std::invalid_argument(
          "personalities must be an array of 4 entries (string or null)");
    }
    for (int i = 0; i < 4; ++i) {
      const auto& p = ps[static_cast<std::size_t>(i)];
      if (p.is_null()) continue;
      config.personalities[static_cast<std::size_t>(i)] = p.get<std::string>();
    }
  }

  if (!j.contains("provider") || !j["provider"].is_object()) {
    throw std::invalid_argument("game config needs a provider object");
  }
  {
    const auto& pj = j["provider"];
    static const std::vector<std::string> provider_keys = {
        "kind",         "model_name",      "endpoint",
        "endpoint_path", "credentials_env", "temperature",
        "timeout_seconds", "max_retries",  "script"};
    for (auto it = pj.begin(); it != pj.end(); ++it) {
      if (std::find(provider_keys.begin(), provider_keys.end(), it.key()) ==
          provider_keys.end()) {
        throw std::invalid_argument("unknown provider key '" + it.key() + "'");
      }
    }
    const std::string kind = pj.at("kind").get<std::string>();
    if (kind == "scripted") {
      config.provider.kind = ProviderKind::Scripted;
    } else if (kind == "remote_chat") {
      config.provider.kind = ProviderKind::RemoteChat;
    } else {
      throw std::invalid_argument("provider kind must be 'scripted' or "
                                  "'remote_chat' (got '" + kind + "')");
    }
    if (pj.contains("model_name")) {
      config.provider.model_name = pj["model_name"].get<std::string>();
    }
    if (pj.contains("endpoint")) {
      config.provider.endpoint = pj["endpoint"].get<std::string>();
    }
    if (pj.contains("endpoint_path")) {
      config.provider.endpoint_path = pj["endpoint_path"].get<std::string>();
    }
    if (pj.contains("credentials_env")) {
      config.provider.credentials_env =
          pj["credentials_env"].get<std::string>();
    }
    if (pj.contains("temperature")) {
      config.provider.temperature = pj["temperature"].get<double>();
    }
    if (pj.contains("timeout_seconds")) {
      config.provider.timeout_seconds = pj["timeout_seconds"].get<int>();
    }
    if (pj.contains("max_retries")) {
      config.provider.max_retries = pj["max_retries"].get<int>();
    }
    if (pj.contains("script")) {
      const auto& script = pj["script"];
      if (!script.is_object()) {
        throw std::invalid_argument("provider script must be an object");
      }
      for (auto it = script.begin(); it != script.end(); ++it) {
        std::vector<Action> seq;
        for (const auto& entry : it.value()) {
          const std::string label = entry.get<std::string>();
          if (label == "Cooperate" || label == "C") {
            seq.push_back(Action::Cooperate);
          } else if (label == "Defect" || label == "D") {
            seq.push_back(Action::Defect);
          } else {
            throw std::invalid_argument(
                "script entries must be 'Cooperate' or 'Defect' (got '" +
                label + "')");
          }
        }
        config.provider.script[it.key()] = std::move(seq);
      }
    }
  }

  if (j.contains("n_rounds")) config.n_rounds = j["n_rounds"].get<int>();
  if (j.contains("agents_communicate")) {
    config.agents_communicate = j["agents_communicate"].get<bool>();
  }
  if (j.contains("know_personalities")) {
    config.know_personalities = j["know_personalities"].get<bool>();
  }
  if (j.contains("stopping_condition") && !j["stopping_condition"].is_null()) {
    config.stopping_condition = j["stopping_condition"].get<std::string>();
  }
  if (j.contains("strategy_labels")) {
    const auto& labels = j["strategy_labels"];
    if (!labels.is_array() || labels.size() != 2) {
      throw std::invalid_argument(
          "strategy_labels must be an array of 2 strings");
    }
    config.strategy_labels[0] = labels[0].get<std::string>();
    config.strategy_labels[1] = labels[1].get<std::string>();
  }
  if (j.contains("n_repetitions")) {
    config.n_repetitions = j["n_repetitions"].get<int>();
  }
  if (j.contains("template_path")) {
    const std::string path = j["template_path"].get<std::string>();
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw std::invalid_argument("cannot read template_path '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    config.template_text = buffer.str();
  }

  if (j.contains("weights")) {
    const auto& wj = j["weights"];
    if (!wj.is_array() || wj.size() != 64) {
      throw std::invalid_argument("weights must be an array of 64 numbers");
    }
    config.weights.resize(64);
    for (std::size_t i = 0; i < 64; ++i) {
      if (!wj[i].is_number()) {
        throw std::invalid_argument("weights entries must be numbers");
      }
      config.weights[i] = wj[i].get<double>();
    }
  } else {
    if (!j.contains("model") || !j.contains("params")) {
      throw std::invalid_argument(
          "game config needs either weights or model+params");
    }
    const Model model = model_from_string(j["model"].get<std::string>());
    const GovernanceParams params =
        params_from_json_text(j["params"].dump());
    const auto derived = weights_from_params(model, params);
    config.weights.assign(derived.begin(), derived.end());
  }

  validate_game_config(config);
  return config;
}

}  // namespace govgame
