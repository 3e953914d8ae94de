// Command line front end: loads a strict JSON config, runs one analysis
// subcommand, and writes CSV plus a run manifest. Exit codes: 0 success,
// 1 runtime failure, 2 config or usage error.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "govgame/dynamics.hpp"
#include "govgame/equilibria.hpp"
#include "govgame/finite.hpp"
#include "govgame/integrate.hpp"
#include "govgame/io.hpp"
#include "govgame/llm.hpp"
#include "govgame/params.hpp"
#include "govgame/version.hpp"

namespace {

using nlohmann::json;
using namespace govgame;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::string what_arg)
      : std::runtime_error(std::move(what_arg)) {}
};

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<std::string> param_overrides;
  CLI::Option* seed_option = nullptr;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--config", opts.config_path, "JSON config file")
      ->required();
  sub->add_option("--out", opts.out_path, "output file path")->required();
  opts.seed_option =
      sub->add_option("--seed", opts.seed, "RNG seed (overrides config)");
  sub->add_option("--threads", opts.threads,
                  "worker threads (0 = hardware default)");
  sub->add_option("--param", opts.param_overrides,
                  "override a model parameter, key=value (repeatable)");
}

void check_keys(const json& object, const std::vector<std::string>& known,
                const std::string& where) {
  for (auto it = object.begin(); it != object.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

struct RunInputs {
  json root;
  std::optional<Model> model;
  std::optional<GovernanceParams> params;
  std::uint64_t seed = 0;
};

enum class Needs { ModelAndParams, ModelOnly, Nothing };

RunInputs load_inputs(const CommonOptions& opts, Needs needs) {
  RunInputs inputs;
  std::string text;
  try {
    text = io::read_file(opts.config_path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  try {
    inputs.root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (!inputs.root.is_object()) {
    throw ConfigError("config JSON must be an object");
  }
  check_keys(inputs.root,
             {"model", "params", "seed", "integrate", "finite", "census",
              "simulate", "sweep", "llm"},
             "config");

  if (inputs.root.contains("model")) {
    inputs.model = model_from_string(inputs.root["model"].get<std::string>());
  }

  json params_json =
      inputs.root.value("params", json::object());
  for (const std::string& kv : opts.param_overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == kv.size()) {
      throw ConfigError("--param expects key=value (got '" + kv + "')");
    }
    const std::string key = kv.substr(0, eq);
    const std::string value_text = kv.substr(eq + 1);
    char* end = nullptr;
    const double value = std::strtod(value_text.c_str(), &end);
    if (end == value_text.c_str() || *end != '\0') {
      throw ConfigError("--param " + key + ": '" + value_text +
                        "' is not a number");
    }
    params_json[key] = value;
  }
  if (!params_json.empty() || inputs.root.contains("params")) {
    inputs.params = params_from_json_text(params_json.dump());
  }

  if (inputs.root.contains("seed")) {
    inputs.seed = inputs.root["seed"].get<std::uint64_t>();
  }
  if (opts.seed_option != nullptr && opts.seed_option->count() > 0) {
    inputs.seed = opts.seed;
  }

  if (needs != Needs::Nothing && !inputs.model.has_value()) {
    throw ConfigError("config needs a 'model' entry");
  }
  if (needs == Needs::ModelAndParams && !inputs.params.has_value()) {
    throw ConfigError("config needs a 'params' object");
  }
  return inputs;
}

PopulationState state_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    throw ConfigError(where + " must be an array of 4 numbers [x, y, z, w]");
  }
  PopulationState s{j[0].get<double>(), j[1].get<double>(),
                    j[2].get<double>(), j[3].get<double>()};
  for (Role role : kAllRoles) {
    const double v = s.get(role);
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError(where + " entries must lie in [0, 1]");
    }
  }
  return s;
}

IntegratorConfig integrator_from_json(const json& block) {
  check_keys(block,
             {"initial", "t_end", "atol", "rtol", "initial_step", "sample_dt",
              "equilibrium_tol", "max_steps"},
             "integrate block");
  IntegratorConfig cfg;
  if (block.contains("t_end")) cfg.t_end = block["t_end"].get<double>();
  if (block.contains("atol")) cfg.atol = block["atol"].get<double>();
  if (block.contains("rtol")) cfg.rtol = block["rtol"].get<double>();
  if (block.contains("initial_step")) {
    cfg.initial_step = block["initial_step"].get<double>();
  }
  if (block.contains("sample_dt")) {
    cfg.sample_dt = block["sample_dt"].get<double>();
  }
  if (block.contains("equilibrium_tol")) {
    cfg.equilibrium_tol = block["equilibrium_tol"].get<double>();
  }
  if (block.contains("max_steps")) {
    cfg.max_steps = block["max_steps"].get<std::uint64_t>();
  }
  return cfg;
}

PopulationState initial_from_block(const json& block) {
  if (block.contains("initial")) {
    return state_from_json(block["initial"], "initial");
  }
  return PopulationState{0.5, 0.5, 0.5, 0.5};
}

Role role_from_name(const std::string& name) {
  for (Role role : kAllRoles) {
    if (name == to_string(role)) return role;
  }
  throw ConfigError("unknown role '" + name + "'");
}

struct FiniteBlock {
  FiniteConfig config;
  std::array<std::optional<Action>, 4> frozen{};
};

FiniteBlock finite_from_json(const json& block) {
  check_keys(block, {"sizes", "beta", "mu", "frozen"}, "finite block");
  FiniteBlock out;
  if (block.contains("sizes")) {
    const auto& sizes = block["sizes"];
    if (!sizes.is_array() || sizes.size() != 4) {
      throw ConfigError(
          "finite sizes must be an array of 4 population sizes");
    }
    for (std::size_t i = 0; i < 4; ++i) {
      out.config.sizes[i] = sizes[i].get<int>();
    }
  }
  if (block.contains("beta")) out.config.beta = block["beta"].get<double>();
  if (block.contains("mu")) out.config.mu = block["mu"].get<double>();
  if (block.contains("frozen")) {
    const auto& frozen = block["frozen"];
    if (!frozen.is_object()) {
      throw ConfigError("finite frozen must map role names to action labels");
    }
    for (auto it = frozen.begin(); it != frozen.end(); ++it) {
      const Role role = role_from_name(it.key());
      out.frozen[static_cast<std::size_t>(role)] =
          action_from_label(role, it.value().get<std::string>());
    }
  }
  return out;
}

// Every handler returns the list of files it wrote.

std::vector<std::string> run_integrate(const CommonOptions& opts) {
  const RunInputs inputs = load_inputs(opts, Needs::ModelAndParams);
  const json block = inputs.root.value("integrate", json::object());
  const IntegratorConfig cfg = integrator_from_json(block);
  const PopulationState initial = initial_from_block(block);

  const Trajectory traj =
      integrate(*inputs.model, initial, *inputs.params, cfg);
  io::atomic_write_file(opts.out_path, io::trajectory_csv(traj));
  return {opts.out_path};
}

std::vector<std::string> run_vertices(const CommonOptions& opts) {
  const RunInputs inputs = load_inputs(opts, Needs::ModelAndParams);
  const auto reports = vertex_reports(*inputs.model, *inputs.params);
  io::atomic_write_file(opts.out_path, io::vertex_report_csv(reports));
  return {opts.out_path};
}

std::vector<std::string> run_census(const CommonOptions& opts) {
  const RunInputs inputs = load_inputs(opts, Needs::ModelOnly);
  const json block = inputs.root.value("census", json::object());
  check_keys(block, {"n_samples", "threads"}, "census block");
  const auto n_samples = block.value("n_samples", std::uint64_t{10'000});
  const int threads = block.value("threads", opts.threads);

  const EquilibriumCensus census = census_interior_equilibria(
      *inputs.model, default_census_ranges(), n_samples, inputs.seed,
      threads);
  io::atomic_write_file(opts.out_path, io::census_csv(census));
  return {opts.out_path};
}

std::vector<std::string> run_stationary(const CommonOptions& opts,
                                        const std::string& matrix_out) {
  const RunInputs inputs = load_inputs(opts, Needs::ModelAndParams);
  const FiniteBlock block =
      finite_from_json(inputs.root.value("finite", json::object()));

  const MonomorphicChain chain = transition_matrix(
      *inputs.model, block.config, *inputs.params, block.frozen);
  const Eigen::VectorXd pi = stationary_distribution(chain);
  const std::vector<double> dist(pi.data(), pi.data() + pi.size());

  std::vector<std::string> outputs;
  io::atomic_write_file(opts.out_path, io::stationary_csv(chain, dist));
  outputs.push_back(opts.out_path);
  if (!matrix_out.empty()) {
    io::atomic_write_file(matrix_out, io::transition_matrix_csv(chain));
    outputs.push_back(matrix_out);
  }
  return outputs;
}

std::vector<std::string> run_simulate(const CommonOptions& opts,
                                      const std::string& occupancy_out) {
  const RunInputs inputs = load_inputs(opts, Needs::ModelAndParams);
  const FiniteBlock finite =
      finite_from_json(inputs.root.value("finite", json::object()));
  const json block = inputs.root.value("simulate", json::object());
  check_keys(block, {"steps", "record_every", "initial", "burn_in"},
             "simulate block");
  SimulationConfig sim;
  if (block.contains("steps")) {
    sim.steps = block["steps"].get<std::uint64_t>();
  }
  if (block.contains("record_every")) {
    sim.record_every = block["record_every"].get<std::uint64_t>();
  }
  if (block.contains("burn_in")) {
    sim.burn_in = block["burn_in"].get<std::uint64_t>();
  }
  sim.initial = initial_from_block(block);
  sim.seed = inputs.seed;

  const SimulationResult result =
      simulate_agents(*inputs.model, finite.config, *inputs.params, sim);

  std::vector<std::string> outputs;
  io::atomic_write_file(opts.out_path, io::simulation_csv(result));
  outputs.push_back(opts.out_path);
  if (!occupancy_out.empty()) {
    io::atomic_write_file(occupancy_out, io::occupancy_csv(result));
    outputs.push_back(occupancy_out);
  }
  return outputs;
}

struct SweepParameter {
  std::string name;
  std::vector<double> values;
};

std::vector<std::string> run_sweep(const CommonOptions& opts) {
  const RunInputs inputs = load_inputs(opts, Needs::ModelAndParams);
  if (!inputs.root.contains("sweep")) {
    throw ConfigError("config needs a 'sweep' block");
  }
  const json& block = inputs.root["sweep"];
  check_keys(block, {"command", "parameters"}, "sweep block");
  const std::string command = block.value("command", std::string());
  if (command != "integrate" && command != "stationary") {
    throw ConfigError("sweep command must be 'integrate' or 'stationary'");
  }
  if (!block.contains("parameters") || !block["parameters"].is_array() ||
      block["parameters"].empty() || block["parameters"].size() > 2) {
    throw ConfigError("sweep needs 1 or 2 parameters entries");
  }

  std::vector<SweepParameter> sweep_params;
  for (const json& pj : block["parameters"]) {
    check_keys(pj, {"name", "values"}, "sweep parameter");
    SweepParameter p;
    p.name = pj.value("name", std::string());
    if (!pj.contains("values") || !pj["values"].is_array() ||
        pj["values"].empty()) {
      throw ConfigError("sweep parameter '" + p.name +
                        "' has an empty values list");
    }
    for (const json& v : pj["values"]) {
      p.values.push_back(v.get<double>());
    }
    sweep_params.push_back(std::move(p));
  }

  const json base_params = json::parse(params_to_json_text(*inputs.params));
  IntegratorConfig integ_cfg;
  PopulationState initial{0.5, 0.5, 0.5, 0.5};
  FiniteBlock finite;
  if (command == "integrate") {
    const json iblock = inputs.root.value("integrate", json::object());
    integ_cfg = integrator_from_json(iblock);
    initial = initial_from_block(iblock);
  } else {
    finite = finite_from_json(inputs.root.value("finite", json::object()));
  }

  std::string csv = sweep_params[0].name;
  if (sweep_params.size() > 1) csv += "," + sweep_params[1].name;
  csv += ",statistic,value\n";

  const std::size_t outer = sweep_params[0].values.size();
  const std::size_t inner =
      sweep_params.size() > 1 ? sweep_params[1].values.size() : 1;
  for (std::size_t i = 0; i < outer; ++i) {
    for (std::size_t k = 0; k < inner; ++k) {
      json point = base_params;
      point[sweep_params[0].name] = sweep_params[0].values[i];
      std::string prefix = io::format_number(sweep_params[0].values[i]);
      if (sweep_params.size() > 1) {
        point[sweep_params[1].name] = sweep_params[1].values[k];
        prefix += "," + io::format_number(sweep_params[1].values[k]);
      }
      GovernanceParams params;
      try {
        params = params_from_json_text(point.dump());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("sweep point ") + prefix + ": " +
                          e.what());
      }

      std::vector<std::pair<std::string, double>> stats;
      if (command == "integrate") {
        const Trajectory traj =
            integrate(*inputs.model, initial, params, integ_cfg);
        const PopulationState& last = traj.states.back();
        stats.emplace_back("final_x", last.x);
        stats.emplace_back("final_y", last.y);
        stats.emplace_back("final_z", last.z);
        stats.emplace_back("final_w", last.w);
        stats.emplace_back("converged", traj.converged ? 1.0 : 0.0);
        double best = std::numeric_limits<double>::infinity();
        for (int v = 0; v < 16; ++v) {
          double dist = 0.0;
          for (int c = 0; c < 4; ++c) {
            const double corner = (v >> (3 - c)) & 1 ? 1.0 : 0.0;
            dist = std::max(dist,
                            std::abs(last.get(kAllRoles[static_cast<std::size_t>(
                                         c)]) -
                                     corner));
          }
          best = std::min(best, dist);
        }
        stats.emplace_back("vertex_distance", best);
      } else {
        const MonomorphicChain chain = transition_matrix(
            *inputs.model, finite.config, params, finite.frozen);
        const Eigen::VectorXd pi = stationary_distribution(chain);
        for (Role role : kAllRoles) {
          double mass = 0.0;
          for (std::size_t s = 0; s < chain.states.size(); ++s) {
            if (chain.states[s].get(role) == Action::Cooperate) {
              mass += pi(static_cast<Eigen::Index>(s));
            }
          }
          stats.emplace_back(std::string("coop_mass_") + to_string(role),
                             mass);
        }
      }
      for (const auto& [name, value] : stats) {
        csv += prefix + "," + name + "," + io::format_number(value) + "\n";
      }
    }
  }

  io::atomic_write_file(opts.out_path, csv);
  return {opts.out_path};
}

std::vector<std::string> run_llm(const CommonOptions& opts,
                                 const std::string& transcript_out,
                                 bool render_only) {
  const RunInputs inputs = load_inputs(opts, Needs::Nothing);
  if (!inputs.root.contains("llm")) {
    throw ConfigError("config needs an 'llm' block");
  }
  GameConfig config;
  try {
    config = game_config_from_json_text(inputs.root["llm"].dump());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (render_only) {
    std::string text;
    for (int slot = 0; slot < 4; ++slot) {
      text += "### agent " +
              config.agent_names[static_cast<std::size_t>(slot)] + "\n";
      text += render_prompt(config, slot, 1, "{}");
      if (text.back() != '\n') text += '\n';
      text += "\n";
    }
    io::atomic_write_file(opts.out_path, text);
    return {opts.out_path};
  }

  const GameResult result = run_experiment(config);
  const auto rows = aggregate(result);

  std::vector<std::string> outputs;
  io::atomic_write_file(opts.out_path, io::llm_aggregate_csv(rows));
  outputs.push_back(opts.out_path);

  if (!transcript_out.empty()) {
    json transcript;
    transcript["repetitions"] = json::array();
    for (const auto& rep : result.repetitions) {
      json rj;
      rj["complete"] = rep.complete;
      rj["rounds"] = json::array();
      for (const auto& round : rep.rounds) {
        json row = json::array();
        for (int slot = 0; slot < 4; ++slot) {
          const auto& cell = round[static_cast<std::size_t>(slot)];
          json cj;
          cj["agent"] = config.agent_names[static_cast<std::size_t>(slot)];
          cj["raw_response"] = cell.raw_response;
          if (cell.decision.has_value()) {
            cj["decision"] =
                *cell.decision == Action::Cooperate ? "Cooperate" : "Defect";
          } else {
            cj["decision"] = nullptr;
          }
          cj["error"] = cell.error;
          row.push_back(std::move(cj));
        }
        rj["rounds"].push_back(std::move(row));
      }
      transcript["repetitions"].push_back(std::move(rj));
    }
    io::atomic_write_file(transcript_out, transcript.dump(2) + "\n");
    outputs.push_back(transcript_out);
  }
  return outputs;
}

int dispatch(const std::string& command, const CommonOptions& opts,
             const std::function<std::vector<std::string>()>& handler) {
  io::RunManifest manifest;
  manifest.command = command;
  manifest.config_path = opts.config_path;
  manifest.started = io::iso8601_utc_now();
  manifest.engine_version = std::string(kEngineVersion);

  try {
    manifest.outputs = handler();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  // Seed recorded is the effective one (flag wins over config).
  try {
    const RunInputs inputs = load_inputs(opts, Needs::Nothing);
    manifest.seed = inputs.seed;
  } catch (const std::exception&) {
    manifest.seed = opts.seed;
  }
  manifest.finished = io::iso8601_utc_now();
  io::atomic_write_file(opts.out_path + ".manifest.json",
                        io::manifest_json(manifest));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Evolutionary dynamics of a four-population AI governance game"};
  app.set_version_flag("--version", std::string(kEngineVersion));
  app.require_subcommand(1);

  CommonOptions integrate_opts;
  CLI::App* integrate_cmd = app.add_subcommand(
      "integrate", "integrate the replicator dynamics from an initial state");
  add_common(integrate_cmd, integrate_opts);

  CommonOptions vertices_opts;
  CLI::App* vertices_cmd = app.add_subcommand(
      "vertices", "classify all 16 monomorphic corner equilibria");
  add_common(vertices_cmd, vertices_opts);

  CommonOptions census_opts;
  CLI::App* census_cmd = app.add_subcommand(
      "census", "count interior equilibria across sampled parameter draws");
  add_common(census_cmd, census_opts);

  CommonOptions stationary_opts;
  std::string matrix_out;
  CLI::App* stationary_cmd = app.add_subcommand(
      "stationary",
      "stationary distribution of the small-mutation monomorphic chain");
  add_common(stationary_cmd, stationary_opts);
  stationary_cmd->add_option("--matrix-out", matrix_out,
                             "also write the transition matrix CSV here");

  CommonOptions simulate_opts;
  std::string occupancy_out;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "agent-based stochastic simulation of the four populations");
  add_common(simulate_cmd, simulate_opts);
  simulate_cmd->add_option("--occupancy-out", occupancy_out,
                           "also write monomorphic occupancy CSV here");

  CommonOptions sweep_opts;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "run integrate or stationary over a 1D or 2D parameter grid");
  add_common(sweep_cmd, sweep_opts);

  CommonOptions llm_opts;
  std::string transcript_out;
  bool render_only = false;
  CLI::App* llm_cmd = app.add_subcommand(
      "llm", "run the language-model agent experiment (or render prompts)");
  add_common(llm_cmd, llm_opts);
  llm_cmd->add_option("--transcript-out", transcript_out,
                      "write the full per-call transcript JSON here");
  llm_cmd->add_flag("--render-only", render_only,
                    "write round-1 prompts to --out instead of running");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (app.got_subcommand(integrate_cmd)) {
    return dispatch("integrate", integrate_opts,
                    [&] { return run_integrate(integrate_opts); });
  }
  if (app.got_subcommand(vertices_cmd)) {
    return dispatch("vertices", vertices_opts,
                    [&] { return run_vertices(vertices_opts); });
  }
  if (app.got_subcommand(census_cmd)) {
    return dispatch("census", census_opts,
                    [&] { return run_census(census_opts); });
  }
  if (app.got_subcommand(stationary_cmd)) {
    return dispatch("stationary", stationary_opts, [&] {
      return run_stationary(stationary_opts, matrix_out);
    });
  }
  if (app.got_subcommand(simulate_cmd)) {
    return dispatch("simulate", simulate_opts, [&] {
      return run_simulate(simulate_opts, occupancy_out);
    });
  }
  if (app.got_subcommand(sweep_cmd)) {
    return dispatch("sweep", sweep_opts, [&] { return run_sweep(sweep_opts); });
  }
  if (app.got_subcommand(llm_cmd)) {
    return dispatch("llm", llm_opts, [&] {
      return run_llm(llm_opts, transcript_out, render_only);
    });
  }
  std::cerr << "no subcommand selected\n";
  return kExitConfig;
}
