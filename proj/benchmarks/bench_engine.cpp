#include <benchmark/benchmark.h>

#include "govgame/equilibria.hpp"
#include "govgame/finite.hpp"
#include "govgame/integrate.hpp"
#include "govgame/llm.hpp"
#include "govgame/params.hpp"

namespace {

using namespace govgame;

GovernanceParams bench_params() {
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

void BM_Payoff(benchmark::State& state) {
  const GovernanceParams g = bench_params();
  int idx = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(payoff(Model::InvestigateDevelopers,
                                    ActionProfile::from_index(idx), g));
    idx = (idx + 1) & 15;
  }
}
BENCHMARK(BM_Payoff);

void BM_Fitness(benchmark::State& state) {
  const GovernanceParams g = bench_params();
  const PopulationState s{0.3, 0.6, 0.4, 0.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fitness(Model::InvestigateDevelopers, Role::Developer,
                Action::Cooperate, s, g));
  }
}
BENCHMARK(BM_Fitness);

void BM_ClosedFormDifferences(benchmark::State& state) {
  const GovernanceParams g = bench_params();
  const PopulationState s{0.3, 0.6, 0.4, 0.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        closed_form_differences(Model::InvestigateDevelopers, s, g));
  }
}
BENCHMARK(BM_ClosedFormDifferences);

void BM_Rhs(benchmark::State& state) {
  const GovernanceParams g = bench_params();
  const PopulationState s{0.3, 0.6, 0.4, 0.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rhs(Model::InvestigateDevelopers, s, g));
  }
}
BENCHMARK(BM_Rhs);

void BM_Integrate(benchmark::State& state) {
  const GovernanceParams g = bench_params();
  IntegratorConfig config;
  config.t_end = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(
        Model::InvestigateDevelopers, PopulationState{0.5, 0.5, 0.5, 0.5}, g,
        config));
  }
}
BENCHMARK(BM_Integrate)->Arg(100)->Arg(20000);

void BM_VertexReports(benchmark::State& state) {
  const GovernanceParams g = bench_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(vertex_reports(Model::InvestigateDevelopers, g));
  }
}
BENCHMARK(BM_VertexReports);

void BM_FindInterior(benchmark::State& state) {
  GovernanceParams g = bench_params();
  g.epsilon = -0.5;
  g.v = 0.2;
  g.b_i = 0.5;
  g.c_i = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        find_interior_equilibria(Model::InvestigateDevelopers, g));
  }
}
BENCHMARK(BM_FindInterior);

void BM_GridScan(benchmark::State& state) {
  const GovernanceParams g = bench_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_scan(Model::InvestigateDevelopers, g, 50));
  }
}
BENCHMARK(BM_GridScan);

void BM_TransitionMatrix(benchmark::State& state) {
  const GovernanceParams g = bench_params();
  FiniteConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        transition_matrix(Model::InvestigateDevelopers, config, g));
  }
}
BENCHMARK(BM_TransitionMatrix);

void BM_StationaryDistribution(benchmark::State& state) {
  const GovernanceParams g = bench_params();
  FiniteConfig config;
  const MonomorphicChain chain =
      transition_matrix(Model::InvestigateDevelopers, config, g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary_distribution(chain));
  }
}
BENCHMARK(BM_StationaryDistribution);

void BM_SimulateAgents(benchmark::State& state) {
  const GovernanceParams g = bench_params();
  FiniteConfig config;
  config.sizes = {20, 20, 20, 20};
  SimulationConfig sim;
  sim.steps = static_cast<std::uint64_t>(state.range(0));
  sim.record_every = sim.steps;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate_agents(Model::InvestigateDevelopers, config, g, sim));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateAgents)->Arg(100000);

void BM_RenderPrompt(benchmark::State& state) {
  GameConfig config;
  const auto weights =
      weights_from_params(Model::InvestigateDevelopers, bench_params());
  config.weights.assign(weights.begin(), weights.end());
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_prompt(config, 0, 1, "{}"));
  }
}
BENCHMARK(BM_RenderPrompt);

}  // namespace

BENCHMARK_MAIN();
