#include <benchmark/benchmark.h>

#include "gen.hpp"
#include "guiwb/dsl/action.hpp"
#include "guiwb/grounding/grounder.hpp"
#include "guiwb/harness/episode.hpp"
#include "guiwb/harness/orchestrator.hpp"
#include "guiwb/harness/training_run.hpp"
#include "guiwb/planner/policy.hpp"
#include "guiwb/sim/generator.hpp"

using namespace guiwb;

namespace {

std::vector<std::string> rendered_actions(int n) {
  Rng rng = make_rng(1);
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(dsl::render_action(testgen::random_action(rng)));
  return out;
}

void BM_ParseAction(benchmark::State& state) {
  const auto texts = rendered_actions(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsl::parse_action(texts[i++ & 1023]));
  }
}
BENCHMARK(BM_ParseAction);

void BM_RenderAction(benchmark::State& state) {
  Rng rng = make_rng(2);
  std::vector<dsl::Action> actions;
  for (int i = 0; i < 1024; ++i) actions.push_back(testgen::random_action(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsl::render_action(actions[i++ & 1023]));
  }
}
BENCHMARK(BM_RenderAction);

void BM_Ground(benchmark::State& state) {
  const auto [world, task] = sim::generate_world(5, 6);
  const auto obs = sim::initial_observation(world, world.initialScreen, task.max_steps());
  std::vector<dsl::GroundingQuery> queries;
  for (const auto& e : obs.visibleElements) queries.push_back({grounding::make_description(e, obs)});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grounding::ground(queries[i++ % queries.size()], obs));
  }
}
BENCHMARK(BM_Ground);

void BM_CandidateFeatures(benchmark::State& state) {
  const auto [world, task] = sim::generate_world(6, 6);
  const auto obs = sim::initial_observation(world, world.initialScreen, task.max_steps());
  const planner::PlannerContext ctx{obs, task.instruction, {}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(planner::enumerate_candidates(ctx));
  }
}
BENCHMARK(BM_CandidateFeatures);

void BM_Rollout(benchmark::State& state) {
  const auto ti = harness::instantiate(harness::make_suite(harness::kEvalSeedBase, 1, 6, 6)[0]);
  planner::PolicyParams p;
  p.w[planner::feature::kLabelOverlap] = 4.0;
  const auto decide = harness::softmax_planner(p);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    harness::EpisodeSettings s;
    s.seed = seed++;
    benchmark::DoNotOptimize(harness::run_episode(ti.world, ti.task, decide, s));
  }
}
BENCHMARK(BM_Rollout);

void BM_SuiteRollouts(benchmark::State& state) {
  std::vector<harness::TaskInstance> tasks;
  for (const auto& t : harness::make_suite(harness::kEvalSeedBase, 64, 1, 6)) tasks.push_back(harness::instantiate(t));
  std::vector<harness::EpisodeJob> jobs;
  for (std::size_t i = 0; i < tasks.size(); ++i) jobs.push_back({&tasks[i].world, &tasks[i].task, i, 1});
  const auto decide = harness::scripted_noisy_planner(0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(harness::run_jobs(jobs, decide, {}, static_cast<int>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(jobs.size()));
}
BENCHMARK(BM_SuiteRollouts)->Arg(1)->Arg(4);

}  // namespace
BENCHMARK_MAIN();
