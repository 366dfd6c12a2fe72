#include "guiwb/harness/evaluation.hpp"

#include <set>

#include "guiwb/error.hpp"
#include "guiwb/harness/orchestrator.hpp"

namespace guiwb::harness {

std::string_view to_string(PlannerKind k) noexcept {
  switch (k) {
    case PlannerKind::Softmax:
      return "softmax";
    case PlannerKind::Oracle:
      return "oracle";
    case PlannerKind::ScriptedNoisy:
      return "scripted-noisy";
  }
  return "softmax";
}

PlannerKind planner_kind_from_string(std::string_view s) {
  if (s == "softmax") return PlannerKind::Softmax;
  if (s == "oracle") return PlannerKind::Oracle;
  if (s == "scripted-noisy") return PlannerKind::ScriptedNoisy;
  throw Error(ErrorKind::Config, "unknown planner kind '" + std::string(s) + "'");
}

std::uint64_t episode_seed(std::uint64_t masterSeed, std::string_view taskId, int attempt) {
  return stable_hash({masterSeed, stable_hash(taskId), static_cast<std::uint64_t>(attempt)});
}

EpisodeResult to_result(const rl::Trajectory& t) {
  EpisodeResult r;
  r.taskId = t.taskId;
  r.attempt = t.attempt;
  r.outcome = t.judgedOutcome;
  r.steps = static_cast<int>(t.steps.size());
  for (const auto& s : t.steps) r.totalReward += s.reward;
  r.seedUsed = t.seed;
  r.difficulty = t.difficulty;
  r.transportFailure = t.transportFailure;
  return r;
}

sim::Outcome classify(const sim::JudgeState& judge, int milestoneCount) {
  return sim::judge_outcome(judge, milestoneCount);
}

MetricsReport aggregate(const std::vector<EpisodeResult>& results, std::string method) {
  MetricsReport m;
  m.method = std::move(method);
  m.results = results;
  m.episodes = static_cast<int>(results.size());
  int success = 0;
  int partial = 0;
  int fail = 0;
  std::set<std::string> solved;
  for (const auto& r : results) {
    if (r.outcome == sim::Outcome::Success) solved.insert(r.taskId);
    if (r.attempt != 1) continue;
    ++m.tasks;
    auto& d = m.perDifficulty[r.difficulty];
    ++d.tasks;
    switch (r.outcome) {
      case sim::Outcome::Success:
        ++success;
        ++d.successes;
        break;
      case sim::Outcome::Partial:
        ++partial;
        break;
      case sim::Outcome::Fail:
        ++fail;
        break;
    }
  }
  if (m.tasks > 0) {
    const double n = m.tasks;
    m.sr = success / n;
    m.partialRate = partial / n;
    m.failRate = fail / n;
    m.passAt2 = static_cast<double>(solved.size()) / n;
  }
  for (auto& [_, d] : m.perDifficulty) d.sr = static_cast<double>(d.successes) / d.tasks;
  return m;
}

DecisionFn make_planner(const RunConfig& cfg) {
  switch (cfg.plannerKind) {
    case PlannerKind::Softmax:
      return softmax_planner(cfg.policy);
    case PlannerKind::Oracle:
      return oracle_replay_planner();
    case PlannerKind::ScriptedNoisy:
      return scripted_noisy_planner(cfg.noiseP);
  }
  throw Error(ErrorKind::Config, "unknown planner kind");
}

namespace {

void check(const RunConfig& cfg) {
  if (cfg.suite.empty()) throw Error(ErrorKind::Config, "evaluation suite is empty");
  if (cfg.workers < 1) throw Error(ErrorKind::Config, "workers must be >= 1");
  if (cfg.groundingEpsilon < 0.0 || cfg.groundingEpsilon > 1.0) {
    throw Error(ErrorKind::Config, "grounding epsilon must lie in [0, 1]");
  }
  if (cfg.noiseP < 0.0 || cfg.noiseP > 1.0) throw Error(ErrorKind::Config, "noise p must lie in [0, 1]");
  if (cfg.maxShift < 0) throw Error(ErrorKind::Config, "maxShift must be >= 0");
}

std::string method_label(const RunConfig& cfg) {
  std::string s(to_string(cfg.plannerKind));
  if (cfg.plannerKind == PlannerKind::Softmax) s += " v" + std::to_string(cfg.policy.version);
  if (cfg.plannerKind == PlannerKind::ScriptedNoisy) s += " p=" + std::to_string(cfg.noiseP).substr(0, 4);
  s += " / ";
  s += to_string(cfg.interfaceMode);
  if (cfg.perturbLayout) s += " / perturbed";
  return s;
}

std::vector<rl::Trajectory> run_attempt(const RunConfig& cfg, const std::vector<TaskInstance>& tasks,
                                        const std::vector<std::size_t>& which, int attempt) {
  std::vector<EpisodeJob> jobs;
  jobs.reserve(which.size());
  for (std::size_t i : which) {
    jobs.push_back({&tasks[i].world, &tasks[i].task, episode_seed(cfg.masterSeed, tasks[i].task.id, attempt), attempt});
  }
  EpisodeSettings base;
  base.groundingEpsilon = cfg.groundingEpsilon;
  base.mode = cfg.interfaceMode;
  base.perturbLayout = cfg.perturbLayout;
  base.maxShift = cfg.maxShift;
  return run_jobs(jobs, make_planner(cfg), base, cfg.workers);
}

std::vector<TaskInstance> instantiate_suite(const RunConfig& cfg) {
  std::vector<TaskInstance> tasks(cfg.suite.size());
  parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) { tasks[i] = instantiate(cfg.suite[i]); });
  return tasks;
}

SuiteRun finish(const RunConfig& cfg, std::vector<rl::Trajectory> trajs) {
  std::vector<EpisodeResult> results;
  results.reserve(trajs.size());
  for (const auto& t : trajs) results.push_back(to_result(t));
  return SuiteRun{aggregate(results, method_label(cfg)), std::move(trajs)};
}

}  // namespace

SuiteRun run_suite_detailed(const RunConfig& cfg) {
  check(cfg);
  const auto tasks = instantiate_suite(cfg);
  std::vector<std::size_t> all(tasks.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return finish(cfg, run_attempt(cfg, tasks, all, 1));
}

MetricsReport run_suite(const RunConfig& cfg) { return run_suite_detailed(cfg).report; }

SuiteRun pass_at_2_detailed(const RunConfig& cfg) {
  check(cfg);
  const auto tasks = instantiate_suite(cfg);
  std::vector<std::size_t> all(tasks.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto trajs = run_attempt(cfg, tasks, all, 1);
  std::vector<std::size_t> rerun;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    if (trajs[i].judgedOutcome != sim::Outcome::Success) rerun.push_back(i);
  }
  auto second = run_attempt(cfg, tasks, rerun, 2);
  for (auto& t : second) trajs.push_back(std::move(t));
  return finish(cfg, std::move(trajs));
}

MetricsReport pass_at_2(const RunConfig& cfg) { return pass_at_2_detailed(cfg).report; }

AblationReport ablation_interface(const RunConfig& cfg) {
  if (cfg.plannerKind != PlannerKind::ScriptedNoisy) {
    throw Error(ErrorKind::Config, "the interface ablation needs the scripted-noisy planner");
  }
  RunConfig e2e = cfg;
  e2e.interfaceMode = InterfaceMode::EndToEnd;
  RunConfig mid = cfg;
  mid.interfaceMode = InterfaceMode::Intermediate;
  AblationReport out;
  out.endToEnd = run_suite(e2e);
  out.intermediate = run_suite(mid);
  out.delta = out.intermediate.sr - out.endToEnd.sr;
  return out;
}

}  // namespace guiwb::harness
