#include "guiwb/harness/episode.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "guiwb/error.hpp"
#include "guiwb/grounding/grounder.hpp"
#include "guiwb/sim/generator.hpp"

namespace guiwb::harness {

std::string_view to_string(InterfaceMode m) noexcept {
  return m == InterfaceMode::Intermediate ? "intermediate" : "end-to-end";
}

InterfaceMode interface_mode_from_string(std::string_view s) {
  if (s == "intermediate") return InterfaceMode::Intermediate;
  if (s == "end-to-end") return InterfaceMode::EndToEnd;
  throw Error(ErrorKind::Config, "unknown interface mode '" + std::string(s) + "'");
}

namespace {

std::vector<planner::FeatureVector> features_of(const std::vector<planner::Candidate>& cands) {
  std::vector<planner::FeatureVector> phis;
  phis.reserve(cands.size());
  for (const auto& c : cands) phis.push_back(c.phi);
  return phis;
}

Decision with_candidates(dsl::Action action, const planner::PlannerContext& ctx) {
  auto cands = planner::enumerate_candidates(ctx);
  Decision d;
  d.features = features_of(cands);
  auto it = std::find_if(cands.begin(), cands.end(), [&](const auto& c) { return c.action == action; });
  if (it == cands.end()) {
    d.features.clear();
  } else {
    d.chosen = static_cast<std::size_t>(it - cands.begin());
  }
  d.action = std::move(action);
  return d;
}

// The same screen at the same scroll offset, laid out as in `reference`.
sim::Observation reference_view(const sim::World& reference, const sim::Observation& live) {
  sim::Observation obs = live;
  obs.visibleElements.clear();
  for (const auto& e : reference.screen(live.screenId).elements) {
    if (e.bounds.intersects_rows(live.scrollOffset, live.scrollOffset + dsl::kViewport)) obs.visibleElements.push_back(e);
  }
  return obs;
}

// Oracle action for the next unsatisfied milestone, or a recovery move.
dsl::Action scripted_step(const planner::PlannerContext& ctx, const sim::TaskSpec& task, const sim::JudgeState& judge) {
  const auto k = static_cast<std::size_t>(judge.satisfied_count());
  if (k >= task.milestones.size()) return dsl::Finish{};
  if (ctx.obs.screenId != task.oracleScreens[k]) {
    if (ctx.obs.historyDepth > 0) return dsl::Back{};
    return dsl::Finish{};
  }
  const int target = task.milestones[k].element;
  for (const auto& e : ctx.obs.visibleElements) {
    if (e.id != target) continue;
    dsl::Descriptive desc{grounding::make_description(e, ctx.obs)};
    if (std::holds_alternative<dsl::Input>(task.oracle[k])) return dsl::Input{desc, task.payload};
    return dsl::Click{desc};
  }
  return dsl::Scroll{dsl::ScrollDirection::Up, 1};
}

}  // namespace

DecisionFn softmax_planner(const planner::PolicyParams& params) {
  return [params](const planner::PlannerContext& ctx, const sim::TaskSpec&, const sim::JudgeState&, Rng& rng) {
    auto res = planner::act(params, ctx, rng);
    Decision d;
    d.action = std::move(res.action);
    d.features = std::move(res.features);
    d.chosen = res.index;
    d.logProb = res.logProb;
    return d;
  };
}

DecisionFn oracle_replay_planner() {
  return [](const planner::PlannerContext& ctx, const sim::TaskSpec& task, const sim::JudgeState&, Rng&) {
    return with_candidates(planner::oracle_planner(task, ctx.obs.stepIndex), ctx);
  };
}

DecisionFn scripted_noisy_planner(double p) {
  return [p](const planner::PlannerContext& ctx, const sim::TaskSpec& task, const sim::JudgeState& judge, Rng& rng) {
    if (p > 0.0 && uniform01(rng) < p) {
      auto cands = planner::candidates(ctx);
      return with_candidates(pick(cands, rng), ctx);
    }
    return with_candidates(scripted_step(ctx, task, judge), ctx);
  };
}

sim::Observation LocalBackend::reset(const sim::World& world, const sim::TaskSpec& task, std::uint64_t) {
  return env_.reset(world, task);
}

rl::Trajectory run_episode(const sim::World& world, const sim::TaskSpec& task, const DecisionFn& decide,
                           const EpisodeSettings& settings) {
  LocalBackend backend;
  return run_episode(backend, world, task, decide, settings);
}

rl::Trajectory run_episode(EpisodeBackend& backend, const sim::World& world, const sim::TaskSpec& task,
                           const DecisionFn& decide, const EpisodeSettings& settings) {
  const sim::World live = settings.perturbLayout ? sim::perturb_layout(world, settings.seed, settings.maxShift) : world;

  rl::Trajectory traj;
  traj.taskId = task.id;
  traj.instruction = task.instruction;
  traj.difficulty = task.difficulty;
  traj.maxSteps = task.max_steps();
  traj.milestoneCount = static_cast<int>(task.milestones.size());
  traj.screensInWorld = static_cast<int>(world.screens.size());
  traj.seed = settings.seed;

  Rng rng = make_rng(stable_hash({settings.seed, 0x706c616eULL}));
  std::vector<dsl::Action> history;
  std::set<int> visited;
  sim::JudgeState judge;
  bool done = false;

  try {
    sim::Observation obs = backend.reset(live, task, settings.seed);
    visited.insert(obs.screenId);
    while (!done) {
      const planner::PlannerContext ctx{obs, task.instruction, history};
      Decision d = decide(ctx, task, judge, rng);

      rl::StepRecord rec;
      rec.stepIndex = obs.stepIndex;
      rec.screenId = obs.screenId;
      rec.behaviorLogProb = d.logProb;
      if (d.features.empty()) {
        auto phis = features_of(planner::enumerate_candidates(ctx));
        rec.stateFeatures = planner::state_features(std::span<const planner::FeatureVector>(phis), obs);
      } else {
        rec.stateFeatures = planner::state_features(std::span<const planner::FeatureVector>(d.features), obs);
      }
      rec.features = std::move(d.features);
      rec.chosen = d.chosen;
      rec.action = d.action;
      history.push_back(std::move(d.action));

      sim::StepResult r;
      if (auto split = dsl::split_for_grounding(history.back())) {
        const grounding::NoiseModel noise{settings.groundingEpsilon,
                                          stable_hash({settings.seed, static_cast<std::uint64_t>(obs.stepIndex), 0x67ULL})};
        std::optional<grounding::GroundingResult> g;
        try {
          g = settings.mode == InterfaceMode::EndToEnd ? grounding::ground(split->query, reference_view(world, obs), noise)
                                                       : grounding::ground(split->query, obs, noise);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::BelowThreshold && e.kind() != ErrorKind::NoCandidates) throw;
        }
        r = g ? backend.step(dsl::resolve_target(split->pending, g->coordinates)) : backend.skip_step();
      } else {
        r = backend.step(history.back());
      }

      rec.missedClick = r.missedClick;
      rec.milestones = r.judge.satisfied;
      traj.steps.push_back(std::move(rec));
      judge = r.judge;
      done = r.done;
      obs = std::move(r.observation);
      visited.insert(obs.screenId);
    }
    traj.finalScreenHasFlag = backend.screen_has_flag_element();
  } catch (const TransportLost&) {
    traj.transportFailure = true;
  }

  traj.finished = true;
  traj.answer = judge.answer;
  traj.finalMilestones = judge.satisfied;
  traj.visitedScreens.assign(visited.begin(), visited.end());
  traj.judgedOutcome = traj.transportFailure ? sim::Outcome::Fail : sim::judge_outcome(judge, traj.milestoneCount);
  traj.outcome = traj.judgedOutcome;
  rl::assign_rewards(traj, traj.outcome == sim::Outcome::Success);
  return traj;
}

}  // namespace guiwb::harness
