#include <doctest.h>

#include <cctype>
#include <functional>
#include <set>

#include "guiwb/error.hpp"
#include "guiwb/rl/trajectory.hpp"
#include "guiwb/sim/environment.hpp"
#include "guiwb/sim/generator.hpp"
#include "guiwb/sim/oracle.hpp"
#include "guiwb/sim/serialize.hpp"

using namespace guiwb;
using namespace guiwb::sim;

namespace {

ErrorKind error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected guiwb::Error");
  return ErrorKind::Config;
}

// Two screens: a button on screen 0 navigates to screen 1.
std::pair<World, TaskSpec> two_screen_world() {
  World w;
  w.seed = 99;
  w.provenance = 5;
  Screen a{0, {Element{1, Role::Button, "Open settings", {100, 100, 200, 80}, {}},
               Element{2, Role::Label, "Welcome", {100, 300, 300, 60}, {}}},
           0};
  Screen b{1, {Element{1, Role::Link, "Home", {50, 50, 100, 40}, {}}}, 0};
  w.screens = {{0, a}, {1, b}};
  w.transitions[{0, 1, dsl::ActionKind::Click}] = Effect{EffectKind::Navigate, 1};
  TaskSpec t;
  t.id = "hand";
  t.worldSeed = 99;
  t.provenance = 5;
  t.difficulty = 1;
  t.milestones = {Milestone{MilestoneKind::AtScreen, "at settings", 1, 1, 0, ""}};
  t.oracle = {dsl::Click{dsl::Grounded{200, 140}}};
  t.oracleScreens = {0};
  return {w, t};
}

std::set<std::string> tokens(const std::string& s) {
  std::set<std::string> out;
  std::string cur;
  for (char c : s + " ") {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.insert(cur);
      cur.clear();
    }
  }
  return out;
}

// Every grounded action worth trying on the current screen.
std::vector<dsl::Action> all_actions(const Observation& obs, const std::string& payload) {
  std::vector<dsl::Action> out;
  for (const auto& e : obs.visibleElements) {
    out.push_back(dsl::Click{dsl::ElementRef{e.id}});
    if (e.role == Role::Textbox) out.push_back(dsl::Input{dsl::ElementRef{e.id}, payload});
  }
  out.push_back(dsl::Scroll{dsl::ScrollDirection::Down, 1});
  out.push_back(dsl::Scroll{dsl::ScrollDirection::Up, 1});
  out.push_back(dsl::Back{});
  out.push_back(dsl::Finish{});
  return out;
}

bool solvable_within(const Environment& env, const Observation& obs, const std::string& payload, int depth, int count) {
  if (depth == 0) return false;
  for (const auto& a : all_actions(obs, payload)) {
    Environment e = env;
    const auto r = e.step(a);
    if (judge_outcome(r.judge, count) == Outcome::Success) return true;
    if (!r.done && solvable_within(e, r.observation, payload, depth - 1, count)) return true;
  }
  return false;
}

dsl::Action random_grounded(Rng& rng, const Observation& obs) {
  switch (uniform_int(rng, 0, 5)) {
    case 0:
    case 1:
      if (!obs.visibleElements.empty()) {
        const auto& e = pick(obs.visibleElements, rng);
        return dsl::Click{visible_center(e, obs.scrollOffset)};
      }
      return dsl::Click{dsl::Grounded{0, 0}};
    case 2:
      return dsl::Click{dsl::Grounded{static_cast<int>(uniform_int(rng, 0, 999)), static_cast<int>(uniform_int(rng, 0, 999))}};
    case 3:
      if (!obs.visibleElements.empty()) return dsl::Input{dsl::ElementRef{pick(obs.visibleElements, rng).id}, "abc"};
      return dsl::Back{};
    case 4:
      return dsl::Scroll{uniform01(rng) < 0.5 ? dsl::ScrollDirection::Up : dsl::ScrollDirection::Down, 1};
    default:
      return uniform01(rng) < 0.15 ? dsl::Action{dsl::Finish{}} : dsl::Action{dsl::Back{}};
  }
}

}  // namespace

TEST_CASE("generate_world: single-step task solved by its oracle") {
  const auto [w, t] = generate_world(7, 1);
  REQUIRE(t.oracle.size() == 1);
  const auto traj = oracle_rollout(w, t);
  CHECK(traj.judgedOutcome == Outcome::Success);
  CHECK(traj.steps.size() == 1);
  CHECK(traj.expert);
}

TEST_CASE("generate_world: a submit-only task is one click on a flag button") {
  const auto [w, t] = generate_from_template(TemplateParams{7, {StepKind::Submit}});
  REQUIRE(t.oracle.size() == 1);
  CHECK(dsl::kind_of(t.oracle[0]) == dsl::ActionKind::Click);
  REQUIRE(t.milestones.size() == 1);
  CHECK(t.milestones[0].kind == MilestoneKind::FlagRaised);
  CHECK(w.effect(t.oracleScreens[0], t.milestones[0].element, dsl::ActionKind::Click).kind == EffectKind::SubmitFlag);
  CHECK(oracle_rollout(w, t).judgedOutcome == Outcome::Success);
}

TEST_CASE("generate_world: deterministic and range checked") {
  CHECK(generate_world(7, 1) == generate_world(7, 1));
  CHECK(generate_world(7, 5) == generate_world(7, 5));
  CHECK_FALSE(generate_world(7, 3).first == generate_world(8, 3).first);
  CHECK(error_of([] { generate_world(7, 13); }) == ErrorKind::Range);
  CHECK(error_of([] { generate_world(7, 0); }) == ErrorKind::Range);
  CHECK_NOTHROW(generate_world(7, 12));
}

TEST_CASE("generate_world: structural postconditions") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    for (int d : {1, 2, 3, 6, 9, 12}) {
      const auto [w, t] = generate_world(seed, d);
      CAPTURE(t.id);
      REQUIRE(static_cast<int>(t.oracle.size()) == d);
      CHECK(t.difficulty == d);
      CHECK(t.milestones.size() == static_cast<std::size_t>(d));
      CHECK(t.max_steps() == 2 * d + 6);
      CHECK_FALSE(t.instruction.empty());

      std::set<std::string> targetTokens;
      for (std::size_t k = 0; k < t.milestones.size(); ++k) {
        const auto* e = w.screen(t.oracleScreens[k]).find(t.milestones[k].element);
        REQUIRE(e != nullptr);
        for (const auto& tok : tokens(e->label)) targetTokens.insert(tok);
      }
      std::set<std::pair<int, int>> targets;
      for (std::size_t k = 0; k < t.milestones.size(); ++k) targets.insert({t.oracleScreens[k], t.milestones[k].element});

      for (const auto& [sid, screen] : w.screens) {
        CHECK(screen.elements.size() >= 4);
        CHECK(screen.elements.size() <= 12);
        int sharing = 0;
        std::set<int> ids;
        for (const auto& e : screen.elements) {
          CHECK(ids.insert(e.id).second);
          CHECK(e.bounds.x >= 0);
          CHECK(e.bounds.x + e.bounds.w <= 1000);
          CHECK(e.bounds.y >= 0);
          if (e.role != Role::Textbox) CHECK(e.state.text.empty());
          if (targets.count({sid, e.id})) continue;
          for (const auto& tok : tokens(e.label)) {
            if (targetTokens.count(tok)) {
              ++sharing;
              break;
            }
          }
        }
        CHECK(sharing >= 2);
      }
      for (const auto& [key, eff] : w.transitions) {
        if (eff.kind == EffectKind::Navigate) CHECK(w.screens.count(eff.target) == 1);
      }
      for (const auto& m : t.milestones) CHECK(w.screens.count(m.screen) == 1);
    }
  }
}

TEST_CASE("reset: idempotent, restores state, rejects foreign tasks") {
  const auto [w, t] = generate_world(3, 4);
  Environment env;
  const auto first = env.reset(w, t);
  CHECK(first.stepIndex == 0);
  CHECK(first.scrollOffset == 0);
  CHECK(first.screenId == w.initialScreen);
  CHECK(env.reset(w, t) == first);
  env.step(dsl::Click{visible_center(first.visibleElements[0], 0)});
  env.step(dsl::Scroll{dsl::ScrollDirection::Down, 1});
  CHECK(env.reset(w, t) == first);
  CHECK(env.judge() == JudgeState{});
  const auto other = generate_world(4, 4).second;
  CHECK(error_of([&] { env.reset(w, other); }) == ErrorKind::MismatchedTask);
}

TEST_CASE("step: navigation, misses, lifecycle") {
  const auto [w, t] = two_screen_world();
  Environment env;
  const auto obs0 = env.reset(w, t);
  CHECK(obs0.screenId == 0);
  REQUIRE(obs0.visibleElements.size() == 2);

  auto miss = env.step(dsl::Click{dsl::Grounded{0, 0}});
  CHECK(miss.missedClick);
  CHECK(miss.observation.screenId == 0);
  CHECK(miss.observation.visibleElements == obs0.visibleElements);
  CHECK(miss.observation.stepIndex == 1);
  CHECK_FALSE(miss.done);

  CHECK(error_of([&] { env.step(dsl::Click{dsl::Descriptive{"the 'Open settings' button"}}); }) ==
        ErrorKind::DescriptiveTarget);

  auto nav = env.step(dsl::Click{dsl::Grounded{200, 140}});
  CHECK_FALSE(nav.missedClick);
  CHECK(nav.observation.screenId == 1);
  CHECK(nav.judge.satisfied == 1u);
  CHECK(nav.done);  // the only milestone holds
  CHECK(error_of([&] { env.step(dsl::Back{}); }) == ErrorKind::EpisodeFinished);

  env.reset(w, t);
  auto fin = env.step(dsl::Finish{"done"});
  CHECK(fin.done);
  CHECK(fin.judge.answer == std::optional<std::string>("done"));
  CHECK(error_of([&] { env.step(dsl::Finish{}); }) == ErrorKind::EpisodeFinished);
}

TEST_CASE("step: hard stop at maxSteps") {
  const auto [w, t] = two_screen_world();
  Environment env;
  env.reset(w, t);
  StepResult r;
  for (int i = 0; i < t.max_steps(); ++i) {
    REQUIRE(env.active());
    r = env.step(dsl::Click{dsl::Grounded{0, 0}});
  }
  CHECK(r.done);
  CHECK(r.observation.stepIndex == 8);
}

TEST_CASE("scroll moves the window by 100 units per amount, clamped") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto [w, t] = generate_world(seed, 2);
    const auto& s = w.screen(w.initialScreen);
    if (s.scrollExtent == 0) continue;
    Environment env;
    env.reset(w, t);
    auto r = env.step(dsl::Scroll{dsl::ScrollDirection::Down, 1});
    CHECK(r.observation.scrollOffset == std::min(100, s.scrollExtent));
    r = env.step(dsl::Scroll{dsl::ScrollDirection::Down, 50});
    CHECK(r.observation.scrollOffset == s.scrollExtent);
    r = env.step(dsl::Scroll{dsl::ScrollDirection::Up, 50});
    CHECK(r.observation.scrollOffset == 0);
    return;
  }
  FAIL("no scrollable screen found");
}

TEST_CASE("judge_outcome") {
  CHECK(judge_outcome(JudgeState{0b111, {}}, 3) == Outcome::Success);
  CHECK(judge_outcome(JudgeState{0b011, {}}, 3) == Outcome::Partial);
  CHECK(judge_outcome(JudgeState{0b000, {}}, 3) == Outcome::Fail);
}

TEST_CASE("oracle_rollout: 1,000 mixed-difficulty seeds all succeed") {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const int d = 1 + static_cast<int>(seed % 6);
    const auto [w, t] = generate_world(seed, d);
    const auto traj = oracle_rollout(w, t);
    ok += traj.judgedOutcome == Outcome::Success && static_cast<int>(traj.steps.size()) == d ? 1 : 0;
  }
  CHECK(ok == 1000);
}

TEST_CASE("oracle_rollout: a wrong oracle element is caught") {
  auto [w, t] = generate_world(21, 1);
  const auto& screen = w.screen(t.oracleScreens[0]);
  const Element* other = nullptr;
  for (const auto& e : screen.elements) {
    if (e.id != t.milestones[0].element && e.role == Role::Label) other = &e;
  }
  REQUIRE(other != nullptr);
  t.oracle[0] = dsl::Click{dsl::Descriptive{"the '" + other->label + "' label on the top left"}};
  CHECK(error_of([&] { oracle_rollout(w, t); }) == ErrorKind::OracleBroken);
}

TEST_CASE("property: observations list exactly the window intersection in id order") {
  Rng rng = make_rng(5);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto [w, t] = generate_world(seed, 1 + static_cast<int>(seed % 5));
    Environment env;
    auto obs = env.reset(w, t);
    for (bool done = false; !done;) {
      std::vector<Element> expected;
      for (const auto& e : w.screen(obs.screenId).elements) {
        if (e.bounds.intersects_rows(obs.scrollOffset, obs.scrollOffset + 1000)) expected.push_back(e);
      }
      REQUIRE(obs.visibleElements.size() == expected.size());
      for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(obs.visibleElements[i].id == expected[i].id);
        if (i > 0) CHECK(obs.visibleElements[i - 1].id < obs.visibleElements[i].id);
      }
      auto r = env.step(random_grounded(rng, obs));
      obs = r.observation;
      done = r.done;
    }
  }
}

TEST_CASE("property: determinism, monotone milestones, bounded episodes") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto [w, t] = generate_world(seed, 1 + static_cast<int>(seed % 8));
    auto run = [&, &w = w, &t = t](std::uint64_t actionSeed) {
      Rng rng = make_rng(actionSeed);
      Environment env;
      auto obs = env.reset(w, t);
      std::vector<std::string> log{observation_json(obs)};
      std::uint32_t prev = 0;
      int steps = 0;
      for (bool done = false; !done;) {
        auto r = env.step(random_grounded(rng, obs));
        ++steps;
        CHECK((prev & ~r.judge.satisfied) == 0u);
        prev = r.judge.satisfied;
        obs = r.observation;
        done = r.done;
        log.push_back(observation_json(obs) + std::to_string(r.judge.satisfied));
      }
      CHECK(steps <= t.max_steps());
      return log;
    };
    CHECK(run(seed * 31) == run(seed * 31));
  }
}

TEST_CASE("property: no action sequence shorter than the oracle succeeds (difficulty <= 3)") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    for (int d = 1; d <= 3; ++d) {
      const auto [w, t] = generate_world(seed, d);
      Environment env;
      const auto obs = env.reset(w, t);
      CAPTURE(t.id);
      CHECK_FALSE(solvable_within(env, obs, t.payload, d - 1, static_cast<int>(t.milestones.size())));
      CHECK(solvable_within(env, obs, t.payload, d, static_cast<int>(t.milestones.size())));
    }
  }
}

TEST_CASE("serialization round trips") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto wt = generate_world(seed, 1 + static_cast<int>(seed % 12));
    const auto line = world_task_line(wt.first, wt.second);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(parse_world_task_line(line) == wt);
    Environment env;
    const auto obs = env.reset(wt.first, wt.second);
    CHECK(parse_observation_json(observation_json(obs)) == obs);
  }
  CHECK(error_of([] { parse_world_task_line("{\"world\":1}"); }) == ErrorKind::Config);
  CHECK(error_of([] { parse_world_task_line("not json"); }) == ErrorKind::Config);
}

TEST_CASE("trajectory log lines carry the documented fields") {
  const auto [w, t] = generate_world(8, 3);
  const auto traj = oracle_rollout(w, t);
  const auto text = rl::trajectory_log_lines(traj);
  std::size_t pos = 0;
  for (const auto& s : traj.steps) {
    const auto end = text.find('\n', pos);
    REQUIRE(end != std::string::npos);
    const auto rec = rl::parse_step_log_line(std::string_view(text).substr(pos, end - pos));
    CHECK(rec.taskId == t.id);
    CHECK(rec.stepIndex == s.stepIndex);
    CHECK(rec.screenId == s.screenId);
    CHECK(rec.actionText == dsl::render_action(s.action));
    CHECK(rec.reward == doctest::Approx(s.reward));
    CHECK(rec.milestonesBitmask == s.milestones);
    CHECK(rec.missedClick == s.missedClick);
    pos = end + 1;
  }
  CHECK(pos == text.size());
}
