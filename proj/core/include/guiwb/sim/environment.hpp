#pragma once

#include <map>
#include <utility>
#include <vector>

#include "guiwb/sim/world.hpp"

namespace guiwb::sim {

struct StepResult {
  Observation observation;
  bool done = false;
  JudgeState judge;
  bool missedClick = false;
};

/// One episode over one world. Not thread-safe; distinct instances share nothing.
///
/// The episode ends when the task's milestones are all satisfied, when the
/// agent finishes, or when the step budget runs out.
class Environment {
 public:
  Observation reset(const World& world, const TaskSpec& task);

  /// Grounded targets only (coordinates or element ids).
  StepResult step(const dsl::Action& action);

  /// Consumes one step without touching the world, for actions the grounder
  /// could not resolve. Recorded as a missed click.
  StepResult skip_step();

  Observation observe() const;

  bool active() const noexcept { return started_ && !done_; }
  bool done() const noexcept { return done_; }
  int step_index() const noexcept { return stepIndex_; }
  int current_screen() const noexcept { return screen_; }
  const JudgeState& judge() const noexcept { return judge_; }
  const World& world() const noexcept { return world_; }
  const TaskSpec& task() const noexcept { return task_; }

  /// Whether the current screen holds an element wired to a SubmitFlag effect.
  bool screen_has_flag_element() const;

 private:
  const ElementState& state_of(int screen, int element) const;
  ElementState& state_of(int screen, int element);
  bool milestone_holds(const Milestone& m) const;
  void advance_judge();
  StepResult finish_step(bool missed);
  const Element* hit_test(int vx, int vy) const;
  const Element* visible_element(int id) const;

  World world_;
  TaskSpec task_;
  std::map<std::pair<int, int>, ElementState> states_;
  std::set<int> raisedFlags_;
  std::vector<int> history_;
  int screen_ = 0;
  int scroll_ = 0;
  int stepIndex_ = 0;
  int maxSteps_ = 0;
  bool started_ = false;
  bool done_ = false;
  JudgeState judge_;
};

}  // namespace guiwb::sim
