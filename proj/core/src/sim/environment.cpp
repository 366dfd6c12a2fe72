#include "guiwb/sim/environment.hpp"

#include <algorithm>

#include "guiwb/error.hpp"

namespace guiwb::sim {

Observation Environment::reset(const World& world, const TaskSpec& task) {
  if (task.worldSeed != world.seed || task.provenance != world.provenance) {
    throw Error(ErrorKind::MismatchedTask, "task " + task.id + " was not generated for this world");
  }
  world_ = world;
  task_ = task;
  states_.clear();
  for (const auto& [sid, screen] : world_.screens) {
    for (const auto& e : screen.elements) states_[{sid, e.id}] = e.state;
  }
  raisedFlags_.clear();
  history_.clear();
  screen_ = world_.initialScreen;
  scroll_ = 0;
  stepIndex_ = 0;
  maxSteps_ = task_.max_steps();
  started_ = true;
  done_ = false;
  judge_ = JudgeState{};
  return observe();
}

const ElementState& Environment::state_of(int screen, int element) const { return states_.at({screen, element}); }
ElementState& Environment::state_of(int screen, int element) { return states_.at({screen, element}); }

Observation Environment::observe() const {
  Observation obs;
  obs.screenId = screen_;
  obs.scrollOffset = scroll_;
  obs.stepIndex = stepIndex_;
  obs.historyDepth = static_cast<int>(history_.size());
  obs.maxSteps = maxSteps_;
  if (!started_) return obs;
  const Screen& s = world_.screen(screen_);
  obs.scrollExtent = s.scrollExtent;
  for (const auto& e : s.elements) {
    if (!e.bounds.intersects_rows(scroll_, scroll_ + dsl::kViewport)) continue;
    Element copy = e;
    copy.state = state_of(screen_, e.id);
    obs.visibleElements.push_back(std::move(copy));
  }
  return obs;
}

const Element* Environment::hit_test(int vx, int vy) const {
  const Screen& s = world_.screen(screen_);
  const int cy = vy + scroll_;
  const Element* hit = nullptr;
  for (const auto& e : s.elements) {
    // later elements are drawn on top
    if (e.bounds.intersects_rows(scroll_, scroll_ + dsl::kViewport) && e.bounds.contains(vx, cy)) hit = &e;
  }
  return hit;
}

const Element* Environment::visible_element(int id) const {
  const Element* e = world_.screen(screen_).find(id);
  if (e == nullptr || !e->bounds.intersects_rows(scroll_, scroll_ + dsl::kViewport)) return nullptr;
  return e;
}

bool Environment::milestone_holds(const Milestone& m) const {
  switch (m.kind) {
    case MilestoneKind::AtScreen: return screen_ == m.screen;
    case MilestoneKind::TextEquals: return state_of(m.screen, m.element).text == m.text;
    case MilestoneKind::Checked: return state_of(m.screen, m.element).checked;
    case MilestoneKind::FlagRaised: return raisedFlags_.count(m.flag) > 0;
  }
  return false;
}

void Environment::advance_judge() {
  const auto n = task_.milestones.size();
  std::size_t k = static_cast<std::size_t>(judge_.satisfied_count());
  while (k < n && milestone_holds(task_.milestones[k])) {
    judge_.satisfied |= (1u << k);
    ++k;
  }
}

bool Environment::screen_has_flag_element() const {
  if (!started_) return false;
  for (const auto& e : world_.screen(screen_).elements) {
    if (world_.effect(screen_, e.id, dsl::ActionKind::Click).kind == EffectKind::SubmitFlag) return true;
  }
  return false;
}

StepResult Environment::finish_step(bool missed) {
  ++stepIndex_;
  advance_judge();
  if (!done_ && task_.milestones.size() > 0 &&
      judge_.satisfied_count() == static_cast<int>(task_.milestones.size())) {
    done_ = true;
  }
  if (stepIndex_ >= maxSteps_) done_ = true;
  return StepResult{observe(), done_, judge_, missed};
}

StepResult Environment::skip_step() {
  if (!active()) throw Error(ErrorKind::EpisodeFinished, "episode is not active");
  return finish_step(true);
}

StepResult Environment::step(const dsl::Action& action) {
  if (!active()) throw Error(ErrorKind::EpisodeFinished, "episode is not active");
  if (dsl::is_descriptive(action)) {
    throw Error(ErrorKind::DescriptiveTarget, "descriptive targets must be grounded before execution");
  }

  bool missed = false;
  const auto kind = dsl::kind_of(action);

  if (const auto* target = dsl::target_of(action)) {
    const Element* hit = nullptr;
    if (const auto* g = std::get_if<dsl::Grounded>(target)) {
      hit = hit_test(g->x, g->y);
    } else if (const auto* r = std::get_if<dsl::ElementRef>(target)) {
      hit = visible_element(r->elementId);
    }
    if (hit == nullptr) {
      missed = true;
    } else {
      const Effect eff = world_.effect(screen_, hit->id, kind);
      switch (eff.kind) {
        case EffectKind::Navigate:
          history_.push_back(screen_);
          screen_ = eff.target;
          scroll_ = 0;
          break;
        case EffectKind::SetText:
          if (const auto* in = std::get_if<dsl::Input>(&action)) state_of(screen_, hit->id).text = in->text;
          break;
        case EffectKind::Toggle: {
          auto& st = state_of(screen_, hit->id);
          st.checked = !st.checked;
          break;
        }
        case EffectKind::SubmitFlag:
          raisedFlags_.insert(eff.target);
          break;
        case EffectKind::NoOp:
          break;
      }
    }
  } else if (const auto* sc = std::get_if<dsl::Scroll>(&action)) {
    const int extent = world_.screen(screen_).scrollExtent;
    const int delta = sc->amount * 100 * (sc->direction == dsl::ScrollDirection::Down ? 1 : -1);
    scroll_ = std::clamp(scroll_ + delta, 0, extent);
  } else if (std::holds_alternative<dsl::Back>(action)) {
    if (!history_.empty()) {
      screen_ = history_.back();
      history_.pop_back();
      scroll_ = 0;
    }
  } else if (const auto* fin = std::get_if<dsl::Finish>(&action)) {
    judge_.answer = fin->answer;
    done_ = true;
  }
  return finish_step(missed);
}

}  // namespace guiwb::sim
