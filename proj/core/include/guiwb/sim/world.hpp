#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "guiwb/dsl/action.hpp"

namespace guiwb::sim {

enum class Role { Button, Link, Textbox, Checkbox, ListItem, Label };

inline constexpr int kRoleCount = 6;

std::string_view to_string(Role r) noexcept;
Role role_from_string(std::string_view s);

/// Roles a planner can click: button, link, checkbox, listitem.
bool is_clickable(Role r) noexcept;

/// Content coordinates; y may run past the viewport on scrollable screens.
struct Bounds {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int center_x() const noexcept { return x + w / 2; }
  int center_y() const noexcept { return y + h / 2; }
  bool contains(int px, int py) const noexcept { return px >= x && px < x + w && py >= y && py < y + h; }
  bool intersects_rows(int top, int bottom) const noexcept { return y < bottom && y + h > top; }
  bool overlaps(const Bounds& o) const noexcept {
    return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }
  bool operator==(const Bounds&) const = default;
};

struct ElementState {
  std::string text;
  bool checked = false;
  bool operator==(const ElementState&) const = default;
};

struct Element {
  int id = 0;
  Role role = Role::Button;
  std::string label;
  Bounds bounds;
  ElementState state;
  bool operator==(const Element&) const = default;
};

struct Screen {
  int id = 0;
  std::vector<Element> elements;  // ascending id
  int scrollExtent = 0;

  const Element* find(int elementId) const noexcept;
  bool operator==(const Screen&) const = default;
};

enum class EffectKind { Navigate, SetText, Toggle, SubmitFlag, NoOp };

std::string_view to_string(EffectKind k) noexcept;
EffectKind effect_from_string(std::string_view s);

struct Effect {
  EffectKind kind = EffectKind::NoOp;
  int target = 0;  // screen id for Navigate, flag id for SubmitFlag
  bool operator==(const Effect&) const = default;
};

struct TransitionKey {
  int screen = 0;
  int element = 0;
  dsl::ActionKind action = dsl::ActionKind::Click;
  auto operator<=>(const TransitionKey&) const = default;
};

/// Kinds of generator steps; each contributes one milestone and one oracle action.
enum class StepKind { Navigate, Input, Toggle, Submit };

char step_code(StepKind k) noexcept;
StepKind step_from_code(char c);

/// Generator-level description of a task: regenerating from the same params
/// yields the same world and task.
struct TemplateParams {
  std::uint64_t seed = 0;
  std::vector<StepKind> chain;
  bool operator==(const TemplateParams&) const = default;
};

/// "w<seed>-<codes>", e.g. "w7-NIS".
std::string template_key(const TemplateParams& t);
TemplateParams parse_template_key(std::string_view key);

struct World {
  std::uint64_t seed = 0;
  std::uint64_t provenance = 0;
  std::map<int, Screen> screens;
  std::map<TransitionKey, Effect> transitions;
  int initialScreen = 0;
  std::set<int> flags;

  Effect effect(int screen, int element, dsl::ActionKind action) const;
  const Screen& screen(int id) const;
  bool operator==(const World&) const = default;
};

enum class MilestoneKind { AtScreen, TextEquals, Checked, FlagRaised };

std::string_view to_string(MilestoneKind k) noexcept;
MilestoneKind milestone_from_string(std::string_view s);

struct Milestone {
  MilestoneKind kind = MilestoneKind::AtScreen;
  std::string name;
  int screen = 0;
  int element = 0;
  int flag = 0;
  std::string text;
  bool operator==(const Milestone&) const = default;
};

struct TaskSpec {
  std::string id;  // template key
  std::string instruction;
  std::uint64_t worldSeed = 0;
  std::uint64_t provenance = 0;
  TemplateParams templ;
  std::vector<Milestone> milestones;
  int difficulty = 1;
  std::vector<dsl::Action> oracle;  // descriptive form
  std::vector<int> oracleScreens;   // screen each oracle action is taken on
  std::string payload;

  int max_steps() const noexcept;
  bool operator==(const TaskSpec&) const = default;
};

/// Episode step budget for a task of the given difficulty.
constexpr int max_steps(int difficulty) noexcept { return 2 * difficulty + 6; }

struct Observation {
  int screenId = 0;
  std::vector<Element> visibleElements;  // ascending id
  int scrollOffset = 0;
  int stepIndex = 0;
  int scrollExtent = 0;
  int historyDepth = 0;
  int maxSteps = 0;
  bool operator==(const Observation&) const = default;
};

/// Center of the element's visible part, in viewport coordinates.
dsl::Grounded visible_center(const Element& e, int scrollOffset) noexcept;

struct JudgeState {
  std::uint32_t satisfied = 0;
  std::optional<std::string> answer;

  int satisfied_count() const noexcept;
  bool operator==(const JudgeState&) const = default;
};

enum class Outcome { Success, Partial, Fail };

std::string_view to_string(Outcome o) noexcept;
Outcome outcome_from_string(std::string_view s);

Outcome judge_outcome(const JudgeState& judge, int milestoneCount);

}  // namespace guiwb::sim
