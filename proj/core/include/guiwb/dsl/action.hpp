#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace guiwb::dsl {

/// Viewport is a 1000x1000 integer grid.
inline constexpr int kViewport = 1000;
inline constexpr std::size_t kMaxDescription = 512;
inline constexpr std::size_t kMaxText = 4096;
inline constexpr std::size_t kMaxLine = 8192;

struct Grounded {
  int x = 0;
  int y = 0;
  bool operator==(const Grounded&) const = default;
};

struct Descriptive {
  std::string description;
  bool operator==(const Descriptive&) const = default;
};

struct ElementRef {
  int elementId = 0;
  bool operator==(const ElementRef&) const = default;
};

using TargetSpec = std::variant<Grounded, Descriptive, ElementRef>;

enum class ScrollDirection { Up, Down };

struct Click {
  TargetSpec target;
  bool operator==(const Click&) const = default;
};

struct Input {
  TargetSpec target;
  std::string text;
  bool operator==(const Input&) const = default;
};

struct Scroll {
  ScrollDirection direction = ScrollDirection::Down;
  int amount = 1;
  bool operator==(const Scroll&) const = default;
};

struct Back {
  bool operator==(const Back&) const = default;
};

struct Finish {
  std::optional<std::string> answer;
  bool operator==(const Finish&) const = default;
};

using Action = std::variant<Click, Input, Scroll, Back, Finish>;

enum class ActionKind { Click, Input, Scroll, Back, Finish };

ActionKind kind_of(const Action& a) noexcept;
std::string_view to_string(ActionKind k) noexcept;

/// Target of a Click/Input, nullptr for the targetless variants.
const TargetSpec* target_of(const Action& a) noexcept;
bool is_descriptive(const Action& a) noexcept;

struct GroundingQuery {
  std::string description;
  bool operator==(const GroundingQuery&) const = default;
};

/// Strict parser for the canonical grammar:
///
///   action := 'do(action="' name '"' args ')' | 'finish(' [ 'answer="' str '"' ] ')'
///   name   := Click | Input | Scroll | Back
///   args   := { ', ' key '=' value }
///
/// Integers carry no leading zeros; strings escape only '"' and '\'.
/// Throws guiwb::Error (Syntax, UnknownAction, MissingTarget, Range).
Action parse_action(std::string_view text);

std::string render_action(const Action& a);

GroundingQuery parse_grounding_query(std::string_view text);
std::string render_grounding_query(const GroundingQuery& q);

/// A Click or Input whose target has been cut out, waiting for coordinates.
struct PendingAction {
  ActionKind kind = ActionKind::Click;
  std::string text;  // Input payload
  bool operator==(const PendingAction&) const = default;
};

struct GroundingSplit {
  PendingAction pending;
  GroundingQuery query;
};

/// Planner -> grounder handoff. std::nullopt means the action is not
/// descriptive (already grounded, or targetless) and can execute as is.
std::optional<GroundingSplit> split_for_grounding(const Action& a);

Action resolve_target(const PendingAction& pending, Grounded at);

/// Checks the text invariants shared by descriptive targets and grounding queries.
void validate_description(std::string_view description);

}  // namespace guiwb::dsl
