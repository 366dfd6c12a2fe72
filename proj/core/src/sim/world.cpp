#include "guiwb/sim/world.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>

#include "guiwb/error.hpp"

namespace guiwb::sim {

namespace {

constexpr std::array<std::string_view, kRoleCount> kRoleNames = {"button", "link", "textbox", "checkbox", "listitem", "label"};
constexpr std::array<std::string_view, 5> kEffectNames = {"Navigate", "SetText", "Toggle", "SubmitFlag", "NoOp"};
constexpr std::array<std::string_view, 4> kMilestoneNames = {"AtScreen", "TextEquals", "Checked", "FlagRaised"};
constexpr std::array<std::string_view, 3> kOutcomeNames = {"Success", "Partial", "Fail"};

template <typename Enum, std::size_t N>
Enum lookup(const std::array<std::string_view, N>& names, std::string_view s, const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  throw Error(ErrorKind::Syntax, std::string("unknown ") + what + " '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(Role r) noexcept { return kRoleNames[static_cast<std::size_t>(r)]; }
Role role_from_string(std::string_view s) { return lookup<Role>(kRoleNames, s, "role"); }

bool is_clickable(Role r) noexcept {
  return r == Role::Button || r == Role::Link || r == Role::Checkbox || r == Role::ListItem;
}

std::string_view to_string(EffectKind k) noexcept { return kEffectNames[static_cast<std::size_t>(k)]; }
EffectKind effect_from_string(std::string_view s) { return lookup<EffectKind>(kEffectNames, s, "effect"); }

std::string_view to_string(MilestoneKind k) noexcept { return kMilestoneNames[static_cast<std::size_t>(k)]; }
MilestoneKind milestone_from_string(std::string_view s) { return lookup<MilestoneKind>(kMilestoneNames, s, "milestone"); }

std::string_view to_string(Outcome o) noexcept { return kOutcomeNames[static_cast<std::size_t>(o)]; }
Outcome outcome_from_string(std::string_view s) { return lookup<Outcome>(kOutcomeNames, s, "outcome"); }

const Element* Screen::find(int elementId) const noexcept {
  for (const auto& e : elements) {
    if (e.id == elementId) return &e;
  }
  return nullptr;
}

Effect World::effect(int screen, int element, dsl::ActionKind action) const {
  auto it = transitions.find(TransitionKey{screen, element, action});
  return it == transitions.end() ? Effect{} : it->second;
}

const Screen& World::screen(int id) const {
  auto it = screens.find(id);
  if (it == screens.end()) throw Error(ErrorKind::Index, "no screen " + std::to_string(id));
  return it->second;
}

char step_code(StepKind k) noexcept {
  switch (k) {
    case StepKind::Navigate: return 'N';
    case StepKind::Input: return 'I';
    case StepKind::Toggle: return 'T';
    case StepKind::Submit: return 'S';
  }
  return '?';
}

StepKind step_from_code(char c) {
  switch (c) {
    case 'N': return StepKind::Navigate;
    case 'I': return StepKind::Input;
    case 'T': return StepKind::Toggle;
    case 'S': return StepKind::Submit;
    default: throw Error(ErrorKind::Syntax, std::string("unknown step code '") + c + "'");
  }
}

std::string template_key(const TemplateParams& t) {
  std::string key = "w" + std::to_string(t.seed) + "-";
  for (auto k : t.chain) key.push_back(step_code(k));
  return key;
}

TemplateParams parse_template_key(std::string_view key) {
  if (key.size() < 3 || key[0] != 'w') throw Error(ErrorKind::Syntax, "bad template key '" + std::string(key) + "'");
  auto dash = key.find('-');
  if (dash == std::string_view::npos) throw Error(ErrorKind::Syntax, "bad template key '" + std::string(key) + "'");
  TemplateParams t;
  auto [ptr, ec] = std::from_chars(key.data() + 1, key.data() + dash, t.seed);
  if (ec != std::errc{} || ptr != key.data() + dash) throw Error(ErrorKind::Syntax, "bad seed in template key");
  for (char c : key.substr(dash + 1)) t.chain.push_back(step_from_code(c));
  if (t.chain.empty()) throw Error(ErrorKind::Syntax, "empty chain in template key");
  return t;
}

int TaskSpec::max_steps() const noexcept { return sim::max_steps(difficulty); }

dsl::Grounded visible_center(const Element& e, int scrollOffset) noexcept {
  const int top = std::max(e.bounds.y, scrollOffset);
  const int bottom = std::min(e.bounds.y + e.bounds.h, scrollOffset + dsl::kViewport);
  int cy = top + (bottom - top) / 2;
  if (bottom <= top) cy = e.bounds.center_y();
  return dsl::Grounded{e.bounds.center_x(), cy - scrollOffset};
}

int JudgeState::satisfied_count() const noexcept { return std::popcount(satisfied); }

Outcome judge_outcome(const JudgeState& judge, int milestoneCount) {
  const int n = judge.satisfied_count();
  if (milestoneCount > 0 && n >= milestoneCount) return Outcome::Success;
  if (n >= 1) return Outcome::Partial;
  return Outcome::Fail;
}

}  // namespace guiwb::sim
