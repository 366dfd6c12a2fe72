#include "guiwb/grounding/grounder.hpp"

#include <algorithm>
#include <array>

#include "guiwb/error.hpp"
#include "guiwb/random.hpp"
#include "guiwb/text.hpp"

namespace guiwb::grounding {

namespace {

constexpr std::array<std::string_view, 9> kRegionNames = {"top left", "top",         "top right", "left",        "center",
                                                          "right",    "bottom left", "bottom",    "bottom right"};

bool is_article(std::string_view t) {
  static constexpr std::array<std::string_view, 9> words = {"the", "a", "an", "on", "at", "of", "in", "to", "with"};
  return std::find(words.begin(), words.end(), t) != words.end();
}

bool is_spatial(std::string_view t) {
  static constexpr std::array<std::string_view, 6> words = {"top", "bottom", "left", "right", "center", "middle"};
  return std::find(words.begin(), words.end(), t) != words.end();
}

std::optional<sim::Role> role_word(std::string_view t) {
  for (int r = 0; r < sim::kRoleCount; ++r) {
    if (sim::to_string(static_cast<sim::Role>(r)) == t) return static_cast<sim::Role>(r);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Region r) noexcept { return kRegionNames[static_cast<std::size_t>(r)]; }

Region region_of(int x, int y) noexcept {
  auto third = [](int v) { return v * 3 < dsl::kViewport ? 0 : (v * 3 < 2 * dsl::kViewport ? 1 : 2); };
  return static_cast<Region>(third(y) * 3 + third(x));
}

std::optional<Region> spatial_hint(std::string_view description) {
  bool top = false, bottom = false, left = false, right = false, center = false;
  for (const auto& t : text::tokenize(description)) {
    top |= t == "top";
    bottom |= t == "bottom";
    left |= t == "left";
    right |= t == "right";
    center |= t == "center" || t == "middle";
  }
  if (!(top || bottom || left || right || center)) return std::nullopt;
  const int row = top ? 0 : (bottom ? 2 : 1);
  const int col = left ? 0 : (right ? 2 : 1);
  return static_cast<Region>(row * 3 + col);
}

std::set<std::string> content_tokens(std::string_view s) {
  std::set<std::string> out;
  for (auto& t : text::tokenize(s)) {
    if (is_article(t) || is_spatial(t) || role_word(t)) continue;
    out.insert(std::move(t));
  }
  return out;
}

double score(std::string_view description, const sim::Element& element, const sim::Observation& obs) {
  const double j = text::jaccard(content_tokens(element.label), content_tokens(description));

  double r = 0.0;
  for (const auto& t : text::tokenize(description)) {
    if (role_word(t) == element.role) r = 1.0;
  }

  double s = 1.0;
  if (auto hint = spatial_hint(description)) {
    const auto c = sim::visible_center(element, obs.scrollOffset);
    s = region_of(c.x, c.y) == *hint ? 1.0 : 0.0;
  }
  return kLabelWeight * j + kRoleWeight * r + kSpatialWeight * s;
}

GroundingResult ground(const dsl::GroundingQuery& q, const sim::Observation& obs, const NoiseModel& noise) {
  if (obs.visibleElements.empty()) throw Error(ErrorKind::NoCandidates, "observation has no visible elements");

  GroundingResult res;
  res.ranked.reserve(obs.visibleElements.size());
  for (const auto& e : obs.visibleElements) res.ranked.emplace_back(e.id, score(q.description, e, obs));
  std::stable_sort(res.ranked.begin(), res.ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (res.ranked.front().second < kThreshold) {
    throw Error(ErrorKind::BelowThreshold, "no element matches \"" + q.description + "\"");
  }

  std::size_t pick = 0;
  if (noise.epsilon > 0.0 && res.ranked.size() >= 2) {
    Rng rng = make_rng(noise.rngSeed);
    if (uniform01(rng) < noise.epsilon) pick = 1;
  }
  res.runnerUp = pick == 1;
  res.elementId = res.ranked[pick].first;
  res.score = res.ranked[pick].second;
  for (const auto& e : obs.visibleElements) {
    if (e.id == res.elementId) res.coordinates = sim::visible_center(e, obs.scrollOffset);
  }
  return res;
}

std::vector<Mark> enumerate_som(const sim::Observation& obs) {
  std::vector<Mark> marks;
  int k = 1;
  for (const auto& e : obs.visibleElements) marks.push_back(Mark{k++, e.id, e.role, e.label, e.bounds});
  return marks;
}

std::string make_description(const sim::Element& e, const sim::Observation& obs) {
  const auto c = sim::visible_center(e, obs.scrollOffset);
  std::string out = "the '";
  out += e.label;
  out += "' ";
  out += sim::to_string(e.role);
  out += " on the ";
  out += to_string(region_of(c.x, c.y));
  return out;
}

}  // namespace guiwb::grounding
