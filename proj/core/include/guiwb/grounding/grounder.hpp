#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "guiwb/dsl/action.hpp"
#include "guiwb/sim/world.hpp"

namespace guiwb::grounding {

/// Minimum best score for a description to count as groundable.
inline constexpr double kThreshold = 0.2;

inline constexpr double kLabelWeight = 0.6;
inline constexpr double kRoleWeight = 0.2;
inline constexpr double kSpatialWeight = 0.2;

/// Cells of a 3x3 grid over the viewport, row-major from the top left.
enum class Region { TopLeft, Top, TopRight, Left, Center, Right, BottomLeft, Bottom, BottomRight };

std::string_view to_string(Region r) noexcept;
Region region_of(int viewportX, int viewportY) noexcept;

/// Region named by a description ("bottom right", "center", ...), if any.
std::optional<Region> spatial_hint(std::string_view description);

/// Label tokens of a description or label with articles, role words and
/// spatial words removed.
std::set<std::string> content_tokens(std::string_view s);

struct NoiseModel {
  double epsilon = 0.0;
  std::uint64_t rngSeed = 0;
};

struct GroundingResult {
  int elementId = 0;
  dsl::Grounded coordinates;
  double score = 0.0;
  std::vector<std::pair<int, double>> ranked;  // (score desc, id asc)
  bool runnerUp = false;                       // noise picked the second candidate
};

/// 0.6 * label Jaccard + 0.2 * role named + 0.2 * spatial hint agrees (1 with no hint).
double score(std::string_view description, const sim::Element& element, const sim::Observation& obs);

/// Throws NoCandidates on an empty observation and BelowThreshold when the
/// best candidate scores under 0.2.
GroundingResult ground(const dsl::GroundingQuery& q, const sim::Observation& obs, const NoiseModel& noise = {});

struct Mark {
  int mark = 0;
  int elementId = 0;
  sim::Role role = sim::Role::Button;
  std::string label;
  sim::Bounds bounds;
  bool operator==(const Mark&) const = default;
};

/// Set-of-Marks listing: marks 1..N over visible elements in id order.
std::vector<Mark> enumerate_som(const sim::Observation& obs);

/// "the '<label>' <role> on the <region>".
std::string make_description(const sim::Element& e, const sim::Observation& obs);

}  // namespace guiwb::grounding
