#pragma once

#include <string>
#include <string_view>

#include "guiwb/planner/policy.hpp"

namespace guiwb::planner {

/// {"version":v,"F":16,"w":[...],"temperature":t}
std::string policy_to_json(const PolicyParams& p);

/// Throws ConfigError on a malformed record or a feature-count mismatch.
PolicyParams policy_from_json(std::string_view text);

void save_policy(const PolicyParams& p, const std::string& path);
PolicyParams load_policy(const std::string& path);

}  // namespace guiwb::planner
