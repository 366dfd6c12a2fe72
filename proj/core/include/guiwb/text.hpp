#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace guiwb::text {

/// Lowercased maximal runs of ASCII letters and digits.
std::vector<std::string> tokenize(std::string_view s);

std::set<std::string> token_set(std::string_view s);

/// |a ∩ b| / |a ∪ b|; zero when both sets are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

std::string_view trim(std::string_view s) noexcept;

}  // namespace guiwb::text
