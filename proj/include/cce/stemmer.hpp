#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace cce {

/// Snowball English (Porter2) stem of the lowercased word.
/// "legs" -> "leg", "jammed" -> "jam".
std::string stem(std::string_view word);

}  // namespace cce
