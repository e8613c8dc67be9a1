#pragma once

#include <string_view>

namespace shillscore {

inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace shillscore
