#pragma once

#include <string_view>

namespace govgame {

inline constexpr std::string_view kEngineVersion = "0.1.0";

}  // namespace govgame
