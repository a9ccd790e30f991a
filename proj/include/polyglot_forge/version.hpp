#pragma once

#include <string_view>

namespace polyglot_forge {

inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace polyglot_forge
