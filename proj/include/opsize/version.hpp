#pragma once

namespace opsize {

inline constexpr const char* kVersion = "0.1.0";

}
