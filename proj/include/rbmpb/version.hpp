#pragma once

namespace rbmpb {

inline constexpr const char* kVersion = "0.1.0";

}
