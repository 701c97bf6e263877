#pragma once

namespace drc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace drc
