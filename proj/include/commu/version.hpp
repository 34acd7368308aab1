#pragma once

namespace commu {

inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace commu
