#pragma once

namespace qfs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qfs
