#pragma once

namespace phasemotion {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace phasemotion
