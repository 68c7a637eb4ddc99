#pragma once

namespace permsym {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace permsym
