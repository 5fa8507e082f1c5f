#pragma once

namespace heston {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace heston
