#pragma once

namespace tghar {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace tghar
