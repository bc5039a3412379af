#pragma once

namespace doslab {
inline constexpr const char* kToolVersion = "0.1.0";
}
