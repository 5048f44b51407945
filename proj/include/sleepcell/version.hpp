#pragma once

namespace sleepcell {

inline constexpr const char* kVersion = "1.0.0";

}
