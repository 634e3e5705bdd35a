#pragma once

namespace racectl {

inline constexpr char kVersion[] = "0.1.0";

}  // namespace racectl
