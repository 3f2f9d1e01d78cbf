#pragma once

namespace bddlearn {

inline constexpr const char *version = "0.1.0";

} // namespace bddlearn
