#pragma once

namespace qjump {

inline constexpr const char* version_string = "qjump 0.1.0";

} // namespace qjump
