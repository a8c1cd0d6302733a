#pragma once

namespace frameflow {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace frameflow
