#pragma once

namespace uncertainty {

inline constexpr const char* kArtifactVersion = "1.0.0";
/// Bumped whenever report columns or their order change.
inline constexpr int kReportFormatVersion = 1;

}  // namespace uncertainty
