#pragma once

// Global numeric policy. Every feasibility check, pivot threshold and
// degeneracy decision in the toolkit refers to these constants so the
// whole artifact shares one tolerance story.

namespace scencert::tol {

inline constexpr double kFeas = 1e-8;         // absolute feasibility slack
inline constexpr double kPivot = 1e-10;       // simplex pivot threshold
inline constexpr double kDedupAngle = 1e-9;   // angular tolerance, unit normals
inline constexpr double kDedupOffset = 1e-9;  // offset tolerance after normalization
inline constexpr double kRayTie = 1e-12;      // ray-shooting tie window
inline constexpr double kSupportMove = 1e-5;  // optimizer-move threshold (support constraints)
inline constexpr double kRadiusCap = 1e9;     // inscribed-radius cap in the auxiliary LP

}  // namespace scencert::tol
