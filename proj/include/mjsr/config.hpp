#pragma once

#include <cstdint>

namespace mjsr {

/// Central tolerance knobs. Every downstream equality or bracket check uses
/// compare_rel; fixed-point iterations terminate on iterate_rel.
struct Tolerances {
    double compare_rel = 1e-9;
    double iterate_rel = 1e-12;
};

inline constexpr Tolerances kTol{};

/// Cap on complete product evaluations per enumeration call. Exceeding it is
/// an error, never a silent truncation.
inline constexpr std::uint64_t kDefaultBudget = 100'000'000;

/// Seed for the deterministic sampling streams (hourglass falsifier,
/// random adversaries).
inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

} // namespace mjsr
