// Central numeric tolerances and size limits used across the library.

#pragma once

#include <cstdint>

namespace telesim {

// ‖U†U − I‖_max bound for matrices accepted as unitary.
inline constexpr double kUnitarityTol = 1e-12;

// Normalization and orthonormality checks on state vectors.
inline constexpr double kNormTol = 1e-10;

// Probability bookkeeping (completeness sums, crosschecks).
inline constexpr double kProbTol = 1e-9;

// Default tolerance on |b - b'| for the matched flag.
inline constexpr double kMatchTol = 1e-9;

// Agreement required between closed-form probabilities and the enumeration
// oracle.
inline constexpr double kCrosscheckTol = 1e-10;

// Hard cap on register width; 2^20 amplitudes is desk scale.
inline constexpr int kMaxQubits = 20;

// Minimum vector length before OpenMP kernels fan out.
inline constexpr std::uint64_t kOmpMinDim = 1ull << 12;

}  // namespace telesim
