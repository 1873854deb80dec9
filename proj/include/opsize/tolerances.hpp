#pragma once

// Numerical gates used across the library. Relative tolerances are taken
// against the max-abs entry of whatever object is being checked.

namespace opsize {

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kStateNormTol = 1e-12;
inline constexpr double kCoeffImagTol = 1e-10;
inline constexpr double kDistributionClip = 1e-9;
inline constexpr double kSpectralResidualTol = 1e-9;
inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kExpectationImagTol = 1e-9;
inline constexpr double kTwoDesignTol = 1e-10;
inline constexpr double kCompletenessTol = 1e-12;

}
