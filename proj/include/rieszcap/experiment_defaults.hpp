#pragma once

// Acceptance thresholds that are artifact choices rather than constants of
// the underlying theory. Bump kThresholdsVersion whenever a value changes;
// the verification summary reports it.

#include <cstddef>

namespace rieszcap::defaults {

inline constexpr const char* kThresholdsVersion = "1";

/// max/min of p_alpha_energy / wolff_energy over the Cantor sweep.
inline constexpr double kEnergyRatioSpread = 50.0;
/// max/min of gamma_plus_proxy / csp_proxy over the Cantor sweep.
inline constexpr double kProxyRatioSpread = 10.0;
/// max/min of the growth constant across Cantor depths 1..5.
inline constexpr double kGrowthSpread = 4.0;
/// Allowed factor for capacity proxies under a bilipschitz map.
inline constexpr double kBilipschitzBound = 5.0;
/// proxy(K1 u K2) <= kSemiadditivityFactor (proxy(K1) + proxy(K2)).
inline constexpr double kSemiadditivityFactor = 2.0;
/// Affine fit of the truncated Wolff energy against depth.
inline constexpr double kAffineFitR2 = 0.99;
/// Relative change of the proxy between depths 4 and 5 when d = 1.5 alpha.
inline constexpr double kStabilizationChange = 0.10;
/// Optimized weights on symmetric supports vs uniform.
inline constexpr double kSymmetricWeightDeviation = 0.10;

}  // namespace rieszcap::defaults
