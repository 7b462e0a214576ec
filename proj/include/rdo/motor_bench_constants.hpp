#pragma once

// Frozen coefficients of the analytic motor benchmark. Any change to a value
// here must bump kBenchmarkVersion.

#include <array>

namespace rdo::bench {

inline constexpr int kBenchmarkVersion = 1;

inline constexpr std::size_t kGeometricParameters = 12;

// Design bounds in parameter order; geometry is normalized with these.
inline constexpr std::array<double, kGeometricParameters> kLower = {
    2.47, 27.03, 37.03, 31.03, 47.03, 33.7, 59.7, 0.55, 2.6, 0.9, 0.5, 0.4};
inline constexpr std::array<double, kGeometricParameters> kUpper = {
    3.27, 29.66, 39.66, 33.66, 49.66, 37.0, 63.0, 0.65, 2.98, 1.18, 0.62, 0.6};

// Calibration anchors at the reference design with nominal materials.
inline constexpr double kNominalTorque = 433.34;  // N.m
inline constexpr double kNominalRipple = 10.38;   // percent

// Torque lost at full degradation of each material variable; the sum is the
// 20 N.m full-degradation drop.
inline constexpr double kAlphaTorqueDrop = 12.0;  // at alpha = 0
inline constexpr double kBetaTorqueDrop = 8.0;    // at beta = 0.065

// Mean torque geometry part: sum_j quad[j] * ((0.5 - center[j])^2 - (z_j - center[j])^2)
//                            + slope[j] * (z_j - 0.5)
//                            + kTorqueCross * (z_0 - 0.5) * (z_1 - 0.5)
inline constexpr std::array<double, kGeometricParameters> kTorqueQuad = {
    30.0, 25.0, 22.0, 20.0, 18.0, 4.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0};
inline constexpr std::array<double, kGeometricParameters> kTorqueCenter = {
    0.65, 0.70, 0.35, 0.60, 0.40, 0.5, 0.45, 0.5, 0.5, 0.5, 0.5, 0.5};
inline constexpr std::array<double, kGeometricParameters> kTorqueSlope = {
    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -3.0, -1.5, -1.5, -1.0, -1.2};
inline constexpr double kTorqueCross = 4.0;

// Torque ripple shape (percent), offset so the reference design reads
// kNominalRipple:
//   kinkL1 * |z1 - z2 - kinkL1Shift| + kinkL2 * |z3 + z4 - kinkL2Sum|
//   + slotQuad * (z0 - slotCenter)^2 + barrierCross * (z1 - 0.5) * (z3 - 0.5)
//   - notchDepth * exp(-((z4 - notchCenter) / notchWidth)^2)
//   + l3Quad * ((z5 - 0.5)^2 + (z6 - 0.5)^2) + sum_j rippleSlope[j] * z_j
inline constexpr double kRippleKinkL1 = 5.0;
inline constexpr double kRippleKinkL1Shift = 0.1;
inline constexpr double kRippleKinkL2 = 3.0;
inline constexpr double kRippleKinkL2Sum = 1.1;
inline constexpr double kRippleSlotQuad = 6.0;
inline constexpr double kRippleSlotCenter = 0.3;
inline constexpr double kRippleBarrierCross = 2.5;
inline constexpr double kRippleNotchDepth = 1.5;
inline constexpr double kRippleNotchCenter = 0.7;
inline constexpr double kRippleNotchWidth = 0.07;
inline constexpr double kRippleL3Quad = 0.8;
inline constexpr std::array<double, kGeometricParameters> kRippleSlope = {
    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.3, 0.2, 0.2, 0.4};

}  // namespace rdo::bench
