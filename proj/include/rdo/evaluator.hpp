#pragma once

#include <functional>
#include <span>

#include "rdo/design_space.hpp"

namespace rdo {

/// Scalar response of a machine geometry under a material state. Both the
/// analytic benchmark and the Kriging surrogates implement this contract.
/// Implementations must be reentrant.
using Response =
    std::function<double(std::span<const double> geometry, const MaterialState& material)>;

/// The two machine outputs the optimizations work with.
struct ResponsePair {
  Response torque;  // mean torque, N.m
  Response ripple;  // torque ripple, percent
};

/// A function of a point in some DesignSpace (no material split).
using PointFunction = std::function<double(std::span<const double>)>;

}  // namespace rdo
