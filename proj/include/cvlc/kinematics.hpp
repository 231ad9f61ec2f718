#pragma once

#include "cvlc/types.hpp"

namespace cvlc {

/// Exact constant-acceleration update over dt. Longitudinal velocity stops at
/// zero (position integrated through the stop instant); lateral motion is
/// unconstrained.
VehicleState StepKinematics(const VehicleState& state, double a_x, double a_y, double dt);

}  // namespace cvlc
