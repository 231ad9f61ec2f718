#include "cvlc/kinematics.hpp"

namespace cvlc {

VehicleState StepKinematics(const VehicleState& s, double a_x, double a_y, double dt) {
  if (dt <= 0.0) return s;
  VehicleState out = s;
  if (a_x < 0.0 && s.v_x + a_x * dt < 0.0) {
    const double t_stop = s.v_x / -a_x;
    out.p_x = s.p_x + s.v_x * t_stop + 0.5 * a_x * t_stop * t_stop;
    out.v_x = 0.0;
  } else {
    out.p_x = s.p_x + s.v_x * dt + 0.5 * a_x * dt * dt;
    out.v_x = s.v_x + a_x * dt;
  }
  out.p_y = s.p_y + s.v_y * dt + 0.5 * a_y * dt * dt;
  out.v_y = s.v_y + a_y * dt;
  return out;
}

}  // namespace cvlc
