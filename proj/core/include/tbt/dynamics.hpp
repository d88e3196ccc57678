#pragma once

#include <stdexcept>

namespace tbt {

/// Parameters of the 2-DOF (yaw-pitch) manipulator. Both robots share one set.
struct ManipulatorParams {
  double point_mass = 0.5;       // kg, handle modeled as point mass at link tip
  double link_length = 0.2;      // m, distance of point mass from joint 2 axis
  double yaw_inertia = 0.01;     // kg m^2, link 1 + motor about the yaw axis
  double gravity = 9.81;         // m/s^2
  double viscous_friction1 = 0.0;  // N m s/rad, yaw (0 keeps reflection exact)
  double viscous_friction2 = 0.0;  // N m s/rad, pitch

  bool valid() const {
    return point_mass > 0.0 && link_length > 0.0 && yaw_inertia > 0.0 &&
           gravity >= 0.0 && viscous_friction1 >= 0.0 && viscous_friction2 >= 0.0;
  }
};

/// Joint-space state. Angles are unwrapped reals, never reduced mod 2*pi.
struct JointState {
  double theta1 = 0.0;  // rad, yaw
  double theta2 = 0.0;  // rad, pitch
  double omega1 = 0.0;  // rad/s
  double omega2 = 0.0;  // rad/s
};

struct TorquePair {
  double tau1 = 0.0;  // N m, yaw
  double tau2 = 0.0;  // N m, pitch
};

struct Accel {
  double alpha1 = 0.0;  // rad/s^2
  double alpha2 = 0.0;
};

class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Forward dynamics of the manipulator.
///
/// Yaw:   (m l^2 cos^2 t2 + J1) a1 - 2 m l^2 cos t2 sin t2 w1 w2 = tau1 + taue1 - b1 w1
/// Pitch: m l^2 a2 + m l^2 cos t2 sin t2 w1^2 + m g l cos t2     = tau2 - taue2 - b2 w2
///
/// External torques enter with the asymmetric signs above (+ on yaw, - on
/// pitch); see SignConvention in harness for how physical torques map in.
Accel forward_accel(const JointState& state, const TorquePair& tau_motor,
                    const TorquePair& tau_ext, const ManipulatorParams& params);

/// Torque a local compensator must add to the pitch motor: m g l cos(theta2).
double gravity_torque(double theta2, const ManipulatorParams& params);

/// One classical RK4 step of the 4-state ODE with zero-order-held torques.
/// Throws DivergenceError when any state component exceeds `bound`.
JointState step_rk4(const JointState& state, const TorquePair& tau_motor,
                    const TorquePair& tau_ext, const ManipulatorParams& params,
                    double dt, double bound = 1e6);

}  // namespace tbt
