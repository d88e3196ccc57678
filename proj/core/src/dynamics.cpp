#include "tbt/dynamics.hpp"

#include <cmath>

namespace tbt {

Accel forward_accel(const JointState& state, const TorquePair& tau_motor,
                    const TorquePair& tau_ext, const ManipulatorParams& params) {
  const double ml2 = params.point_mass * params.link_length * params.link_length;
  const double c2 = std::cos(state.theta2);
  const double s2 = std::sin(state.theta2);

  const double inertia_yaw = ml2 * c2 * c2 + params.yaw_inertia;  // > 0 always
  const double coriolis_yaw = -2.0 * ml2 * c2 * s2 * state.omega1 * state.omega2;
  const double rhs_yaw = tau_motor.tau1 + tau_ext.tau1 -
                         params.viscous_friction1 * state.omega1;

  const double centrifugal_pitch = ml2 * c2 * s2 * state.omega1 * state.omega1;
  const double gravity_pitch =
      params.point_mass * params.gravity * params.link_length * c2;
  const double rhs_pitch = tau_motor.tau2 - tau_ext.tau2 -
                           params.viscous_friction2 * state.omega2;

  Accel a;
  a.alpha1 = (rhs_yaw - coriolis_yaw) / inertia_yaw;
  a.alpha2 = (rhs_pitch - centrifugal_pitch - gravity_pitch) / ml2;
  return a;
}

double gravity_torque(double theta2, const ManipulatorParams& params) {
  return params.point_mass * params.gravity * params.link_length *
         std::cos(theta2);
}

namespace {

struct Deriv {
  double dtheta1, dtheta2, domega1, domega2;
};

Deriv eval(const JointState& s, const TorquePair& tm, const TorquePair& te,
           const ManipulatorParams& p) {
  const Accel a = forward_accel(s, tm, te, p);
  return {s.omega1, s.omega2, a.alpha1, a.alpha2};
}

JointState advance(const JointState& s, const Deriv& d, double h) {
  return {s.theta1 + h * d.dtheta1, s.theta2 + h * d.dtheta2,
          s.omega1 + h * d.domega1, s.omega2 + h * d.domega2};
}

}  // namespace

JointState step_rk4(const JointState& state, const TorquePair& tau_motor,
                    const TorquePair& tau_ext, const ManipulatorParams& params,
                    double dt, double bound) {
  const Deriv k1 = eval(state, tau_motor, tau_ext, params);
  const Deriv k2 = eval(advance(state, k1, dt / 2.0), tau_motor, tau_ext, params);
  const Deriv k3 = eval(advance(state, k2, dt / 2.0), tau_motor, tau_ext, params);
  const Deriv k4 = eval(advance(state, k3, dt), tau_motor, tau_ext, params);

  const double h6 = dt / 6.0;
  JointState next;
  next.theta1 = state.theta1 +
                h6 * (k1.dtheta1 + 2.0 * k2.dtheta1 + 2.0 * k3.dtheta1 + k4.dtheta1);
  next.theta2 = state.theta2 +
                h6 * (k1.dtheta2 + 2.0 * k2.dtheta2 + 2.0 * k3.dtheta2 + k4.dtheta2);
  next.omega1 = state.omega1 +
                h6 * (k1.domega1 + 2.0 * k2.domega1 + 2.0 * k3.domega1 + k4.domega1);
  next.omega2 = state.omega2 +
                h6 * (k1.domega2 + 2.0 * k2.domega2 + 2.0 * k3.domega2 + k4.domega2);

  const bool finite = std::isfinite(next.theta1) && std::isfinite(next.theta2) &&
                      std::isfinite(next.omega1) && std::isfinite(next.omega2);
  if (!finite || std::fabs(next.theta1) > bound || std::fabs(next.theta2) > bound ||
      std::fabs(next.omega1) > bound || std::fabs(next.omega2) > bound) {
    throw DivergenceError("integrator state exceeded magnitude bound");
  }
  return next;
}

}  // namespace tbt
