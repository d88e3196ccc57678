#include "tbt/controller.hpp"

#include <cmath>

namespace tbt {

ObserverState estimate_reaction_torque(const JointState& state,
                                       const TorquePair& tau_cmd,
                                       const ManipulatorParams& params,
                                       const ObserverState& obs, double dt) {
  const double ml2 = params.point_mass * params.link_length * params.link_length;
  const double c2 = std::cos(state.theta2);
  const double s2 = std::sin(state.theta2);

  // Generalized momentum. The yaw Coriolis term coincides with dM11/dt * w1,
  // so the momentum derivative only carries the pitch centrifugal+gravity term.
  const double p1 = (ml2 * c2 * c2 + params.yaw_inertia) * state.omega1;
  const double p2 = ml2 * state.omega2;
  const double h2 = ml2 * c2 * s2 * state.omega1 * state.omega1 +
                    params.point_mass * params.gravity * params.link_length * c2;

  const double r1 = obs.cutoff * (p1 - obs.momentum_hat1);
  const double r2 = obs.cutoff * (p2 - obs.momentum_hat2);

  ObserverState next = obs;
  next.momentum_hat1 +=
      dt * (tau_cmd.tau1 - params.viscous_friction1 * state.omega1 + r1);
  next.momentum_hat2 +=
      dt * (tau_cmd.tau2 - h2 - params.viscous_friction2 * state.omega2 + r2);

  // Residual estimates the external torque as it enters the dynamics
  // (yaw: +taue1, pitch: -taue2), so the pitch slot flips sign. Momentum and
  // its estimate are taken at the same time index; mixing the fresh estimate
  // with the stale momentum would bias the residual by a factor cutoff * dt.
  next.tau_e_hat1 = r1;
  next.tau_e_hat2 = -r2;
  return next;
}

TorquePair four_channel_command(const SignalVector& local, double omega1_local,
                                double omega2_local, const SignalVector& remote,
                                const ControllerGains& gains,
                                const ManipulatorParams& params,
                                bool gravity_comp, Side side) {
  (void)side;  // the law is symmetric; kept for call-site clarity
  // Force channel in physical torques: reproduce the remote external torque
  // on the local plant. The pitch slot carries the negated physical torque,
  // hence the flipped sign on joint 2.
  TorquePair tau;
  tau.tau1 = gains.kp1 * (remote.theta1 - local.theta1) -
             gains.kd1 * omega1_local + gains.kf1 * remote.tau_e1;
  tau.tau2 = gains.kp2 * (remote.theta2 - local.theta2) -
             gains.kd2 * omega2_local - gains.kf2 * remote.tau_e2;
  if (gravity_comp) {
    tau.tau2 += gravity_torque(local.theta2, params);
  }
  return tau;
}

}  // namespace tbt
