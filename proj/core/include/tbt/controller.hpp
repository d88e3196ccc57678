#pragma once

#include <array>

#include "tbt/dynamics.hpp"

namespace tbt {

struct ControllerGains {
  double kp1 = 5.0, kp2 = 5.0;   // N m / rad
  double kd1 = 0.5, kd2 = 0.5;   // N m s / rad
  double kf1 = 1.0, kf2 = 1.0;   // force-channel gains, dimensionless
};

/// Momentum-based reaction-torque observer state. Estimates live in the wire
/// sign convention of the dynamics (yaw +taue, pitch -taue).
struct ObserverState {
  double momentum_hat1 = 0.0;  // N m s
  double momentum_hat2 = 0.0;
  double tau_e_hat1 = 0.0;     // N m
  double tau_e_hat2 = 0.0;
  double cutoff = 30.0;        // rad/s
};

/// The 4-channel payload exchanged each control tick, per direction.
/// Slot order is fixed: [theta1, theta2, taue1, taue2].
struct SignalVector {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double tau_e1 = 0.0;
  double tau_e2 = 0.0;

  std::array<double, 4> slots() const { return {theta1, theta2, tau_e1, tau_e2}; }
  static SignalVector from_slots(const std::array<double, 4>& s) {
    return {s[0], s[1], s[2], s[3]};
  }
};

enum class Side { kLeader, kFollower };

/// One observer update over dt with the commanded torque held constant.
/// The residual converges to the external torque with time constant 1/cutoff.
ObserverState estimate_reaction_torque(const JointState& state,
                                       const TorquePair& tau_cmd,
                                       const ManipulatorParams& params,
                                       const ObserverState& obs, double dt);

/// Force-reflecting 4-channel law, per joint, in physical torques:
///   tau = kp (theta_remote - theta_local) - kd omega_local + kf ext_remote
/// so each side physically reproduces the external torque felt by the other
/// (operator force drives the follower, wall contact pushes back on the
/// leader). Slot values carry the pitch torque negated, which flips the sign
/// of the joint-2 force channel term. Gravity compensation for the pitch
/// motor is added when enabled.
TorquePair four_channel_command(const SignalVector& local, double omega1_local,
                                double omega2_local, const SignalVector& remote,
                                const ControllerGains& gains,
                                const ManipulatorParams& params,
                                bool gravity_comp, Side side);

}  // namespace tbt
