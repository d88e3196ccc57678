#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tbt/dynamics.hpp"

namespace tbt {

/// Candidate (phi_x, phi_u) pair, restricted to diagonal affine maps:
/// angles transform as c_i + s_i (theta_i - c_i), velocities and torques
/// scale by the respective diagonal entries.
struct CandidateTransform {
  Eigen::Vector2d phi_x_diag = Eigen::Vector2d::Ones();
  Eigen::Vector2d phi_u_diag = Eigen::Vector2d::Ones();
  Eigen::Vector2d centers = Eigen::Vector2d::Zero();
};

struct AutomorphismReport {
  bool pass = false;
  double max_residual = 0.0;  // rad/s^2
  int samples = 0;
  bool gravity_compensated = false;
  double tolerance = 0.0;
};

struct SamplingBox {
  double theta_max = 3.14159265358979323846;
  double omega_max = 5.0;
  double tau_max = 2.0;
};

/// Samples random (state, torque) tuples and compares the accelerations of
/// the transformed tuple against the transformed accelerations. The gravity
/// term is removed from both evaluations when `gravity_comp` is set,
/// modeling a local compensator.
AutomorphismReport check_automorphism(const CandidateTransform& cand,
                                      const ManipulatorParams& params,
                                      bool gravity_comp, int n_samples = 1000,
                                      double tol = 1e-9,
                                      std::uint64_t seed = 20240901,
                                      const SamplingBox& box = {});

/// Exhaustive scan of the four diagonal sign patterns (+-1, +-1) applied
/// identically to phi_x and phi_u.
std::vector<std::pair<CandidateTransform, AutomorphismReport>>
enumerate_sign_candidates(const ManipulatorParams& params, bool gravity_comp,
                          int n_samples = 1000, double tol = 1e-9,
                          std::uint64_t seed = 20240901);

}  // namespace tbt
