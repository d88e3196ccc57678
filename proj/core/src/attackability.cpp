#include "tbt/attackability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tbt {

AutomorphismReport check_automorphism(const CandidateTransform& cand,
                                      const ManipulatorParams& params,
                                      bool gravity_comp, int n_samples,
                                      double tol, std::uint64_t seed,
                                      const SamplingBox& box) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (tol <= 0.0) throw std::invalid_argument("tol must be positive");

  ManipulatorParams eff = params;
  if (gravity_comp) eff.gravity = 0.0;  // compensator cancels the gravity term

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u_theta(-box.theta_max, box.theta_max);
  std::uniform_real_distribution<double> u_omega(-box.omega_max, box.omega_max);
  std::uniform_real_distribution<double> u_tau(-box.tau_max, box.tau_max);

  double max_residual = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    JointState x{u_theta(rng), u_theta(rng), u_omega(rng), u_omega(rng)};
    TorquePair tau{u_tau(rng), u_tau(rng)};

    const Accel a = forward_accel(x, tau, {}, eff);

    JointState xt;
    xt.theta1 = cand.centers[0] + cand.phi_x_diag[0] * (x.theta1 - cand.centers[0]);
    xt.theta2 = cand.centers[1] + cand.phi_x_diag[1] * (x.theta2 - cand.centers[1]);
    xt.omega1 = cand.phi_x_diag[0] * x.omega1;
    xt.omega2 = cand.phi_x_diag[1] * x.omega2;
    const TorquePair taut{cand.phi_u_diag[0] * tau.tau1,
                          cand.phi_u_diag[1] * tau.tau2};

    const Accel at = forward_accel(xt, taut, {}, eff);
    const double r1 = std::fabs(at.alpha1 - cand.phi_x_diag[0] * a.alpha1);
    const double r2 = std::fabs(at.alpha2 - cand.phi_x_diag[1] * a.alpha2);
    max_residual = std::max({max_residual, r1, r2});
  }

  AutomorphismReport report;
  report.max_residual = max_residual;
  report.samples = n_samples;
  report.gravity_compensated = gravity_comp;
  report.tolerance = tol;
  report.pass = max_residual < tol;
  return report;
}

std::vector<std::pair<CandidateTransform, AutomorphismReport>>
enumerate_sign_candidates(const ManipulatorParams& params, bool gravity_comp,
                          int n_samples, double tol, std::uint64_t seed) {
  std::vector<std::pair<CandidateTransform, AutomorphismReport>> out;
  for (double s1 : {1.0, -1.0}) {
    for (double s2 : {1.0, -1.0}) {
      CandidateTransform cand;
      cand.phi_x_diag = Eigen::Vector2d(s1, s2);
      cand.phi_u_diag = Eigen::Vector2d(s1, s2);
      out.emplace_back(
          cand, check_automorphism(cand, params, gravity_comp, n_samples, tol,
                                   seed));
    }
  }
  return out;
}

}  // namespace tbt
