#include <doctest.h>

#include <cmath>

#include "tbt/controller.hpp"
#include "tbt/dynamics.hpp"

using namespace tbt;

TEST_CASE("observer converges to a constant external torque") {
  ManipulatorParams p;
  p.gravity = 0.0;  // isolate the observer from the gravity model term
  const double dt = 0.001;

  SUBCASE("yaw step, 0.5 N m") {
    JointState x;
    ObserverState obs;
    const TorquePair ext{0.5, 0.0};
    double t = 0.0;
    while (t < 5.0 / obs.cutoff + 1e-9) {
      obs = estimate_reaction_torque(x, {}, p, obs, dt);
      x = step_rk4(x, {}, ext, p, dt);
      t += dt;
    }
    CHECK(obs.tau_e_hat1 == doctest::Approx(0.5).epsilon(0.01));
  }

  SUBCASE("pitch step converges in the wire sign convention") {
    JointState x;
    ObserverState obs;
    const TorquePair ext{0.0, 0.3};
    double t = 0.0;
    while (t < 5.0 / obs.cutoff + 1e-9) {
      obs = estimate_reaction_torque(x, {}, p, obs, dt);
      x = step_rk4(x, {}, ext, p, dt);
      t += dt;
    }
    CHECK(obs.tau_e_hat2 == doctest::Approx(0.3).epsilon(0.01));
  }
}

TEST_CASE("observer stays near zero without disturbance") {
  ManipulatorParams p;
  JointState x{0.2, 0.1, 0.0, 0.0};
  ObserverState obs;
  const TorquePair tau{0.05, gravity_torque(0.1, p)};
  for (int i = 0; i < 3000; ++i) {
    obs = estimate_reaction_torque(x, tau, p, obs, 0.001);
    x = step_rk4(x, tau, {}, p, 0.001);
  }
  CHECK(std::fabs(obs.tau_e_hat1) < 1e-3);
  CHECK(std::fabs(obs.tau_e_hat2) < 1e-3);
}

TEST_CASE("observer estimate is odd under the yaw mirror") {
  ManipulatorParams p;
  JointState xa{0.1, 0.2, 0.5, -0.1};
  JointState xb{-0.1, 0.2, -0.5, -0.1};
  ObserverState oa, ob;
  const TorquePair ta{0.2, 0.1};
  const TorquePair tb{-0.2, 0.1};
  const TorquePair ea{0.3, -0.05};
  const TorquePair eb{-0.3, -0.05};
  for (int i = 0; i < 500; ++i) {
    oa = estimate_reaction_torque(xa, ta, p, oa, 0.001);
    ob = estimate_reaction_torque(xb, tb, p, ob, 0.001);
    xa = step_rk4(xa, ta, ea, p, 0.001);
    xb = step_rk4(xb, tb, eb, p, 0.001);
    CHECK(ob.tau_e_hat1 == -oa.tau_e_hat1);
    CHECK(ob.tau_e_hat2 == oa.tau_e_hat2);
  }
}

TEST_CASE("four-channel law, worked values") {
  ManipulatorParams p;
  ControllerGains g;  // kp 5, kd 0.5, kf 1

  const SignalVector local{0.1, 0.2, 0.01, -0.02};
  const SignalVector remote{0.3, -0.1, 0.04, 0.05};

  SUBCASE("without gravity compensation") {
    const TorquePair tau = four_channel_command(local, 0.2, -0.1, remote, g, p,
                                                false, Side::kLeader);
    CHECK(tau.tau1 == doctest::Approx(5.0 * 0.2 - 0.5 * 0.2 + 0.04));
    CHECK(tau.tau2 == doctest::Approx(5.0 * -0.3 + 0.5 * 0.1 - 0.05));
  }

  SUBCASE("gravity compensation adds m g l cos(theta2) to pitch") {
    const TorquePair with = four_channel_command(local, 0.2, -0.1, remote, g, p,
                                                 true, Side::kLeader);
    const TorquePair without = four_channel_command(local, 0.2, -0.1, remote, g,
                                                    p, false, Side::kLeader);
    CHECK(with.tau1 == without.tau1);
    CHECK(with.tau2 - without.tau2 ==
          doctest::Approx(0.5 * 9.81 * 0.2 * std::cos(0.2)));
  }
}

TEST_CASE("command yaw channel is odd, pitch channel even, in yaw signals") {
  ManipulatorParams p;
  ControllerGains g;
  const SignalVector local{0.1, 0.2, 0.01, -0.02};
  const SignalVector remote{0.3, -0.1, 0.04, 0.05};
  const SignalVector local_m{-0.1, 0.2, -0.01, -0.02};
  const SignalVector remote_m{-0.3, -0.1, -0.04, 0.05};
  const TorquePair a =
      four_channel_command(local, 0.2, -0.1, remote, g, p, true, Side::kLeader);
  const TorquePair b = four_channel_command(local_m, -0.2, -0.1, remote_m, g, p,
                                            true, Side::kLeader);
  CHECK(b.tau1 == -a.tau1);
  CHECK(b.tau2 == a.tau2);
}

TEST_CASE("signal vector slot order is stable") {
  const SignalVector v{1.0, 2.0, 3.0, 4.0};
  const auto s = v.slots();
  CHECK(s[0] == 1.0);
  CHECK(s[1] == 2.0);
  CHECK(s[2] == 3.0);
  CHECK(s[3] == 4.0);
  const SignalVector back = SignalVector::from_slots(s);
  CHECK(back.theta1 == v.theta1);
  CHECK(back.tau_e2 == v.tau_e2);
}
