#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "evdrive/control.hpp"
#include "evdrive/rng.hpp"

using namespace evdrive;

namespace {

// Brute-force band scan: max distance in [near, far], then min distance
// > near, then the last waypoint.
Vec2 band_oracle(const std::vector<Vec2>& wps, const Vec2& from, double near, double far) {
    const Vec2* best = nullptr;
    double best_d = -1;
    for (const Vec2& w : wps) {
        double d = distance(w, from);
        if (d >= near && d <= far && d > best_d) {
            best_d = d;
            best = &w;
        }
    }
    if (best) return *best;
    double min_d = 1e300;
    for (const Vec2& w : wps) {
        double d = distance(w, from);
        if (d > near && d < min_d) {
            min_d = d;
            best = &w;
        }
    }
    return best ? *best : wps.back();
}

}  // namespace

TEST_SUITE("control") {

TEST_CASE("pid_step: pure P, I accumulation, D backward difference") {
    PidState pid;
    pid.kp = 1.0;
    CHECK(pid_step(pid, 0.3, 0.05) == doctest::Approx(0.3 + 0.0 + 0.0).epsilon(1e-15));

    PidState pi;
    pi.ki = 2.0;
    CHECK(pid_step(pi, 1.0, 0.05) == doctest::Approx(2.0 * 0.05).epsilon(1e-15));
    CHECK(pid_step(pi, 1.0, 0.05) == doctest::Approx(2.0 * 0.10).epsilon(1e-15));

    PidState pd;
    pd.kd = 1.0;
    CHECK(pid_step(pd, 0.5, 0.05) == 0.0);  // no derivative on the first call
    CHECK(pid_step(pd, 0.7, 0.05) == doctest::Approx((0.7 - 0.5) / 0.05).epsilon(1e-12));
}

TEST_CASE("pid_step: anti-windup clamps the integral at i_clamp") {
    PidState pid;
    pid.ki = 1.0;
    pid.i_clamp = 2.0;
    for (int i = 0; i < 100; ++i) pid_step(pid, 10.0, 0.05);
    CHECK(pid.integral == 2.0);
    CHECK(pid_step(pid, 10.0, 0.05) == doctest::Approx(2.0));
    // Symmetric on the negative side.
    for (int i = 0; i < 200; ++i) pid_step(pid, -10.0, 0.05);
    CHECK(pid.integral == -2.0);
}

TEST_CASE("pid_step: constant error with ki grows until the clamp") {
    PidState pid;
    pid.kp = 1.0;
    pid.ki = 0.5;
    double prev = pid_step(pid, 1.0, 0.05);
    bool was_clamped = false;
    bool clamped = false;
    for (int i = 0; i < 100; ++i) {
        double out = pid_step(pid, 1.0, 0.05);
        if (was_clamped) {
            CHECK(out == doctest::Approx(prev));  // saturated
        } else {
            CHECK(out > prev);  // still winding up (or just reached the clamp)
        }
        was_clamped = pid.integral >= pid.i_clamp;
        clamped = clamped || was_clamped;
        prev = out;
    }
    CHECK(clamped);
}

TEST_CASE("pid reset clears history") {
    PidState pid;
    pid.kp = 1.0;
    pid.ki = 1.0;
    pid.kd = 1.0;
    pid_step(pid, 1.0, 0.05);
    pid_step(pid, 2.0, 0.05);
    pid.reset();
    CHECK(pid.integral == 0.0);
    CHECK_FALSE(pid.has_prev);
    CHECK(pid_step(pid, 0.5, 0.05) ==
          doctest::Approx(0.5 + 1.0 * 0.5 * 0.05 + 0.0).epsilon(1e-12));
}

TEST_CASE("select_target_waypoint: worked band cases") {
    std::vector<Vec2> wps = {{2, 0}, {10, 0}, {30, 0}, {60, 0}};
    Vec2 got = select_target_waypoint(wps, {0, 0}, 4.0, 50.0);
    CHECK(got.x == 30.0);  // furthest inside [4, 50]
    // Single waypoint inside the band.
    got = select_target_waypoint({{25, 0}}, {0, 0}, 4.0, 50.0);
    CHECK(got.x == 25.0);
    // Everything under 4 m: falls back to the final point.
    got = select_target_waypoint({{1, 0}, {2, 0}, {3, 0}}, {0, 0}, 4.0, 50.0);
    CHECK(got.x == 3.0);
    // Nothing in band but something beyond far: nearest beyond near.
    got = select_target_waypoint({{60, 0}, {80, 0}}, {0, 0}, 4.0, 50.0);
    CHECK(got.x == 60.0);
    CHECK_THROWS_AS(select_target_waypoint(std::vector<Vec2>{}, {0, 0}, 4, 50),
                    std::invalid_argument);
}

TEST_CASE("select_target_waypoint: matches the brute-force oracle") {
    Rng rng(71);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Vec2> wps;
        const int n = 1 + static_cast<int>(rng.next_u64() % 12);
        for (int i = 0; i < n; ++i) wps.push_back({rng.uniform(-60, 60), rng.uniform(-60, 60)});
        Vec2 from{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        Vec2 got = select_target_waypoint(wps, from, 4.0, 50.0);
        Vec2 want = band_oracle(wps, from, 4.0, 50.0);
        CHECK(got.x == want.x);
        CHECK(got.y == want.y);
    }
}

TEST_CASE("select_target_waypoint: band membership property") {
    Rng rng(72);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Vec2> wps;
        for (int i = 0; i < 8; ++i) wps.push_back({rng.uniform(-60, 60), rng.uniform(-60, 60)});
        Vec2 from{0, 0};
        bool any_in_band = false;
        for (const Vec2& w : wps) {
            double d = distance(w, from);
            if (d >= 4.0 && d <= 50.0) any_in_band = true;
        }
        Vec2 got = select_target_waypoint(wps, from, 4.0, 50.0);
        double gd = distance(got, from);
        if (any_in_band) {
            CHECK(gd >= 4.0);
            CHECK(gd <= 50.0);
            // Furthest-in-band: nothing in band is farther.
            for (const Vec2& w : wps) {
                double d = distance(w, from);
                if (d >= 4.0 && d <= 50.0) CHECK(d <= gd + 1e-12);
            }
        }
    }
}

TEST_CASE("heading_error: cardinal directions and trig oracle") {
    EgoState ego;
    CHECK(heading_error(ego, {5, 0}) == 0.0);
    CHECK(heading_error(ego, {0, 5}) == doctest::Approx(3.141592653589793 / 2));
    CHECK(heading_error(ego, {0, -5}) == doctest::Approx(-3.141592653589793 / 2));
    ego.yaw = 3.0;  // wrap seam: target slightly clockwise across pi
    CHECK(heading_error(ego, {std::cos(-3.0), std::sin(-3.0)}) ==
          doctest::Approx(2 * 3.141592653589793 - 6.0).epsilon(1e-12));
    CHECK_THROWS_AS(heading_error(ego, {0, 0}), std::invalid_argument);
    Rng rng(73);
    for (int i = 0; i < 1000; ++i) {
        EgoState e;
        e.x = rng.uniform(-10, 10);
        e.y = rng.uniform(-10, 10);
        e.yaw = rng.uniform(-3.14, 3.14);
        Vec2 t{rng.uniform(-20, 20), rng.uniform(-20, 20)};
        if (std::hypot(t.x - e.x, t.y - e.y) < 1e-6) continue;
        double want = wrap_angle(std::atan2(t.y - e.y, t.x - e.x) - e.yaw);
        CHECK(heading_error(e, t) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("lateral_pid saturates at the steering bounds") {
    PidState pid;
    pid.kp = 1.0;
    CHECK(lateral_pid(pid, 0.3, 0.05) == doctest::Approx(0.3));
    pid.reset();
    CHECK(lateral_pid(pid, 3.0, 0.05) == 1.0);
    pid.reset();
    CHECK(lateral_pid(pid, -3.0, 0.05) == -1.0);
}

TEST_CASE("longitudinal_pid: sign split and hard stop") {
    PidState pid;
    pid.kp = 0.5;
    // Accelerating: u = 0.5 * 4 = 2 -> throttle clamped to 1, no brake.
    ThrottleBrake tb = longitudinal_pid(pid, 6.0, 2.0, 0.05);
    CHECK(tb.throttle == 1.0);
    CHECK(tb.brake == 0.0);
    CHECK(tb.throttle * tb.brake == 0.0);  // never both active
    // Braking: u = 0.5 * (3 - 5) = -1 -> brake 1.
    pid.reset();
    tb = longitudinal_pid(pid, 3.0, 5.0, 0.05);
    CHECK(tb.throttle == 0.0);
    CHECK(tb.brake == doctest::Approx(1.0));
    // Hard stop overrides the PID output entirely.
    pid.reset();
    tb = longitudinal_pid(pid, 0.0, 5.0, 0.05);
    CHECK(tb.throttle == 0.0);
    CHECK(tb.brake == 1.0);
    // Nearly stopped with zero target: PID output governs again.
    pid.reset();
    tb = longitudinal_pid(pid, 0.0, 0.05, 0.05);
    CHECK(tb.brake < 1.0);
    // Zero error with zero history: both actuators idle.
    pid.reset();
    tb = longitudinal_pid(pid, 4.0, 4.0, 0.05);
    CHECK(tb.throttle == 0.0);
    CHECK(tb.brake == 0.0);
}

TEST_CASE("longitudinal_pid outputs stay in actuator bounds") {
    Rng rng(74);
    PidState pid;
    pid.kp = 0.5;
    pid.ki = 0.1;
    pid.kd = 0.05;
    for (int i = 0; i < 1000; ++i) {
        ThrottleBrake tb =
            longitudinal_pid(pid, rng.uniform(0, 10), rng.uniform(0, 10), 0.05);
        CHECK(tb.throttle >= 0.0);
        CHECK(tb.throttle <= 1.0);
        CHECK(tb.brake >= 0.0);
        CHECK(tb.brake <= 1.0);
        CHECK(tb.throttle * tb.brake == 0.0);
    }
}

TEST_CASE("curvature_speed: formula and floor") {
    ControlParams params;  // floor 0.3, gain 1.5
    CHECK(curvature_speed(6.5, 0.0, params) == 6.5);
    CHECK(curvature_speed(6.5, 0.2, params) == doctest::Approx(6.5 * (1 - 1.5 * 0.2)).epsilon(1e-15));
    CHECK(curvature_speed(6.5, -0.2, params) == doctest::Approx(6.5 * 0.7));  // symmetric in sign
    // Large heading error bottoms out at the floor fraction.
    CHECK(curvature_speed(6.5, 2.0, params) == doctest::Approx(6.5 * 0.3));
    CHECK(curvature_speed(6.5, 0.4667, params) >= 6.5 * 0.3 - 1e-12);
    // Monotone non-increasing in |theta_e|.
    Rng rng(75);
    for (int i = 0; i < 1000; ++i) {
        double a = rng.uniform(0, 2), b = rng.uniform(0, 2);
        if (a > b) std::swap(a, b);
        CHECK(curvature_speed(6.5, a, params) >= curvature_speed(6.5, b, params) - 1e-12);
    }
}

}  // TEST_SUITE
