#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "evdrive/rng.hpp"
#include "evdrive/world.hpp"

using namespace evdrive;

namespace {
constexpr double kPi = 3.141592653589793;
}

TEST_SUITE("world") {

TEST_CASE("zero input is a fixed point") {
    PhysicsParams phys;
    EgoState ego;
    EgoState next = step_kinematics(ego, {}, phys, phys.dt);
    CHECK(next.x == 0.0);
    CHECK(next.y == 0.0);
    CHECK(next.yaw == 0.0);
    CHECK(next.v == 0.0);
}

TEST_CASE("full brake from 5 m/s matches the hand-integrated Euler step") {
    PhysicsParams phys;
    EgoState ego;
    ego.v = 5.0;
    EgoState next = step_kinematics(ego, {0.0, 0.0, 1.0}, phys, phys.dt);
    // a = -b_max - c_drag*v = -(8 + 0.05*5); v' = 5 + a*0.05
    CHECK(next.v == doctest::Approx(4.5875).epsilon(1e-15));
    // Position advances with the pre-update speed.
    CHECK(next.x == doctest::Approx(5.0 * 0.05).epsilon(1e-15));
}

TEST_CASE("full throttle from rest matches a = a_max") {
    PhysicsParams phys;
    EgoState ego;
    EgoState next = step_kinematics(ego, {0.0, 1.0, 0.0}, phys, phys.dt);
    CHECK(next.v == doctest::Approx(3.0 * 0.05).epsilon(1e-15));
    CHECK(next.x == 0.0);  // moved with pre-update v = 0
}

TEST_CASE("speed never goes negative") {
    PhysicsParams phys;
    EgoState ego;
    ego.v = 0.1;
    EgoState next = step_kinematics(ego, {0.0, 0.0, 1.0}, phys, phys.dt);
    CHECK(next.v == 0.0);
    // And stays there under sustained brake.
    next = step_kinematics(next, {0.0, 0.0, 1.0}, phys, phys.dt);
    CHECK(next.v == 0.0);
}

TEST_CASE("straight coasting covers v*t within drag tolerance") {
    PhysicsParams phys;
    phys.c_drag = 0.0;  // isolate the integrator
    EgoState ego;
    ego.v = 1.0;
    for (int i = 0; i < 20; ++i) ego = step_kinematics(ego, {0, 0, 0}, phys, phys.dt);
    CHECK(ego.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ego.y == 0.0);
    CHECK(ego.v == doctest::Approx(1.0));
}

TEST_CASE("drag equilibrium: terminal speed is a_max*throttle/c_drag") {
    PhysicsParams phys;
    EgoState ego;
    // At v = a_max/c_drag = 60, acceleration is exactly zero.
    ego.v = phys.a_max / phys.c_drag;
    EgoState next = step_kinematics(ego, {0.0, 1.0, 0.0}, phys, phys.dt);
    CHECK(next.v == doctest::Approx(ego.v).epsilon(1e-15));
}

TEST_CASE("yaw rate uses pre-update speed and the steer scale") {
    PhysicsParams phys;
    EgoState ego;
    ego.v = 4.0;
    const double steer = 0.5;
    EgoState next = step_kinematics(ego, {steer, 0, 0}, phys, phys.dt);
    const double yaw_rate = (4.0 / phys.wheelbase) * std::tan(steer * phys.steer_max);
    CHECK(next.yaw == doctest::Approx(yaw_rate * phys.dt).epsilon(1e-15));
    // Midpoint-heading position update.
    const double yaw_mid = 0.5 * yaw_rate * phys.dt;
    CHECK(next.x == doctest::Approx(4.0 * std::cos(yaw_mid) * phys.dt).epsilon(1e-15));
    CHECK(next.y == doctest::Approx(4.0 * std::sin(yaw_mid) * phys.dt).epsilon(1e-15));
}

TEST_CASE("constant steer traces a circle of the bicycle radius") {
    PhysicsParams phys;
    phys.c_drag = 0.0;
    EgoState ego;
    ego.v = 2.0;
    const double steer = 1.0;
    const double yaw_rate = (2.0 / phys.wheelbase) * std::tan(phys.steer_max);
    const double period = 2 * kPi / yaw_rate;
    const int steps = static_cast<int>(std::round(period / phys.dt));
    for (int i = 0; i < steps; ++i) ego = step_kinematics(ego, {steer, 0, 0}, phys, phys.dt);
    // After ~one full revolution the pose is back near the origin.
    CHECK(std::hypot(ego.x, ego.y) < 0.05);
    CHECK(std::abs(wrap_angle(ego.yaw)) < 0.05);
}

TEST_CASE("commands are clamped, non-finite rejected") {
    PhysicsParams phys;
    EgoState ego;
    ego.v = 1.0;
    EgoState a = step_kinematics(ego, {0.0, 5.0, 0.0}, phys, phys.dt);
    EgoState b = step_kinematics(ego, {0.0, 1.0, 0.0}, phys, phys.dt);
    CHECK(a.v == b.v);
    const ControlCommand nan_steer{std::nan(""), 0.0, 0.0};
    CHECK_THROWS_AS(step_kinematics(ego, nan_steer, phys, phys.dt), std::invalid_argument);
    const ControlCommand inf_throttle{0.0, std::numeric_limits<double>::infinity(), 0.0};
    CHECK_THROWS_AS(step_kinematics(ego, inf_throttle, phys, phys.dt), std::invalid_argument);
}

TEST_CASE("actor_at interpolates keys with constant segment velocity") {
    Actor base;
    base.id = 7;
    base.kind = ActorKind::Pedestrian;
    base.x = 0;
    base.y = 0;
    ActorScript script{base, {{0, 0, 0}, {2, 4, 0}, {4, 4, 6}}};
    Actor at0 = actor_at(script, 0.0);
    CHECK(at0.x == 0.0);
    CHECK(at0.vx == 0.0);  // at the first key the actor has not started moving
    Actor at1 = actor_at(script, 1.0);
    CHECK(at1.x == doctest::Approx(2.0));
    CHECK(at1.y == 0.0);
    CHECK(at1.vx == doctest::Approx(2.0));
    CHECK(at1.vy == doctest::Approx(0.0));
    Actor at3 = actor_at(script, 3.0);
    CHECK(at3.x == doctest::Approx(4.0));
    CHECK(at3.y == doctest::Approx(3.0));
    CHECK(at3.vx == doctest::Approx(0.0));
    CHECK(at3.vy == doctest::Approx(3.0));
    // Before the first key and after the last: parked at the end points.
    Actor before = actor_at(ActorScript{base, {{1, 5, 5}, {2, 6, 5}}}, 0.0);
    CHECK(before.x == doctest::Approx(5.0));
    CHECK(before.vx == 0.0);
    Actor after = actor_at(script, 100.0);
    CHECK(after.x == doctest::Approx(4.0));
    CHECK(after.y == doctest::Approx(6.0));
    CHECK(after.vx == 0.0);
    CHECK(after.vy == 0.0);
    // Identity and kind carried through.
    CHECK(after.id == 7);
    CHECK(after.kind == ActorKind::Pedestrian);
}

TEST_CASE("actor without keys stays parked") {
    Actor base;
    base.x = 3;
    base.y = -2;
    Actor a = actor_at(ActorScript{base, {}}, 9.0);
    CHECK(a.x == 3.0);
    CHECK(a.y == -2.0);
    CHECK(a.vx == 0.0);
}

TEST_CASE("phase_at picks the last key at or before t") {
    TrafficLight light;
    light.schedule = {{0, LightPhase::Green}, {5, LightPhase::Yellow}, {7, LightPhase::Red}};
    CHECK(phase_at(light, 0.0) == LightPhase::Green);
    CHECK(phase_at(light, 4.999) == LightPhase::Green);
    CHECK(phase_at(light, 5.0) == LightPhase::Yellow);
    CHECK(phase_at(light, 6.0) == LightPhase::Yellow);
    CHECK(phase_at(light, 7.0) == LightPhase::Red);
    CHECK(phase_at(light, 1000.0) == LightPhase::Red);
}

TEST_CASE("world step advances clock exactly and replays scripts") {
    PhysicsParams phys;
    WorldState init;
    init.ego.v = 1.0;
    Actor base;
    base.id = 1;
    ActorScript script{base, {{0, 0, 0}, {1, 10, 0}}};
    World w(init, {script}, phys);
    for (int i = 0; i < 10; ++i) w.step({0, 0, 0});
    CHECK(w.state().step == 10);
    CHECK(w.state().time == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w.state().actors[0].x == doctest::Approx(5.0));
    // step*dt == time holds exactly at every tick.
    CHECK(w.state().time == static_cast<double>(w.state().step) * phys.dt);
}

TEST_CASE("identical command sequences replay bit-identically") {
    PhysicsParams phys;
    WorldState init;
    init.ego.v = 2.0;
    auto run = [&]() {
        World w(init, {}, phys);
        Rng rng(5);
        for (int i = 0; i < 200; ++i) {
            ControlCommand cmd{rng.uniform(-1, 1), rng.uniform(0, 1), 0.0};
            w.step(cmd);
        }
        return w.state();
    };
    WorldState a = run();
    WorldState b = run();
    CHECK(a.ego.x == b.ego.x);
    CHECK(a.ego.y == b.ego.y);
    CHECK(a.ego.yaw == b.ego.yaw);
    CHECK(a.ego.v == b.ego.v);
}

TEST_CASE("enum round trips") {
    CHECK(actor_kind_from_string(to_string(ActorKind::Vehicle)) == ActorKind::Vehicle);
    CHECK(actor_kind_from_string(to_string(ActorKind::Pedestrian)) == ActorKind::Pedestrian);
    CHECK(actor_kind_from_string(to_string(ActorKind::Static)) == ActorKind::Static);
    CHECK(light_phase_from_string(to_string(LightPhase::Red)) == LightPhase::Red);
    CHECK(light_phase_from_string(to_string(LightPhase::Yellow)) == LightPhase::Yellow);
    CHECK(light_phase_from_string(to_string(LightPhase::Green)) == LightPhase::Green);
    CHECK_THROWS(actor_kind_from_string("robot"));
    CHECK_THROWS(light_phase_from_string("blue"));
}

}  // TEST_SUITE
