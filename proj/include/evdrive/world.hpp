#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evdrive/config.hpp"
#include "evdrive/geometry.hpp"

namespace evdrive {

enum class ActorKind { Vehicle, Pedestrian, Static };

const char* to_string(ActorKind kind);
ActorKind actor_kind_from_string(const std::string& s);

struct Actor {
    int id = 0;
    ActorKind kind = ActorKind::Vehicle;
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double half_w = 1.0;
    double half_l = 2.25;

    Obb footprint() const { return Obb{{x, y}, yaw, half_w, half_l}; }
    double speed() const { return std::hypot(vx, vy); }
};

enum class LightPhase { Red, Yellow, Green };

const char* to_string(LightPhase phase);
LightPhase light_phase_from_string(const std::string& s);

struct PhaseKey {
    double t = 0.0;
    LightPhase phase = LightPhase::Green;
};

struct TrafficLight {
    Vec2 position;
    LightPhase phase = LightPhase::Green;
    bool affects_ego_lane = true;
    std::vector<PhaseKey> schedule;  // phase = last key with key.t <= time
};

LightPhase phase_at(const TrafficLight& light, double time);

struct EgoState {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;
    double v = 0.0;  // scalar forward speed, never negative
};

struct Route {
    std::vector<Vec2> waypoints;

    Polyline polyline() const { return Polyline{waypoints}; }
};

struct ControlCommand {
    double steer = 0.0;     // [-1, 1], scaled by steer_max
    double throttle = 0.0;  // [0, 1]
    double brake = 0.0;     // [0, 1]
};

// Position keyframe of an actor script; velocity between keyframes is the
// constant segment velocity, zero before the first and after the last key.
struct ScriptKey {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
};

struct ActorScript {
    Actor base;                   // id, kind, extents, initial pose
    std::vector<ScriptKey> keys;  // strictly increasing t; may be empty
};

// Samples the script at an absolute time. Pure function of (script, time).
Actor actor_at(const ActorScript& script, double time);

struct WorldState {
    double time = 0.0;
    std::int64_t step = 0;
    EgoState ego;
    std::vector<Actor> actors;
    std::vector<TrafficLight> lights;
    Route route;
    std::vector<Vec2> drivable;  // polygon; empty means unbounded

    Obb ego_footprint(const PhysicsParams& phys) const {
        return Obb{{ego.x, ego.y}, ego.yaw, phys.ego_width / 2.0, phys.ego_length / 2.0};
    }
};

// One explicit-Euler step of the kinematic bicycle model. Speed and yaw rate
// use the pre-update speed; position advances along the midpoint heading.
// Non-finite command fields are rejected; out-of-range ones are clamped.
EgoState step_kinematics(const EgoState& ego, const ControlCommand& cmd,
                         const PhysicsParams& phys, double dt);

// Owns the scripts and advances a WorldState snapshot at the fixed tick rate.
class World {
public:
    World(WorldState initial, std::vector<ActorScript> scripts, PhysicsParams phys);

    const WorldState& state() const { return state_; }
    const PhysicsParams& physics() const { return phys_; }
    const std::vector<ActorScript>& scripts() const { return scripts_; }

    void step(const ControlCommand& cmd);

private:
    WorldState state_;
    std::vector<ActorScript> scripts_;
    PhysicsParams phys_;
};

}  // namespace evdrive
