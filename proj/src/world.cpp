#include "evdrive/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evdrive {

const char* to_string(ActorKind kind) {
    switch (kind) {
        case ActorKind::Vehicle: return "vehicle";
        case ActorKind::Pedestrian: return "pedestrian";
        case ActorKind::Static: return "static";
    }
    return "vehicle";
}

ActorKind actor_kind_from_string(const std::string& s) {
    if (s == "vehicle") return ActorKind::Vehicle;
    if (s == "pedestrian") return ActorKind::Pedestrian;
    if (s == "static") return ActorKind::Static;
    throw std::invalid_argument("unknown actor kind: " + s);
}

const char* to_string(LightPhase phase) {
    switch (phase) {
        case LightPhase::Red: return "red";
        case LightPhase::Yellow: return "yellow";
        case LightPhase::Green: return "green";
    }
    return "green";
}

LightPhase light_phase_from_string(const std::string& s) {
    if (s == "red") return LightPhase::Red;
    if (s == "yellow") return LightPhase::Yellow;
    if (s == "green") return LightPhase::Green;
    throw std::invalid_argument("unknown light phase: " + s);
}

LightPhase phase_at(const TrafficLight& light, double time) {
    LightPhase phase = light.phase;
    for (const PhaseKey& key : light.schedule) {
        if (key.t <= time) phase = key.phase;
    }
    return phase;
}

Actor actor_at(const ActorScript& script, double time) {
    Actor a = script.base;
    const auto& keys = script.keys;
    if (keys.empty()) return a;

    if (time <= keys.front().t) {
        a.x = keys.front().x;
        a.y = keys.front().y;
        a.vx = 0.0;
        a.vy = 0.0;
        return a;
    }
    if (time >= keys.back().t) {
        a.x = keys.back().x;
        a.y = keys.back().y;
        a.vx = 0.0;
        a.vy = 0.0;
        if (keys.size() >= 2) {
            const ScriptKey& p = keys[keys.size() - 2];
            const ScriptKey& q = keys.back();
            if (std::hypot(q.x - p.x, q.y - p.y) > 1e-9)
                a.yaw = std::atan2(q.y - p.y, q.x - p.x);
        }
        return a;
    }
    for (std::size_t i = 1; i < keys.size(); ++i) {
        if (time <= keys[i].t) {
            const ScriptKey& p = keys[i - 1];
            const ScriptKey& q = keys[i];
            const double span = q.t - p.t;
            const double u = span > 0.0 ? (time - p.t) / span : 1.0;
            a.x = p.x + u * (q.x - p.x);
            a.y = p.y + u * (q.y - p.y);
            a.vx = span > 0.0 ? (q.x - p.x) / span : 0.0;
            a.vy = span > 0.0 ? (q.y - p.y) / span : 0.0;
            if (std::hypot(q.x - p.x, q.y - p.y) > 1e-9)
                a.yaw = std::atan2(q.y - p.y, q.x - p.x);
            return a;
        }
    }
    return a;
}

EgoState step_kinematics(const EgoState& ego, const ControlCommand& cmd,
                         const PhysicsParams& phys, double dt) {
    if (!std::isfinite(cmd.steer) || !std::isfinite(cmd.throttle) || !std::isfinite(cmd.brake))
        throw std::invalid_argument("control command has non-finite fields");

    const double steer = std::clamp(cmd.steer, -1.0, 1.0);
    const double throttle = std::clamp(cmd.throttle, 0.0, 1.0);
    const double brake = std::clamp(cmd.brake, 0.0, 1.0);

    const double a = phys.a_max * throttle - phys.b_max * brake - phys.c_drag * ego.v;
    const double v_next = std::max(0.0, ego.v + a * dt);

    const double yaw_rate = (ego.v / phys.wheelbase) * std::tan(steer * phys.steer_max);
    const double yaw_mid = ego.yaw + 0.5 * yaw_rate * dt;

    EgoState next;
    next.x = ego.x + ego.v * std::cos(yaw_mid) * dt;
    next.y = ego.y + ego.v * std::sin(yaw_mid) * dt;
    next.yaw = wrap_angle(ego.yaw + yaw_rate * dt);
    next.v = v_next;
    return next;
}

World::World(WorldState initial, std::vector<ActorScript> scripts, PhysicsParams phys)
    : state_(std::move(initial)), scripts_(std::move(scripts)), phys_(phys) {
    state_.actors.clear();
    state_.actors.reserve(scripts_.size());
    for (const ActorScript& s : scripts_) state_.actors.push_back(actor_at(s, state_.time));
    for (TrafficLight& l : state_.lights) l.phase = phase_at(l, state_.time);
}

void World::step(const ControlCommand& cmd) {
    state_.ego = step_kinematics(state_.ego, cmd, phys_, phys_.dt);
    state_.step += 1;
    state_.time = static_cast<double>(state_.step) * phys_.dt;
    for (std::size_t i = 0; i < scripts_.size(); ++i)
        state_.actors[i] = actor_at(scripts_[i], state_.time);
    for (TrafficLight& l : state_.lights) l.phase = phase_at(l, state_.time);
}

}  // namespace evdrive
