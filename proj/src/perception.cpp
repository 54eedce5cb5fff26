#include "evdrive/perception.hpp"

#include <algorithm>
#include <cmath>

namespace evdrive {

namespace {

// Ego-frame pose of an actor plus the channel values it writes.
struct CellEntry {
    int row, col;
    double dx, dy, w, l, heading, speed;
};

bool locate(const DensityMap& map, const WorldState& world, const Actor& a, CellEntry& out) {
    const Vec2 p = world_to_frame({a.x, a.y}, {world.ego.x, world.ego.y}, world.ego.yaw);
    if (!map.in_window(p.x, p.y)) return false;
    out.row = static_cast<int>(std::floor(p.x));
    out.col = static_cast<int>(std::floor(p.y + map.size() / 2.0));
    const Vec2 center = map.cell_center(out.row, out.col);
    out.dx = p.x - center.x;
    out.dy = p.y - center.y;
    out.w = 2.0 * a.half_w;
    out.l = 2.0 * a.half_l;
    out.heading = wrap_angle(a.yaw - world.ego.yaw);
    out.speed = std::hypot(a.vx, a.vy);
    return true;
}

}  // namespace

DensityMap ground_truth_density(const WorldState& world, int r) {
    DensityMap map(r);
    for (const Actor& a : world.actors) {
        CellEntry e;
        if (!locate(map, world, a, e)) continue;
        map.at(e.row, e.col, 0) = 1.0;
        map.at(e.row, e.col, 1) = e.dx;
        map.at(e.row, e.col, 2) = e.dy;
        map.at(e.row, e.col, 3) = e.w;
        map.at(e.row, e.col, 4) = e.l;
        map.at(e.row, e.col, 5) = e.heading;
        map.at(e.row, e.col, 6) = e.speed;
    }
    return map;
}

std::vector<Detection> ground_truth_detections(const WorldState& world, int r) {
    DensityMap probe(r);
    std::vector<Detection> out;
    for (const Actor& a : world.actors) {
        const Vec2 p = world_to_frame({a.x, a.y}, {world.ego.x, world.ego.y}, world.ego.yaw);
        if (!probe.in_window(p.x, p.y)) continue;
        const Vec2 v = rotate({a.vx, a.vy}, -world.ego.yaw);
        Detection d;
        d.x = p.x;
        d.y = p.y;
        d.vx = v.x;
        d.vy = v.y;
        d.w = 2.0 * a.half_w;
        d.l = 2.0 * a.half_l;
        d.yaw = wrap_angle(a.yaw - world.ego.yaw);
        d.confidence = 1.0;
        out.push_back(d);
    }
    return out;
}

std::vector<Vec2> oracle_waypoints(const WorldState& world, int count, double spacing) {
    const Polyline line = world.route.polyline();
    const double s0 = line.project({world.ego.x, world.ego.y}).s;
    std::vector<Vec2> out;
    out.reserve(count);
    for (int i = 1; i <= count; ++i) {
        const Vec2 p = line.point_at(s0 + spacing * i);
        out.push_back(world_to_frame(p, {world.ego.x, world.ego.y}, world.ego.yaw));
    }
    return out;
}

double next_affecting_light_s(const WorldState& world, double passed_margin) {
    const Polyline line = world.route.polyline();
    const double s_ego = line.project({world.ego.x, world.ego.y}).s;
    double best = -1.0;
    for (const TrafficLight& l : world.lights) {
        if (!l.affects_ego_lane) continue;
        const double s = line.project(l.position).s;
        if (s < s_ego - passed_margin) continue;  // already well past it
        if (best < 0.0 || s < best) best = s;
    }
    return best;
}

TrafficLightBelief tl_belief(const WorldState& world, double flip_prob, Rng& rng) {
    LightPhase phase = LightPhase::Green;
    const Polyline line = world.route.polyline();
    const double s_ego = line.project({world.ego.x, world.ego.y}).s;
    double best = -1.0;
    for (const TrafficLight& l : world.lights) {
        if (!l.affects_ego_lane) continue;
        const double s = line.project(l.position).s;
        if (s < s_ego - 10.0) continue;
        if (best < 0.0 || s < best) {
            best = s;
            phase = l.phase;
        }
    }

    int top = phase == LightPhase::Red ? 0 : phase == LightPhase::Yellow ? 1 : 2;
    if (flip_prob > 0.0 && rng.uniform01() < flip_prob) {
        // Swap the winner with one of the other two phases.
        const int other = rng.uniform01() < 0.5 ? 1 : 2;
        top = (top + other) % 3;
    }
    double p[3] = {flip_prob / 2.0, flip_prob / 2.0, flip_prob / 2.0};
    p[top] = 1.0 - flip_prob;
    return TrafficLightBelief{p[0], p[1], p[2]};
}

PerceptionOutput perceive(const WorldState& world, const PerceptionParams& params,
                          const SafetyParams& safety, double tl_flip, Rng& rng) {
    PerceptionOutput out;
    out.density = ground_truth_density(world, params.grid);
    out.detections = ground_truth_detections(world, params.grid);
    out.tl = tl_belief(world, tl_flip, rng);
    out.waypoints = oracle_waypoints(world, kWaypointCount, 2.0);

    const Polyline line = world.route.polyline();
    const double s_ego = line.project({world.ego.x, world.ego.y}).s;
    const double s_light = next_affecting_light_s(world, safety.junction_passed);
    out.junction_prob =
        (s_light >= 0.0 && s_light - s_ego <= safety.junction_radius) ? 1.0 : 0.0;
    return out;
}

namespace {

bool is_identity(const NoiseConfig& n) {
    return n.p_miss == 0.0 && n.p_fp == 0.0 && n.jitter_sigma == 0.0 && n.conf_lo == 1.0 &&
           n.conf_hi == 1.0;
}

DensityMap density_from_detections(const std::vector<Detection>& dets, int r) {
    DensityMap map(r);
    for (const Detection& d : dets) {
        if (!map.in_window(d.x, d.y)) continue;
        const int row = static_cast<int>(std::floor(d.x));
        const int col = static_cast<int>(std::floor(d.y + r / 2.0));
        const Vec2 center = map.cell_center(row, col);
        map.at(row, col, 0) = std::clamp(d.confidence, 0.0, 1.0);
        map.at(row, col, 1) = std::clamp(d.x - center.x, -0.5, 0.5);
        map.at(row, col, 2) = std::clamp(d.y - center.y, -0.5, 0.5);
        map.at(row, col, 3) = d.w;
        map.at(row, col, 4) = d.l;
        map.at(row, col, 5) = d.yaw;
        map.at(row, col, 6) = std::hypot(d.vx, d.vy);
    }
    return map;
}

}  // namespace

PerceptionOutput corrupt(const PerceptionOutput& clean, const NoiseConfig& noise, int r,
                         Rng& rng) {
    if (is_identity(noise)) return clean;

    PerceptionOutput out = clean;
    out.detections.clear();
    for (const Detection& d : clean.detections) {
        if (rng.uniform01() < noise.p_miss) continue;
        Detection c = d;
        if (noise.jitter_sigma > 0.0) {
            c.x += rng.normal(0.0, noise.jitter_sigma);
            c.y += rng.normal(0.0, noise.jitter_sigma);
            c.vx += rng.normal(0.0, noise.jitter_sigma);
            c.vy += rng.normal(0.0, noise.jitter_sigma);
            c.w = std::max(0.1, c.w + rng.normal(0.0, noise.jitter_sigma * 0.5));
            c.l = std::max(0.1, c.l + rng.normal(0.0, noise.jitter_sigma * 0.5));
        }
        c.confidence = rng.uniform(noise.conf_lo, noise.conf_hi);
        out.detections.push_back(c);
    }
    if (rng.uniform01() < noise.p_fp) {
        // Phantom pedestrian-sized object, low confidence.
        Detection fp;
        fp.x = rng.uniform(0.0, r);
        fp.y = rng.uniform(-r / 2.0, r / 2.0);
        fp.w = 0.8;
        fp.l = 0.8;
        fp.confidence = rng.uniform(0.2, 0.5);
        out.detections.push_back(fp);
    }
    out.density = density_from_detections(out.detections, r);
    return out;
}

}  // namespace evdrive
