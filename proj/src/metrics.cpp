#include "evdrive/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "json.hpp"

#include "evdrive/geometry.hpp"

namespace evdrive {

const char* to_string(InfractionType type) {
    switch (type) {
        case InfractionType::CollisionPedestrian: return "Collision (Pedestrian)";
        case InfractionType::CollisionVehicle: return "Collision (Vehicle)";
        case InfractionType::CollisionLayout: return "Collision (Layout)";
        case InfractionType::RedLight: return "Red Light Infraction";
        case InfractionType::StopSign: return "Stop Sign Infraction";
        case InfractionType::RouteDeviation: return "Route Deviation";
        case InfractionType::RouteTimeout: return "Route Timeout";
        case InfractionType::VehicleBlocked: return "Vehicle Blocked";
    }
    return "Unknown";
}

int InfractionLog::count(InfractionType type) const {
    return static_cast<int>(std::count_if(events.begin(), events.end(),
                                          [&](const InfractionEvent& e) { return e.type == type; }));
}

namespace {

InfractionType collision_type(ActorKind kind) {
    // Parked/static obstacles are scored as vehicle collisions.
    return kind == ActorKind::Pedestrian ? InfractionType::CollisionPedestrian
                                         : InfractionType::CollisionVehicle;
}

bool footprint_inside(const Obb& box, const std::vector<Vec2>& poly) {
    for (const Vec2& c : obb_corners(box))
        if (!polygon_contains(poly, c)) return false;
    return true;
}

}  // namespace

InfractionLog detect_infractions(const std::vector<WorldState>& trace,
                                 const std::vector<Vec2>& stop_signs,
                                 const PhysicsParams& phys, const ScoringParams& scoring) {
    if (trace.empty()) throw std::invalid_argument("detect_infractions: empty trace");
    InfractionLog log;
    const Polyline route = trace.front().route.polyline();

    std::vector<double> light_s(trace.front().lights.size());
    for (std::size_t i = 0; i < light_s.size(); ++i)
        light_s[i] = route.project(trace.front().lights[i].position).s;
    std::vector<double> sign_s(stop_signs.size());
    for (std::size_t i = 0; i < sign_s.size(); ++i) sign_s[i] = route.project(stop_signs[i]).s;

    std::map<int, bool> actor_overlap;
    bool deviating = false;
    bool off_layout = false;
    bool blocked_logged = false;
    double blocked_time = 0.0;
    double prev_s = route.project({trace.front().ego.x, trace.front().ego.y}).s;
    double prev_time = trace.front().time;

    for (std::size_t i = 0; i < trace.size(); ++i) {
        const WorldState& ws = trace[i];
        const Vec2 ego_pos{ws.ego.x, ws.ego.y};
        const Obb ego_box = ws.ego_footprint(phys);
        const double dt = i == 0 ? 0.0 : ws.time - prev_time;
        prev_time = ws.time;

        for (const Actor& actor : ws.actors) {
            const bool now = obb_overlap(ego_box, actor.footprint());
            bool& was = actor_overlap[actor.id];
            if (now && !was) log.events.push_back({ws.step, collision_type(actor.kind), ego_pos});
            was = now;
        }

        const Polyline::Projection proj = route.project(ego_pos);
        if (i > 0) {
            for (std::size_t li = 0; li < light_s.size(); ++li) {
                const TrafficLight& light = ws.lights[li];
                if (!light.affects_ego_lane) continue;
                if (prev_s < light_s[li] && light_s[li] <= proj.s && light.phase == LightPhase::Red)
                    log.events.push_back({ws.step, InfractionType::RedLight, ego_pos});
            }
            for (double ss : sign_s) {
                if (prev_s < ss && ss <= proj.s && ws.ego.v > 0.5)
                    log.events.push_back({ws.step, InfractionType::StopSign, ego_pos});
            }
        }
        prev_s = proj.s;

        const bool now_deviating = proj.lateral > scoring.deviation_limit;
        if (now_deviating && !deviating)
            log.events.push_back({ws.step, InfractionType::RouteDeviation, ego_pos});
        deviating = now_deviating;

        if (!ws.drivable.empty()) {
            const bool now_off = !footprint_inside(ego_box, ws.drivable);
            if (now_off && !off_layout)
                log.events.push_back({ws.step, InfractionType::CollisionLayout, ego_pos});
            off_layout = now_off;
        }

        if (ws.ego.v < scoring.blocked_speed) {
            blocked_time += dt;
            if (blocked_time > scoring.blocked_time && !blocked_logged) {
                log.events.push_back({ws.step, InfractionType::VehicleBlocked, ego_pos});
                blocked_logged = true;
            }
        } else {
            blocked_time = 0.0;
            blocked_logged = false;
        }
    }
    return log;
}

double penalty_coefficient(InfractionType type, const ScoringParams& scoring) {
    switch (type) {
        case InfractionType::CollisionPedestrian: return scoring.pen_pedestrian;
        case InfractionType::CollisionVehicle: return scoring.pen_vehicle;
        case InfractionType::CollisionLayout: return scoring.pen_layout;
        case InfractionType::RedLight: return scoring.pen_red_light;
        case InfractionType::StopSign: return scoring.pen_stop_sign;
        default: return 1.0;  // deviation/timeout/blocked end runs instead of scaling IS
    }
}

ScoreReport score(const InfractionLog& log, double route_completion_percent,
                  double distance_km, const ScoringParams& scoring) {
    ScoreReport report;
    report.route_completion = route_completion_percent;
    report.distance_km = distance_km;
    report.infraction_score = 1.0;
    for (const InfractionEvent& e : log.events) {
        report.counts[static_cast<int>(e.type)] += 1;
        report.infraction_score *= penalty_coefficient(e.type, scoring);
    }
    report.driving_score = report.route_completion * report.infraction_score;
    report.rates_valid = distance_km > 0.0;
    for (int t = 0; t < kInfractionTypeCount; ++t)
        report.rates_per_km[t] = report.rates_valid ? report.counts[t] / distance_km : 0.0;
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string report_csv(const ScoreReport& report, const ScoringParams& scoring) {
    std::string out = "metric,value\n";
    out += "Driving Score (DS)," + fmt(report.driving_score) + "\n";
    out += "Route Completion (RC)," + fmt(report.route_completion) + "\n";
    out += "Infraction Score (IS)," + fmt(report.infraction_score) + "\n";
    for (int t = 0; t < kInfractionTypeCount; ++t) {
        out += std::string(to_string(static_cast<InfractionType>(t))) + "," +
               fmt(report.rates_per_km[t]) + "\n";
    }
    out += "Distance (km)," + fmt(report.distance_km) + "\n";
    out += std::string("Rates Valid,") + (report.rates_valid ? "1" : "0") + "\n";
    for (int t = 0; t < kInfractionTypeCount; ++t) {
        const auto type = static_cast<InfractionType>(t);
        out += std::string("Penalty Coefficient: ") + to_string(type) + "," +
               fmt(penalty_coefficient(type, scoring)) + "\n";
    }
    return out;
}

std::string report_json(const ScoreReport& report, const ScoringParams& scoring) {
    nlohmann::json j;
    j["Driving Score (DS)"] = report.driving_score;
    j["Route Completion (RC)"] = report.route_completion;
    j["Infraction Score (IS)"] = report.infraction_score;
    nlohmann::json rates, counts, penalties;
    for (int t = 0; t < kInfractionTypeCount; ++t) {
        const auto type = static_cast<InfractionType>(t);
        rates[to_string(type)] = report.rates_per_km[t];
        counts[to_string(type)] = report.counts[t];
        penalties[to_string(type)] = penalty_coefficient(type, scoring);
    }
    j["rates_per_km"] = rates;
    j["counts"] = counts;
    j["penalty_coefficients"] = penalties;
    j["distance_km"] = report.distance_km;
    j["rates_valid"] = report.rates_valid;
    return j.dump(2) + "\n";
}

double driven_distance_km(const std::vector<WorldState>& trace) {
    double meters = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        meters += std::hypot(trace[i].ego.x - trace[i - 1].ego.x,
                             trace[i].ego.y - trace[i - 1].ego.y);
    }
    return meters / 1000.0;
}

}  // namespace evdrive
