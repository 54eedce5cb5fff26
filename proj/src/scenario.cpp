#include "evdrive/scenario.hpp"

#include <cmath>

#include "evdrive/toml_lite.hpp"

namespace evdrive {

namespace {

constexpr double kDegToRad = 3.141592653589793 / 180.0;

Vec2 vertex_normal(const std::vector<Vec2>& pts, std::size_t i) {
    auto seg_normal = [&](std::size_t a, std::size_t b) {
        const Vec2 d = pts[b] - pts[a];
        const double n = d.norm();
        return n > 0.0 ? Vec2{-d.y / n, d.x / n} : Vec2{0.0, 1.0};
    };
    if (i == 0) return seg_normal(0, 1);
    if (i + 1 == pts.size()) return seg_normal(pts.size() - 2, pts.size() - 1);
    const Vec2 a = seg_normal(i - 1, i);
    const Vec2 b = seg_normal(i, i + 1);
    Vec2 m = {a.x + b.x, a.y + b.y};
    const double n = m.norm();
    if (n < 1e-9) return b;  // 180-degree fold; fall back to the outgoing normal
    m = {m.x / n, m.y / n};
    // Miter scale so the offset edge stays parallel to the segments; capped
    // to avoid spikes at sharp corners.
    const double cos_half = std::max(0.5, m.dot(b));
    return {m.x / cos_half, m.y / cos_half};
}

}  // namespace

std::vector<Vec2> corridor_polygon(const Route& route, double half_width) {
    if (route.waypoints.size() < 2) throw ScenarioError("route needs at least 2 waypoints");
    // End caps: the road extends past the route endpoints so that a vehicle
    // whose center sits on an endpoint is still fully on the road.
    std::vector<Vec2> pts = route.waypoints;
    const double cap = half_width;
    auto unit = [](const Vec2& v) {
        const double n = v.norm();
        return n > 0.0 ? v * (1.0 / n) : Vec2{1.0, 0.0};
    };
    pts.front() = pts.front() - unit(pts[1] - pts[0]) * cap;
    pts.back() = pts.back() + unit(pts[pts.size() - 1] - pts[pts.size() - 2]) * cap;

    std::vector<Vec2> left, right;
    left.reserve(pts.size());
    right.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec2 n = vertex_normal(pts, i);
        left.push_back(pts[i] + n * half_width);
        right.push_back(pts[i] - n * half_width);
    }
    std::vector<Vec2> poly = std::move(left);
    poly.insert(poly.end(), right.rbegin(), right.rend());
    return poly;
}

std::vector<std::string> scenario_ids() { return {"a", "b", "c", "free", "red_light"}; }

Scenario make_scenario(const std::string& id) {
    Scenario s;
    s.name = id;
    auto vehicle = [](int aid, double x, double y, double yaw) {
        Actor a;
        a.id = aid;
        a.kind = ActorKind::Vehicle;
        a.x = x;
        a.y = y;
        a.yaw = yaw;
        a.half_w = 1.0;
        a.half_l = 2.25;
        return a;
    };

    if (id == "free") {
        // Empty straight road; nothing to react to.
        s.route.waypoints = {{0, 0}, {100, 0}};
    } else if (id == "a") {
        // Unprotected left turn across an oncoming lane at y=8; an oncoming
        // pair of vehicles makes the ego hold back before turning.
        s.route.waypoints = {{0, 0}, {30, 0}, {36, 0}, {39.5, 1}, {41.5, 3.5}, {42.5, 8}, {42.5, 60}};
        ActorScript v1{vehicle(1, 70, 8, 3.141592653589793), {{0, 70, 8}, {12, -26, 8}}};
        ActorScript v2{vehicle(2, 82, 8, 3.141592653589793), {{0, 82, 8}, {12.5, -18, 8}}};
        s.scripts = {v1, v2};
    } else if (id == "b") {
        // Double-parked vehicle 30 m ahead; the route swerves into the
        // opposing lane and back to overtake it. The bypass climbs early and
        // holds a long plateau so the vehicle's steering transient and the
        // look-ahead corner cutting both stay clear of the inflated
        // obstacle box.
        s.route.waypoints = {{0, 0},     {2, 0},    {4, 3},  {6, 6},  {8, 8.5}, {10, 10},
                             {40, 10},   {42, 8.5}, {44, 6}, {46, 3}, {48, 0},  {80, 0}};
        Actor blocker = vehicle(1, 30, 0, 0);
        blocker.kind = ActorKind::Static;
        s.scripts = {ActorScript{blocker, {}}};
    } else if (id == "c") {
        // Ego cruising at 30 km/h; a pedestrian steps out from behind a
        // parked truck and crosses the road.
        s.route.waypoints = {{0, 0}, {80, 0}};
        s.ego.v = 8.333;
        Actor truck;
        truck.id = 1;
        truck.kind = ActorKind::Static;
        truck.x = 25;
        truck.y = -8;
        truck.half_w = 1.25;
        truck.half_l = 4.0;
        Actor ped;
        ped.id = 2;
        ped.kind = ActorKind::Pedestrian;
        ped.x = 27;
        ped.y = -9;
        ped.half_w = 0.4;
        ped.half_l = 0.4;
        s.scripts = {ActorScript{truck, {}},
                     ActorScript{ped, {{0, 27, -9}, {14, 27, 12}}}};
    } else if (id == "red_light") {
        // Permanently red signal at x=30; exercises the stop + forced
        // crossover escape path.
        s.route.waypoints = {{0, 0}, {60, 0}};
        TrafficLight light;
        light.position = {30, 0};
        light.affects_ego_lane = true;
        light.schedule = {{0.0, LightPhase::Red}};
        s.lights = {light};
    } else {
        throw ScenarioError("unknown scenario id: " + id);
    }

    s.drivable = corridor_polygon(s.route, id == "a" ? 14.0 : 12.0);
    return s;
}

namespace {

std::vector<Vec2> parse_point_list(const toml::Value& v, const char* what) {
    std::vector<Vec2> out;
    for (const toml::Value& row : v.as_array()) {
        const auto& pair = row.as_array();
        if (pair.size() != 2) throw ScenarioError(std::string(what) + ": points need [x, y]");
        out.push_back({pair[0].as_number(), pair[1].as_number()});
    }
    return out;
}

Actor parse_actor(const toml::Table& t) {
    Actor a;
    a.id = static_cast<int>(t.at("id").as_number());
    a.kind = actor_kind_from_string(t.at("kind").as_string());
    a.x = t.at("x").as_number();
    a.y = t.at("y").as_number();
    a.yaw = t.number_or("yaw_deg", 0.0) * kDegToRad;
    a.half_w = t.at("w").as_number() / 2.0;
    a.half_l = t.at("l").as_number() / 2.0;
    if (a.half_w <= 0.0 || a.half_l <= 0.0) throw ScenarioError("actor extents must be positive");
    return a;
}

}  // namespace

Scenario load_scenario_file(const std::string& path, Config& cfg) {
    toml::Document doc;
    try {
        doc = toml::parse_file(path);
    } catch (const toml::ParseError& e) {
        throw ScenarioError("scenario " + path + ": " + e.what());
    }

    Scenario s;
    s.name = doc.root.string_or("name", path);

    if (!doc.tables.count("route")) throw ScenarioError("scenario needs a [route] section");
    s.route.waypoints = parse_point_list(doc.tables.at("route").at("waypoints"), "route");
    if (s.route.waypoints.size() < 2) throw ScenarioError("route needs at least 2 waypoints");
    for (std::size_t i = 1; i < s.route.waypoints.size(); ++i) {
        if (distance(s.route.waypoints[i - 1], s.route.waypoints[i]) < 1e-9)
            throw ScenarioError("route has identical consecutive waypoints");
    }

    if (doc.tables.count("ego")) {
        const toml::Table& ego = doc.tables.at("ego");
        s.ego.x = ego.number_or("x", 0.0);
        s.ego.y = ego.number_or("y", 0.0);
        s.ego.yaw = ego.number_or("yaw_deg", 0.0) * kDegToRad;
        s.ego.v = ego.number_or("v", 0.0);
        if (s.ego.v < 0.0) throw ScenarioError("ego speed must be non-negative");
    }

    static const std::vector<toml::Table> kNoTables;
    const auto& actor_tables = doc.lists.count("actors") ? doc.lists.at("actors") : kNoTables;
    for (const toml::Table& t : actor_tables) {
        ActorScript script;
        script.base = parse_actor(t);
        if (t.has("keys")) {
            double prev = -1.0;
            for (const toml::Value& row : t.at("keys").as_array()) {
                const auto& triple = row.as_array();
                if (triple.size() != 3) throw ScenarioError("script keys need [t, x, y]");
                ScriptKey k{triple[0].as_number(), triple[1].as_number(), triple[2].as_number()};
                if (k.t <= prev) throw ScenarioError("script key times must increase");
                prev = k.t;
                script.keys.push_back(k);
            }
        }
        if (script.base.kind == ActorKind::Static && !script.keys.empty())
            throw ScenarioError("static actors cannot have scripts");
        s.scripts.push_back(std::move(script));
    }
    for (std::size_t i = 0; i < s.scripts.size(); ++i)
        for (std::size_t j = i + 1; j < s.scripts.size(); ++j)
            if (s.scripts[i].base.id == s.scripts[j].base.id)
                throw ScenarioError("duplicate actor id");

    if (doc.lists.count("traffic_lights")) {
        for (const toml::Table& t : doc.lists.at("traffic_lights")) {
            TrafficLight light;
            light.position = {t.at("x").as_number(), t.at("y").as_number()};
            light.affects_ego_lane = !t.has("affects_ego_lane") || t.at("affects_ego_lane").as_bool();
            if (t.has("schedule")) {
                for (const toml::Value& row : t.at("schedule").as_array()) {
                    const auto& pair = row.as_array();
                    if (pair.size() != 2) throw ScenarioError("light schedule needs [t, phase]");
                    light.schedule.push_back(
                        {pair[0].as_number(), light_phase_from_string(pair[1].as_string())});
                }
            } else {
                light.schedule = {{0.0, light_phase_from_string(t.string_or("phase", "green"))}};
            }
            s.lights.push_back(std::move(light));
        }
    }

    if (doc.lists.count("stop_signs"))
        for (const toml::Table& t : doc.lists.at("stop_signs"))
            s.stop_signs.push_back({t.at("x").as_number(), t.at("y").as_number()});

    if (doc.tables.count("drivable")) {
        const toml::Table& d = doc.tables.at("drivable");
        if (d.has("polygon")) {
            s.drivable = parse_point_list(d.at("polygon"), "drivable");
            if (s.drivable.size() < 3) throw ScenarioError("drivable polygon needs 3+ points");
        } else {
            s.drivable = corridor_polygon(s.route, d.number_or("half_width", 12.0));
        }
    } else {
        s.drivable = corridor_polygon(s.route, 12.0);
    }

    for (const char* section : {"physics", "control", "safety"})
        if (doc.tables.count(section)) apply_config_overrides(cfg, section, doc.tables.at(section));

    return s;
}

WorldState initial_world(const Scenario& scenario) {
    WorldState w;
    w.ego = scenario.ego;
    w.route = scenario.route;
    w.lights = scenario.lights;
    w.drivable = scenario.drivable;
    for (const ActorScript& s : scenario.scripts) w.actors.push_back(actor_at(s, 0.0));
    for (TrafficLight& l : w.lights) l.phase = phase_at(l, 0.0);
    return w;
}

}  // namespace evdrive
