#include "evdrive/config.hpp"

#include <cstdlib>
#include <functional>
#include <map>

#include "evdrive/toml_lite.hpp"

namespace evdrive {

namespace {

// Maps "section.key" onto the config field it controls.
std::map<std::string, std::function<void(Config&, double)>> number_setters() {
    return {
        {"physics.dt", [](Config& c, double v) { c.physics.dt = v; }},
        {"physics.wheelbase", [](Config& c, double v) { c.physics.wheelbase = v; }},
        {"physics.a_max", [](Config& c, double v) { c.physics.a_max = v; }},
        {"physics.b_max", [](Config& c, double v) { c.physics.b_max = v; }},
        {"physics.steer_max", [](Config& c, double v) { c.physics.steer_max = v; }},
        {"physics.c_drag", [](Config& c, double v) { c.physics.c_drag = v; }},
        {"physics.ego_length", [](Config& c, double v) { c.physics.ego_length = v; }},
        {"physics.ego_width", [](Config& c, double v) { c.physics.ego_width = v; }},
        {"control.wp_near", [](Config& c, double v) { c.control.wp_near = v; }},
        {"control.wp_far", [](Config& c, double v) { c.control.wp_far = v; }},
        {"control.lat_kp", [](Config& c, double v) { c.control.lat_kp = v; }},
        {"control.lat_ki", [](Config& c, double v) { c.control.lat_ki = v; }},
        {"control.lat_kd", [](Config& c, double v) { c.control.lat_kd = v; }},
        {"control.lon_kp", [](Config& c, double v) { c.control.lon_kp = v; }},
        {"control.lon_ki", [](Config& c, double v) { c.control.lon_ki = v; }},
        {"control.lon_kd", [](Config& c, double v) { c.control.lon_kd = v; }},
        {"control.i_clamp", [](Config& c, double v) { c.control.i_clamp = v; }},
        {"safety.v_max", [](Config& c, double v) { c.safety.v_max = v; }},
        {"safety.clear_buffer", [](Config& c, double v) { c.safety.clear_buffer = v; }},
        {"safety.speed_buffer", [](Config& c, double v) { c.safety.speed_buffer = v; }},
        {"safety.inflate_margin", [](Config& c, double v) { c.safety.inflate_margin = v; }},
        {"safety.d_free", [](Config& c, double v) { c.safety.d_free = v; }},
        {"safety.red_conf", [](Config& c, double v) { c.safety.red_conf = v; }},
        {"safety.n_confirm", [](Config& c, double v) { c.safety.n_confirm = static_cast<int>(v); }},
        {"safety.max_stop_ticks",
         [](Config& c, double v) { c.safety.max_stop_ticks = static_cast<int>(v); }},
        {"safety.junction_radius", [](Config& c, double v) { c.safety.junction_radius = v; }},
        {"safety.junction_passed", [](Config& c, double v) { c.safety.junction_passed = v; }},
        {"tracking.gate", [](Config& c, double v) { c.tracking.gate = v; }},
        {"tracking.t_drop", [](Config& c, double v) { c.tracking.t_drop = static_cast<int>(v); }},
        {"tracking.alpha", [](Config& c, double v) { c.tracking.alpha = v; }},
        {"events.threshold", [](Config& c, double v) { c.events.threshold = v; }},
        {"events.width", [](Config& c, double v) { c.events.width = static_cast<int>(v); }},
        {"events.height", [](Config& c, double v) { c.events.height = static_cast<int>(v); }},
        {"loss.lambda_wp", [](Config& c, double v) { c.loss.lambda_wp = v; }},
        {"loss.lambda_map", [](Config& c, double v) { c.loss.lambda_map = v; }},
        {"loss.lambda_tf", [](Config& c, double v) { c.loss.lambda_tf = v; }},
        {"sim.timeout", [](Config& c, double v) { c.sim.timeout = v; }},
        {"sim.goal_radius", [](Config& c, double v) { c.sim.goal_radius = v; }},
    };
}

}  // namespace

void apply_config_overrides(Config& cfg, const std::string& section, const toml::Table& table) {
    static const auto setters = number_setters();
    for (const auto& [key, value] : table.entries) {
        const std::string full = section.empty() ? key : section + "." + key;
        auto it = setters.find(full);
        if (it == setters.end()) throw toml::ParseError("unknown config key: " + full);
        it->second(cfg, value.as_number());
    }
}

Config load_config(const std::string& path) {
    Config cfg;
    if (path.empty()) return cfg;

    const toml::Document doc = toml::parse_file(path);
    apply_config_overrides(cfg, "", doc.root);
    for (const auto& [name, table] : doc.tables) apply_config_overrides(cfg, name, table);
    if (!doc.lists.empty())
        throw toml::ParseError("config files do not take [[list]] tables");
    return cfg;
}

std::string resolve_config_path(const std::string& cli_path) {
    if (!cli_path.empty()) return cli_path;
    const char* env = std::getenv("EVDRIVE_CONFIG");
    return env ? std::string(env) : std::string();
}

}  // namespace evdrive
