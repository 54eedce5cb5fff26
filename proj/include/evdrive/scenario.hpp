#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "evdrive/config.hpp"
#include "evdrive/world.hpp"

namespace evdrive {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything needed to start a run: initial world, actor scripts, and any
// parameter overrides the file carried (already applied to the config).
struct Scenario {
    std::string name;
    EgoState ego;
    Route route;
    std::vector<ActorScript> scripts;
    std::vector<TrafficLight> lights;
    std::vector<Vec2> drivable;      // polygon; synthesized from the route if absent
    std::vector<Vec2> stop_signs;    // stop-marked line positions on the route
};

// Builds a corridor polygon around a route polyline (left edge out, right
// edge back) for the default drivable area.
std::vector<Vec2> corridor_polygon(const Route& route, double half_width);

// Named built-in scenarios: "a" (unprotected left turn through oncoming
// traffic), "b" (double-parked vehicle overtake), "c" (occluded jaywalker),
// "free" (empty straight road), "red_light" (permanently red signal).
Scenario make_scenario(const std::string& id);
std::vector<std::string> scenario_ids();

// Parses a scenario file. Sections [physics]/[control]/[safety] override the
// passed config; angles in files are degrees.
Scenario load_scenario_file(const std::string& path, Config& cfg);

// Initial world snapshot for a scenario.
WorldState initial_world(const Scenario& scenario);

}  // namespace evdrive
