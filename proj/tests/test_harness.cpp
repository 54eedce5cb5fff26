#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "evdrive/harness.hpp"
#include "json.hpp"

using namespace evdrive;

namespace {

std::string scenario_path(const std::string& stem) {
    return std::string(EVDRIVE_SOURCE_DIR) + "/scenarios/" + stem + ".toml";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A short dead-end course: the goal sits far beyond what the clock allows.
Scenario stuck_scenario() {
    Scenario sc;
    sc.name = "stuck";
    sc.route.waypoints = {{0, 0}, {5000, 0}};
    return sc;
}

Scenario spawn_collision_scenario() {
    Scenario sc;
    sc.name = "boxed_in";
    sc.route.waypoints = {{0, 0}, {50, 0}};
    ActorScript blocker;
    blocker.base.id = 1;
    blocker.base.kind = ActorKind::Static;
    blocker.base.x = 3.0;  // overlaps the ego footprint from the first step
    sc.scripts = {blocker};
    return sc;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("exit reasons print stable identifiers") {
    CHECK(std::string(to_string(ExitReason::ReachedGoal)) == "reached_goal");
    CHECK(std::string(to_string(ExitReason::Collision)) == "collision");
    CHECK(std::string(to_string(ExitReason::Timeout)) == "timeout");
}

TEST_CASE("an empty road is driven to the goal without infractions") {
    Config cfg;
    Scenario sc = make_scenario("free");
    RunResult r = run_scenario(sc, cfg, RunOptions{});
    CHECK(r.exit == ExitReason::ReachedGoal);
    CHECK(r.infractions.events.empty());
    CHECK(r.report.route_completion == 100.0);
    CHECK(r.report.infraction_score == 1.0);
    CHECK(r.report.driving_score == 100.0);
    CHECK(r.exit_code() == 0);
    CHECK(r.records.size() > 0);
    CHECK(r.states.size() == r.records.size() + 1);
    // One JSONL line per record.
    std::size_t lines = 0;
    for (char c : r.trace_text)
        if (c == '\n') ++lines;
    CHECK(lines == r.records.size());
}

TEST_CASE("same options produce byte-identical traces") {
    Config cfg;
    for (const char* id : {"free", "c"}) {
        Scenario sc = make_scenario(id);
        RunOptions opt;
        opt.seed = 7;
        RunResult a = run_scenario(sc, cfg, opt);
        RunResult b = run_scenario(sc, cfg, opt);
        CHECK(a.trace_text == b.trace_text);
        CHECK(a.exit == b.exit);
        CHECK(a.report.driving_score == b.report.driving_score);
    }
    // Under measurement noise the seed still pins every byte.
    Scenario sc = make_scenario("c");
    RunOptions noisy;
    noisy.seed = 11;
    noisy.noise.jitter_sigma = 0.3;
    noisy.noise.conf_lo = 0.6;
    noisy.noise.conf_hi = 0.9;
    RunResult n1 = run_scenario(sc, cfg, noisy);
    RunResult n2 = run_scenario(sc, cfg, noisy);
    CHECK(n1.trace_text == n2.trace_text);
    RunOptions other = noisy;
    other.seed = 12;
    CHECK(run_scenario(sc, cfg, other).trace_text != n1.trace_text);
}

TEST_CASE("a spawn-blocking obstacle ends the run as a collision") {
    Config cfg;
    RunResult r = run_scenario(spawn_collision_scenario(), cfg, RunOptions{});
    CHECK(r.exit == ExitReason::Collision);
    CHECK(r.exit_code() == 2);
    CHECK(r.infractions.count(InfractionType::CollisionVehicle) == 1);
    CHECK(r.report.route_completion < 100.0);
    CHECK(r.report.infraction_score == 0.60);
}

TEST_CASE("running out of clock appends a timeout infraction") {
    Config cfg;
    cfg.sim.timeout = 1.0;  // 20 ticks
    RunResult r = run_scenario(stuck_scenario(), cfg, RunOptions{});
    CHECK(r.exit == ExitReason::Timeout);
    CHECK(r.exit_code() == 2);
    CHECK(r.infractions.count(InfractionType::RouteTimeout) == 1);
    CHECK(r.records.size() == 20);
    CHECK(r.report.route_completion < 100.0);
    // A timeout carries no multiplicative penalty; completion does the damage.
    CHECK(r.report.infraction_score == 1.0);
}

TEST_CASE("trace lines keep a stable key order and parse back exactly") {
    Config cfg;
    Scenario sc = make_scenario("free");
    RunResult r = run_scenario(sc, cfg, RunOptions{});
    std::istringstream in(r.trace_text);
    std::string line;
    REQUIRE(std::getline(in, line));
    const char* keys[] = {"tick",  "x",        "y",      "yaw",       "v",
                          "theta_e", "v_cmd",  "v_target", "d_safe",  "steer",
                          "throttle", "brake", "fsm",    "override",  "detections",
                          "tracks", "loss_wp", "loss_prob", "loss_meta", "loss_tf",
                          "loss_total"};
    std::size_t prev = 0;
    for (const char* key : keys) {
        const std::size_t pos = line.find(std::string("\"") + key + "\":");
        CHECK(pos != std::string::npos);
        CHECK(pos >= prev);
        prev = pos;
    }
    // Every line is valid JSON with the full key set.
    std::size_t checked = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        CHECK(j.size() == 21);
        ++checked;
    }
    CHECK(checked == r.records.size());

    // The loss columns round-trip bit-exactly through the text form.
    std::vector<TickLosses> losses = losses_from_jsonl(r.trace_text);
    REQUIRE(losses.size() == r.records.size());
    for (std::size_t i = 0; i < losses.size(); ++i) {
        CHECK(losses[i].waypoint == r.records[i].losses.waypoint);
        CHECK(losses[i].prob == r.records[i].losses.prob);
        CHECK(losses[i].meta == r.records[i].losses.meta);
        CHECK(losses[i].traffic == r.records[i].losses.traffic);
        CHECK(losses[i].total == r.records[i].losses.total);
    }
}

TEST_CASE("perception loss summary averages each channel") {
    TickLosses a;
    a.waypoint = 1.0;
    a.prob = 0.5;
    a.meta = 2.0;
    a.traffic = 0.25;
    a.total = 1.0;
    TickLosses b;
    b.waypoint = 3.0;
    b.prob = 1.5;
    b.meta = 0.0;
    b.traffic = 0.75;
    b.total = 2.0;
    const std::string csv = perception_loss_csv({a, b});
    CHECK(csv.rfind("loss,mean\n", 0) == 0);
    CHECK(csv.find("waypoint,2.000000\n") != std::string::npos);
    CHECK(csv.find("map_prob,1.000000\n") != std::string::npos);
    CHECK(csv.find("map_meta,1.000000\n") != std::string::npos);
    CHECK(csv.find("traffic_info,0.500000\n") != std::string::npos);
    CHECK(csv.find("total,1.500000\n") != std::string::npos);
    // No ticks at all still yields a well-formed zero table.
    const std::string empty = perception_loss_csv({});
    CHECK(empty.find("waypoint,0.000000\n") != std::string::npos);
}

TEST_CASE("trace and report paths write the same bytes the result carries") {
    Config cfg;
    Scenario sc = make_scenario("free");
    RunOptions opt;
    opt.trace_path = "/tmp/evdrive_test_trace.jsonl";
    opt.report_path = "/tmp/evdrive_test_report.csv";
    RunResult r = run_scenario(sc, cfg, opt);
    CHECK(slurp(opt.trace_path) == r.trace_text);
    CHECK(slurp(opt.report_path) == report_csv(r.report, cfg.scoring));
    std::remove(opt.trace_path.c_str());
    std::remove(opt.report_path.c_str());
}

TEST_CASE("batch output is byte-identical across parallelism levels") {
    Config cfg;
    std::vector<BatchJob> jobs = {{scenario_path("free"), 1},
                                  {scenario_path("c"), 2},
                                  {scenario_path("b"), 3}};
    const std::string serial_csv = run_batch(jobs, cfg, {}, 1);
    const std::string parallel_csv = run_batch(jobs, cfg, {}, 4);
    CHECK(serial_csv == parallel_csv);
    CHECK(serial_csv.rfind("scenario,seed,status,exit,driving_score,route_completion,"
                           "infraction_score,infractions,distance_km\n",
                           0) == 0);
    CHECK(serial_csv.find("free,1,ok,reached_goal,100.000000,100.000000,1.000000,0,") !=
          std::string::npos);
    CHECK(serial_csv.find("c,2,ok,reached_goal,") != std::string::npos);
    CHECK(serial_csv.find("b,3,ok,reached_goal,") != std::string::npos);
    CHECK(serial_csv.find("mean,,ok,,") != std::string::npos);
    // Repeat runs reproduce the same bytes.
    CHECK(run_batch(jobs, cfg, {}, 4) == parallel_csv);
}

TEST_CASE("batch keeps going past a broken job and marks it as an error") {
    Config cfg;
    std::vector<BatchJob> jobs = {{scenario_path("free"), 1},
                                  {"/nonexistent/road.toml", 2}};
    const std::string csv = run_batch(jobs, cfg, {}, 2);
    CHECK(csv.find("free,1,ok,") != std::string::npos);
    CHECK(csv.find(",2,error,") != std::string::npos);
    // The mean row only aggregates successful runs.
    CHECK(csv.find("mean,,ok,,100.000000,100.000000,1.000000,0") != std::string::npos);
    CHECK_THROWS_AS(run_batch({}, cfg, {}, 1), std::invalid_argument);
}

}  // TEST_SUITE
