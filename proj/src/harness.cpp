#include "evdrive/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "evdrive/geometry.hpp"

namespace evdrive {

const char* to_string(ExitReason r) {
    switch (r) {
        case ExitReason::ReachedGoal: return "reached_goal";
        case ExitReason::Collision: return "collision";
        case ExitReason::Timeout: return "timeout";
    }
    return "unknown";
}

int RunResult::exit_code() const {
    return exit == ExitReason::ReachedGoal && infractions.events.empty() ? 0 : 2;
}

std::string trace_to_jsonl(const std::vector<TraceRecord>& records) {
    std::string out;
    for (const TraceRecord& r : records) {
        nlohmann::ordered_json j;
        j["tick"] = r.tick;
        j["x"] = r.ego.x;
        j["y"] = r.ego.y;
        j["yaw"] = r.ego.yaw;
        j["v"] = r.ego.v;
        j["theta_e"] = r.theta_e;
        j["v_cmd"] = r.v_cmd;
        j["v_target"] = r.v_target;
        j["d_safe"] = r.d_safe;
        j["steer"] = r.command.steer;
        j["throttle"] = r.command.throttle;
        j["brake"] = r.command.brake;
        j["fsm"] = to_string(r.fsm);
        j["override"] = to_string(r.override_reason);
        j["detections"] = r.detections;
        j["tracks"] = r.tracks;
        j["loss_wp"] = r.losses.waypoint;
        j["loss_prob"] = r.losses.prob;
        j["loss_meta"] = r.losses.meta;
        j["loss_tf"] = r.losses.traffic;
        j["loss_total"] = r.losses.total;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<TickLosses> losses_from_jsonl(const std::string& jsonl) {
    std::vector<TickLosses> out;
    std::istringstream in(jsonl);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        TickLosses l;
        l.waypoint = j.at("loss_wp").get<double>();
        l.prob = j.at("loss_prob").get<double>();
        l.meta = j.at("loss_meta").get<double>();
        l.traffic = j.at("loss_tf").get<double>();
        l.total = j.at("loss_total").get<double>();
        out.push_back(l);
    }
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

}  // namespace

std::string perception_loss_csv(const std::vector<TickLosses>& losses) {
    TickLosses mean;
    for (const TickLosses& l : losses) {
        mean.waypoint += l.waypoint;
        mean.prob += l.prob;
        mean.meta += l.meta;
        mean.traffic += l.traffic;
        mean.total += l.total;
    }
    const double n = losses.empty() ? 1.0 : static_cast<double>(losses.size());
    std::string out = "loss,mean\n";
    out += "waypoint," + fmt(mean.waypoint / n) + "\n";
    out += "map_prob," + fmt(mean.prob / n) + "\n";
    out += "map_meta," + fmt(mean.meta / n) + "\n";
    out += "traffic_info," + fmt(mean.traffic / n) + "\n";
    out += "total," + fmt(mean.total / n) + "\n";
    return out;
}

RunResult run_scenario(const Scenario& scenario, const Config& config,
                       const RunOptions& options) {
    if (scenario.route.waypoints.size() < 2)
        throw std::invalid_argument("run_scenario: route needs at least two waypoints");

    World world(initial_world(scenario), scenario.scripts, config.physics);
    Agent agent(config, derive_seed(options.seed, 1), options.noise);

    RunResult res;
    const std::int64_t max_ticks =
        static_cast<std::int64_t>(std::llround(config.sim.timeout / config.physics.dt));
    const Vec2 goal = scenario.route.waypoints.back();

    for (;;) {
        const WorldState snapshot = world.state();
        res.states.push_back(snapshot);
        TickResult t = agent.tick(snapshot);
        res.records.push_back(t.record);
        world.step(t.command);

        const WorldState& ns = world.state();
        const Obb ego_box = ns.ego_footprint(config.physics);
        bool hit = false;
        for (const Actor& a : ns.actors) {
            if (obb_overlap(ego_box, a.footprint())) {
                hit = true;
                break;
            }
        }
        if (hit) {
            res.exit = ExitReason::Collision;
            break;
        }
        if (distance({ns.ego.x, ns.ego.y}, goal) <= config.sim.goal_radius) {
            res.exit = ExitReason::ReachedGoal;
            break;
        }
        if (ns.step >= max_ticks) {
            res.exit = ExitReason::Timeout;
            break;
        }
    }
    res.states.push_back(world.state());

    res.infractions =
        detect_infractions(res.states, scenario.stop_signs, config.physics, config.scoring);
    if (res.exit == ExitReason::Timeout) {
        const WorldState& last = res.states.back();
        res.infractions.events.push_back(
            {last.step, InfractionType::RouteTimeout, {last.ego.x, last.ego.y}});
    }

    double rc = 100.0;
    if (res.exit != ExitReason::ReachedGoal) {
        const Polyline line = scenario.route.polyline();
        const double len = line.length();
        const WorldState& last = res.states.back();
        const double s = line.project({last.ego.x, last.ego.y}).s;
        rc = len > 0.0 ? 100.0 * std::clamp(s / len, 0.0, 1.0) : 0.0;
    }
    res.report =
        score(res.infractions, rc, driven_distance_km(res.states), config.scoring);

    res.trace_text = trace_to_jsonl(res.records);
    if (!options.trace_path.empty()) write_file(options.trace_path, res.trace_text);
    if (!options.report_path.empty())
        write_file(options.report_path, report_csv(res.report, config.scoring));
    return res;
}

std::string run_batch(const std::vector<BatchJob>& jobs, const Config& base_config,
                      const NoiseConfig& noise, int parallelism) {
    if (jobs.empty()) throw std::invalid_argument("run_batch: no jobs");
    std::vector<std::string> rows(jobs.size());
    std::vector<ScoreReport> reports(jobs.size());
    std::vector<char> ok(jobs.size(), 0);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const BatchJob& job = jobs[i];
            std::string scenario_name = job.scenario_file;
            try {
                Config cfg = base_config;
                Scenario sc = load_scenario_file(job.scenario_file, cfg);
                scenario_name = sc.name;
                RunOptions opt;
                opt.seed = job.seed;
                opt.noise = noise;
                RunResult r = run_scenario(sc, cfg, opt);
                int infraction_count = static_cast<int>(r.infractions.events.size());
                rows[i] = scenario_name + "," + std::to_string(job.seed) + ",ok," +
                          to_string(r.exit) + "," + fmt(r.report.driving_score) + "," +
                          fmt(r.report.route_completion) + "," +
                          fmt(r.report.infraction_score) + "," +
                          std::to_string(infraction_count) + "," + fmt(r.report.distance_km);
                reports[i] = r.report;
                ok[i] = 1;
            } catch (const std::exception& e) {
                std::string msg = e.what();
                std::replace(msg.begin(), msg.end(), ',', ';');
                std::replace(msg.begin(), msg.end(), '\n', ' ');
                rows[i] = scenario_name + "," + std::to_string(job.seed) + ",error," + msg +
                          ",0,0,0,0,0";
            }
        }
    };

    const int n_threads = std::clamp(parallelism, 1, 64);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    std::string csv =
        "scenario,seed,status,exit,driving_score,route_completion,infraction_score,"
        "infractions,distance_km\n";
    for (const std::string& row : rows) csv += row + "\n";

    int n_ok = 0;
    double ds = 0.0, rc = 0.0, is = 0.0, dist = 0.0;
    int infr = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!ok[i]) continue;
        ++n_ok;
        ds += reports[i].driving_score;
        rc += reports[i].route_completion;
        is += reports[i].infraction_score;
        dist += reports[i].distance_km;
        for (int t = 0; t < kInfractionTypeCount; ++t) infr += reports[i].counts[t];
    }
    if (n_ok > 0) {
        const double n = n_ok;
        csv += "mean,,ok,," + fmt(ds / n) + "," + fmt(rc / n) + "," + fmt(is / n) + "," +
               fmt(infr / n) + "," + fmt(dist / n) + "\n";
    }
    return csv;
}

}  // namespace evdrive
