#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evdrive/agent.hpp"
#include "evdrive/config.hpp"
#include "evdrive/metrics.hpp"
#include "evdrive/scenario.hpp"
#include "evdrive/world.hpp"

namespace evdrive {

enum class ExitReason { ReachedGoal, Collision, Timeout };

const char* to_string(ExitReason r);

struct RunOptions {
    std::uint64_t seed = 1;
    NoiseConfig noise;
    std::string trace_path;   // empty: keep the trace in memory only
    std::string report_path;  // empty: don't write the CSV report
};

struct RunResult {
    ExitReason exit = ExitReason::Timeout;
    ScoreReport report;
    InfractionLog infractions;
    std::vector<TraceRecord> records;
    std::vector<WorldState> states;  // one per record, plus the final state
    std::string trace_text;          // JSONL, identical to the file content

    // 0 = clean completion, 2 = infraction or premature termination.
    int exit_code() const;
};

// Closed-loop run: the agent reads each state, the world integrates its
// command, until the route end is within the goal radius, the ego collides,
// or the simulated clock passes the timeout.
RunResult run_scenario(const Scenario& scenario, const Config& config,
                       const RunOptions& options);

// One line per tick, stable key order, locale-free number formatting.
std::string trace_to_jsonl(const std::vector<TraceRecord>& records);
std::vector<TickLosses> losses_from_jsonl(const std::string& jsonl);

// Mean per-tick perception losses, as a small two-column CSV.
std::string perception_loss_csv(const std::vector<TickLosses>& losses);

struct BatchJob {
    std::string scenario_file;  // path to a scenario file
    std::uint64_t seed = 1;
};

// Runs every job independently (scenario files reloaded per job so file
// overrides stay isolated) and returns one CSV row per job plus a mean row.
// Output is identical for any parallelism level; failures become error rows.
std::string run_batch(const std::vector<BatchJob>& jobs, const Config& base_config,
                      const NoiseConfig& noise, int parallelism);

}  // namespace evdrive
