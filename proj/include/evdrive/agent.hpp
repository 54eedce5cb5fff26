#pragma once

#include <cstdint>

#include "evdrive/config.hpp"
#include "evdrive/control.hpp"
#include "evdrive/losses.hpp"
#include "evdrive/perception.hpp"
#include "evdrive/rng.hpp"
#include "evdrive/safety.hpp"
#include "evdrive/tracking.hpp"
#include "evdrive/world.hpp"

namespace evdrive {

// Perception-quality readout for one tick: the corrupted channel scored
// against the clean oracle.
struct TickLosses {
    double waypoint = 0.0;
    double prob = 0.0;
    double meta = 0.0;
    double traffic = 0.0;
    double total = 0.0;
};

struct TraceRecord {
    std::int64_t tick = 0;
    EgoState ego;
    double theta_e = 0.0;
    double v_cmd = 0.0;    // clearance-limited speed command
    double v_target = 0.0; // min(curvature-shaped, clearance-limited)
    double d_safe = 0.0;
    ControlCommand command;
    FsmState fsm = FsmState::Driving;
    OverrideReason override_reason = OverrideReason::None;
    int detections = 0;
    int tracks = 0;
    TickLosses losses;
};

struct TickResult {
    ControlCommand command;
    TraceRecord record;
};

// The driving stack for one vehicle: oracle perception (optionally
// corrupted), nearest-neighbor tracking, waypoint PID control, and the
// safety gate, advanced in a fixed order each world tick.
class Agent {
public:
    Agent(const Config& config, std::uint64_t seed, const NoiseConfig& noise = {});

    TickResult tick(const WorldState& world);

    void reset(std::uint64_t seed);

    const Tracker& tracker() const { return tracker_; }
    const TrafficLightFsm& fsm() const { return fsm_; }
    const PerceptionOutput& last_perception() const { return last_; }

private:
    Config config_;
    NoiseConfig noise_;
    Rng rng_;
    Tracker tracker_;
    TrafficLightFsm fsm_;
    PidState lat_;
    PidState lon_;
    PerceptionOutput last_;
    std::int64_t ticks_ = 0;
};

}  // namespace evdrive
