#pragma once

#include <array>
#include <string>
#include <vector>

#include "evdrive/config.hpp"
#include "evdrive/perception.hpp"
#include "evdrive/tracking.hpp"
#include "evdrive/world.hpp"

namespace evdrive {

enum class FsmState { Driving, StoppedAtRed, ForcedCrossover };

const char* to_string(FsmState s);

struct TrafficLightFsm {
    FsmState state = FsmState::Driving;
    int red_counter = 0;
    int stop_ticks = 0;
};

// Advances the red-light state machine one tick and reports whether the
// vehicle must hold for the light. A sustained red/yellow belief near a
// junction arms the stop after n_confirm ticks; a stop held for more than
// max_stop_ticks ticks escapes via ForcedCrossover, which suppresses the
// stop until the junction is cleared. A confident green resets everything.
bool tl_update(TrafficLightFsm& fsm, const TrafficLightBelief& belief, bool near_junction,
               double v, const SafetyParams& params);

// Clearance along the planned path at fixed future horizons.
struct HorizonClearances {
    static constexpr std::array<double, 6> kHorizons = {0.0, 0.5, 0.75, 1.0, 1.5, 2.0};
    std::array<double, 6> d{};  // same order as kHorizons

    double at_time(double t) const;  // exact horizon lookup
    double min() const;
};

// For each horizon t: tracks move by constant velocity, their boxes inflate
// by half-extents + ego half-width + margin, the ego point advances along
// the plan by v_ego * t, and the clearance is the point-to-box distance
// (zero inside). No obstacle reads as d_free.
HorizonClearances project_clearances(const std::vector<TrackedObject>& tracks,
                                     const std::vector<Vec2>& plan, const EgoState& ego,
                                     double ego_half_width, const SafetyParams& params);

// Worst clearance across horizons minus the gate buffer; negative values
// signal intrusion and are reported as-is.
double safe_distance(const HorizonClearances& clearances, double d_buffer);

// Analytic speed selection from buffered clearances (callers subtract the speed
// buffer first): the tighter of a 0.5 s and a 1.0 s stopping envelope,
// capped at v_max, floored at 0, and forced to 0 when the immediate
// clearance is inside the emergency envelope max(3, v).
double desired_speed(const HorizonClearances& buffered, double v_current, double v_max);

// Applies max(0, d - buffer) to every horizon.
HorizonClearances apply_speed_buffer(const HorizonClearances& raw, double buffer);

enum class OverrideReason { None, RedLight, EmergencyBrake, Overshoot };

const char* to_string(OverrideReason r);

struct GateResult {
    ControlCommand cmd;
    OverrideReason reason = OverrideReason::None;
};

// Final command filter: red-light stops and zero speed commands brake fully
// (steering preserved); overshooting the commanded speed by more than
// 0.5 m/s cuts throttle and brakes proportionally; otherwise the PID
// command passes through. Never increases throttle.
GateResult safety_gate(const ControlCommand& pid_cmd, bool must_stop, double v_cmd,
                       double v_current);

}  // namespace evdrive
