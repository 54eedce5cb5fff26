#pragma once

#include <vector>

#include "evdrive/config.hpp"
#include "evdrive/density.hpp"
#include "evdrive/rng.hpp"
#include "evdrive/world.hpp"

namespace evdrive {

struct TrafficLightBelief {
    double p_red = 0.0;
    double p_yellow = 0.0;
    double p_green = 1.0;
};

struct PerceptionOutput {
    DensityMap density;
    TrafficLightBelief tl;
    double junction_prob = 0.0;
    std::vector<Vec2> waypoints;       // ego frame, kWaypointCount points
    std::vector<Detection> detections; // ego frame, consistent with density
};

inline constexpr int kWaypointCount = 10;

struct NoiseConfig {
    double p_miss = 0.0;       // per-detection drop probability
    double p_fp = 0.0;         // per-frame false-positive probability
    double jitter_sigma = 0.0; // gaussian sigma on position/velocity/box
    double conf_lo = 1.0;      // confidence sampled uniformly in [lo, hi]
    double conf_hi = 1.0;
    double tl_flip = 0.0;      // traffic-light belief flip probability
};

// Fills the grid from ground truth: each in-window actor sets its containing
// cell's probability to 1 and the meta channels from its true state.
DensityMap ground_truth_density(const WorldState& world, int r);

// Ground-truth detections in the ego frame (one per in-window actor),
// confidence 1. Matches peak extraction of ground_truth_density up to cell
// quantization.
std::vector<Detection> ground_truth_detections(const WorldState& world, int r);

// L points sampled along the route ahead of the ego at fixed arc spacing,
// in the ego frame; the route end pads with its final point.
std::vector<Vec2> oracle_waypoints(const WorldState& world, int count, double spacing);

// Softened one-hot belief over the phase of the next affecting light: the
// true phase gets 1 - flip_prob, the rest split evenly. With probability
// flip_prob the top phase is swapped with a random other one. No affecting
// light reads as green.
TrafficLightBelief tl_belief(const WorldState& world, double flip_prob, Rng& rng);

// Arc-length position of the next traffic light that affects the ego lane,
// or a negative value when none remains ahead. "Ahead" allows for lights
// passed by less than `passed_margin` meters.
double next_affecting_light_s(const WorldState& world, double passed_margin);

// Full oracle output for one tick.
PerceptionOutput perceive(const WorldState& world, const PerceptionParams& params,
                          const SafetyParams& safety, double tl_flip, Rng& rng);

// Applies detector imperfections: jitter, misses, false positives, sampled
// confidences. The density map is rebuilt from the corrupted detections so
// the two stay consistent. Zero noise is the identity.
PerceptionOutput corrupt(const PerceptionOutput& clean, const NoiseConfig& noise, int r,
                         Rng& rng);

}  // namespace evdrive
