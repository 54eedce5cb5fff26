#pragma once

#include <vector>

#include "evdrive/config.hpp"
#include "evdrive/density.hpp"

namespace evdrive {

struct TrackedObject {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;         // smoothed
    double vy = 0.0;         // smoothed
    double yaw = 0.0;        // smoothed, shortest-arc
    double w = 1.0;          // latest measured extents
    double l = 1.0;
    double confidence = 1.0;
    int age = 1;             // ticks since spawn
    int misses = 0;          // ticks since last match
};

struct Association {
    std::vector<std::pair<int, int>> matches;  // (track index, detection index)
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_detections;
};

// Greedy nearest-neighbor matching in ascending distance order, one-to-one,
// strict dist < gate. Ties break toward the lower detection index, then the
// lower track index, so results are order-independent.
Association associate(const std::vector<TrackedObject>& tracks,
                      const std::vector<Detection>& detections, double gate);

// Confidence-weighted velocity smoothing: v <- a*v_meas + (1-a)*v_prev with
// a = alpha * confidence. Yaw interpolates along the shortest arc; position
// and extents are overwritten by the measurement.
TrackedObject smooth_update(const TrackedObject& track, const Detection& measured,
                            double alpha);

// Owns the track list across ticks: match, smooth, spawn, coast, retire.
class Tracker {
public:
    explicit Tracker(const TrackingParams& params) : params_(params) {}

    const std::vector<TrackedObject>& tracks() const { return tracks_; }

    void update(const std::vector<Detection>& detections, double dt);

    void reset();

private:
    TrackingParams params_;
    std::vector<TrackedObject> tracks_;
    int next_id_ = 1;
};

}  // namespace evdrive
