#pragma once

#include <vector>

#include "evdrive/config.hpp"
#include "evdrive/density.hpp"
#include "evdrive/geometry.hpp"

namespace evdrive {

struct LossWeights {
    double lambda_pt = 0.2;   // waypoint term
    double lambda_map = 0.5;  // density map term (prob + meta)
    double lambda_tf = 0.1;   // traffic info term
    double lambda_l = 1.0 / 3.0;   // traffic light sub-term
    double lambda_s = 1.0 / 3.0;   // stop sign sub-term
    double lambda_j = 1.0 / 3.0;   // junction sub-term
};

// Sum of L1 distances between corresponding waypoints.
double waypoint_loss(const std::vector<Vec2>& pred, const std::vector<Vec2>& gt);

// Class-balanced L1 on the probability channel: mean over true-negative
// cells and mean over true-positive cells, averaged. The ground-truth
// probability channel must be exactly 0 or 1; an empty class contributes 0.
double prob_loss_balanced(const DensityMap& pred, const DensityMap& gt);

// Mean (over ground-truth-positive cells) of the summed L1 error across the
// six meta channels. 0 when there are no positive cells.
double meta_loss(const DensityMap& pred, const DensityMap& gt);

struct TrafficInfoPred {
    double tl = 0.0;        // probability the light ahead demands a stop
    double stop = 0.0;      // probability of an active stop sign
    double junction = 0.0;  // probability of being at a junction
};

struct TrafficInfoTruth {
    bool tl = false;
    bool stop = false;
    bool junction = false;
};

// Weighted binary cross-entropy over the three flags, probabilities clamped
// to [1e-7, 1 - 1e-7].
double traffic_info_loss(const TrafficInfoPred& pred, const TrafficInfoTruth& gt,
                         const LossWeights& w);

// Outer combination: lambda_pt * pt + lambda_map * map + lambda_tf * tf,
// where the map part is (prob loss + meta loss).
double total_loss(double l_pt, double l_map, double l_tf, const LossWeights& w);

}  // namespace evdrive
