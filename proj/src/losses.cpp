#include "evdrive/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace evdrive {

double waypoint_loss(const std::vector<Vec2>& pred, const std::vector<Vec2>& gt) {
    if (pred.size() != gt.size()) throw std::invalid_argument("waypoint counts differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        sum += std::abs(pred[i].x - gt[i].x) + std::abs(pred[i].y - gt[i].y);
    return sum;
}

namespace {

void check_maps(const DensityMap& pred, const DensityMap& gt) {
    if (pred.size() != gt.size()) throw std::invalid_argument("density map sizes differ");
    for (int r = 0; r < gt.size(); ++r)
        for (int c = 0; c < gt.size(); ++c) {
            const double p = gt.at(r, c, 0);
            if (p != 0.0 && p != 1.0)
                throw std::invalid_argument("ground-truth probability channel must be 0 or 1");
        }
}

}  // namespace

double prob_loss_balanced(const DensityMap& pred, const DensityMap& gt) {
    check_maps(pred, gt);
    double sum_neg = 0.0, sum_pos = 0.0;
    long long n_neg = 0, n_pos = 0;
    for (int r = 0; r < gt.size(); ++r) {
        for (int c = 0; c < gt.size(); ++c) {
            const double err = std::abs(gt.at(r, c, 0) - pred.at(r, c, 0));
            if (gt.at(r, c, 0) == 0.0) {
                sum_neg += err;
                ++n_neg;
            } else {
                sum_pos += err;
                ++n_pos;
            }
        }
    }
    const double l0 = n_neg > 0 ? sum_neg / n_neg : 0.0;
    const double l1 = n_pos > 0 ? sum_pos / n_pos : 0.0;
    return 0.5 * (l0 + l1);
}

double meta_loss(const DensityMap& pred, const DensityMap& gt) {
    check_maps(pred, gt);
    double sum = 0.0;
    long long n_pos = 0;
    for (int r = 0; r < gt.size(); ++r) {
        for (int c = 0; c < gt.size(); ++c) {
            if (gt.at(r, c, 0) != 1.0) continue;
            ++n_pos;
            for (int k = 1; k < DensityMap::kChannels; ++k)
                sum += std::abs(gt.at(r, c, k) - pred.at(r, c, k));
        }
    }
    return n_pos > 0 ? sum / n_pos : 0.0;
}

namespace {

double bce(double p, bool y) {
    const double q = std::min(1.0 - 1e-7, std::max(1e-7, p));
    return y ? -std::log(q) : -std::log(1.0 - q);
}

}  // namespace

double traffic_info_loss(const TrafficInfoPred& pred, const TrafficInfoTruth& gt,
                         const LossWeights& w) {
    return w.lambda_l * bce(pred.tl, gt.tl) + w.lambda_s * bce(pred.stop, gt.stop) +
           w.lambda_j * bce(pred.junction, gt.junction);
}

double total_loss(double l_pt, double l_map, double l_tf, const LossWeights& w) {
    return w.lambda_pt * l_pt + w.lambda_map * l_map + w.lambda_tf * l_tf;
}

}  // namespace evdrive
