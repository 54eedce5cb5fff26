#pragma once

#include <string>
#include <vector>

#include "evdrive/geometry.hpp"

namespace evdrive {

// Ego-frame object grid: covers [0, R) meters ahead and [-R/2, R/2) to the
// sides at 1 m per cell. Row index grows with forward distance, column index
// with leftward offset. Channels per cell:
//   0: existence probability in [0, 1]
//   1: dx, longitudinal offset from the cell center [m], |dx| <= 0.5
//   2: dy, lateral offset from the cell center [m], |dy| <= 0.5
//   3: box width [m]
//   4: box length [m]
//   5: heading relative to ego [rad]
//   6: speed [m/s]
class DensityMap {
public:
    static constexpr int kChannels = 7;

    DensityMap() = default;
    explicit DensityMap(int r) : r_(r), data_(static_cast<std::size_t>(r) * r * kChannels, 0.0) {}

    int size() const { return r_; }

    double& at(int row, int col, int channel) {
        return data_[(static_cast<std::size_t>(row) * r_ + col) * kChannels + channel];
    }
    double at(int row, int col, int channel) const {
        return data_[(static_cast<std::size_t>(row) * r_ + col) * kChannels + channel];
    }

    const std::vector<double>& raw() const { return data_; }
    std::vector<double>& raw() { return data_; }

    // Cell center in ego coordinates.
    Vec2 cell_center(int row, int col) const {
        return {row + 0.5, col + 0.5 - r_ / 2.0};
    }

    // True when (x, y) in ego frame falls inside the covered window.
    bool in_window(double x, double y) const {
        return x >= 0.0 && x < r_ && y >= -r_ / 2.0 && y < r_ / 2.0;
    }

    // Flat f32 binary dump plus a JSON sidecar describing the layout.
    void save(const std::string& path) const;
    static DensityMap load(const std::string& path);

private:
    int r_ = 0;
    std::vector<double> data_;
};

// One perceived object, in the same frame as the map it came from.
struct Detection {
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double w = 1.0;
    double l = 1.0;
    double yaw = 0.0;
    double confidence = 1.0;
};

// Cells with probability above the threshold become detections; offsets and
// meta channels reconstruct the object state.
std::vector<Detection> extract_detections(const DensityMap& map, double prob_threshold = 0.5);

}  // namespace evdrive
