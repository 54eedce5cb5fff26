#pragma once

#include <cstdint>
#include <vector>

#include "evdrive/world.hpp"

namespace evdrive {

// Top-down orthographic camera over the 2D world.
struct CameraConfig {
    Vec2 center;              // world point under the image center
    double span = 40.0;       // world meters covered by the image width
    int width = 128;
    int height = 128;
};

// Luminance grid in [floor, 1]; row 0 is the top of the image (+y up in
// world coordinates maps to up in the image).
struct IntensityFrame {
    int width = 0;
    int height = 0;
    std::uint64_t t_us = 0;
    std::vector<double> data;  // row-major, width*height

    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Flat-shaded raster: dark road background, brighter boxes per actor kind,
// ego mid-gray. Deterministic; parallel across rows.
IntensityFrame render_intensity(const WorldState& world, const CameraConfig& camera,
                                const PhysicsParams& phys);

// Camera following the ego with a fixed forward offset, so self-motion
// produces events.
CameraConfig ego_camera(const EgoState& ego, double span = 40.0, int width = 128,
                        int height = 128);

namespace serial {
// Single-threaded reference implementation used to validate the parallel
// renderer and as the benchmark baseline.
IntensityFrame render_intensity(const WorldState& world, const CameraConfig& camera,
                                const PhysicsParams& phys);
}  // namespace serial

}  // namespace evdrive
