#include "evdrive/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evdrive {

namespace {

constexpr double kBackground = 0.15;
constexpr double kEgoShade = 0.4;
constexpr double kStaticShade = 0.6;
constexpr double kVehicleShade = 0.85;
constexpr double kPedestrianShade = 1.0;

double shade_for(ActorKind kind) {
    switch (kind) {
        case ActorKind::Vehicle: return kVehicleShade;
        case ActorKind::Pedestrian: return kPedestrianShade;
        case ActorKind::Static: return kStaticShade;
    }
    return kVehicleShade;
}

// Shade of the world point: last-drawn-wins is replaced by a fixed priority
// (ego under actors) so the image is order-independent.
double sample_world(const WorldState& world, const PhysicsParams& phys, const Vec2& p) {
    double shade = kBackground;
    const Obb ego = world.ego_footprint(phys);
    if (point_obb_distance(p, ego) == 0.0) shade = kEgoShade;
    for (const Actor& a : world.actors) {
        if (point_obb_distance(p, a.footprint()) == 0.0) shade = std::max(shade, shade_for(a.kind));
    }
    return shade;
}

void validate(const CameraConfig& camera) {
    if (camera.span <= 0.0) throw std::invalid_argument("camera span must be positive");
    if (camera.width <= 0 || camera.height <= 0 || camera.width > 1024 || camera.height > 1024)
        throw std::invalid_argument("camera resolution out of range");
}

IntensityFrame make_frame(const WorldState& world, const CameraConfig& camera) {
    IntensityFrame f;
    f.width = camera.width;
    f.height = camera.height;
    f.t_us = static_cast<std::uint64_t>(std::llround(world.time * 1e6));
    f.data.assign(static_cast<std::size_t>(camera.width) * camera.height, kBackground);
    return f;
}

Vec2 pixel_center(const CameraConfig& camera, int x, int y) {
    const double ppm = camera.width / camera.span;
    const double wx = camera.center.x + (x + 0.5 - camera.width / 2.0) / ppm;
    const double wy = camera.center.y + (camera.height / 2.0 - (y + 0.5)) / ppm;
    return {wx, wy};
}

}  // namespace

IntensityFrame render_intensity(const WorldState& world, const CameraConfig& camera,
                                const PhysicsParams& phys) {
    validate(camera);
    IntensityFrame f = make_frame(world, camera);
#pragma omp parallel for
    for (int y = 0; y < camera.height; ++y) {
        for (int x = 0; x < camera.width; ++x) {
            f.data[static_cast<std::size_t>(y) * camera.width + x] =
                sample_world(world, phys, pixel_center(camera, x, y));
        }
    }
    return f;
}

CameraConfig ego_camera(const EgoState& ego, double span, int width, int height) {
    CameraConfig cam;
    // Look-ahead offset keeps most of the image in front of the vehicle.
    cam.center = Vec2{ego.x, ego.y} + rotate({span * 0.25, 0.0}, ego.yaw);
    cam.span = span;
    cam.width = width;
    cam.height = height;
    return cam;
}

}  // namespace evdrive
