#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace evdrive {

struct Vec2 {
    double x{0.0};
    double y{0.0};

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Shortest signed angle, normalized to (-pi, pi].
double wrap_angle(double theta);

// Rotate a vector by angle (counter-clockwise).
Vec2 rotate(const Vec2& v, double angle);

// World point -> frame of a pose at `origin` with heading `yaw`.
Vec2 world_to_frame(const Vec2& p, const Vec2& origin, double yaw);
// Frame point -> world.
Vec2 frame_to_world(const Vec2& p, const Vec2& origin, double yaw);

// Oriented box: center, heading, half extents (half_w lateral, half_l longitudinal).
struct Obb {
    Vec2 center;
    double yaw{0.0};
    double half_w{0.0};
    double half_l{0.0};
};

// Corner points in world coordinates, counter-clockwise from front-left.
std::array<Vec2, 4> obb_corners(const Obb& box);

// Separating-axis overlap test for two oriented boxes.
bool obb_overlap(const Obb& a, const Obb& b);

// Minimum distance between two oriented boxes; 0 when they overlap.
double obb_clearance(const Obb& a, const Obb& b);

// Euclidean distance from a point to the box boundary; 0 if inside.
double point_obb_distance(const Vec2& p, const Obb& box);

// Even-odd test; boundary points count as inside.
bool polygon_contains(const std::vector<Vec2>& poly, const Vec2& p);

// Piecewise-linear path queries used by routes and plans.
struct Polyline {
    std::vector<Vec2> points;

    double length() const;
    // Point at arc length s, clamped to [0, length].
    Vec2 point_at(double s) const;
    // Arc-length projection of p onto the polyline plus unsigned lateral offset.
    struct Projection {
        double s{0.0};
        double lateral{0.0};
    };
    Projection project(const Vec2& p) const;
    // Tangent heading at arc length s.
    double heading_at(double s) const;
};

}  // namespace evdrive
