#include "evdrive/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace evdrive {

double wrap_angle(double theta) {
    double r = std::remainder(theta, 2.0 * std::numbers::pi);
    if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
    return r;
}

Vec2 rotate(const Vec2& v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 world_to_frame(const Vec2& p, const Vec2& origin, double yaw) {
    return rotate(p - origin, -yaw);
}

Vec2 frame_to_world(const Vec2& p, const Vec2& origin, double yaw) {
    return rotate(p, yaw) + origin;
}

namespace {

// Project both boxes onto `axis` and check for a gap.
bool separated_on_axis(const Vec2& axis, const Obb& a, const Obb& b) {
    const Vec2 ax_a = rotate({1, 0}, a.yaw);
    const Vec2 ay_a = rotate({0, 1}, a.yaw);
    const Vec2 ax_b = rotate({1, 0}, b.yaw);
    const Vec2 ay_b = rotate({0, 1}, b.yaw);

    const double ra = a.half_l * std::abs(axis.dot(ax_a)) + a.half_w * std::abs(axis.dot(ay_a));
    const double rb = b.half_l * std::abs(axis.dot(ax_b)) + b.half_w * std::abs(axis.dot(ay_b));
    const double d = std::abs((b.center - a.center).dot(axis));
    return d > ra + rb;
}

}  // namespace

std::array<Vec2, 4> obb_corners(const Obb& box) {
    const Vec2 fwd = rotate({1, 0}, box.yaw);
    const Vec2 left = rotate({0, 1}, box.yaw);
    const Vec2 dl = fwd * box.half_l;
    const Vec2 dw = left * box.half_w;
    return {box.center + dl + dw, box.center - dl + dw, box.center - dl - dw,
            box.center + dl - dw};
}

bool obb_overlap(const Obb& a, const Obb& b) {
    const Vec2 axes[4] = {
        rotate({1, 0}, a.yaw), rotate({0, 1}, a.yaw),
        rotate({1, 0}, b.yaw), rotate({0, 1}, b.yaw)};
    for (const Vec2& axis : axes) {
        if (separated_on_axis(axis, a, b)) return false;
    }
    return true;
}

double obb_clearance(const Obb& a, const Obb& b) {
    if (obb_overlap(a, b)) return 0.0;
    // For rectangles the closest pair always includes a vertex of one box.
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& c : obb_corners(a)) best = std::min(best, point_obb_distance(c, b));
    for (const Vec2& c : obb_corners(b)) best = std::min(best, point_obb_distance(c, a));
    return best;
}

double point_obb_distance(const Vec2& p, const Obb& box) {
    const Vec2 local = world_to_frame(p, box.center, box.yaw);
    const double dx = std::max(std::abs(local.x) - box.half_l, 0.0);
    const double dy = std::max(std::abs(local.y) - box.half_w, 0.0);
    return std::hypot(dx, dy);
}

bool polygon_contains(const std::vector<Vec2>& poly, const Vec2& p) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[j];
        const Vec2& b = poly[i];
        // On-segment check keeps the boundary inside.
        const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if (std::abs(cross) < 1e-12 &&
            p.x >= std::min(a.x, b.x) - 1e-12 && p.x <= std::max(a.x, b.x) + 1e-12 &&
            p.y >= std::min(a.y, b.y) - 1e-12 && p.y <= std::max(a.y, b.y) + 1e-12) {
            return true;
        }
        if ((b.y > p.y) != (a.y > p.y)) {
            const double t = (p.y - b.y) / (a.y - b.y);
            if (p.x < b.x + t * (a.x - b.x)) inside = !inside;
        }
    }
    return inside;
}

double Polyline::length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) total += distance(points[i - 1], points[i]);
    return total;
}

Vec2 Polyline::point_at(double s) const {
    if (points.empty()) return {};
    if (s <= 0.0) return points.front();
    double acc = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double seg = distance(points[i - 1], points[i]);
        if (acc + seg >= s && seg > 0.0) {
            const double t = (s - acc) / seg;
            return points[i - 1] + (points[i] - points[i - 1]) * t;
        }
        acc += seg;
    }
    return points.back();
}

Polyline::Projection Polyline::project(const Vec2& p) const {
    Projection best{0.0, std::numeric_limits<double>::infinity()};
    if (points.empty()) return {0.0, 0.0};
    if (points.size() == 1) return {0.0, distance(points[0], p)};
    double acc = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const Vec2 a = points[i - 1];
        const Vec2 b = points[i];
        const Vec2 ab = b - a;
        const double seg2 = ab.dot(ab);
        double t = 0.0;
        if (seg2 > 0.0) t = std::clamp((p - a).dot(ab) / seg2, 0.0, 1.0);
        const Vec2 q = a + ab * t;
        const double d = distance(p, q);
        if (d < best.lateral) {
            best.lateral = d;
            best.s = acc + t * std::sqrt(seg2);
        }
        acc += std::sqrt(seg2);
    }
    return best;
}

double Polyline::heading_at(double s) const {
    if (points.size() < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double seg = distance(points[i - 1], points[i]);
        if (acc + seg >= s && seg > 0.0) {
            const Vec2 d = points[i] - points[i - 1];
            return std::atan2(d.y, d.x);
        }
        acc += seg;
    }
    const Vec2 d = points.back() - points[points.size() - 2];
    return std::atan2(d.y, d.x);
}

}  // namespace evdrive
