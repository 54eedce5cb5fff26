// Single-threaded reference implementations of the parallel kernels, written
// as the plainest possible loops. Render and accumulate reuse the exact
// per-element arithmetic so they are bit-comparable; the linear-algebra
// references normalize attention weights up front like a textbook would, so
// they agree with the parallel kernels to floating-point tolerance.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "evdrive/events.hpp"
#include "evdrive/fusion.hpp"
#include "evdrive/render.hpp"

namespace evdrive::serial {

namespace {

double shade_for_kind(ActorKind kind) {
    switch (kind) {
        case ActorKind::Vehicle: return 0.85;
        case ActorKind::Pedestrian: return 1.0;
        case ActorKind::Static: return 0.6;
    }
    return 0.85;
}

}  // namespace

IntensityFrame render_intensity(const WorldState& world, const CameraConfig& camera,
                                const PhysicsParams& phys) {
    if (camera.span <= 0.0) throw std::invalid_argument("camera span must be positive");
    if (camera.width <= 0 || camera.height <= 0 || camera.width > 1024 || camera.height > 1024)
        throw std::invalid_argument("camera resolution out of range");

    IntensityFrame f;
    f.width = camera.width;
    f.height = camera.height;
    f.t_us = static_cast<std::uint64_t>(std::llround(world.time * 1e6));
    f.data.assign(static_cast<std::size_t>(camera.width) * camera.height, 0.0);

    const Obb ego = world.ego_footprint(phys);
    const double ppm = camera.width / camera.span;
    for (int y = 0; y < camera.height; ++y) {
        for (int x = 0; x < camera.width; ++x) {
            const double wx = camera.center.x + (x + 0.5 - camera.width / 2.0) / ppm;
            const double wy = camera.center.y + (camera.height / 2.0 - (y + 0.5)) / ppm;
            const Vec2 p{wx, wy};
            double shade = 0.15;
            if (point_obb_distance(p, ego) == 0.0) shade = 0.4;
            for (const Actor& a : world.actors) {
                if (point_obb_distance(p, a.footprint()) == 0.0)
                    shade = std::max(shade, shade_for_kind(a.kind));
            }
            f.data[static_cast<std::size_t>(y) * camera.width + x] = shade;
        }
    }
    return f;
}

EventFrame accumulate(const std::vector<Event>& events, std::uint64_t t_start,
                      std::uint64_t t_end, int width, int height, AccumMode mode,
                      bool normalize) {
    if (t_end < t_start) throw std::invalid_argument("accumulation window is inverted");
    EventFrame f;
    f.width = width;
    f.height = height;
    f.t_start = t_start;
    f.t_end = t_end;
    f.mode = mode;
    const std::size_t n = static_cast<std::size_t>(width) * height;

    std::vector<long long> bins(n, 0);
    for (const Event& e : events) {
        if (e.t_us <= t_start || e.t_us > t_end) continue;
        if (e.x >= width || e.y >= height) continue;
        bins[static_cast<std::size_t>(e.y) * width + e.x] += mode == AccumMode::Count ? 1 : e.p;
    }

    f.cells.resize(n);
    long long max_abs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        f.cells[i] = static_cast<double>(bins[i]);
        max_abs = std::max(max_abs, std::llabs(bins[i]));
    }
    if (normalize && max_abs > 0) {
        for (double& c : f.cells) c /= static_cast<double>(max_abs);
    }
    return f;
}

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions disagree");
    Mat out(a.rows(), b.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < b.cols(); ++c)
            for (int k = 0; k < a.cols(); ++k) out.at(r, c) += a.at(r, k) * b.at(k, c);
    return out;
}

Mat scaled_dot_attention(const Mat& q, const Mat& k, const Mat& v) {
    if (q.cols() != k.cols()) throw std::invalid_argument("attention: q/k width mismatch");
    if (k.rows() != v.rows()) throw std::invalid_argument("attention: k/v row mismatch");
    const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
    Mat out(q.rows(), v.cols());
    for (int r = 0; r < q.rows(); ++r) {
        std::vector<double> w(static_cast<std::size_t>(k.rows()));
        double mx = -1e300;
        for (int j = 0; j < k.rows(); ++j) {
            double dot = 0.0;
            for (int c = 0; c < q.cols(); ++c) dot += q.at(r, c) * k.at(j, c);
            w[j] = dot * scale;
            mx = std::max(mx, w[j]);
        }
        double sum = 0.0;
        for (int j = 0; j < k.rows(); ++j) {
            w[j] = std::exp(w[j] - mx);
            sum += w[j];
        }
        for (int j = 0; j < k.rows(); ++j) w[j] /= sum;
        for (int j = 0; j < k.rows(); ++j)
            for (int c = 0; c < v.cols(); ++c) out.at(r, c) += w[j] * v.at(j, c);
    }
    return out;
}

}  // namespace evdrive::serial
