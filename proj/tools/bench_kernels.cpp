// Times the OpenMP kernels against their single-threaded references on
// representative workloads and prints a speedup table. The outputs are also
// cross-checked so a buggy parallelization can't post a good number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "evdrive/events.hpp"
#include "evdrive/fusion.hpp"
#include "evdrive/render.hpp"
#include "evdrive/rng.hpp"
#include "evdrive/scenario.hpp"

using namespace evdrive;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm-up
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_ms, double parallel_ms, bool match) {
    std::printf("%-22s %10.3f ms %10.3f ms %8.2fx   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, match ? "outputs match" : "OUTPUT MISMATCH");
}

bool nearly_equal(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; both columns are single-threaded\n");
#endif
    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    // Rasterizer over a busy scene at three resolutions.
    const Scenario sc = make_scenario("c");
    const WorldState world = initial_world(sc);
    const PhysicsParams phys;
    for (int res : {128, 512}) {
        const CameraConfig cam = ego_camera(world.ego, 40.0, res, res);
        IntensityFrame fs, fp;
        const double ts = time_ms([&] { fs = serial::render_intensity(world, cam, phys); }, 5);
        const double tp = time_ms([&] { fp = render_intensity(world, cam, phys); }, 5);
        const std::string name = "render " + std::to_string(res) + "x" + std::to_string(res);
        row(name.c_str(), ts, tp, fs.data == fp.data);
    }

    // Event binning over a large synthetic stream.
    Rng rng(11);
    std::vector<Event> events(2'000'000);
    for (Event& e : events) {
        e.x = static_cast<std::uint16_t>(rng.next_u64() % 128);
        e.y = static_cast<std::uint16_t>(rng.next_u64() % 128);
        e.t_us = static_cast<std::uint32_t>(rng.next_u64() % 1'000'000);
        e.p = rng.uniform01() < 0.5 ? 1 : -1;
    }
    EventFrame as, ap;
    const double ts_acc = time_ms(
        [&] { as = serial::accumulate(events, 0, 1'000'000, 128, 128, AccumMode::PolaritySum, true); },
        5);
    const double tp_acc = time_ms(
        [&] { ap = accumulate(events, 0, 1'000'000, 128, 128, AccumMode::PolaritySum, true); }, 5);
    row("accumulate 2M events", ts_acc, tp_acc, as.cells == ap.cells);

    // Dense matmul at the encoder's working size.
    Mat a = Mat::random_uniform(512, 256, -1.0, 1.0, rng);
    Mat b = Mat::random_uniform(256, 1024, -1.0, 1.0, rng);
    Mat ms, mp;
    const double ts_mm = time_ms([&] { ms = serial::matmul(a, b); }, 3);
    const double tp_mm = time_ms([&] { mp = matmul(a, b); }, 3);
    row("matmul 512x256x1024", ts_mm, tp_mm, ms.raw() == mp.raw());

    // Attention over a full multi-sensor token sequence.
    Mat q = Mat::random_uniform(512, 64, -1.0, 1.0, rng);
    Mat k = Mat::random_uniform(512, 64, -1.0, 1.0, rng);
    Mat v = Mat::random_uniform(512, 64, -1.0, 1.0, rng);
    Mat atts, attp;
    const double ts_at = time_ms([&] { atts = serial::scaled_dot_attention(q, k, v); }, 3);
    const double tp_at = time_ms([&] { attp = scaled_dot_attention(q, k, v); }, 3);
    row("attention 512x64", ts_at, tp_at, nearly_equal(atts.raw(), attp.raw(), 1e-12));
    return 0;
}
