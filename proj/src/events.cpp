#include "evdrive/events.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace evdrive {

EventSynthesizer::EventSynthesizer(double threshold, double floor_intensity)
    : threshold_(threshold), floor_(floor_intensity) {
    if (threshold <= 0.0) throw std::invalid_argument("event threshold must be positive");
    if (floor_intensity <= 0.0) throw std::invalid_argument("intensity floor must be positive");
}

void EventSynthesizer::reset() {
    primed_ = false;
    ref_log_.clear();
}

std::vector<Event> EventSynthesizer::process(const IntensityFrame& frame) {
    const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
    if (frame.data.size() != n) throw std::invalid_argument("frame size mismatch");

    if (!primed_) {
        width_ = frame.width;
        height_ = frame.height;
        ref_log_.resize(n);
        for (std::size_t i = 0; i < n; ++i) ref_log_[i] = std::log(std::max(frame.data[i], floor_));
        t_prev_ = frame.t_us;
        primed_ = true;
        return {};
    }
    if (frame.width != width_ || frame.height != height_)
        throw std::invalid_argument("frame dimensions changed mid-stream");

    // Count events per pixel first (parallel), then emit in pixel order and
    // sort by timestamp — identical output regardless of thread count.
    std::vector<int> counts(n, 0);
#pragma omp parallel for
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const double lg = std::log(std::max(frame.data[i], floor_));
        counts[i] = static_cast<int>(std::floor(std::abs(lg - ref_log_[i]) / threshold_));
    }

    std::vector<Event> out;
    const std::uint64_t t0 = t_prev_;
    const std::uint64_t t1 = frame.t_us;
    for (std::size_t i = 0; i < n; ++i) {
        const int k = counts[i];
        if (k == 0) continue;
        const double lg = std::log(std::max(frame.data[i], floor_));
        const int sign = lg >= ref_log_[i] ? 1 : -1;
        const std::uint16_t px = static_cast<std::uint16_t>(i % width_);
        const std::uint16_t py = static_cast<std::uint16_t>(i / width_);
        for (int j = 1; j <= k; ++j) {
            // j/k spreads timestamps over (t0, t1], last one exactly at t1;
            // the max() keeps every stamp strictly after t0 even for
            // pathologically short frame gaps.
            std::uint64_t t = t1;
            if (t1 > t0) {
                const std::uint64_t off = static_cast<std::uint64_t>(std::llround(
                    static_cast<double>(t1 - t0) * static_cast<double>(j) / k));
                t = t0 + std::max<std::uint64_t>(1, off);
            }
            out.push_back(Event{px, py, static_cast<std::uint32_t>(t),
                                static_cast<std::int8_t>(sign)});
        }
        // Advance the reference by whole quanta only; the remainder stays.
        ref_log_[i] += sign * k * threshold_;
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Event& a, const Event& b) { return a.t_us < b.t_us; });
    t_prev_ = t1;
    return out;
}

std::vector<Event> synthesize_events(const IntensityFrame& prev, const IntensityFrame& next,
                                     double threshold, double floor_intensity) {
    if (prev.width != next.width || prev.height != next.height)
        throw std::invalid_argument("frame dimensions differ");
    EventSynthesizer synth(threshold, floor_intensity);
    synth.process(prev);
    return synth.process(next);
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

    // Integer histogram with atomic adds: order-independent, so the parallel
    // result is bit-identical to the serial one.
    std::vector<std::atomic<long long>> bins(n);
    for (auto& b : bins) b.store(0, std::memory_order_relaxed);
#pragma omp parallel for
    for (long long i = 0; i < static_cast<long long>(events.size()); ++i) {
        const Event& e = events[i];
        if (e.t_us <= t_start || e.t_us > t_end) continue;
        if (e.x >= width || e.y >= height) continue;
        const std::size_t idx = static_cast<std::size_t>(e.y) * width + e.x;
        const long long add = mode == AccumMode::Count ? 1 : e.p;
        bins[idx].fetch_add(add, std::memory_order_relaxed);
    }

    f.cells.resize(n);
    long long max_abs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const long long v = bins[i].load(std::memory_order_relaxed);
        f.cells[i] = static_cast<double>(v);
        max_abs = std::max(max_abs, std::llabs(v));
    }
    if (normalize && max_abs > 0) {
        for (double& c : f.cells) c /= static_cast<double>(max_abs);
    }
    return f;
}

std::vector<Event> polarity_mask(const std::vector<Event>& events, DropPolarity drop) {
    const int dropped = drop == DropPolarity::Positive ? 1 : -1;
    std::vector<Event> out;
    out.reserve(events.size());
    for (const Event& e : events)
        if (e.p != dropped) out.push_back(e);
    return out;
}

namespace {

void put_u16(std::string& buf, std::uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_events(const std::string& path, const std::vector<Event>& events, int width,
                  int height) {
    std::string buf;
    buf.reserve(16 + events.size() * 9);
    buf += "EVT1";
    put_u16(buf, static_cast<std::uint16_t>(width));
    put_u16(buf, static_cast<std::uint16_t>(height));
    put_u32(buf, static_cast<std::uint32_t>(events.size()));
    buf.append(4, '\0');
    for (const Event& e : events) {
        put_u16(buf, e.x);
        put_u16(buf, e.y);
        put_u32(buf, e.t_us);
        buf.push_back(static_cast<char>(e.p));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write event file: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

EventStream read_events(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read event file: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 16 || buf.compare(0, 4, "EVT1") != 0)
        throw std::runtime_error("not an event stream file: " + path);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
    EventStream s;
    s.width = get_u16(p + 4);
    s.height = get_u16(p + 6);
    const std::uint32_t count = get_u32(p + 8);
    if (buf.size() != 16 + static_cast<std::size_t>(count) * 9)
        throw std::runtime_error("event file is truncated: " + path);
    s.events.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const unsigned char* r = p + 16 + static_cast<std::size_t>(i) * 9;
        s.events[i].x = get_u16(r);
        s.events[i].y = get_u16(r + 2);
        s.events[i].t_us = get_u32(r + 4);
        s.events[i].p = static_cast<std::int8_t>(r[8]);
    }
    return s;
}

void write_pgm(const std::string& path, const EventFrame& frame) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write PGM: " + path);
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    double max_abs = 0.0;
    for (double c : frame.cells) max_abs = std::max(max_abs, std::abs(c));
    if (max_abs == 0.0) max_abs = 1.0;
    for (double c : frame.cells) {
        // Map [-max, max] onto [0, 255] with zero at mid-gray.
        const int v = static_cast<int>(std::lround(127.5 + 127.5 * c / max_abs));
        out.put(static_cast<char>(std::clamp(v, 0, 255)));
    }
}

IntensityFrame read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read PGM: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("not a binary PGM (P5): " + path);
    // Header tokens may be separated by whitespace and '#' comment lines.
    auto next_int = [&in, &path]() {
        for (;;) {
            int c = in.peek();
            if (c == '#') {
                std::string line;
                std::getline(in, line);
                continue;
            }
            if (std::isspace(c)) {
                in.get();
                continue;
            }
            break;
        }
        int v = 0;
        if (!(in >> v)) throw std::runtime_error("truncated PGM header: " + path);
        return v;
    };
    const int width = next_int();
    const int height = next_int();
    const int maxval = next_int();
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
        throw std::runtime_error("unsupported PGM geometry: " + path);
    in.get();  // single whitespace after maxval

    IntensityFrame f;
    f.width = width;
    f.height = height;
    f.data.resize(static_cast<std::size_t>(width) * height);
    std::vector<unsigned char> raw(f.data.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw std::runtime_error("truncated PGM pixel data: " + path);
    for (std::size_t i = 0; i < raw.size(); ++i) f.data[i] = raw[i] / static_cast<double>(maxval);
    return f;
}

}  // namespace evdrive
