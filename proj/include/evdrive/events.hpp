#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evdrive/render.hpp"

namespace evdrive {

struct Event {
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    std::uint32_t t_us = 0;
    std::int8_t p = 1;  // +1 or -1
};

enum class AccumMode { Count, PolaritySum };

struct EventFrame {
    int width = 0;
    int height = 0;
    std::uint64_t t_start = 0;
    std::uint64_t t_end = 0;
    AccumMode mode = AccumMode::Count;
    std::vector<double> cells;  // row-major

    double at(int x, int y) const { return cells[static_cast<std::size_t>(y) * width + x]; }
};

// Contrast-threshold event model with per-pixel reference state: a pixel
// fires floor(|ln I - ref| / C) events when its log intensity has drifted
// from the reference, and the reference advances by whole quanta only, so
// sub-threshold residue carries over to later frames.
class EventSynthesizer {
public:
    EventSynthesizer(double threshold, double floor_intensity);

    // Feeds the next frame; the first frame only initializes the reference.
    // Emitted timestamps lie in (t_prev, t_frame], non-decreasing.
    std::vector<Event> process(const IntensityFrame& frame);

    void reset();

private:
    double threshold_;
    double floor_;
    bool primed_ = false;
    int width_ = 0;
    int height_ = 0;
    std::uint64_t t_prev_ = 0;
    std::vector<double> ref_log_;
};

// Stateless pair form: events caused by going from prev to next.
std::vector<Event> synthesize_events(const IntensityFrame& prev, const IntensityFrame& next,
                                     double threshold, double floor_intensity = 1.0 / 255.0);

// Bins events with t in (t_start, t_end] into a width x height grid.
// Count mode sums 1 per event, polarity mode sums p; normalize divides by
// the max absolute cell (zeros stay zero).
EventFrame accumulate(const std::vector<Event>& events, std::uint64_t t_start,
                      std::uint64_t t_end, int width, int height, AccumMode mode,
                      bool normalize);

enum class DropPolarity { Positive, Negative };

// Channel masking: removes all events of one polarity.
std::vector<Event> polarity_mask(const std::vector<Event>& events, DropPolarity drop);

// Binary event stream file: 16-byte header (magic "EVT1", u16 width,
// u16 height, u32 count, 4 reserved zero bytes) then 9-byte little-endian
// records (u16 x, u16 y, u32 t_us, i8 p).
void write_events(const std::string& path, const std::vector<Event>& events, int width,
                  int height);
struct EventStream {
    int width = 0;
    int height = 0;
    std::vector<Event> events;
};
EventStream read_events(const std::string& path);

// Grayscale PGM dump of an event frame for eyeballing.
void write_pgm(const std::string& path, const EventFrame& frame);

// Binary 8-bit PGM (P5) read back as luminance in [0, 1]; t_us is left 0
// for the caller to assign.
IntensityFrame read_pgm(const std::string& path);

namespace serial {
EventFrame accumulate(const std::vector<Event>& events, std::uint64_t t_start,
                      std::uint64_t t_end, int width, int height, AccumMode mode,
                      bool normalize);
}  // namespace serial

}  // namespace evdrive
