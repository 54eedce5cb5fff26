#include "evdrive/density.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace evdrive {

void DensityMap::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write density map: " + path);
    for (double d : data_) {
        const float f = static_cast<float>(d);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        for (int i = 0; i < 4; ++i) out.put(static_cast<char>((bits >> (8 * i)) & 0xff));
    }

    std::ofstream sidecar(path + ".json", std::ios::trunc);
    if (!sidecar) throw std::runtime_error("cannot write density sidecar: " + path + ".json");
    sidecar << "{\"R\": " << r_ << ", \"channels\": " << kChannels
            << ", \"layout\": [\"prob\", \"dx\", \"dy\", \"w\", \"l\", \"heading\", \"speed\"],"
            << " \"dtype\": \"f32\", \"order\": \"row,col,channel\"}\n";
}

DensityMap DensityMap::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read density map: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() % (4 * kChannels) != 0)
        throw std::runtime_error("density map file has a partial record: " + path);
    const std::size_t cells = buf.size() / (4 * kChannels);
    const int r = static_cast<int>(std::llround(std::sqrt(static_cast<double>(cells))));
    if (static_cast<std::size_t>(r) * r != cells)
        throw std::runtime_error("density map is not square: " + path);

    DensityMap map(r);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
    for (std::size_t i = 0; i < map.data_.size(); ++i) {
        std::uint32_t bits = static_cast<std::uint32_t>(p[4 * i]) |
                             (static_cast<std::uint32_t>(p[4 * i + 1]) << 8) |
                             (static_cast<std::uint32_t>(p[4 * i + 2]) << 16) |
                             (static_cast<std::uint32_t>(p[4 * i + 3]) << 24);
        float f;
        std::memcpy(&f, &bits, 4);
        map.data_[i] = f;
    }
    return map;
}

std::vector<Detection> extract_detections(const DensityMap& map, double prob_threshold) {
    std::vector<Detection> out;
    for (int row = 0; row < map.size(); ++row) {
        for (int col = 0; col < map.size(); ++col) {
            const double prob = map.at(row, col, 0);
            if (prob < prob_threshold) continue;
            const Vec2 center = map.cell_center(row, col);
            Detection d;
            d.x = center.x + map.at(row, col, 1);
            d.y = center.y + map.at(row, col, 2);
            d.w = map.at(row, col, 3);
            d.l = map.at(row, col, 4);
            d.yaw = map.at(row, col, 5);
            const double speed = map.at(row, col, 6);
            d.vx = speed * std::cos(d.yaw);
            d.vy = speed * std::sin(d.yaw);
            d.confidence = prob;
            out.push_back(d);
        }
    }
    return out;
}

}  // namespace evdrive
