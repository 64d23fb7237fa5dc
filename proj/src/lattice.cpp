#include "curvseg/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace curvseg {

GrayImage::GrayImage(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width <= 0 || height <= 0) {
        throw Error("image dimensions must be positive");
    }
    if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error("image value count does not match dimensions");
    }
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error("image intensity outside [0, 1]");
        }
    }
}

GrayImage::GrayImage(int width, int height, double fill)
    : GrayImage(width, height, std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                                       static_cast<std::size_t>(std::max(height, 0)),
                                                   fill)) {}

SeedMask::SeedMask(int width, int height)
    : SeedMask(width, height,
               std::vector<Seed>(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)),
                                 Seed::None)) {}

SeedMask::SeedMask(int width, int height, std::vector<Seed> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
    if (width <= 0 || height <= 0) {
        throw Error("seed mask dimensions must be positive");
    }
    if (labels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error("seed label count does not match dimensions");
    }
}

void SeedMask::mark(int row, int col, Seed s) {
    if (row < 0 || row >= height_ || col < 0 || col >= width_) {
        throw Error("seed coordinate out of bounds");
    }
    auto& cell = labels_[static_cast<std::size_t>(node_at(row, col, width_))];
    if (s != Seed::None && cell != Seed::None && cell != s) {
        throw Error("conflicting seed");
    }
    if (s != Seed::None) {
        cell = s;
    }
}

std::size_t SeedMask::count(Seed s) const {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), s));
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](auto v) { return v != 0; }));
}

std::vector<Neighbor> neighbors(NodeId node, int width, int height) {
    // Offsets in ascending index order; direction k means angle k*pi/4 with
    // +x to the right and +y up (row index grows downward).
    struct Offset {
        int dr, dc, direction;
    };
    static constexpr Offset kOffsets[8] = {
        {-1, -1, 3}, {-1, 0, 2}, {-1, 1, 1}, {0, -1, 4}, {0, 1, 0}, {1, -1, 5}, {1, 0, 6}, {1, 1, 7},
    };
    const int row = node / width;
    const int col = node % width;
    std::vector<Neighbor> out;
    out.reserve(8);
    for (const auto& o : kOffsets) {
        const int r = row + o.dr;
        const int c = col + o.dc;
        if (r < 0 || r >= height || c < 0 || c >= width) {
            continue;
        }
        const bool diagonal = o.dr != 0 && o.dc != 0;
        out.push_back({node_at(r, c, width), diagonal ? std::numbers::sqrt2 : 1.0, o.direction});
    }
    return out;
}

std::int64_t lattice_edge_count(int width, int height) {
    const std::int64_t w = width;
    const std::int64_t h = height;
    return 4 * w * h - 3 * w - 3 * h + 2;
}

RasterGray to_raster(const GrayImage& image) {
    RasterGray r{image.width(), image.height(), {}};
    r.pixels.reserve(image.size());
    for (double v : image.values()) {
        r.pixels.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    }
    return r;
}

RasterGray to_raster(const BinaryMask& mask) {
    RasterGray r{mask.width, mask.height, {}};
    r.pixels.reserve(mask.values.size());
    for (auto v : mask.values) {
        r.pixels.push_back(v ? 255 : 0);
    }
    return r;
}

RasterGray seeds_to_raster(const SeedMask& seeds) {
    RasterGray r{seeds.width(), seeds.height(), {}};
    r.pixels.reserve(seeds.size());
    for (Seed s : seeds.labels()) {
        r.pixels.push_back(s == Seed::Foreground ? 255 : s == Seed::Background ? 0 : 128);
    }
    return r;
}

RasterRgb seeds_to_rgb(const SeedMask& seeds) {
    RasterRgb r{seeds.width(), seeds.height(), {}, false};
    r.pixels.reserve(seeds.size() * 3);
    for (Seed s : seeds.labels()) {
        r.pixels.push_back(s == Seed::Foreground ? 255 : 0);
        r.pixels.push_back(0);
        r.pixels.push_back(s == Seed::Background ? 255 : 0);
    }
    return r;
}

BinaryMask mask_from_raster(const RasterGray& raster) {
    BinaryMask m(raster.width, raster.height);
    for (std::size_t i = 0; i < raster.pixels.size(); ++i) {
        m.values[i] = raster.pixels[i] != 0 ? 1 : 0;
    }
    return m;
}

}  // namespace curvseg
