#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvseg {

/// Raised for malformed inputs, unreadable files and violated preconditions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major pixel index.
using NodeId = std::int32_t;

inline NodeId node_at(int row, int col, int width) { return row * width + col; }

/// Grayscale image with intensities normalized to [0, 1].
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::vector<double> values);
    GrayImage(int width, int height, double fill);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }

    double operator[](NodeId i) const { return values_[static_cast<std::size_t>(i)]; }
    double at(int row, int col) const { return values_[static_cast<std::size_t>(node_at(row, col, width_))]; }
    std::span<const double> values() const { return values_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

enum class Seed : std::uint8_t { None = 0, Foreground = 1, Background = 2 };

class SeedMask {
public:
    SeedMask() = default;
    SeedMask(int width, int height);
    SeedMask(int width, int height, std::vector<Seed> labels);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return labels_.size(); }

    Seed operator[](NodeId i) const { return labels_[static_cast<std::size_t>(i)]; }
    Seed at(int row, int col) const { return labels_[static_cast<std::size_t>(node_at(row, col, width_))]; }
    std::span<const Seed> labels() const { return labels_; }

    /// Marks a pixel; marking a pixel with the opposite class throws "conflicting seed".
    void mark(int row, int col, Seed s);
    void set(int row, int col, Seed s) { labels_[static_cast<std::size_t>(node_at(row, col, width_))] = s; }

    std::size_t count(Seed s) const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Seed> labels_;
};

/// Binary object mask, 1 = object.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t at(int row, int col) const { return values[static_cast<std::size_t>(node_at(row, col, width))]; }
    std::uint8_t& at(int row, int col) { return values[static_cast<std::size_t>(node_at(row, col, width))]; }
    std::size_t count() const;
    bool operator==(const BinaryMask&) const = default;
};

struct Neighbor {
    NodeId node;
    double length;  // 1 for axial, sqrt(2) for diagonal
    int direction;  // k in [0, 8): edge vector at angle k*pi/4, counter-clockwise from +x
};

/// In-bounds 8-neighbors of `node`, ordered by ascending neighbor index.
std::vector<Neighbor> neighbors(NodeId node, int width, int height);

/// Number of undirected edges of a width x height 8-connected grid.
std::int64_t lattice_edge_count(int width, int height);

// ---------------------------------------------------------------------------
// Raster I/O. PGM means binary P5 with maxval 255.

struct RasterGray {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

struct RasterRgb {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // r, g, b interleaved
    bool is_gray = false;              // source was single-channel
};

RasterGray read_pgm(const std::filesystem::path& path);
RasterGray decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const RasterGray& raster);
void write_pgm(const std::filesystem::path& path, const RasterGray& raster);

RasterRgb decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const RasterGray& raster);
std::vector<std::uint8_t> encode_png(const RasterRgb& raster);
void write_png(const std::filesystem::path& path, const RasterGray& raster);
void write_png(const std::filesystem::path& path, const RasterRgb& raster);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Decodes PGM or PNG (by signature); color is converted by BT.601 luminance.
GrayImage decode_image(std::span<const std::uint8_t> bytes);
GrayImage load_image(const std::filesystem::path& path);

/// PGM and gray PNG: 255 -> FG, 0 -> BG, 128 -> None, anything else is an error.
/// Color PNG: pure red -> FG, pure blue -> BG, everything else None.
SeedMask decode_seeds(std::span<const std::uint8_t> bytes);
SeedMask load_seeds(const std::filesystem::path& path);

RasterGray to_raster(const GrayImage& image);
RasterGray to_raster(const BinaryMask& mask);  // 0 / 255
RasterGray seeds_to_raster(const SeedMask& seeds);  // PGM sentinels
RasterRgb seeds_to_rgb(const SeedMask& seeds);      // red / blue on black
BinaryMask mask_from_raster(const RasterGray& raster);  // nonzero -> 1

}  // namespace curvseg
