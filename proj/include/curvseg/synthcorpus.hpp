#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "curvseg/energy.hpp"
#include "curvseg/lattice.hpp"

namespace curvseg {

struct PixelPoint {
    int row;
    int col;
};

/// Synthetic control image with pixel-exact ground truth and default seeds.
struct ControlCase {
    std::string name;
    GrayImage image;
    BinaryMask ground_truth;
    SeedMask seeds;
    std::string description;
    std::optional<PixelPoint> apex;  // corner cases only
    BinaryMask excluded;             // circle_bump: bump pixels outside the disk; empty otherwise
};

/// Shapes are rasterized by pixel-center inclusion: a pixel belongs to a
/// disk iff the distance from its center to the disk center is < radius.

/// White bar (intensity 1) on black, centered; FG seeds in the first fifth of
/// the bar, BG seeds on the image border.
ControlCase gen_bar(int width = 40, int height = 20, int bar_len = 30, int bar_thickness = 4);

enum class OutlineShape { Circle, Polygon };

/// Dashed white outline on a uniform black canvas. Inside and outside share
/// intensity 0. Circle: radius 12 on 40x40. Polygon: a triangle on 40x40.
/// Ground truth is the filled shape including the outline band.
ControlCase gen_dotted_outline(OutlineShape shape, int gap_len, int dot_len);

/// Disk of radius R with a radius-r bump centered on its rim, both white on
/// black. Ground truth is the large disk only.
ControlCase gen_circle_bump(int big_radius = 15, int small_radius = 5);

/// White triangle with apex angle `angle_deg` on black.
ControlCase gen_corner_shape(double angle_deg);

/// The bundled control corpus, in name order.
std::vector<ControlCase> default_corpus();
std::optional<ControlCase> find_case(const std::string& name);

/// Writes <dir>/<name>/{image,seeds,truth}.pgm for each case.
void export_corpus(const std::filesystem::path& dir, const std::vector<ControlCase>& cases);

struct BruteForceResult {
    std::vector<std::uint8_t> labeling;
    double energy;
};

/// Exhaustive minimum over all 2^n labelings (n <= 24); ties go to the
/// lexicographically smallest labeling (variable 0 most significant).
template <typename T>
BruteForceResult brute_force_optimum(const BasicEnergy<T>& e);

/// All minimizers, as bitmasks (bit i = x_i). n <= 20.
template <typename T>
std::vector<std::uint32_t> brute_force_argmin_set(const BasicEnergy<T>& e, double tolerance = 0.0);

/// Number of 8-connected components of the object pixels.
int count_components8(const BinaryMask& mask);

}  // namespace curvseg
