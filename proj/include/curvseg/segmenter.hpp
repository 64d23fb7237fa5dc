#pragma once

#include <filesystem>
#include <string>

#include "curvseg/curvature.hpp"
#include "curvseg/energy.hpp"
#include "curvseg/lattice.hpp"
#include "curvseg/qpbo.hpp"

namespace curvseg {

struct SegmentationParams {
    CurvatureParams curvature;
    double lambda = 2.0;
    AttractionMode mode = AttractionMode::Magnitude;
    double seed_penalty = 0.0;  // <= 0 selects default_seed_penalty()
    SolverOptions solver;

    void validate() const;
};

struct SegmentationResult {
    BinaryMask mask;
    SolveReport report;
    SegmentationParams params;
    double seed_penalty = 0.0;  // value actually used
};

/// Curvature + attraction energy of an image, without seeds.
Energy segmentation_energy(const GrayImage& image, const SegmentationParams& params);

/// segmentation_energy() with seed unaries added; `penalty_used` receives K.
Energy seeded_energy(const GrayImage& image, const SeedMask& seeds, const SegmentationParams& params,
                     double* penalty_used = nullptr);

SegmentationResult segment(const GrayImage& image, const SeedMask& seeds, const SegmentationParams& params = {});

std::string to_string(AttractionMode mode);
std::string to_string(FillPolicy policy);
AttractionMode parse_attraction_mode(const std::string& s);
FillPolicy parse_fill_policy(const std::string& s);

/// Single-line `key=value` record: energy, lower_bound, unlabeled_count,
/// runtime_ms, probes_run, then the parameters.
std::string format_report(const SegmentationResult& r);

/// Writes the mask PNG at `mask_path` and the report next to it
/// (`<stem>.report.txt`, one key=value per line). Returns the report path.
std::filesystem::path save_result(const SegmentationResult& r, const std::filesystem::path& mask_path);

double dice(const BinaryMask& a, const BinaryMask& b);

}  // namespace curvseg
