#include "curvseg/segmenter.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace curvseg {

void SegmentationParams::validate() const {
    curvature.validate();
    if (!(lambda > 0.0)) {
        throw Error("attraction weight lambda must be > 0");
    }
    if (solver.scale < 1) {
        throw Error("quantization scale must be >= 1");
    }
    if (solver.max_probe_rounds < 0) {
        throw Error("probe rounds must be >= 0");
    }
}

Energy segmentation_energy(const GrayImage& image, const SegmentationParams& params) {
    params.validate();
    const auto edges = curvature_edges(image, params.curvature);
    return build_energy(edges, static_cast<std::int32_t>(image.size()), params.lambda, params.mode);
}

Energy seeded_energy(const GrayImage& image, const SeedMask& seeds, const SegmentationParams& params,
                     double* penalty_used) {
    if (image.width() != seeds.width() || image.height() != seeds.height()) {
        throw Error("seed mask dimensions do not match image");
    }
    if (seeds.count(Seed::Foreground) == 0 || seeds.count(Seed::Background) == 0) {
        throw Error("both seed classes required");
    }
    const Energy base = segmentation_energy(image, params);
    const double k = params.seed_penalty > 0.0 ? params.seed_penalty : default_seed_penalty(base);
    if (penalty_used) {
        *penalty_used = k;
    }
    return add_seeds(base, seeds, k);
}

SegmentationResult segment(const GrayImage& image, const SeedMask& seeds, const SegmentationParams& params) {
    const auto start = std::chrono::steady_clock::now();
    SegmentationResult result;
    result.params = params;
    const Energy e = seeded_energy(image, seeds, params, &result.seed_penalty);
    result.report = solve_energy(e, params.solver);

    result.mask = BinaryMask(image.width(), image.height());
    for (std::size_t i = 0; i < result.mask.values.size(); ++i) {
        result.mask.values[i] = result.report.labeling[i] == Label::One ? 1 : 0;
        const Seed s = seeds[static_cast<NodeId>(i)];
        if ((s == Seed::Foreground && !result.mask.values[i]) || (s == Seed::Background && result.mask.values[i])) {
            throw Error("internal error: segmentation violates a seed");
        }
    }
    result.report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string to_string(AttractionMode mode) { return mode == AttractionMode::Magnitude ? "magnitude" : "signed"; }

std::string to_string(FillPolicy policy) { return policy == FillPolicy::Background ? "bg" : "fg"; }

AttractionMode parse_attraction_mode(const std::string& s) {
    if (s == "magnitude") {
        return AttractionMode::Magnitude;
    }
    if (s == "signed") {
        return AttractionMode::Signed;
    }
    throw Error("unknown attraction mode: " + s);
}

FillPolicy parse_fill_policy(const std::string& s) {
    if (s == "bg") {
        return FillPolicy::Background;
    }
    if (s == "fg") {
        return FillPolicy::Foreground;
    }
    throw Error("unknown fallback policy: " + s);
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::vector<std::pair<std::string, std::string>> report_fields(const SegmentationResult& r) {
    const auto& p = r.params;
    return {
        {"energy", num(r.report.energy_of_completion)},
        {"lower_bound", num(r.report.lower_bound)},
        {"unlabeled_count", std::to_string(r.report.unlabeled_count)},
        {"runtime_ms", num(r.report.runtime_ms)},
        {"probes_run", std::to_string(r.report.probes_run)},
        {"p", num(p.curvature.p)},
        {"beta", num(p.curvature.beta)},
        {"lambda", num(p.lambda)},
        {"mode", to_string(p.mode)},
        {"probing", p.solver.probing ? "on" : "off"},
        {"fallback", to_string(p.solver.fallback)},
        {"seed_penalty", num(r.seed_penalty)},
    };
}

}  // namespace

std::string format_report(const SegmentationResult& r) {
    std::string out;
    for (const auto& [k, v] : report_fields(r)) {
        if (!out.empty()) {
            out += ' ';
        }
        out += k + "=" + v;
    }
    return out;
}

std::filesystem::path save_result(const SegmentationResult& r, const std::filesystem::path& mask_path) {
    write_png(mask_path, to_raster(r.mask));
    auto report_path = mask_path;
    report_path.replace_filename(mask_path.stem().string() + ".report.txt");
    std::ofstream out(report_path);
    if (!out) {
        throw Error("cannot write file: " + report_path.string());
    }
    for (const auto& [k, v] : report_fields(r)) {
        out << k << '=' << v << '\n';
    }
    if (!out) {
        throw Error("write failed: " + report_path.string());
    }
    return report_path;
}

double dice(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height) {
        throw Error("dice: mask dimensions differ");
    }
    std::size_t inter = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        inter += (a.values[i] && b.values[i]) ? 1 : 0;
        total += (a.values[i] ? 1 : 0) + (b.values[i] ? 1 : 0);
    }
    return total == 0 ? 1.0 : 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

}  // namespace curvseg
