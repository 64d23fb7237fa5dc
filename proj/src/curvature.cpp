#include "curvseg/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>

namespace curvseg {

void CurvatureParams::validate() const {
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw Error("curvature exponent p must be >= 1");
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw Error("contrast strength beta must be >= 0");
    }
}

std::vector<CurvatureClique> enumerate_cliques(int width, int height, const CurvatureParams& params) {
    params.validate();
    if (width < 2 || height < 2) {
        throw Error("lattice must be at least 2x2");
    }
    // Angle depends only on the direction difference; precompute alpha^p.
    std::array<double, 5> angle{};
    std::array<double, 5> angle_pow{};
    for (int d = 0; d <= 4; ++d) {
        angle[d] = d * std::numbers::pi / 4.0;
        angle_pow[d] = std::pow(angle[d], params.p);
    }

    std::vector<CurvatureClique> cliques;
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    cliques.reserve(n * 28);
    for (NodeId i = 0; i < static_cast<NodeId>(n); ++i) {
        const auto nbrs = neighbors(i, width, height);
        for (std::size_t a = 0; a < nbrs.size(); ++a) {
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                int diff = std::abs(nbrs[a].direction - nbrs[b].direction);
                diff = std::min(diff, 8 - diff);
                const double min_len = std::min(nbrs[a].length, nbrs[b].length);
                cliques.push_back({i, nbrs[a].node, nbrs[b].node, angle[diff], angle_pow[diff] / min_len, -1.0});
            }
        }
    }
    return cliques;
}

double contrast_factor(double a, double b, double beta) {
    const double d = a - b;
    return std::exp(-beta * d * d);
}

void apply_contrast(std::span<CurvatureClique> cliques, const GrayImage& image, double beta) {
    if (!(beta >= 0.0)) {
        throw Error("contrast strength beta must be >= 0");
    }
    const auto n = static_cast<NodeId>(image.size());
    for (auto& c : cliques) {
        if (c.center >= n || c.j >= n || c.k >= n) {
            throw Error("clique outside image bounds");
        }
        const double gi = image[c.center];
        c.contrast_weight =
            c.base_weight * contrast_factor(gi, image[c.j], beta) * contrast_factor(gi, image[c.k], beta);
    }
}

std::array<EffectiveEdge, 3> decompose_clique(const CurvatureClique& c) {
    const double half = c.contrast_weight / 2.0;
    auto edge = [](NodeId a, NodeId b, double w) {
        return a < b ? EffectiveEdge{a, b, w} : EffectiveEdge{b, a, w};
    };
    return {edge(c.center, c.j, half), edge(c.center, c.k, half), edge(c.j, c.k, -half)};
}

void EdgeAccumulator::add(NodeId a, NodeId b, double weight) {
    if (a == b) {
        throw Error("effective edge endpoints must differ");
    }
    const auto u = static_cast<std::uint64_t>(std::min(a, b));
    const auto v = static_cast<std::uint64_t>(std::max(a, b));
    sums_[(u << 32) | v] += weight;
}

std::vector<EffectiveEdge> EdgeAccumulator::finish() const {
    std::vector<EffectiveEdge> out;
    out.reserve(sums_.size());
    for (const auto& [key, w] : sums_) {
        if (w != 0.0) {
            out.push_back({static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xffffffffu), w});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return x.u != y.u ? x.u < y.u : x.v < y.v;
    });
    return out;
}

std::vector<EffectiveEdge> accumulate_edges(std::span<const EffectiveEdge> contributions) {
    EdgeAccumulator acc;
    for (const auto& e : contributions) {
        acc.add(e);
    }
    return acc.finish();
}

std::vector<EffectiveEdge> curvature_edges(const GrayImage& image, const CurvatureParams& params) {
    auto cliques = enumerate_cliques(image.width(), image.height(), params);
    apply_contrast(cliques, image, params.beta);
    EdgeAccumulator acc;
    for (const auto& c : cliques) {
        for (const auto& e : decompose_clique(c)) {
            acc.add(e);
        }
    }
    return acc.finish();
}

void write_edge_dump(std::ostream& out, std::span<const EffectiveEdge> edges) {
    char buf[64];
    for (const auto& e : edges) {
        std::snprintf(buf, sizeof(buf), "%.12g", e.weight);
        out << e.u << ' ' << e.v << ' ' << buf << '\n';
    }
}

void write_edge_dump(const std::filesystem::path& path, std::span<const EffectiveEdge> edges) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write file: " + path.string());
    }
    write_edge_dump(out, edges);
}

}  // namespace curvseg
