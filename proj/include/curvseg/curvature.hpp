#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "curvseg/lattice.hpp"

namespace curvseg {

struct CurvatureParams {
    double p = 2.0;      // angle exponent, >= 1
    double beta = 20.0;  // contrast strength on [0,1] intensities, >= 0

    void validate() const;
};

/// Pixel `center` with two distinct 8-neighbors whose joint cut is penalized.
struct CurvatureClique {
    NodeId center;
    NodeId j;  // j < k
    NodeId k;
    double alpha;            // angle between the two edge vectors, radians
    double base_weight;      // alpha^p / min(|e_ij|, |e_ik|)
    double contrast_weight;  // base_weight scaled by the two contrast factors; negative until applied
};

struct EffectiveEdge {
    NodeId u;  // u < v
    NodeId v;
    double weight;

    bool operator==(const EffectiveEdge&) const = default;
};

/// All cliques of a width x height lattice, one per (center, unordered
/// neighbor pair), in ascending (center, j, k) order.
std::vector<CurvatureClique> enumerate_cliques(int width, int height, const CurvatureParams& params);

/// exp(-beta (a - b)^2)
double contrast_factor(double a, double b, double beta);

/// Fills contrast_weight for every clique. Image must match the lattice the cliques came from.
void apply_contrast(std::span<CurvatureClique> cliques, const GrayImage& image, double beta);

/// (center, j, +wc/2), (center, k, +wc/2), (j, k, -wc/2), each with u < v.
std::array<EffectiveEdge, 3> decompose_clique(const CurvatureClique& clique);

/// Sums edge contributions per unordered pair. Each pair's sum is taken in
/// insertion order; the result is sorted by (u, v) with exact zeros dropped.
class EdgeAccumulator {
public:
    void add(NodeId a, NodeId b, double weight);
    void add(const EffectiveEdge& e) { add(e.u, e.v, e.weight); }
    std::vector<EffectiveEdge> finish() const;

private:
    std::unordered_map<std::uint64_t, double> sums_;
};

std::vector<EffectiveEdge> accumulate_edges(std::span<const EffectiveEdge> contributions);

/// enumerate -> contrast -> decompose -> accumulate.
std::vector<EffectiveEdge> curvature_edges(const GrayImage& image, const CurvatureParams& params);

/// Debug dump: one `u v weight` line per edge, weight with 12 significant digits.
void write_edge_dump(std::ostream& out, std::span<const EffectiveEdge> edges);
void write_edge_dump(const std::filesystem::path& path, std::span<const EffectiveEdge> edges);

}  // namespace curvseg
