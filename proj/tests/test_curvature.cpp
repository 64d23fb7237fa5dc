#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "curvseg/curvature.hpp"

using namespace curvseg;

namespace {

const CurvatureClique& find_clique(const std::vector<CurvatureClique>& cs, NodeId i, NodeId j, NodeId k) {
    for (const auto& c : cs) {
        if (c.center == i && c.j == j && c.k == k) {
            return c;
        }
    }
    FAIL("clique not found");
    return cs.front();
}

}  // namespace

TEST_CASE("clique base weights") {
    const auto cs = enumerate_cliques(3, 3, {});
    const NodeId center = node_at(1, 1, 3);
    SUBCASE("collinear arms: alpha = pi") {
        const auto& c = find_clique(cs, center, node_at(1, 0, 3), node_at(1, 2, 3));
        CHECK(c.alpha == doctest::Approx(std::numbers::pi));
        CHECK(c.base_weight == doctest::Approx(9.8696).epsilon(1e-5));
    }
    SUBCASE("axial and adjacent diagonal: alpha = pi/4") {
        const auto& c = find_clique(cs, center, node_at(0, 1, 3), node_at(0, 2, 3));
        CHECK(c.alpha == doctest::Approx(std::numbers::pi / 4));
        CHECK(c.base_weight == doctest::Approx(0.61685).epsilon(1e-5));
    }
    SUBCASE("two diagonals at a right angle") {
        const auto& c = find_clique(cs, center, node_at(0, 0, 3), node_at(0, 2, 3));
        CHECK(c.alpha == doctest::Approx(std::numbers::pi / 2));
        CHECK(c.base_weight == doctest::Approx(1.744716).epsilon(1e-6));
    }
    SUBCASE("exponent is honored") {
        const auto c3 = enumerate_cliques(3, 3, {3.0, 20.0});
        const auto& c = find_clique(c3, center, node_at(1, 0, 3), node_at(1, 2, 3));
        CHECK(c.base_weight == doctest::Approx(std::pow(std::numbers::pi, 3)));
    }
}

TEST_CASE("clique enumeration counts and invariants") {
    CHECK(enumerate_cliques(3, 3, {}).size() == 80);
    for (const auto [w, h] : {std::pair{2, 2}, {4, 3}, {6, 6}}) {
        std::size_t expected = 0;
        for (NodeId i = 0; i < w * h; ++i) {
            const auto d = neighbors(i, w, h).size();
            expected += d * (d - 1) / 2;
        }
        const auto cs = enumerate_cliques(w, h, {});
        CHECK(cs.size() == expected);
        for (const auto& c : cs) {
            CHECK(c.j < c.k);
            const double q = c.alpha / (std::numbers::pi / 4);
            CHECK(std::abs(q - std::round(q)) < 1e-12);
            CHECK(c.base_weight > 0.0);
        }
    }
    CHECK_THROWS(enumerate_cliques(1, 5, {}));
    CHECK_THROWS((CurvatureParams{0.5, 20.0}.validate()));
    CHECK_THROWS((CurvatureParams{2.0, -1.0}.validate()));
}

TEST_CASE("contrast weighting") {
    CHECK(contrast_factor(0.3, 0.3, 20.0) == 1.0);
    CHECK(contrast_factor(1.0, 0.0, 20.0) == doctest::Approx(2.061153622438558e-9).epsilon(1e-12));

    // Row 0 holds the clique j = 0, i = 1, k = 2 with g = (0, 1, 1).
    auto cs = enumerate_cliques(3, 2, {});
    GrayImage img2(3, 2, std::vector<double>{0.0, 1.0, 1.0, 0.0, 1.0, 1.0});
    apply_contrast(cs, img2, 20.0);
    const auto& c = find_clique(cs, 1, 0, 2);
    CHECK(c.contrast_weight == doctest::Approx(c.base_weight * std::exp(-20.0)).epsilon(1e-12));

    SUBCASE("beta = 0 is the identity") {
        auto cz = enumerate_cliques(3, 2, {});
        apply_contrast(cz, img2, 0.0);
        for (const auto& q : cz) {
            CHECK(q.contrast_weight == q.base_weight);
        }
    }
    SUBCASE("uniform offset leaves contrast weights unchanged") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(0.0, 0.5);
        std::vector<double> a;
        for (int i = 0; i < 16; ++i) {
            a.push_back(u(rng));
        }
        std::vector<double> b = a;
        for (auto& v : b) {
            v += 0.25;
        }
        auto ca = enumerate_cliques(4, 4, {});
        auto cb = ca;
        apply_contrast(ca, GrayImage(4, 4, a), 20.0);
        apply_contrast(cb, GrayImage(4, 4, b), 20.0);
        for (std::size_t i = 0; i < ca.size(); ++i) {
            CHECK(ca[i].contrast_weight == doctest::Approx(cb[i].contrast_weight).epsilon(1e-12));
            CHECK(ca[i].contrast_weight <= ca[i].base_weight);
            CHECK(ca[i].contrast_weight >= 0.0);
        }
    }
}

TEST_CASE("clique decomposition identity") {
    SUBCASE("worked cases with wc = 2") {
        CurvatureClique c{0, 1, 2, std::numbers::pi, 2.0, 2.0};
        const auto edges = decompose_clique(c);
        auto energy = [&](int xi, int xj, int xk) {
            const int x[3] = {xi, xj, xk};
            double s = 0;
            for (const auto& e : edges) {
                s += e.weight * (x[e.u] != x[e.v] ? 1 : 0);
            }
            return s;
        };
        CHECK(energy(1, 0, 0) == 2.0);
        CHECK(energy(0, 0, 0) == 0.0);
        CHECK(energy(1, 0, 1) == 0.0);
    }
    SUBCASE("all 8 assignments on random cliques") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> wdist(0.0, 10.0);
        for (int t = 0; t < 200; ++t) {
            const NodeId i = 5;
            const NodeId j = 2;
            const NodeId k = 9;
            CurvatureClique c{i, j, k, 1.0, 0.0, wdist(rng)};
            const auto edges = decompose_clique(c);
            for (int bits = 0; bits < 8; ++bits) {
                std::map<NodeId, int> x{{i, bits & 1}, {j, (bits >> 1) & 1}, {k, (bits >> 2) & 1}};
                double s = 0;
                for (const auto& e : edges) {
                    CHECK(e.u < e.v);
                    s += e.weight * (x[e.u] != x[e.v] ? 1 : 0);
                }
                const double expect = (x[i] != x[j] && x[i] != x[k]) ? c.contrast_weight : 0.0;
                CHECK(std::abs(s - expect) <= 1e-12 * std::max(1.0, c.contrast_weight));
            }
        }
    }
}

TEST_CASE("edge accumulation") {
    SUBCASE("exact cancellation drops the pair") {
        const std::vector<EffectiveEdge> in{{0, 1, 1.0}, {1, 0, -1.0}, {2, 3, 0.5}};
        const auto out = accumulate_edges(in);
        REQUIRE(out.size() == 1);
        CHECK(out[0] == EffectiveEdge{2, 3, 0.5});
    }
    SUBCASE("single clique with wc = 2") {
        CurvatureClique c{4, 1, 7, 1.0, 2.0, 2.0};
        const auto parts = decompose_clique(c);
        const auto out = accumulate_edges(parts);
        REQUIRE(out.size() == 3);
        CHECK(out[0] == EffectiveEdge{1, 4, 1.0});
        CHECK(out[1] == EffectiveEdge{1, 7, -1.0});
        CHECK(out[2] == EffectiveEdge{4, 7, 1.0});
    }
    SUBCASE("output sorted with one entry per pair") {
        const auto edges = curvature_edges(GrayImage(5, 4, 0.5), {});
        for (std::size_t i = 1; i < edges.size(); ++i) {
            const bool ordered = edges[i - 1].u < edges[i].u ||
                                 (edges[i - 1].u == edges[i].u && edges[i - 1].v < edges[i].v);
            CHECK(ordered);
        }
        for (const auto& e : edges) {
            CHECK(e.weight != 0.0);
        }
    }
}

TEST_CASE("curvature edges match a clique-level oracle") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> g(0.0, 1.0);
    std::vector<double> values;
    for (int i = 0; i < 20; ++i) {
        values.push_back(g(rng));
    }
    const GrayImage img(5, 4, values);
    const CurvatureParams params{2.0, 3.0};
    const auto edges = curvature_edges(img, params);
    auto cliques = enumerate_cliques(5, 4, params);
    apply_contrast(cliques, img, params.beta);
    std::bernoulli_distribution coin(0.5);
    for (int t = 0; t < 50; ++t) {
        std::vector<int> x(20);
        for (auto& v : x) {
            v = coin(rng);
        }
        double via_edges = 0;
        for (const auto& e : edges) {
            via_edges += e.weight * (x[static_cast<std::size_t>(e.u)] != x[static_cast<std::size_t>(e.v)]);
        }
        double via_cliques = 0;
        for (const auto& c : cliques) {
            const int xi = x[static_cast<std::size_t>(c.center)];
            if (xi != x[static_cast<std::size_t>(c.j)] && xi != x[static_cast<std::size_t>(c.k)]) {
                via_cliques += c.contrast_weight;
            }
        }
        CHECK(via_edges == doctest::Approx(via_cliques).epsilon(1e-9));
    }
}

TEST_CASE("edge dump format") {
    std::ostringstream out;
    const std::vector<EffectiveEdge> edges{{0, 1, std::numbers::pi}, {2, 5, -0.5}};
    write_edge_dump(out, edges);
    CHECK(out.str() == "0 1 3.14159265359\n2 5 -0.5\n");
}
