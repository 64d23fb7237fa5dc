// Acceptance checks: one PASS/FAIL line per criterion.
// Usage: acceptance [--expect-fail N]...  Exit status is 0 when every failing criterion was expected to fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "curvseg/curvature.hpp"
#include "curvseg/energy.hpp"
#include "curvseg/qpbo.hpp"
#include "curvseg/segmenter.hpp"
#include "curvseg/synthcorpus.hpp"

using namespace curvseg;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::vector<std::uint8_t> bits_of(std::uint32_t code, std::int32_t n) {
    std::vector<std::uint8_t> x(static_cast<std::size_t>(n));
    for (std::int32_t i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((code >> i) & 1u);
    }
    return x;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome decomposition_identity() {
    std::mt19937 rng(1001);
    std::uniform_int_distribution<NodeId> node(0, 1'000'000);
    std::uniform_real_distribution<double> log_w(-6.0, 6.0);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        NodeId i = node(rng);
        NodeId j = node(rng);
        NodeId k = node(rng);
        while (j == i) {
            j = node(rng);
        }
        while (k == i || k == j) {
            k = node(rng);
        }
        if (j > k) {
            std::swap(j, k);
        }
        const double wc = std::exp(log_w(rng));
        const CurvatureClique c{i, j, k, 1.0, wc, wc};
        const auto edges = decompose_clique(c);
        for (int bits = 0; bits < 8; ++bits) {
            auto x = [&](NodeId v) { return v == i ? bits & 1 : v == j ? (bits >> 1) & 1 : (bits >> 2) & 1; };
            double s = 0.0;
            for (const auto& e : edges) {
                s += e.weight * (x(e.u) != x(e.v) ? 1.0 : 0.0);
            }
            const double expect = (x(i) != x(j) && x(i) != x(k)) ? wc : 0.0;
            worst = std::max(worst, std::abs(s - expect) / wc);
        }
    }
    return {worst <= 1e-12, fmt("max relative error %.3g over 8000 evaluations", worst)};
}

IntEnergy random_mixed_energy(std::mt19937& rng, std::int32_t n) {
    std::uniform_int_distribution<int> coef(-20, 20);
    std::bernoulli_distribution keep(0.5);
    IntEnergy e(n);
    e.add_constant(coef(rng));
    for (std::int32_t i = 0; i < n; ++i) {
        e.add_unary(i, coef(rng), coef(rng));
    }
    for (std::int32_t a = 0; a < n; ++a) {
        for (std::int32_t b = a + 1; b < n; ++b) {
            if (keep(rng)) {
                e.add_pairwise(a, b, {coef(rng), coef(rng), coef(rng), coef(rng)});
            }
        }
    }
    return e;
}

Outcome qpbo_persistency() {
    std::mt19937 rng(2002);
    int violations = 0;
    int complete = 0;
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::int32_t n = 2 + static_cast<std::int32_t>(rng() % 11);
        const auto e = random_mixed_energy(rng, n);
        const auto r = solve_qpbo(e);
        std::uniform_int_distribution<std::uint32_t> pick(0, (1u << n) - 1);
        for (int k = 0; k < 50; ++k) {
            const auto y = bits_of(pick(rng), n);
            auto fused = y;
            for (std::size_t i = 0; i < fused.size(); ++i) {
                if (r.labeling[i] != Label::Unlabeled) {
                    fused[i] = static_cast<std::uint8_t>(r.labeling[i] == Label::One);
                }
            }
            violations += evaluate_bits(e, fused) > evaluate_bits(e, y) ? 1 : 0;
        }
        if (count_unlabeled(r.labeling) == 0) {
            ++complete;
            mismatches += static_cast<double>(evaluate(e, r.labeling)) != brute_force_optimum(e).energy ? 1 : 0;
        }
    }
    return {violations == 0 && mismatches == 0,
            std::to_string(violations) + " fusion violations, " + std::to_string(mismatches) + " mismatches in " +
                std::to_string(complete) + " complete labelings"};
}

Outcome signed_degeneracy() {
    std::mt19937 rng(3003);
    std::uniform_real_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> lam(0.1, 4.0);
    std::uniform_real_distribution<double> beta(0.0, 30.0);
    const std::pair<int, int> shapes[] = {{2, 3}, {3, 3}, {2, 5}, {3, 4}, {2, 7}, {3, 5}, {4, 4}};
    int differ = 0;
    for (int t = 0; t < 50; ++t) {
        const auto [w, h] = shapes[t % 7];
        const std::int32_t n = w * h;
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto& x : v) {
            x = g(rng) < 0.5 ? g(rng) : std::round(g(rng));
        }
        const CurvatureParams params{1.0 + 2.0 * g(rng), beta(rng)};
        const auto edges = curvature_edges(GrayImage(w, h, v), params);
        const double lambda = lam(rng);
        const auto signed_e = build_energy(edges, n, lambda, AttractionMode::Signed);
        Energy curv(n);
        double scale = 1.0;
        for (const auto& e : edges) {
            curv.add_pairwise(e.u, e.v, {0.0, e.weight, e.weight, 0.0});
            scale += std::abs(e.weight);
        }
        const double tol = 1e-9 * scale;
        const auto a = brute_force_argmin_set(signed_e, tol * (1 + lambda / 2));
        const auto b = brute_force_argmin_set(curv, tol);
        differ += a == b ? 0 : 1;
    }
    return {differ == 0, std::to_string(differ) + " of 50 instances with differing argmin sets"};
}

Outcome bar_extension() {
    const auto c = gen_bar(40, 20, 30, 4);
    const auto r = segment(c.image, c.seeds);
    const double d = dice(r.mask, c.ground_truth);
    return {d == 1.0 && r.report.unlabeled_count == 0,
            fmt("dice %.4f", d) + ", unlabeled " + std::to_string(r.report.unlabeled_count)};
}

Outcome gap_bridging() {
    const auto c = gen_dotted_outline(OutlineShape::Circle, 3, 4);
    const auto r = segment(c.image, c.seeds);
    const double d = dice(r.mask, c.ground_truth);
    const int comps = count_components8(r.mask);
    return {d >= 0.95 && comps == 1, fmt("dice %.4f", d) + ", components " + std::to_string(comps)};
}

Outcome same_intensity_separation() {
    const auto c = gen_circle_bump(15, 5);
    const auto r = segment(c.image, c.seeds);
    const double d = dice(r.mask, c.ground_truth);
    std::size_t bump = 0;
    std::size_t inside = 0;
    for (std::size_t i = 0; i < c.excluded.values.size(); ++i) {
        if (c.excluded.values[i]) {
            ++bump;
            inside += r.mask.values[i];
        }
    }
    const double frac = bump ? static_cast<double>(inside) / static_cast<double>(bump) : 0.0;
    return {d >= 0.95 && frac <= 0.10,
            fmt("dice %.4f", d) + ", bump labeled object " + std::to_string(inside) + "/" + std::to_string(bump) +
                fmt(" (%.1f%%)", 100.0 * frac)};
}

Outcome corner_preservation() {
    std::string detail;
    bool pass = true;
    for (const double angle : {90.0, 45.0}) {
        const auto c = gen_corner_shape(angle);
        const auto r = segment(c.image, c.seeds);
        // A 7x7 window around the apex reaches the first boundary pixel of each leg even at 45 degrees.
        int checked = 0;
        int wrong = 0;
        int legs = 0;
        for (int dr = -3; dr <= 3; ++dr) {
            for (int dc = -3; dc <= 3; ++dc) {
                const int row = c.apex->row + dr;
                const int col = c.apex->col + dc;
                if (row < 0 || col < 0 || row >= c.ground_truth.height || col >= c.ground_truth.width) {
                    continue;
                }
                ++checked;
                wrong += r.mask.at(row, col) != c.ground_truth.at(row, col) ? 1 : 0;
                legs += (dr != 0 && c.ground_truth.at(row, col)) ? 1 : 0;
            }
        }
        pass = pass && wrong == 0 && legs > 0 && c.ground_truth.at(c.apex->row, c.apex->col) == 1;
        detail += fmt("%g deg: ", angle) + std::to_string(wrong) + "/" + std::to_string(checked) + " wrong in the apex window; ";
    }
    detail.resize(detail.size() - 2);
    return {pass, detail};
}

Outcome complete_labeling_on_corpus() {
    std::string bad;
    for (const auto& c : default_corpus()) {
        const auto r = segment(c.image, c.seeds);
        if (r.report.unlabeled_count != 0) {
            bad += " " + c.name + "=" + std::to_string(r.report.unlabeled_count);
        }
    }
    return {bad.empty(), bad.empty() ? "all cases fully labeled" : "unlabeled:" + bad};
}

Outcome speed_sanity() {
    const int side = 256;
    std::mt19937 rng(9009);
    std::uniform_real_distribution<double> g(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(side * side));
    for (auto& x : v) {
        x = g(rng);
    }
    SeedMask seeds(side, side);
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            if (r == 0 || c == 0 || r == side - 1 || c == side - 1) {
                seeds.mark(r, c, Seed::Background);
            } else if (std::hypot(r - side / 2, c - side / 2) < 10) {
                seeds.mark(r, c, Seed::Foreground);
            }
        }
    }
    const auto start = std::chrono::steady_clock::now();
    const auto r = segment(GrayImage(side, side, v), seeds);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {s < 30.0, fmt("%.2f s end to end", s) + ", unlabeled " + std::to_string(r.report.unlabeled_count)};
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0 means no runtime bound
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> expected_fail;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--expect-fail") == 0 && i + 1 < argc) {
            expected_fail.insert(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--expect-fail N]...\n", argv[0]);
            return 2;
        }
    }

    const std::vector<Criterion> criteria{
        {1, "clique decomposition identity", 1.0, decomposition_identity},
        {2, "QPBO persistency vs brute force", 30.0, qpbo_persistency},
        {3, "signed-mode argmin degeneracy", 60.0, signed_degeneracy},
        {4, "bar extension", 10.0, bar_extension},
        {5, "gap bridging", 10.0, gap_bridging},
        {6, "same-intensity separation", 10.0, same_intensity_separation},
        {7, "corner preservation", 10.0, corner_preservation},
        {8, "complete labeling on the corpus", 0.0, complete_labeling_on_corpus},
        {9, "speed on 256x256 noise", 30.0, speed_sanity},
    };

    int unexpected = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0 && s >= c.limit_s) {
            o.pass = false;
            o.detail += fmt("; over the %.0f s limit", c.limit_s);
        }
        const bool expected = expected_fail.count(c.id) > 0;
        std::printf("[%s] %d %s: %s (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), s,
                    !o.pass && expected ? " [expected failure]" : "");
        if (!o.pass && !expected) {
            ++unexpected;
        }
        if (o.pass && expected) {
            std::printf("     note: criterion %d passed but was listed as expected to fail\n", c.id);
        }
        std::fflush(stdout);
    }
    return unexpected == 0 ? 0 : 1;
}
