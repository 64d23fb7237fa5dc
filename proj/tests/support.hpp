#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "curvseg/energy.hpp"

namespace testsupport {

/// Random integer energy with mixed-sign tables on about `density` of all pairs.
inline curvseg::IntEnergy random_int_energy(std::mt19937& rng, std::int32_t n, double density = 0.4,
                                             int range = 20) {
    std::uniform_int_distribution<int> coef(-range, range);
    std::bernoulli_distribution keep(density);
    curvseg::IntEnergy e(n);
    e.add_constant(coef(rng));
    for (std::int32_t i = 0; i < n; ++i) {
        e.add_unary(i, coef(rng), coef(rng));
    }
    for (std::int32_t u = 0; u < n; ++u) {
        for (std::int32_t v = u + 1; v < n; ++v) {
            if (keep(rng)) {
                e.add_pairwise(u, v, {coef(rng), coef(rng), coef(rng), coef(rng)});
            }
        }
    }
    return e;
}

/// Random submodular integer energy.
inline curvseg::IntEnergy random_submodular(std::mt19937& rng, std::int32_t n, double density = 0.4) {
    std::uniform_int_distribution<int> coef(-20, 20);
    std::uniform_int_distribution<int> gap(0, 20);
    std::bernoulli_distribution keep(density);
    curvseg::IntEnergy e(n);
    for (std::int32_t i = 0; i < n; ++i) {
        e.add_unary(i, coef(rng), coef(rng));
    }
    for (std::int32_t u = 0; u < n; ++u) {
        for (std::int32_t v = u + 1; v < n; ++v) {
            if (keep(rng)) {
                const std::int64_t a = coef(rng);
                const std::int64_t d = coef(rng);
                const std::int64_t b = coef(rng);
                const std::int64_t c = a + d - b + gap(rng);  // a + d <= b + c
                e.add_pairwise(u, v, {a, b, c, d});
            }
        }
    }
    return e;
}

inline std::vector<std::uint8_t> bits_of(std::uint32_t code, std::int32_t n) {
    std::vector<std::uint8_t> x(static_cast<std::size_t>(n));
    for (std::int32_t i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((code >> i) & 1u);
    }
    return x;
}

inline curvseg::Labeling labels_of(const std::vector<std::uint8_t>& bits) {
    curvseg::Labeling l;
    for (auto b : bits) {
        l.push_back(curvseg::to_label(b));
    }
    return l;
}

/// Overwrites y with the labeled entries of `partial`.
inline std::vector<std::uint8_t> fuse(const curvseg::Labeling& partial, std::vector<std::uint8_t> y) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (partial[i] != curvseg::Label::Unlabeled) {
            y[i] = partial[i] == curvseg::Label::One ? 1 : 0;
        }
    }
    return y;
}

}  // namespace testsupport
