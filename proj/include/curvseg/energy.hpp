#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "curvseg/curvature.hpp"
#include "curvseg/lattice.hpp"

namespace curvseg {

/// Value of a binary variable; Unlabeled only appears in partial labelings.
enum class Label : std::int8_t { Zero = 0, One = 1, Unlabeled = -1 };

using Labeling = std::vector<Label>;

inline Label to_label(int bit) { return bit ? Label::One : Label::Zero; }

std::size_t count_unlabeled(std::span<const Label> labeling);

/// 2x2 table indexed [x_u * 2 + x_v]: (00, 01, 10, 11).
template <typename T>
using Table = std::array<T, 4>;

template <typename T>
struct PairwiseTerm {
    std::int32_t u;  // u < v
    std::int32_t v;
    Table<T> table;
};

/// Quadratic pseudo-Boolean energy
///   E(x) = constant + sum_i unary_i(x_i) + sum_(u,v) table_uv(x_u, x_v)
/// with each unordered pair stored at most once.
template <typename T>
class BasicEnergy {
public:
    using value_type = T;

    BasicEnergy() = default;
    explicit BasicEnergy(std::int32_t n) : unary_(static_cast<std::size_t>(n), {T{}, T{}}) {}

    std::int32_t size() const { return static_cast<std::int32_t>(unary_.size()); }

    void add_constant(T c) { constant_ += c; }
    void add_unary(std::int32_t i, T cost0, T cost1) {
        check_var(i);
        unary_[static_cast<std::size_t>(i)][0] += cost0;
        unary_[static_cast<std::size_t>(i)][1] += cost1;
    }
    /// Adds a table to the pair (a, b); the table is indexed by (x_a, x_b).
    void add_pairwise(std::int32_t a, std::int32_t b, const Table<T>& t);

    T constant() const { return constant_; }
    const std::array<T, 2>& unary(std::int32_t i) const { return unary_[static_cast<std::size_t>(i)]; }
    std::span<const std::array<T, 2>> unaries() const { return unary_; }
    std::span<const PairwiseTerm<T>> pairwise() const { return pairwise_; }

    // Direct mutation keeps the pair index valid because u, v are not touched.
    std::array<T, 2>& unary_mut(std::int32_t i) { return unary_[static_cast<std::size_t>(i)]; }
    Table<T>& table_mut(std::size_t term) { return pairwise_[term].table; }
    void set_constant(T c) { constant_ = c; }

private:
    void check_var(std::int32_t i) const;

    T constant_{};
    std::vector<std::array<T, 2>> unary_;
    std::vector<PairwiseTerm<T>> pairwise_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

using Energy = BasicEnergy<double>;
using IntEnergy = BasicEnergy<std::int64_t>;

extern template class BasicEnergy<double>;
extern template class BasicEnergy<std::int64_t>;

/// Exact value of a full labeling; throws on Unlabeled entries.
template <typename T>
T evaluate(const BasicEnergy<T>& e, std::span<const Label> x);

/// Same as evaluate() for 0/1 bits.
template <typename T>
T evaluate_bits(const BasicEnergy<T>& e, std::span<const std::uint8_t> x);

template <typename T>
bool is_submodular(const Table<T>& t) {
    return t[0] + t[3] <= t[1] + t[2];
}

template <typename T>
bool is_submodular(const BasicEnergy<T>& e) {
    for (const auto& p : e.pairwise()) {
        if (!is_submodular(p.table)) {
            return false;
        }
    }
    return true;
}

/// Reparameterization: row and column minima of every table are moved into
/// unaries, then unary minima into the constant. Preserves evaluate() exactly
/// for integer energies (and up to rounding for doubles).
template <typename T>
BasicEnergy<T> to_normal_form(const BasicEnergy<T>& e);

template <typename T>
bool is_normal_form(const BasicEnergy<T>& e);

enum class AttractionMode { Magnitude, Signed };

/// Curvature cut term plus negated attraction for every effective edge:
///   table(01) = table(10) = w,  table(00) = table(11) = -lambda * a / 2
/// where a = |w| (Magnitude) or w (Signed).
Energy build_energy(std::span<const EffectiveEdge> edges, std::int32_t n, double lambda, AttractionMode mode);

/// 1 + sum of table ranges + sum of unary ranges: exceeds any saving the
/// non-seed terms can offer for violating a seed.
double default_seed_penalty(const Energy& e);

/// FG seed i gets unary(0) += K, BG seed gets unary(1) += K.
Energy add_seeds(const Energy& e, const SeedMask& seeds, double penalty);

/// Text interchange: `p qpbe n m`, `k constant`, `i c0 c1` for each nonzero
/// unary, `e u v t00 t01 t10 t11` for each pairwise term. Lines starting with
/// `c` are comments.
template <typename T>
void write_energy(std::ostream& out, const BasicEnergy<T>& e);
Energy read_energy(std::istream& in);

}  // namespace curvseg
