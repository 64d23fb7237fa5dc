#include "curvseg/energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace curvseg {

std::size_t count_unlabeled(std::span<const Label> labeling) {
    return static_cast<std::size_t>(std::count(labeling.begin(), labeling.end(), Label::Unlabeled));
}

template <typename T>
void BasicEnergy<T>::check_var(std::int32_t i) const {
    if (i < 0 || i >= size()) {
        throw Error("variable index out of range");
    }
}

template <typename T>
void BasicEnergy<T>::add_pairwise(std::int32_t a, std::int32_t b, const Table<T>& t) {
    check_var(a);
    check_var(b);
    if (a == b) {
        throw Error("pairwise term needs two distinct variables");
    }
    Table<T> oriented = t;
    if (a > b) {
        std::swap(a, b);
        oriented = {t[0], t[2], t[1], t[3]};
    }
    const auto key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    const auto [it, inserted] = index_.try_emplace(key, pairwise_.size());
    if (inserted) {
        pairwise_.push_back({a, b, oriented});
    } else {
        auto& table = pairwise_[it->second].table;
        for (int s = 0; s < 4; ++s) {
            table[s] += oriented[s];
        }
    }
}

template class BasicEnergy<double>;
template class BasicEnergy<std::int64_t>;

template <typename T>
T evaluate(const BasicEnergy<T>& e, std::span<const Label> x) {
    if (static_cast<std::int32_t>(x.size()) != e.size()) {
        throw Error("labeling size does not match energy");
    }
    T total = e.constant();
    for (std::int32_t i = 0; i < e.size(); ++i) {
        const Label l = x[static_cast<std::size_t>(i)];
        if (l == Label::Unlabeled) {
            throw Error("cannot evaluate a labeling with unlabeled variables");
        }
        total += e.unary(i)[l == Label::One ? 1 : 0];
    }
    for (const auto& p : e.pairwise()) {
        const int xu = x[static_cast<std::size_t>(p.u)] == Label::One ? 1 : 0;
        const int xv = x[static_cast<std::size_t>(p.v)] == Label::One ? 1 : 0;
        total += p.table[static_cast<std::size_t>(xu * 2 + xv)];
    }
    return total;
}

template <typename T>
T evaluate_bits(const BasicEnergy<T>& e, std::span<const std::uint8_t> x) {
    if (static_cast<std::int32_t>(x.size()) != e.size()) {
        throw Error("labeling size does not match energy");
    }
    T total = e.constant();
    for (std::int32_t i = 0; i < e.size(); ++i) {
        total += e.unary(i)[x[static_cast<std::size_t>(i)] ? 1 : 0];
    }
    for (const auto& p : e.pairwise()) {
        const int xu = x[static_cast<std::size_t>(p.u)] ? 1 : 0;
        const int xv = x[static_cast<std::size_t>(p.v)] ? 1 : 0;
        total += p.table[static_cast<std::size_t>(xu * 2 + xv)];
    }
    return total;
}

template double evaluate(const Energy&, std::span<const Label>);
template std::int64_t evaluate(const IntEnergy&, std::span<const Label>);
template double evaluate_bits(const Energy&, std::span<const std::uint8_t>);
template std::int64_t evaluate_bits(const IntEnergy&, std::span<const std::uint8_t>);

template <typename T>
BasicEnergy<T> to_normal_form(const BasicEnergy<T>& e) {
    BasicEnergy<T> out = e;
    const auto terms = out.pairwise();
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const auto u = terms[k].u;
        const auto v = terms[k].v;
        auto& t = out.table_mut(k);
        // Rows belong to x_u, columns to x_v.
        for (int row = 0; row < 2; ++row) {
            const T m = std::min(t[row * 2], t[row * 2 + 1]);
            t[row * 2] -= m;
            t[row * 2 + 1] -= m;
            out.unary_mut(u)[row] += m;
        }
        for (int col = 0; col < 2; ++col) {
            const T m = std::min(t[col], t[2 + col]);
            t[col] -= m;
            t[2 + col] -= m;
            out.unary_mut(v)[col] += m;
        }
    }
    for (std::int32_t i = 0; i < out.size(); ++i) {
        auto& un = out.unary_mut(i);
        const T m = std::min(un[0], un[1]);
        un[0] -= m;
        un[1] -= m;
        out.add_constant(m);
    }
    return out;
}

template Energy to_normal_form(const Energy&);
template IntEnergy to_normal_form(const IntEnergy&);

template <typename T>
bool is_normal_form(const BasicEnergy<T>& e) {
    for (const auto& un : e.unaries()) {
        if (std::min(un[0], un[1]) != T{} || un[0] < T{} || un[1] < T{}) {
            return false;
        }
    }
    for (const auto& p : e.pairwise()) {
        const auto& t = p.table;
        if (std::any_of(t.begin(), t.end(), [](T v) { return v < T{}; })) {
            return false;
        }
        if (std::min(t[0], t[1]) != T{} || std::min(t[2], t[3]) != T{} || std::min(t[0], t[2]) != T{} ||
            std::min(t[1], t[3]) != T{}) {
            return false;
        }
    }
    return true;
}

template bool is_normal_form(const Energy&);
template bool is_normal_form(const IntEnergy&);

Energy build_energy(std::span<const EffectiveEdge> edges, std::int32_t n, double lambda, AttractionMode mode) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error("attraction weight lambda must be > 0");
    }
    Energy e(n);
    for (const auto& edge : edges) {
        const double a = mode == AttractionMode::Magnitude ? std::abs(edge.weight) : edge.weight;
        const double agree = -lambda * a / 2.0;
        e.add_pairwise(edge.u, edge.v, {agree, edge.weight, edge.weight, agree});
    }
    return e;
}

double default_seed_penalty(const Energy& e) {
    double total = 1.0;
    for (const auto& p : e.pairwise()) {
        const auto [lo, hi] = std::minmax_element(p.table.begin(), p.table.end());
        total += *hi - *lo;
    }
    for (const auto& un : e.unaries()) {
        total += std::abs(un[1] - un[0]);
    }
    return total;
}

Energy add_seeds(const Energy& e, const SeedMask& seeds, double penalty) {
    if (static_cast<std::int32_t>(seeds.size()) != e.size()) {
        throw Error("seed mask size does not match energy");
    }
    if (!(penalty > 0.0) || !std::isfinite(penalty)) {
        throw Error("seed penalty must be > 0");
    }
    if (seeds.count(Seed::Foreground) == 0 || seeds.count(Seed::Background) == 0) {
        throw Error("both seed classes required");
    }
    Energy out = e;
    for (std::int32_t i = 0; i < e.size(); ++i) {
        switch (seeds[i]) {
            case Seed::Foreground:
                out.add_unary(i, penalty, 0.0);
                break;
            case Seed::Background:
                out.add_unary(i, 0.0, penalty);
                break;
            case Seed::None:
                break;
        }
    }
    return out;
}

namespace {

template <typename T>
std::string format_value(T v) {
    if constexpr (std::is_integral_v<T>) {
        return std::to_string(v);
    } else {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }
}

}  // namespace

template <typename T>
void write_energy(std::ostream& out, const BasicEnergy<T>& e) {
    out << "p qpbe " << e.size() << ' ' << e.pairwise().size() << '\n';
    out << "k " << format_value(e.constant()) << '\n';
    for (std::int32_t i = 0; i < e.size(); ++i) {
        const auto& un = e.unary(i);
        if (un[0] != T{} || un[1] != T{}) {
            out << i << ' ' << format_value(un[0]) << ' ' << format_value(un[1]) << '\n';
        }
    }
    for (const auto& p : e.pairwise()) {
        out << "e " << p.u << ' ' << p.v;
        for (T v : p.table) {
            out << ' ' << format_value(v);
        }
        out << '\n';
    }
}

template void write_energy(std::ostream&, const Energy&);
template void write_energy(std::ostream&, const IntEnergy&);

Energy read_energy(std::istream& in) {
    std::string line;
    Energy e;
    bool have_header = false;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw Error("energy dump line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag == "c") {
            continue;
        }
        if (tag == "p") {
            std::string kind;
            std::int32_t n = 0;
            std::size_t m = 0;
            if (!(ls >> kind >> n >> m) || kind != "qpbe" || n < 0) {
                fail("bad header");
            }
            e = Energy(n);
            have_header = true;
            continue;
        }
        if (!have_header) {
            fail("missing `p qpbe n m` header");
        }
        if (tag == "k") {
            double c = 0;
            if (!(ls >> c)) {
                fail("bad constant");
            }
            e.add_constant(c);
        } else if (tag == "e") {
            std::int32_t u = 0;
            std::int32_t v = 0;
            Table<double> t{};
            if (!(ls >> u >> v >> t[0] >> t[1] >> t[2] >> t[3])) {
                fail("bad edge");
            }
            e.add_pairwise(u, v, t);
        } else {
            std::int32_t i = 0;
            try {
                i = std::stoi(tag);
            } catch (const std::exception&) {
                fail("unknown record `" + tag + "`");
            }
            double c0 = 0;
            double c1 = 0;
            if (!(ls >> c0 >> c1)) {
                fail("bad unary");
            }
            e.add_unary(i, c0, c1);
        }
    }
    if (!have_header) {
        throw Error("energy dump: missing header");
    }
    return e;
}

}  // namespace curvseg
