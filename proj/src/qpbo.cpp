#include "curvseg/qpbo.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "curvseg/maxflow.hpp"

namespace curvseg {

IntEnergy quantize(const Energy& e, std::int64_t scale) {
    if (scale < 1) {
        throw Error("quantization scale must be >= 1");
    }
    const double limit = std::ldexp(1.0, 62) / static_cast<double>(scale);
    auto q = [&](double c) -> std::int64_t {
        if (!std::isfinite(c) || std::abs(c) > limit) {
            throw Error("energy scale too large");
        }
        return std::llround(c * static_cast<double>(scale));
    };
    IntEnergy out(e.size());
    out.add_constant(q(e.constant()));
    for (std::int32_t i = 0; i < e.size(); ++i) {
        const auto& un = e.unary(i);
        out.add_unary(i, q(un[0]), q(un[1]));
    }
    for (const auto& p : e.pairwise()) {
        out.add_pairwise(p.u, p.v, {q(p.table[0]), q(p.table[1]), q(p.table[2]), q(p.table[3])});
    }
    return out;
}

FlowNetwork build_qpbo_network(const IntEnergy& e) {
    const std::int32_t n = e.size();
    const std::int32_t source = 2 * n;
    const std::int32_t sink = 2 * n + 1;
    auto neg = [n](std::int32_t i) { return n + i; };

    FlowNetwork net(2 * n + 2, source, sink);
    // Literal x_i sits on the source side when x_i = 0; not-x_i when x_i = 1.
    for (std::int32_t i = 0; i < n; ++i) {
        const auto [c0, c1] = e.unary(i);
        if (c0 < 0 || c1 < 0) {
            throw Error("QPBO network requires an energy in normal form");
        }
        if (c1 > 0) {
            net.add_arc(source, i, c1);
            net.add_arc(neg(i), sink, c1);
        }
        if (c0 > 0) {
            net.add_arc(i, sink, c0);
            net.add_arc(source, neg(i), c0);
        }
    }
    for (const auto& p : e.pairwise()) {
        const auto [a, b, c, d] = p.table;
        if (a == 0 && b == 0 && c == 0 && d == 0) {
            continue;
        }
        if (a == 0 && d == 0) {
            net.add_arc(p.u, p.v, b, c);
            net.add_arc(neg(p.u), neg(p.v), c, b);
        } else if (b == 0 && c == 0) {
            net.add_arc(p.u, neg(p.v), a, d);
            net.add_arc(p.v, neg(p.u), a, d);
        } else {
            throw Error("QPBO network requires an energy in normal form");
        }
    }
    return net;
}

QpboResult solve_qpbo(const IntEnergy& input) {
    const IntEnergy e = to_normal_form(input);
    const std::int32_t n = e.size();
    auto neg = [n](std::int32_t i) { return n + i; };
    FlowNetwork net = build_qpbo_network(e);
    std::vector<std::uint8_t> touched(static_cast<std::size_t>(n), 0);
    for (std::int32_t i = 0; i < n; ++i) {
        const auto& un = e.unary(i);
        touched[static_cast<std::size_t>(i)] = (un[0] != 0 || un[1] != 0) ? 1 : 0;
    }
    for (const auto& p : e.pairwise()) {
        const auto& t = p.table;
        if (t[0] != 0 || t[1] != 0 || t[2] != 0 || t[3] != 0) {
            touched[static_cast<std::size_t>(p.u)] = 1;
            touched[static_cast<std::size_t>(p.v)] = 1;
        }
    }

    const auto flow = net.maxflow();
    const auto& side = net.source_side();
    QpboResult result;
    result.lower_bound = static_cast<double>(e.constant()) + static_cast<double>(flow) / 2.0;
    result.labeling.assign(static_cast<std::size_t>(n), Label::Unlabeled);
    const bool submodular = is_submodular(e);
    for (std::int32_t i = 0; i < n; ++i) {
        const bool pos = side[static_cast<std::size_t>(i)] != 0;
        const bool negated = side[static_cast<std::size_t>(neg(i))] != 0;
        auto& l = result.labeling[static_cast<std::size_t>(i)];
        if (pos && !negated) {
            l = Label::Zero;
        } else if (!pos && negated) {
            l = Label::One;
        } else if (submodular && touched[static_cast<std::size_t>(i)]) {
            l = pos ? Label::Zero : Label::One;
        }
    }
    return result;
}

namespace {

/// Union-find with parity over the original variables. Each root may carry a
/// fixed value; x_v = x_root XOR parity(v).
class VariableState {
public:
    explicit VariableState(std::int32_t n)
        : parent_(static_cast<std::size_t>(n)), parity_(static_cast<std::size_t>(n), 0),
          fixed_(static_cast<std::size_t>(n), -1) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    std::pair<std::int32_t, int> find(std::int32_t v) const {
        int parity = 0;
        while (parent_[static_cast<std::size_t>(v)] != v) {
            parity ^= parity_[static_cast<std::size_t>(v)];
            v = parent_[static_cast<std::size_t>(v)];
        }
        return {v, parity};
    }

    bool is_free_root(std::int32_t v) const {
        return parent_[static_cast<std::size_t>(v)] == v && fixed_[static_cast<std::size_t>(v)] < 0;
    }

    int fixed(std::int32_t root) const { return fixed_[static_cast<std::size_t>(root)]; }

    void fix(std::int32_t v, int value) {
        const auto [r, p] = find(v);
        fixed_[static_cast<std::size_t>(r)] = value ^ p;
    }

    /// x_a = x_b XOR opposite.
    void merge(std::int32_t a, std::int32_t b, int opposite) {
        auto [ra, pa] = find(a);
        auto [rb, pb] = find(b);
        if (ra == rb) {
            return;
        }
        if (ra < rb) {
            std::swap(ra, rb);
            std::swap(pa, pb);
        }
        // Attach ra below rb: x_ra = x_rb XOR (pa ^ pb ^ opposite).
        parent_[static_cast<std::size_t>(ra)] = rb;
        parity_[static_cast<std::size_t>(ra)] = static_cast<std::uint8_t>(pa ^ pb ^ opposite);
        if (fixed_[static_cast<std::size_t>(ra)] >= 0 && fixed_[static_cast<std::size_t>(rb)] < 0) {
            fixed_[static_cast<std::size_t>(rb)] = fixed_[static_cast<std::size_t>(ra)] ^ (pa ^ pb ^ opposite);
        }
    }

    Label value(std::int32_t v) const {
        const auto [r, p] = find(v);
        const int f = fixed_[static_cast<std::size_t>(r)];
        return f < 0 ? Label::Unlabeled : to_label(f ^ p);
    }

private:
    std::vector<std::int32_t> parent_;
    std::vector<std::uint8_t> parity_;
    std::vector<int> fixed_;
};

struct Reduced {
    IntEnergy energy;
    std::vector<std::int32_t> roots;    // compact index -> original root
    std::vector<std::int32_t> compact;  // original root -> compact index or -1
};

Reduced reduce(const IntEnergy& e, const VariableState& state) {
    Reduced r;
    const std::int32_t n = e.size();
    r.compact.assign(static_cast<std::size_t>(n), -1);
    for (std::int32_t v = 0; v < n; ++v) {
        if (state.is_free_root(v)) {
            r.compact[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(r.roots.size());
            r.roots.push_back(v);
        }
    }
    r.energy = IntEnergy(static_cast<std::int32_t>(r.roots.size()));
    r.energy.add_constant(e.constant());

    struct Resolved {
        std::int32_t index;  // compact index, -1 when fixed
        int parity;          // or fixed value when index == -1
    };
    auto resolve = [&](std::int32_t v) -> Resolved {
        const auto [root, parity] = state.find(v);
        const int f = state.fixed(root);
        if (f >= 0) {
            return {-1, f ^ parity};
        }
        return {r.compact[static_cast<std::size_t>(root)], parity};
    };

    for (std::int32_t v = 0; v < n; ++v) {
        const auto& un = e.unary(v);
        if (un[0] == 0 && un[1] == 0) {
            continue;
        }
        const auto rv = resolve(v);
        if (rv.index < 0) {
            r.energy.add_constant(un[static_cast<std::size_t>(rv.parity)]);
        } else {
            r.energy.add_unary(rv.index, un[static_cast<std::size_t>(rv.parity)],
                               un[static_cast<std::size_t>(1 ^ rv.parity)]);
        }
    }
    for (const auto& p : e.pairwise()) {
        const auto ru = resolve(p.u);
        const auto rv = resolve(p.v);
        const auto& t = p.table;
        auto at = [&](int xu, int xv) { return t[static_cast<std::size_t>(xu * 2 + xv)]; };
        if (ru.index < 0 && rv.index < 0) {
            r.energy.add_constant(at(ru.parity, rv.parity));
        } else if (ru.index < 0) {
            r.energy.add_unary(rv.index, at(ru.parity, rv.parity), at(ru.parity, 1 ^ rv.parity));
        } else if (rv.index < 0) {
            r.energy.add_unary(ru.index, at(ru.parity, rv.parity), at(1 ^ ru.parity, rv.parity));
        } else if (ru.index == rv.index) {
            r.energy.add_unary(ru.index, at(ru.parity, rv.parity), at(1 ^ ru.parity, 1 ^ rv.parity));
        } else {
            r.energy.add_pairwise(ru.index, rv.index,
                                  {at(ru.parity, rv.parity), at(ru.parity, 1 ^ rv.parity),
                                   at(1 ^ ru.parity, rv.parity), at(1 ^ ru.parity, 1 ^ rv.parity)});
        }
    }
    return r;
}

/// Energy over the same variables with `var` fixed to `value` and isolated.
IntEnergy condition(const IntEnergy& e, std::int32_t var, int value) {
    IntEnergy out(e.size());
    out.add_constant(e.constant());
    for (std::int32_t i = 0; i < e.size(); ++i) {
        const auto& un = e.unary(i);
        if (i == var) {
            out.add_constant(un[static_cast<std::size_t>(value)]);
        } else if (un[0] != 0 || un[1] != 0) {
            out.add_unary(i, un[0], un[1]);
        }
    }
    for (const auto& p : e.pairwise()) {
        const auto& t = p.table;
        if (p.u == var) {
            out.add_unary(p.v, t[static_cast<std::size_t>(value * 2)], t[static_cast<std::size_t>(value * 2 + 1)]);
        } else if (p.v == var) {
            out.add_unary(p.u, t[static_cast<std::size_t>(value)], t[static_cast<std::size_t>(2 + value)]);
        } else {
            out.add_pairwise(p.u, p.v, t);
        }
    }
    return out;
}

std::int64_t completion_energy(const IntEnergy& e, const Labeling& l, std::int32_t var, int value) {
    Labeling full = complete_labeling(l, FillPolicy::Background);
    full[static_cast<std::size_t>(var)] = to_label(value);
    return evaluate(e, full);
}

}  // namespace

ProbeResult probe(const IntEnergy& e, const Labeling& current, int max_rounds) {
    const std::int32_t n = e.size();
    if (static_cast<std::int32_t>(current.size()) != n) {
        throw Error("labeling size does not match energy");
    }
    ProbeResult result;
    VariableState state(n);
    for (std::int32_t v = 0; v < n; ++v) {
        if (current[static_cast<std::size_t>(v)] != Label::Unlabeled) {
            state.fix(v, current[static_cast<std::size_t>(v)] == Label::One ? 1 : 0);
        }
    }

    auto record_fix = [&](std::int32_t v, int value) {
        state.fix(v, value);
        result.log.push_back({Implication::Kind::Fix, v, -1, to_label(value)});
    };

    for (int round = 0; round < max_rounds; ++round) {
        bool changed = false;
        Reduced red = reduce(e, state);
        if (red.roots.empty()) {
            break;
        }
        ++result.rounds;

        // Plain roof dual on the reduced energy first.
        {
            const auto base = solve_qpbo(red.energy);
            bool any = false;
            for (std::size_t c = 0; c < red.roots.size(); ++c) {
                if (base.labeling[c] != Label::Unlabeled) {
                    record_fix(red.roots[c], base.labeling[c] == Label::One ? 1 : 0);
                    any = true;
                }
            }
            if (any) {
                changed = true;
                red = reduce(e, state);
            }
        }

        const std::vector<std::int32_t> candidates = red.roots;
        for (const std::int32_t v : candidates) {
            if (!state.is_free_root(v)) {
                continue;
            }
            const std::int32_t cv = red.compact[static_cast<std::size_t>(v)];
            const IntEnergy e0 = condition(red.energy, cv, 0);
            const IntEnergy e1 = condition(red.energy, cv, 1);
            const QpboResult r0 = solve_qpbo(e0);
            const QpboResult r1 = solve_qpbo(e1);
            ++result.probes_run;

            const std::int64_t upper = std::min(completion_energy(red.energy, r0.labeling, cv, 0),
                                                completion_energy(red.energy, r1.labeling, cv, 1));
            bool deduced = false;
            auto fix_branch = [&](int value, const QpboResult& branch) {
                record_fix(v, value);
                for (std::size_t c = 0; c < red.roots.size(); ++c) {
                    if (static_cast<std::int32_t>(c) != cv && branch.labeling[c] != Label::Unlabeled) {
                        record_fix(red.roots[c], branch.labeling[c] == Label::One ? 1 : 0);
                    }
                }
                deduced = true;
            };
            if (r0.lower_bound > static_cast<double>(upper)) {
                fix_branch(1, r1);
            } else if (r1.lower_bound > static_cast<double>(upper)) {
                fix_branch(0, r0);
            } else {
                for (std::size_t c = 0; c < red.roots.size(); ++c) {
                    if (static_cast<std::int32_t>(c) == cv) {
                        continue;
                    }
                    const Label l0 = r0.labeling[c];
                    const Label l1 = r1.labeling[c];
                    if (l0 == Label::Unlabeled || l1 == Label::Unlabeled) {
                        continue;
                    }
                    const std::int32_t w = red.roots[c];
                    if (l0 == l1) {
                        record_fix(w, l0 == Label::One ? 1 : 0);
                    } else {
                        const int opposite = l0 == Label::One ? 1 : 0;  // l0 = 1, l1 = 0 means w = not v
                        state.merge(w, v, opposite);
                        result.log.push_back(
                            {opposite ? Implication::Kind::Opposite : Implication::Kind::Equal, w, v, Label::Unlabeled});
                    }
                    deduced = true;
                }
            }
            if (deduced) {
                changed = true;
                red = reduce(e, state);
            }
        }
        if (!changed) {
            break;
        }
    }

    result.labeling.resize(static_cast<std::size_t>(n));
    for (std::int32_t v = 0; v < n; ++v) {
        result.labeling[static_cast<std::size_t>(v)] = state.value(v);
    }
    return result;
}

Labeling complete_labeling(std::span<const Label> labeling, FillPolicy policy) {
    const Label fill = policy == FillPolicy::Foreground ? Label::One : Label::Zero;
    Labeling out(labeling.begin(), labeling.end());
    for (auto& l : out) {
        if (l == Label::Unlabeled) {
            l = fill;
        }
    }
    return out;
}

SolveReport solve_energy(const Energy& e, const SolverOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const IntEnergy q = to_normal_form(quantize(e, options.scale));
    QpboResult base = solve_qpbo(q);
    SolveReport report;
    Labeling partial = std::move(base.labeling);
    if (options.probing && count_unlabeled(partial) > 0) {
        ProbeResult probed = probe(q, partial, options.max_probe_rounds);
        partial = std::move(probed.labeling);
        report.probes_run = probed.probes_run;
    }
    report.unlabeled_count = count_unlabeled(partial);
    report.labeling = complete_labeling(partial, options.fallback);
    report.lower_bound = base.lower_bound / static_cast<double>(options.scale);
    report.energy_of_completion = evaluate(e, report.labeling);
    report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace curvseg
