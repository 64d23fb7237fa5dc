#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "curvseg/energy.hpp"
#include "curvseg/maxflow.hpp"

namespace curvseg {

inline constexpr std::int64_t kDefaultScale = 1'000'000;

/// Rounds every coefficient to the nearest integer after multiplying by `scale`.
/// Throws "energy scale too large" when a coefficient would leave +-2^62.
IntEnergy quantize(const Energy& e, std::int64_t scale = kDefaultScale);

struct QpboResult {
    Labeling labeling;
    double lower_bound = 0.0;  // in the integer energy's units; exact multiple of 1/2
};

/// Doubled network for a normal-form energy: node i is literal x_i, n + i is
/// not-x_i, 2n is the source and 2n + 1 the sink. Every arc (a -> b, c) has a
/// mirror (b' -> a', c) under x_i <-> not-x_i, source <-> sink.
FlowNetwork build_qpbo_network(const IntEnergy& e);

/// Roof-dual lower bound and weakly persistent partial labeling.
///
/// Builds the doubled network over literals x_i and not-x_i, takes the
/// canonical minimal source side S of a minimum cut and labels
/// x_i = 0 if x_i in S and not-x_i not in S, x_i = 1 in the mirrored case.
/// If the whole energy is submodular, variables that are tied between min
/// cuts are resolved from the x_i copy alone, so every variable that appears
/// in some nonzero term is labeled. Variables with no terms stay Unlabeled.
///
/// The input is reparameterized with to_normal_form() first.
QpboResult solve_qpbo(const IntEnergy& e);

struct Implication {
    enum class Kind { Fix, Equal, Opposite };
    Kind kind;
    std::int32_t var;
    std::int32_t other;  // probed variable for Equal / Opposite, -1 for Fix
    Label value;         // Fix only
};

struct ProbeResult {
    Labeling labeling;
    std::vector<Implication> log;
    int probes_run = 0;
    int rounds = 0;
};

/// Extends a solve_qpbo() labeling by probing: each unlabeled variable is
/// conditioned on 0 and 1 and the conditioned energies are solved again.
/// Common labels become fixes, opposite labels become contractions with the
/// probed variable, and a branch whose lower bound exceeds a known labeling's
/// energy is discarded. At least one global minimum stays consistent with
/// everything recorded.
ProbeResult probe(const IntEnergy& e, const Labeling& current, int max_rounds = 10);

enum class FillPolicy { Background, Foreground };

/// Unlabeled -> 0 (Background) or 1 (Foreground); labeled entries unchanged.
Labeling complete_labeling(std::span<const Label> labeling, FillPolicy policy);

struct SolverOptions {
    std::int64_t scale = kDefaultScale;
    bool probing = true;
    int max_probe_rounds = 10;
    FillPolicy fallback = FillPolicy::Background;
};

struct SolveReport {
    Labeling labeling;  // completed
    std::size_t unlabeled_count = 0;  // before completion
    double lower_bound = 0.0;         // roof-dual bound in the input energy's units
    double energy_of_completion = 0.0;
    int probes_run = 0;
    double runtime_ms = 0.0;
};

/// quantize -> normal form -> solve_qpbo -> probe (optional) -> complete.
SolveReport solve_energy(const Energy& e, const SolverOptions& options = {});

}  // namespace curvseg
