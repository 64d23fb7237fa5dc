#include "curvseg/maxflow.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "curvseg/lattice.hpp"

namespace curvseg {

namespace {
constexpr std::int32_t kNoParent = -1;  // free node or orphan
constexpr std::int32_t kRoot = -2;      // source or sink itself
constexpr std::int32_t kInfiniteDist = std::numeric_limits<std::int32_t>::max();
}  // namespace

FlowNetwork::FlowNetwork(std::int32_t node_count, std::int32_t source, std::int32_t sink)
    : source_(source), sink_(sink), first_(static_cast<std::size_t>(node_count), -1) {
    if (node_count < 2 || source < 0 || sink < 0 || source >= node_count || sink >= node_count || source == sink) {
        throw Error("flow network needs distinct source and sink nodes");
    }
}

std::int32_t FlowNetwork::add_arc(std::int32_t from, std::int32_t to, Capacity capacity, Capacity reverse_capacity) {
    if (from < 0 || to < 0 || from >= node_count() || to >= node_count()) {
        throw Error("arc endpoint out of range");
    }
    if (capacity < 0 || reverse_capacity < 0) {
        throw Error("arc capacities must be nonnegative");
    }
    if (solved_) {
        throw Error("cannot add arcs after maxflow()");
    }
    const auto a = static_cast<std::int32_t>(head_.size());
    head_.push_back(to);
    next_.push_back(first_[static_cast<std::size_t>(from)]);
    residual_.push_back(capacity);
    capacity_.push_back(capacity);
    first_[static_cast<std::size_t>(from)] = a;

    head_.push_back(from);
    next_.push_back(first_[static_cast<std::size_t>(to)]);
    residual_.push_back(reverse_capacity);
    capacity_.push_back(reverse_capacity);
    first_[static_cast<std::size_t>(to)] = a + 1;
    return a;
}

void FlowNetwork::set_active(std::int32_t v) {
    if (!in_active_[static_cast<std::size_t>(v)]) {
        in_active_[static_cast<std::size_t>(v)] = 1;
        active_.push_back(v);
    }
}

FlowNetwork::Capacity FlowNetwork::maxflow() {
    if (solved_) {
        return flow_;
    }
    // Adjacency lists were built by prepending; reverse them so scans follow
    // insertion order.
    const auto n = static_cast<std::size_t>(node_count());
    {
        std::vector<std::vector<std::int32_t>> lists(n);
        for (std::size_t v = 0; v < n; ++v) {
            for (auto a = first_[v]; a != -1; a = next_[static_cast<std::size_t>(a)]) {
                lists[v].push_back(a);
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            std::int32_t prev = -1;
            for (auto a : lists[v]) {
                next_[static_cast<std::size_t>(a)] = prev;
                prev = a;
            }
            first_[v] = prev;
        }
    }

    tree_.assign(n, Tree::Free);
    parent_.assign(n, kNoParent);
    stamp_.assign(n, 0);
    dist_.assign(n, 0);
    in_active_.assign(n, 0);
    active_.clear();
    active_head_ = 0;
    tree_[static_cast<std::size_t>(source_)] = Tree::Source;
    tree_[static_cast<std::size_t>(sink_)] = Tree::Sink;
    parent_[static_cast<std::size_t>(source_)] = kRoot;
    parent_[static_cast<std::size_t>(sink_)] = kRoot;
    set_active(source_);
    set_active(sink_);

    grow_and_augment();
    compute_source_side();
    solved_ = true;
    return flow_;
}

void FlowNetwork::grow_and_augment() {
    while (true) {
        std::int32_t p = -1;
        while (active_head_ < active_.size()) {
            const auto cand = active_[active_head_];
            if (tree_[static_cast<std::size_t>(cand)] == Tree::Free) {
                in_active_[static_cast<std::size_t>(cand)] = 0;
                ++active_head_;
                continue;
            }
            p = cand;
            break;
        }
        if (p == -1) {
            return;
        }
        // Compact the queue occasionally so it does not grow without bound.
        if (active_head_ > 4096 && active_head_ * 2 > active_.size()) {
            active_.erase(active_.begin(), active_.begin() + static_cast<std::ptrdiff_t>(active_head_));
            active_head_ = 0;
        }

        const auto up = static_cast<std::size_t>(p);
        std::int32_t middle = -1;  // arc from a source-tree node to a sink-tree node
        for (auto a = first_[up]; a != -1; a = next_[static_cast<std::size_t>(a)]) {
            const auto q = head_[static_cast<std::size_t>(a)];
            const auto uq = static_cast<std::size_t>(q);
            if (tree_[up] == Tree::Source) {
                if (residual_[static_cast<std::size_t>(a)] == 0) {
                    continue;
                }
                if (tree_[uq] == Tree::Free) {
                    tree_[uq] = Tree::Source;
                    parent_[uq] = a;
                    stamp_[uq] = stamp_[up];
                    dist_[uq] = dist_[up] + 1;
                    set_active(q);
                } else if (tree_[uq] == Tree::Sink) {
                    middle = a;
                    break;
                }
            } else {
                const auto rev = a ^ 1;  // q -> p
                if (residual_[static_cast<std::size_t>(rev)] == 0) {
                    continue;
                }
                if (tree_[uq] == Tree::Free) {
                    tree_[uq] = Tree::Sink;
                    parent_[uq] = rev;
                    stamp_[uq] = stamp_[up];
                    dist_[uq] = dist_[up] + 1;
                    set_active(q);
                } else if (tree_[uq] == Tree::Source) {
                    middle = rev;
                    break;
                }
            }
        }

        ++time_;
        if (middle == -1) {
            in_active_[up] = 0;
            ++active_head_;
            continue;
        }
        augment(middle);
        while (!orphans_.empty()) {
            const auto v = orphans_.front();
            orphans_.pop_front();
            adopt(v);
        }
        // p stays at the queue front and is rescanned (it may have been freed).
    }
}

void FlowNetwork::augment(std::int32_t middle_arc) {
    Capacity bottleneck = residual_[static_cast<std::size_t>(middle_arc)];
    // Source side: walk from tail of middle arc up to the source.
    for (auto v = head_[static_cast<std::size_t>(middle_arc ^ 1)];;) {
        const auto a = parent_[static_cast<std::size_t>(v)];
        if (a == kRoot) {
            break;
        }
        bottleneck = std::min(bottleneck, residual_[static_cast<std::size_t>(a)]);
        v = head_[static_cast<std::size_t>(a ^ 1)];
    }
    for (auto v = head_[static_cast<std::size_t>(middle_arc)];;) {
        const auto a = parent_[static_cast<std::size_t>(v)];
        if (a == kRoot) {
            break;
        }
        bottleneck = std::min(bottleneck, residual_[static_cast<std::size_t>(a)]);
        v = head_[static_cast<std::size_t>(a)];
    }

    auto push = [&](std::int32_t a) {
        residual_[static_cast<std::size_t>(a)] -= bottleneck;
        residual_[static_cast<std::size_t>(a ^ 1)] += bottleneck;
    };
    push(middle_arc);
    for (auto v = head_[static_cast<std::size_t>(middle_arc ^ 1)];;) {
        const auto a = parent_[static_cast<std::size_t>(v)];
        if (a == kRoot) {
            break;
        }
        push(a);
        const auto next = head_[static_cast<std::size_t>(a ^ 1)];
        if (residual_[static_cast<std::size_t>(a)] == 0) {
            parent_[static_cast<std::size_t>(v)] = kNoParent;
            orphans_.push_back(v);
        }
        v = next;
    }
    for (auto v = head_[static_cast<std::size_t>(middle_arc)];;) {
        const auto a = parent_[static_cast<std::size_t>(v)];
        if (a == kRoot) {
            break;
        }
        push(a);
        const auto next = head_[static_cast<std::size_t>(a)];
        if (residual_[static_cast<std::size_t>(a)] == 0) {
            parent_[static_cast<std::size_t>(v)] = kNoParent;
            orphans_.push_back(v);
        }
        v = next;
    }
    flow_ += bottleneck;
}

void FlowNetwork::adopt(std::int32_t v) {
    const auto uv = static_cast<std::size_t>(v);
    const Tree tree = tree_[uv];
    const bool source_tree = tree == Tree::Source;

    // Parent node of u through its current parent arc.
    auto parent_node = [&](std::int32_t u) {
        const auto a = parent_[static_cast<std::size_t>(u)];
        return source_tree ? head_[static_cast<std::size_t>(a ^ 1)] : head_[static_cast<std::size_t>(a)];
    };

    std::int32_t best_arc = -1;
    std::int32_t best_dist = kInfiniteDist;
    for (auto a0 = first_[uv]; a0 != -1; a0 = next_[static_cast<std::size_t>(a0)]) {
        // Candidate parent j: source tree needs residual j -> v, sink tree v -> j.
        const auto link = source_tree ? (a0 ^ 1) : a0;
        if (residual_[static_cast<std::size_t>(link)] == 0) {
            continue;
        }
        const auto j = head_[static_cast<std::size_t>(a0)];
        if (tree_[static_cast<std::size_t>(j)] != tree || parent_[static_cast<std::size_t>(j)] == kNoParent) {
            continue;
        }
        std::int32_t d = 0;
        for (auto k = j;;) {
            const auto uk = static_cast<std::size_t>(k);
            if (stamp_[uk] == time_) {
                d += dist_[uk];
                break;
            }
            ++d;
            if (parent_[uk] == kRoot) {
                stamp_[uk] = time_;
                dist_[uk] = 1;
                break;
            }
            if (parent_[uk] == kNoParent) {
                d = kInfiniteDist;
                break;
            }
            k = parent_node(k);
        }
        if (d == kInfiniteDist) {
            continue;
        }
        if (d < best_dist) {
            best_dist = d;
            best_arc = link;
        }
        for (auto k = j; stamp_[static_cast<std::size_t>(k)] != time_; k = parent_node(k)) {
            stamp_[static_cast<std::size_t>(k)] = time_;
            dist_[static_cast<std::size_t>(k)] = d--;
        }
    }

    if (best_arc != -1) {
        parent_[uv] = best_arc;
        stamp_[uv] = time_;
        dist_[uv] = best_dist + 1;
        return;
    }

    for (auto a0 = first_[uv]; a0 != -1; a0 = next_[static_cast<std::size_t>(a0)]) {
        const auto j = head_[static_cast<std::size_t>(a0)];
        const auto uj = static_cast<std::size_t>(j);
        if (tree_[uj] != tree || parent_[uj] == kNoParent) {
            continue;
        }
        const auto link = source_tree ? (a0 ^ 1) : a0;
        if (residual_[static_cast<std::size_t>(link)] > 0) {
            set_active(j);
        }
        if (parent_[uj] != kRoot && parent_node(j) == v) {
            parent_[uj] = kNoParent;
            orphans_.push_back(j);
        }
    }
    tree_[uv] = Tree::Free;
}

void FlowNetwork::compute_source_side() {
    source_side_.assign(static_cast<std::size_t>(node_count()), 0);
    std::vector<std::int32_t> stack{source_};
    source_side_[static_cast<std::size_t>(source_)] = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto a = first_[static_cast<std::size_t>(v)]; a != -1; a = next_[static_cast<std::size_t>(a)]) {
            const auto q = head_[static_cast<std::size_t>(a)];
            if (residual_[static_cast<std::size_t>(a)] > 0 && !source_side_[static_cast<std::size_t>(q)]) {
                source_side_[static_cast<std::size_t>(q)] = 1;
                stack.push_back(q);
            }
        }
    }
}

FlowNetwork::Capacity FlowNetwork::cut_capacity(const std::vector<std::uint8_t>& side) const {
    Capacity total = 0;
    for (std::int32_t a = 0; a < arc_count(); ++a) {
        if (side[static_cast<std::size_t>(arc_tail(a))] && !side[static_cast<std::size_t>(arc_head(a))]) {
            total += capacity_[static_cast<std::size_t>(a)];
        }
    }
    return total;
}

}  // namespace curvseg
