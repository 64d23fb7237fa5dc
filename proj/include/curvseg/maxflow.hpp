#pragma once

#include <cstdint>
#include <deque>
#include <vector>

namespace curvseg {

/// Directed network with integer capacities. Max flow uses the
/// Boykov-Kolmogorov search-tree algorithm; all scans follow arc insertion
/// order, so identical inputs give identical flows.
class FlowNetwork {
public:
    using Capacity = std::int64_t;

    FlowNetwork(std::int32_t node_count, std::int32_t source, std::int32_t sink);

    std::int32_t node_count() const { return static_cast<std::int32_t>(first_.size()); }
    std::int32_t source() const { return source_; }
    std::int32_t sink() const { return sink_; }

    /// Adds arc from -> to with `capacity` and its reverse with `reverse_capacity`.
    /// Returns the index of the forward arc; the reverse arc is index ^ 1.
    std::int32_t add_arc(std::int32_t from, std::int32_t to, Capacity capacity, Capacity reverse_capacity = 0);

    std::int32_t arc_count() const { return static_cast<std::int32_t>(head_.size()); }
    std::int32_t arc_head(std::int32_t a) const { return head_[static_cast<std::size_t>(a)]; }
    std::int32_t arc_tail(std::int32_t a) const { return head_[static_cast<std::size_t>(a ^ 1)]; }
    Capacity residual(std::int32_t a) const { return residual_[static_cast<std::size_t>(a)]; }
    Capacity initial_capacity(std::int32_t a) const { return capacity_[static_cast<std::size_t>(a)]; }

    /// Runs to completion and returns the max-flow value. Repeated calls return
    /// the cached value.
    Capacity maxflow();

    /// Nodes reachable from the source in the residual graph: the canonical
    /// minimal source side of a minimum cut. Valid after maxflow().
    const std::vector<std::uint8_t>& source_side() const { return source_side_; }

    /// Sum of initial capacities of arcs from source_side to the rest.
    Capacity cut_capacity(const std::vector<std::uint8_t>& side) const;

private:
    enum class Tree : std::uint8_t { Free, Source, Sink };

    void grow_and_augment();
    bool has_valid_origin(std::int32_t v);
    void augment(std::int32_t middle_arc);
    void adopt(std::int32_t v);
    void set_active(std::int32_t v);
    void compute_source_side();

    std::int32_t source_;
    std::int32_t sink_;

    // Arc storage: forward and reverse arcs are adjacent (a, a ^ 1).
    std::vector<std::int32_t> head_;
    std::vector<std::int32_t> next_;
    std::vector<Capacity> residual_;
    std::vector<Capacity> capacity_;
    std::vector<std::int32_t> first_;

    // Search trees.
    std::vector<Tree> tree_;
    std::vector<std::int32_t> parent_;  // arc into v (source tree) or out of v (sink tree); -1 at roots / free
    std::vector<std::int64_t> stamp_;
    std::vector<std::int32_t> dist_;
    std::vector<std::uint8_t> in_active_;
    std::vector<std::int32_t> active_;
    std::size_t active_head_ = 0;
    std::deque<std::int32_t> orphans_;
    std::int64_t time_ = 0;

    Capacity flow_ = 0;
    bool solved_ = false;
    std::vector<std::uint8_t> source_side_;
};

}  // namespace curvseg
