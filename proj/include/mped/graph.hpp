#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "mped/errors.hpp"

namespace mped {

using NodeId = int;

/// Upper bound on the node count accepted by graph constructors.
inline constexpr int kMaxNodes = 512;

struct Edge {
    NodeId from = 0;
    NodeId to = 0;

    auto operator<=>(const Edge &) const = default;
};

namespace bits {

using Word = std::uint64_t;

inline int words_for(int n) { return (n + 63) / 64; }

inline bool test(const Word *w, int i) { return ((w[i >> 6] >> (i & 63)) & 1u) != 0; }
inline void set(Word *w, int i) { w[i >> 6] |= Word{1} << (i & 63); }
inline void reset(Word *w, int i) { w[i >> 6] &= ~(Word{1} << (i & 63)); }

inline bool any(const Word *w, int words) {
    for (int k = 0; k < words; ++k)
        if (w[k] != 0) return true;
    return false;
}

inline int count(const Word *w, int words) {
    int c = 0;
    for (int k = 0; k < words; ++k) c += std::popcount(w[k]);
    return c;
}

template <class F>
void for_each(const Word *w, int words, F &&f) {
    for (int k = 0; k < words; ++k) {
        Word x = w[k];
        while (x != 0) {
            f(k * 64 + std::countr_zero(x));
            x &= x - 1;
        }
    }
}

inline std::vector<NodeId> to_vector(const Word *w, int words) {
    std::vector<NodeId> out;
    for_each(w, words, [&](int i) { out.push_back(i); });
    return out;
}

} // namespace bits

/// A set of perturbation targets. Targets are kept sorted and unique, so the
/// defaulted comparison is the canonical lexicographic order.
class Intervention {
public:
    Intervention() = default;
    Intervention(std::initializer_list<NodeId> targets) : targets_(targets) { normalize(); }
    explicit Intervention(std::vector<NodeId> targets) : targets_(std::move(targets)) { normalize(); }

    const std::vector<NodeId> &targets() const noexcept { return targets_; }
    std::size_t size() const noexcept { return targets_.size(); }
    bool empty() const noexcept { return targets_.empty(); }
    bool contains(NodeId v) const { return std::binary_search(targets_.begin(), targets_.end(), v); }
    auto begin() const { return targets_.begin(); }
    auto end() const { return targets_.end(); }

    /// Bit mask over `words` 64-bit words.
    std::vector<bits::Word> mask(int words) const {
        std::vector<bits::Word> m(static_cast<std::size_t>(words), 0);
        for (NodeId v : targets_) {
            if (v >= words * 64) throw GraphError("intervention target out of range: " + std::to_string(v));
            bits::set(m.data(), v);
        }
        return m;
    }

    Intervention with(NodeId v) const {
        auto t = targets_;
        t.push_back(v);
        return Intervention(std::move(t));
    }

    Intervention without(NodeId v) const {
        auto t = targets_;
        std::erase(t, v);
        return Intervention(std::move(t));
    }

    auto operator<=>(const Intervention &) const = default;
    bool operator==(const Intervention &) const = default;

private:
    void normalize() {
        std::sort(targets_.begin(), targets_.end());
        targets_.erase(std::unique(targets_.begin(), targets_.end()), targets_.end());
        if (!targets_.empty() && targets_.front() < 0) throw GraphError("negative node id in intervention");
    }

    std::vector<NodeId> targets_;
};

/// A set of interventions in canonical (sorted, deduplicated) order. Empty
/// interventions are never stored.
class Batch {
public:
    Batch() = default;
    Batch(std::initializer_list<Intervention> items) {
        for (const auto &i : items) insert(i);
    }
    explicit Batch(const std::vector<Intervention> &items) {
        for (const auto &i : items) insert(i);
    }

    /// Returns false when `i` is empty or already present.
    bool insert(const Intervention &i) {
        if (i.empty()) return false;
        auto it = std::lower_bound(items_.begin(), items_.end(), i);
        if (it != items_.end() && *it == i) return false;
        items_.insert(it, i);
        return true;
    }

    Batch with(const Intervention &i) const {
        Batch b = *this;
        b.insert(i);
        return b;
    }

    bool contains(const Intervention &i) const { return std::binary_search(items_.begin(), items_.end(), i); }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const std::vector<Intervention> &items() const noexcept { return items_; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    bool is_subset_of(const Batch &other) const {
        return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
    }

    bool operator==(const Batch &) const = default;

private:
    std::vector<Intervention> items_;
};

/// Partially directed graph. Each unordered pair carries at most one edge,
/// either directed or undirected. Adjacency is stored as bit rows so that the
/// orientation rules reduce to word-parallel set operations.
class Pdag {
public:
    Pdag() = default;

    explicit Pdag(int p) : p_(p), words_(bits::words_for(p)) {
        if (p < 0 || p > kMaxNodes) throw GraphError("node count out of range: " + std::to_string(p));
        bits_.assign(static_cast<std::size_t>(3) * p_ * words_, 0);
    }

    int p() const noexcept { return p_; }
    int words() const noexcept { return words_; }

    const bits::Word *parents(NodeId v) const { return row(kParents, v); }
    const bits::Word *children(NodeId v) const { return row(kChildren, v); }
    const bits::Word *neighbors(NodeId v) const { return row(kNeighbors, v); }

    bool has_directed(NodeId u, NodeId v) const { return bits::test(children(u), v); }
    bool has_undirected(NodeId u, NodeId v) const { return bits::test(neighbors(u), v); }
    bool adjacent(NodeId u, NodeId v) const {
        return has_directed(u, v) || has_directed(v, u) || has_undirected(u, v);
    }

    bits::Word adjacency_word(NodeId v, int k) const { return parents(v)[k] | children(v)[k] | neighbors(v)[k]; }

    void add_directed(NodeId u, NodeId v) {
        check_new_pair(u, v);
        bits::set(mut_row(kChildren, u), v);
        bits::set(mut_row(kParents, v), u);
        ++n_directed_;
    }

    void add_undirected(NodeId u, NodeId v) {
        check_new_pair(u, v);
        bits::set(mut_row(kNeighbors, u), v);
        bits::set(mut_row(kNeighbors, v), u);
        ++n_undirected_;
    }

    /// Turns the undirected edge u - v into u -> v. No-op checks are the caller's job.
    void orient(NodeId u, NodeId v) {
        bits::reset(mut_row(kNeighbors, u), v);
        bits::reset(mut_row(kNeighbors, v), u);
        bits::set(mut_row(kChildren, u), v);
        bits::set(mut_row(kParents, v), u);
        --n_undirected_;
        ++n_directed_;
    }

    int num_directed() const noexcept { return n_directed_; }
    int num_undirected() const noexcept { return n_undirected_; }
    int num_edges() const noexcept { return n_directed_ + n_undirected_; }

    std::vector<Edge> directed_edges() const {
        std::vector<Edge> out;
        out.reserve(static_cast<std::size_t>(n_directed_));
        for (NodeId u = 0; u < p_; ++u)
            bits::for_each(children(u), words_, [&](int v) { out.push_back({u, v}); });
        return out;
    }

    /// Undirected edges as (min, max) pairs in lexicographic order.
    std::vector<Edge> undirected_edges() const {
        std::vector<Edge> out;
        out.reserve(static_cast<std::size_t>(n_undirected_));
        for (NodeId u = 0; u < p_; ++u)
            bits::for_each(neighbors(u), words_, [&](int v) {
                if (u < v) out.push_back({u, v});
            });
        return out;
    }

    /// Nodes incident to at least one undirected edge.
    std::vector<NodeId> active_nodes() const {
        std::vector<NodeId> out;
        for (NodeId v = 0; v < p_; ++v)
            if (bits::any(neighbors(v), words_)) out.push_back(v);
        return out;
    }

    /// Raw storage of the child rows; equal iff the directed edge sets are equal.
    std::span<const bits::Word> children_words() const {
        return {bits_.data() + static_cast<std::size_t>(kChildren) * p_ * words_,
                static_cast<std::size_t>(p_) * words_};
    }

    bool operator==(const Pdag &other) const { return p_ == other.p_ && bits_ == other.bits_; }

private:
    enum Kind { kParents = 0, kChildren = 1, kNeighbors = 2 };

    const bits::Word *row(Kind k, NodeId v) const {
        return bits_.data() + (static_cast<std::size_t>(k) * p_ + v) * words_;
    }
    bits::Word *mut_row(Kind k, NodeId v) { return bits_.data() + (static_cast<std::size_t>(k) * p_ + v) * words_; }

    void check_new_pair(NodeId u, NodeId v) const {
        if (u < 0 || v < 0 || u >= p_ || v >= p_) throw GraphError("node id out of range");
        if (u == v) throw GraphError("self-loop on node " + std::to_string(u));
        if (adjacent(u, v))
            throw GraphError("duplicate edge between " + std::to_string(u) + " and " + std::to_string(v));
    }

    int p_ = 0;
    int words_ = 0;
    int n_directed_ = 0;
    int n_undirected_ = 0;
    std::vector<bits::Word> bits_;
};

/// True iff the directed edges admit a topological order (Kahn's algorithm).
inline bool is_acyclic(std::span<const Edge> edges, int p) {
    std::vector<int> indegree(static_cast<std::size_t>(p), 0);
    std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(p));
    for (const auto &e : edges) {
        if (e.from < 0 || e.to < 0 || e.from >= p || e.to >= p) return false;
        out[e.from].push_back(e.to);
        ++indegree[e.to];
    }
    std::vector<NodeId> ready;
    for (NodeId v = 0; v < p; ++v)
        if (indegree[v] == 0) ready.push_back(v);
    int visited = 0;
    while (!ready.empty()) {
        NodeId v = ready.back();
        ready.pop_back();
        ++visited;
        for (NodeId w : out[v])
            if (--indegree[w] == 0) ready.push_back(w);
    }
    return visited == p;
}

/// Directed acyclic graph over nodes 0..p-1. Immutable after construction.
class Dag {
public:
    Dag() = default;

    Dag(int p, std::vector<Edge> edges) : graph_(p) {
        if (p < 1) throw GraphError("a DAG needs at least one node");
        for (const auto &e : edges) graph_.add_directed(e.from, e.to);
        std::sort(edges.begin(), edges.end());
        if (!is_acyclic(edges, p)) throw GraphError("edge set contains a directed cycle");
        edges_ = std::move(edges);
    }

    int p() const noexcept { return graph_.p(); }
    const std::vector<Edge> &edges() const noexcept { return edges_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    bool has_edge(NodeId u, NodeId v) const { return graph_.has_directed(u, v); }
    bool adjacent(NodeId u, NodeId v) const { return graph_.adjacent(u, v); }
    std::vector<NodeId> parents(NodeId v) const { return bits::to_vector(graph_.parents(v), graph_.words()); }
    std::vector<NodeId> children(NodeId v) const { return bits::to_vector(graph_.children(v), graph_.words()); }

    /// The DAG as a fully directed Pdag (shares the bit-row layout).
    const Pdag &as_pdag() const noexcept { return graph_; }

    std::vector<NodeId> topological_order() const {
        std::vector<int> indegree(static_cast<std::size_t>(p()), 0);
        for (const auto &e : edges_) ++indegree[e.to];
        std::vector<NodeId> order;
        std::vector<NodeId> ready;
        for (NodeId v = p() - 1; v >= 0; --v)
            if (indegree[v] == 0) ready.push_back(v);
        while (!ready.empty()) {
            NodeId v = ready.back();
            ready.pop_back();
            order.push_back(v);
            auto ch = children(v);
            for (auto it = ch.rbegin(); it != ch.rend(); ++it)
                if (--indegree[*it] == 0) ready.push_back(*it);
        }
        return order;
    }

    bool operator==(const Dag &other) const { return edges_ == other.edges_ && p() == other.p(); }

private:
    Pdag graph_;
    std::vector<Edge> edges_;
};

/// Collider i -> k <- j with i, j nonadjacent; stored with i < j.
struct VStructure {
    NodeId i = 0;
    NodeId j = 0;
    NodeId k = 0;

    auto operator<=>(const VStructure &) const = default;
};

inline Pdag skeleton(const Dag &g) {
    Pdag out(g.p());
    for (const auto &e : g.edges()) out.add_undirected(e.from, e.to);
    return out;
}

/// Colliders formed by the directed edges of a Pdag (adjacency counts every edge type).
inline std::vector<VStructure> v_structures(const Pdag &g) {
    std::vector<VStructure> out;
    for (NodeId k = 0; k < g.p(); ++k) {
        auto pa = bits::to_vector(g.parents(k), g.words());
        for (std::size_t a = 0; a < pa.size(); ++a)
            for (std::size_t b = a + 1; b < pa.size(); ++b)
                if (!g.adjacent(pa[a], pa[b])) out.push_back({pa[a], pa[b], k});
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<VStructure> v_structures(const Dag &g) { return v_structures(g.as_pdag()); }

/// Membership in C_{m,q}: at most m interventions, each with at most q targets.
inline bool check_constraints(const Batch &b, int m, int q) {
    if (static_cast<int>(b.size()) > m) return false;
    return std::all_of(b.begin(), b.end(), [q](const Intervention &i) { return static_cast<int>(i.size()) <= q; });
}

/// Builds a Dag from the directed edges of a Pdag with no undirected edges.
inline Dag to_dag(const Pdag &g) {
    if (g.num_undirected() != 0) throw GraphError("graph still has undirected edges");
    return Dag(g.p(), g.directed_edges());
}

/// Relabels node v as perm[v].
inline Dag relabel(const Dag &g, std::span<const NodeId> perm) {
    std::vector<Edge> edges;
    edges.reserve(g.num_edges());
    for (const auto &e : g.edges()) edges.push_back({perm[e.from], perm[e.to]});
    return Dag(g.p(), std::move(edges));
}

} // namespace mped
