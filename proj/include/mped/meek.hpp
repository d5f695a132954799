#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mped/graph.hpp"

namespace mped {

/// Throws PatternMismatch unless every directed edge of `ess` is in `g` and
/// every undirected edge of `ess` is an edge of `g` in some direction.
inline void check_pattern(const Pdag &ess, const Dag &g) {
    if (ess.p() != g.p()) throw PatternMismatch("node counts differ");
    for (const auto &e : ess.directed_edges())
        if (!g.has_edge(e.from, e.to))
            throw PatternMismatch("directed edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                                  " is not in the DAG");
    for (const auto &e : ess.undirected_edges())
        if (!g.adjacent(e.from, e.to))
            throw PatternMismatch("undirected edge " + std::to_string(e.from) + "-" + std::to_string(e.to) +
                                  " is not in the DAG");
    if (static_cast<std::size_t>(ess.num_edges()) != g.num_edges())
        throw PatternMismatch("skeletons differ");
}

namespace detail {

using bits::Word;

enum class Rule { r1 = 0, r2 = 1, r3 = 2, r4 = 3 };
using RuleOrder = std::array<Rule, 4>;
inline constexpr RuleOrder kDefaultRuleOrder{Rule::r1, Rule::r2, Rule::r3, Rule::r4};

// Does a Meek rule force the undirected edge a - b to become a -> b?
inline bool rule_fires(const Pdag &g, NodeId a, NodeId b, Rule rule) {
    const int W = g.words();
    const Word *pa_a = g.parents(a);
    const Word *ch_a = g.children(a);
    const Word *ne_a = g.neighbors(a);
    const Word *pa_b = g.parents(b);
    switch (rule) {
    case Rule::r1:
        // c -> a - b, c and b nonadjacent.
        for (int k = 0; k < W; ++k)
            if ((pa_a[k] & ~g.adjacency_word(b, k)) != 0) return true;
        return false;
    case Rule::r2:
        // a -> c -> b.
        for (int k = 0; k < W; ++k)
            if ((ch_a[k] & pa_b[k]) != 0) return true;
        return false;
    case Rule::r3: {
        // a - c -> b and a - d -> b with c, d nonadjacent.
        bool found = false;
        for (int k = 0; k < W && !found; ++k) {
            Word s = ne_a[k] & pa_b[k];
            while (s != 0 && !found) {
                NodeId c = k * 64 + std::countr_zero(s);
                s &= s - 1;
                for (int j = 0; j < W; ++j) {
                    Word cand = ne_a[j] & pa_b[j] & ~g.adjacency_word(c, j);
                    if (j == (c >> 6)) cand &= ~(Word{1} << (c & 63));
                    if (cand != 0) {
                        found = true;
                        break;
                    }
                }
            }
        }
        return found;
    }
    case Rule::r4: {
        // a - k -> l -> b, k and b nonadjacent, a adjacent to l (edge of any kind).
        for (int w = 0; w < W; ++w) {
            Word ls = pa_b[w] & g.adjacency_word(a, w);
            while (ls != 0) {
                NodeId l = w * 64 + std::countr_zero(ls);
                ls &= ls - 1;
                const Word *pa_l = g.parents(l);
                for (int j = 0; j < W; ++j)
                    if ((pa_l[j] & ne_a[j] & ~g.adjacency_word(b, j)) != 0) return true;
            }
        }
        return false;
    }
    }
    return false;
}

inline bool implied(const Pdag &g, NodeId a, NodeId b, const RuleOrder &order) {
    for (Rule r : order)
        if (rule_fires(g, a, b, r)) return true;
    return false;
}

/// Worklist closure. Every node whose neighbourhood may admit a new rule
/// application must be in `seeds`; for a graph that was closed before new
/// edges were directed, the endpoints of those edges and their undirected
/// neighbours suffice.
class Closer {
public:
    explicit Closer(Pdag &g, std::mt19937_64 *shuffle = nullptr)
        : g_(g), queued_(static_cast<std::size_t>(g.p()), 0), shuffle_(shuffle) {}

    void push(NodeId v) {
        if (!queued_[v]) {
            queued_[v] = 1;
            work_.push_back(v);
        }
    }

    void push_with_neighbors(NodeId v) {
        push(v);
        bits::for_each(g_.neighbors(v), g_.words(), [&](int w) { push(w); });
    }

    void run() {
        std::vector<NodeId> nbrs;
        while (!work_.empty()) {
            NodeId x;
            if (shuffle_ != nullptr) {
                std::uniform_int_distribution<std::size_t> pick(0, work_.size() - 1);
                std::size_t at = pick(*shuffle_);
                x = work_[at];
                work_[at] = work_.back();
                work_.pop_back();
            } else {
                x = work_.back();
                work_.pop_back();
            }
            queued_[x] = 0;
            nbrs = bits::to_vector(g_.neighbors(x), g_.words());
            RuleOrder order = kDefaultRuleOrder;
            if (shuffle_ != nullptr) {
                std::shuffle(nbrs.begin(), nbrs.end(), *shuffle_);
                std::shuffle(order.begin(), order.end(), *shuffle_);
            }
            for (NodeId y : nbrs) {
                if (!g_.has_undirected(x, y)) continue;
                bool forward = true;
                if (shuffle_ != nullptr) forward = std::bernoulli_distribution(0.5)(*shuffle_);
                NodeId a = forward ? x : y;
                NodeId b = forward ? y : x;
                if (implied(g_, a, b, order)) {
                    direct(a, b);
                } else if (implied(g_, b, a, order)) {
                    direct(b, a);
                }
            }
        }
    }

private:
    void direct(NodeId a, NodeId b) {
        g_.orient(a, b);
        push_with_neighbors(a);
        push_with_neighbors(b);
    }

    Pdag &g_;
    std::vector<char> queued_;
    std::vector<NodeId> work_;
    std::mt19937_64 *shuffle_;
};

/// Directs every undirected edge of `g` with exactly one endpoint in `mask`
/// as in `truth`; newly touched endpoints are queued on `closer`.
inline void apply_cuts(Pdag &g, const Dag &truth, const std::vector<Word> &mask, const Intervention &i,
                       Closer *closer) {
    const int W = g.words();
    std::vector<NodeId> outside;
    std::vector<NodeId> touched;
    for (NodeId u : i) {
        if (u >= g.p()) throw GraphError("intervention target out of range: " + std::to_string(u));
        outside.clear();
        const Word *ne = g.neighbors(u);
        for (int k = 0; k < W; ++k) {
            Word x = ne[k] & ~mask[k];
            while (x != 0) {
                outside.push_back(k * 64 + std::countr_zero(x));
                x &= x - 1;
            }
        }
        for (NodeId v : outside) {
            if (truth.has_edge(u, v))
                g.orient(u, v);
            else
                g.orient(v, u);
            touched.push_back(v);
        }
        if (!outside.empty()) touched.push_back(u);
    }
    if (closer != nullptr)
        for (NodeId v : touched) closer->push_with_neighbors(v);
}

/// Closure of a Meek-closed graph `base` after adding the cuts of `extra`.
inline Pdag extend_closure(const Pdag &base, const Dag &truth, const Intervention &extra) {
    Pdag g = base;
    if (extra.empty()) return g;
    Closer closer(g);
    auto mask = extra.mask(g.words());
    apply_cuts(g, truth, mask, extra, &closer);
    closer.run();
    return g;
}

/// Closure of a Meek-closed graph `base` after adding the cuts of a whole batch.
inline Pdag extend_closure(const Pdag &base, const Dag &truth, const Batch &batch) {
    Pdag g = base;
    if (batch.empty()) return g;
    Closer closer(g);
    for (const auto &i : batch) apply_cuts(g, truth, i.mask(g.words()), i, &closer);
    closer.run();
    return g;
}

} // namespace detail

/// Orients every undirected edge of `ess` cut by `i` (exactly one endpoint
/// targeted) as in the ground truth `g`. No propagation.
inline Pdag orient_by_intervention(const Pdag &ess, const Dag &g, const Intervention &i) {
    check_pattern(ess, g);
    Pdag out = ess;
    detail::apply_cuts(out, g, i.mask(out.words()), i, nullptr);
    return out;
}

/// Applies Meek rules R1-R4 until no rule changes the graph. The optional
/// seed randomizes node, edge and rule scan order; the result must not depend
/// on it.
inline Pdag meek_closure(const Pdag &pd, std::optional<std::uint64_t> shuffle_seed = std::nullopt) {
    Pdag g = pd;
    std::optional<std::mt19937_64> rng;
    if (shuffle_seed) rng.emplace(*shuffle_seed);
    detail::Closer closer(g, rng ? &*rng : nullptr);
    std::vector<NodeId> order(static_cast<std::size_t>(g.p()));
    std::iota(order.begin(), order.end(), 0);
    if (rng) std::shuffle(order.begin(), order.end(), *rng);
    for (NodeId v : order) closer.push(v);
    closer.run();
    return g;
}

/// Edges newly directed relative to `ess` after cutting with every
/// intervention in `batch` and closing under the Meek rules. Sorted.
inline std::vector<Edge> r_oriented(const Batch &batch, const Dag &g, const Pdag &ess) {
    check_pattern(ess, g);
    Pdag out = ess;
    for (const auto &i : batch) detail::apply_cuts(out, g, i.mask(out.words()), i, nullptr);
    out = meek_closure(out);
    std::vector<Edge> added;
    for (const auto &e : out.directed_edges())
        if (!ess.has_directed(e.from, e.to)) added.push_back(e);
    return added;
}

} // namespace mped
