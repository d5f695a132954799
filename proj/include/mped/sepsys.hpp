#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mped/graph.hpp"

namespace mped {

enum class SeparationMode { agnostic, graph_sensitive };

/// Family of node sets such that every required pair is split by some set.
struct SeparatingSystem {
    std::vector<Intervention> sets;
    int sparsity = 1;
    SeparationMode mode = SeparationMode::agnostic;

    std::size_t size() const noexcept { return sets.size(); }
};

namespace detail {

inline void append_chunks(std::vector<NodeId> members, int q, std::vector<Intervention> &out) {
    std::sort(members.begin(), members.end());
    for (std::size_t at = 0; at < members.size(); at += static_cast<std::size_t>(q)) {
        const auto stop = std::min(members.size(), at + static_cast<std::size_t>(q));
        out.emplace_back(std::vector<NodeId>(members.begin() + static_cast<std::ptrdiff_t>(at),
                                             members.begin() + static_cast<std::ptrdiff_t>(stop)));
    }
}

inline bool splits(const Intervention &s, NodeId u, NodeId v) { return s.contains(u) != s.contains(v); }

} // namespace detail

/// Structure-agnostic q-sparse system separating every pair of [p].
/// Nodes are written in base a = max(2, ceil(p/q)); for every digit position
/// and nonzero symbol the matching nodes form a set, and sets larger than q
/// are cut into chunks of at most q nodes.
inline SeparatingSystem separate_agnostic(int p, int q) {
    if (p < 2 || q < 1 || q > p / 2)
        throw InvalidArgument("agnostic separating system needs 1 <= q <= floor(p/2), got p=" + std::to_string(p) +
                              ", q=" + std::to_string(q));
    const int a = std::max(2, (p + q - 1) / q);
    int length = 0;
    for (long long reach = 1; reach < p; reach *= a) ++length;

    SeparatingSystem ss;
    ss.sparsity = q;
    ss.mode = SeparationMode::agnostic;
    long long place = 1;
    for (int pos = 0; pos < length; ++pos, place *= a) {
        for (int symbol = 1; symbol < a; ++symbol) {
            std::vector<NodeId> members;
            for (NodeId v = 0; v < p; ++v)
                if ((v / place) % a == symbol) members.push_back(v);
            if (!members.empty()) detail::append_chunks(std::move(members), q, ss.sets);
        }
    }
    return ss;
}

/// System separating the undirected edges of `ess`: colour classes of a
/// matching-based vertex cover, chunked to at most q nodes.
inline SeparatingSystem separate_graph_sensitive(const Pdag &ess, int q) {
    if (q < 1) throw InvalidArgument("q must be at least 1");
    SeparatingSystem ss;
    ss.sparsity = q;
    ss.mode = SeparationMode::graph_sensitive;

    const int p = ess.p();
    std::vector<char> matched(static_cast<std::size_t>(p), 0);
    for (const auto &e : ess.undirected_edges()) {
        if (!matched[e.from] && !matched[e.to]) matched[e.from] = matched[e.to] = 1;
    }
    std::vector<NodeId> cover;
    for (NodeId v = 0; v < p; ++v)
        if (matched[v]) cover.push_back(v);
    if (cover.empty()) return ss;

    auto degree = [&](NodeId v) { return bits::count(ess.neighbors(v), ess.words()); };
    std::stable_sort(cover.begin(), cover.end(), [&](NodeId x, NodeId y) { return degree(x) > degree(y); });

    // Welsh-Powell: fill one colour at a time in degree order.
    std::vector<int> colour(static_cast<std::size_t>(p), -1);
    int colours = 0;
    for (std::size_t remaining = cover.size(); remaining > 0; ++colours) {
        std::vector<NodeId> cls;
        for (NodeId v : cover) {
            if (colour[v] != -1) continue;
            const bool clash = std::any_of(cls.begin(), cls.end(), [&](NodeId w) { return ess.has_undirected(v, w); });
            if (clash) continue;
            colour[v] = colours;
            cls.push_back(v);
        }
        remaining -= cls.size();
        detail::append_chunks(std::move(cls), q, ss.sets);
    }
    return ss;
}

inline bool verify_separation(const SeparatingSystem &ss, const Pdag &ess) {
    for (const auto &e : ess.undirected_edges()) {
        const bool ok = std::any_of(ss.sets.begin(), ss.sets.end(),
                                    [&](const Intervention &s) { return detail::splits(s, e.from, e.to); });
        if (!ok) return false;
    }
    return true;
}

inline bool verify_separation_all_pairs(const SeparatingSystem &ss, int p) {
    for (NodeId u = 0; u < p; ++u)
        for (NodeId v = u + 1; v < p; ++v) {
            const bool ok = std::any_of(ss.sets.begin(), ss.sets.end(),
                                        [&](const Intervention &s) { return detail::splits(s, u, v); });
            if (!ok) return false;
        }
    return true;
}

/// ceil(p/q) * ceil(log2 p), the size budget for agnostic systems.
inline long long agnostic_size_bound(int p, int q) {
    long long lg = 0;
    while ((1LL << lg) < p) ++lg;
    return static_cast<long long>((p + q - 1) / q) * lg;
}

} // namespace mped
