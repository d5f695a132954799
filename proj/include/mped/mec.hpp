#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "mped/graph.hpp"
#include "mped/meek.hpp"
#include "mped/random.hpp"

namespace mped {

inline constexpr std::size_t kDefaultMecCap = 50000;

/// Partially directed representative of an (interventional) Markov
/// equivalence class, together with the interventions that produced it.
struct EssentialGraph {
    Pdag pdag;
    Batch prior;
};

/// Weighted multiset of DAGs. Weights default to 1/n.
struct DagEnsemble {
    std::vector<Dag> dags;
    std::vector<double> weights;

    static DagEnsemble uniform(std::vector<Dag> dags) {
        DagEnsemble e;
        const double w = dags.empty() ? 0.0 : 1.0 / static_cast<double>(dags.size());
        e.weights.assign(dags.size(), w);
        e.dags = std::move(dags);
        return e;
    }

    std::size_t size() const noexcept { return dags.size(); }
    bool empty() const noexcept { return dags.empty(); }

    double total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
};

inline EssentialGraph essential_graph(const Dag &g, const Batch &prior = {}) {
    Pdag pd(g.p());
    const auto vs = v_structures(g);
    std::vector<char> compelled(static_cast<std::size_t>(g.p()) * g.p(), 0);
    for (const auto &v : vs) {
        compelled[static_cast<std::size_t>(v.i) * g.p() + v.k] = 1;
        compelled[static_cast<std::size_t>(v.j) * g.p() + v.k] = 1;
    }
    for (const auto &e : g.edges()) {
        if (compelled[static_cast<std::size_t>(e.from) * g.p() + e.to])
            pd.add_directed(e.from, e.to);
        else
            pd.add_undirected(e.from, e.to);
    }
    for (const auto &i : prior) detail::apply_cuts(pd, g, i.mask(pd.words()), i, nullptr);
    return {meek_closure(pd), prior};
}

namespace detail {

// Depth-first enumeration of the acyclic, collider-preserving extensions of
// a closed Pdag. `visit` returns false to stop early.
inline bool enumerate_extensions(const Pdag &g, const std::vector<VStructure> &colliders,
                                 const std::function<bool(const Pdag &)> &visit) {
    if (g.num_undirected() == 0) {
        auto directed = g.directed_edges();
        if (!is_acyclic(directed, g.p())) return true;
        if (v_structures(g) != colliders) return true;
        return visit(g);
    }
    const Edge e = g.undirected_edges().front();
    for (int branch = 0; branch < 2; ++branch) {
        Pdag next = g;
        const NodeId a = branch == 0 ? e.from : e.to;
        const NodeId b = branch == 0 ? e.to : e.from;
        next.orient(a, b);
        Closer closer(next);
        closer.push_with_neighbors(a);
        closer.push_with_neighbors(b);
        closer.run();
        if (!enumerate_extensions(next, colliders, visit)) return false;
    }
    return true;
}

} // namespace detail

/// Number of members of the class, counting stops once `limit` is exceeded
/// (the return value is then limit + 1).
inline std::size_t count_mec(const EssentialGraph &ess, std::size_t limit = kDefaultMecCap) {
    std::size_t n = 0;
    const auto colliders = v_structures(ess.pdag);
    detail::enumerate_extensions(ess.pdag, colliders, [&](const Pdag &) { return ++n <= limit; });
    return n;
}

/// Every DAG represented by `ess`, uniformly weighted. Throws CapExceeded
/// when the class has more than `cap` members.
inline DagEnsemble enumerate_mec(const EssentialGraph &ess, std::size_t cap = kDefaultMecCap) {
    std::vector<Dag> members;
    const auto colliders = v_structures(ess.pdag);
    bool overflow = false;
    detail::enumerate_extensions(ess.pdag, colliders, [&](const Pdag &leaf) {
        if (members.size() >= cap) {
            overflow = true;
            return false;
        }
        members.push_back(to_dag(leaf));
        return true;
    });
    if (overflow) throw CapExceeded("equivalence class exceeds " + std::to_string(cap) + " members");
    return DagEnsemble::uniform(std::move(members));
}

/// Grouping of ensemble indices into interventional equivalence classes.
struct Partition {
    std::vector<int> class_of;
    std::vector<std::vector<int>> classes;

    std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> s;
        s.reserve(classes.size());
        for (const auto &c : classes) s.push_back(c.size());
        return s;
    }
};

/// Groups members by the edge set the batch orients on them. Classes are
/// listed in order of first appearance.
inline Partition interventional_classes(const DagEnsemble &ens, const Batch &batch, const EssentialGraph &ess) {
    Partition part;
    part.class_of.resize(ens.size());
    std::map<std::vector<bits::Word>, int> index;
    for (std::size_t m = 0; m < ens.size(); ++m) {
        check_pattern(ess.pdag, ens.dags[m]);
        Pdag closed = detail::extend_closure(ess.pdag, ens.dags[m], batch);
        auto words = closed.children_words();
        std::vector<bits::Word> key(words.begin(), words.end());
        auto [it, fresh] = index.try_emplace(std::move(key), static_cast<int>(part.classes.size()));
        if (fresh) part.classes.emplace_back();
        part.classes[it->second].push_back(static_cast<int>(m));
        part.class_of[m] = it->second;
    }
    return part;
}

/// `n` uniform draws with replacement from the enumerated class.
inline DagEnsemble sample_ensemble(const EssentialGraph &ess, std::size_t n, std::uint64_t seed,
                                   std::size_t cap = kDefaultMecCap) {
    const DagEnsemble all = enumerate_mec(ess, cap);
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    std::vector<Dag> draws;
    draws.reserve(n);
    for (std::size_t k = 0; k < n; ++k) draws.push_back(all.dags[pick(rng)]);
    return DagEnsemble::uniform(std::move(draws));
}

/// Three-member ensemble on which the node-restricted MI objective fails
/// diminishing returns: adding `added` to `smaller` gains less than adding
/// it to `larger`, although smaller is a subset of larger.
struct NonsubmodularExample {
    DagEnsemble ensemble;
    EssentialGraph ess;
    Intervention larger;
    Intervention smaller;
    NodeId added = 0;
};

inline NonsubmodularExample nonsubmodular_example() {
    const Dag g1(6, {{0, 1}, {4, 1}, {4, 0}, {4, 3}, {4, 5}, {5, 2}});
    const Dag g2(6, {{0, 1}, {4, 1}, {4, 0}, {3, 4}, {4, 5}, {5, 2}});
    const Dag g3(6, {{1, 0}, {4, 1}, {4, 0}, {4, 3}, {4, 5}, {5, 2}});
    NonsubmodularExample ce;
    ce.ensemble = DagEnsemble::uniform({g1, g2, g3});
    ce.ess = essential_graph(g1);
    ce.larger = Intervention{1, 2, 3};
    ce.smaller = Intervention{1, 2};
    ce.added = 0;
    return ce;
}

} // namespace mped
