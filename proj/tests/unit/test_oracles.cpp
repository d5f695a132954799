// Independent brute-force oracles checked against the library.
#include <gtest/gtest.h>

#include <map>
#include <set>

#include "helpers.hpp"

using namespace mped;

namespace {

bool dfs_acyclic(int p, const std::vector<Edge> &edges) {
    std::vector<std::vector<int>> out(p);
    for (const auto &e : edges) out[e.from].push_back(e.to);
    std::vector<int> state(p, 0); // 0 new, 1 on stack, 2 done
    std::function<bool(int)> visit = [&](int v) {
        state[v] = 1;
        for (int w : out[v]) {
            if (state[w] == 1) return false;
            if (state[w] == 0 && !visit(w)) return false;
        }
        state[v] = 2;
        return true;
    };
    for (int v = 0; v < p; ++v)
        if (state[v] == 0 && !visit(v)) return false;
    return true;
}

// Every orientation of the skeleton that is acyclic and has the same colliders.
std::set<std::vector<Edge>> brute_mec(const Dag &g) {
    const auto skel = skeleton(g).undirected_edges();
    const auto target = v_structures(g);
    std::set<std::vector<Edge>> out;
    for (std::uint32_t mask = 0; mask < (1u << skel.size()); ++mask) {
        std::vector<Edge> edges;
        for (std::size_t k = 0; k < skel.size(); ++k)
            edges.push_back(mask >> k & 1u ? Edge{skel[k].to, skel[k].from} : skel[k]);
        if (!dfs_acyclic(g.p(), edges)) continue;
        const Dag h(g.p(), edges);
        if (v_structures(h) == target) out.insert(h.edges());
    }
    return out;
}

} // namespace

TEST(Oracle, AcyclicityMatchesDfs) {
    std::mt19937_64 rng(16);
    for (int t = 0; t < 500; ++t) {
        const int p = 2 + static_cast<int>(rng() % 7);
        std::vector<Edge> edges;
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b)
                if (a != b && rng() % 5 == 0) edges.push_back({a, b});
        EXPECT_EQ(is_acyclic(edges, p), dfs_acyclic(p, edges));
    }
}

TEST(Oracle, MecEnumerationMatchesBruteForce) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 60; ++t) {
        const Dag g = testing_helpers::random_dag(rng, 3 + t % 5, 0.45);
        if (g.num_edges() > 14) continue;
        std::set<std::vector<Edge>> got;
        for (const auto &h : enumerate_mec(essential_graph(g)).dags) got.insert(h.edges());
        EXPECT_EQ(got, brute_mec(g));
        EXPECT_EQ(count_mec(essential_graph(g)), got.size());
    }
}

TEST(Oracle, EssentialGraphMatchesMemberAgreement) {
    // Directed edges of the essential graph are exactly those every member agrees on.
    std::mt19937_64 rng(18);
    for (int t = 0; t < 40; ++t) {
        const Dag g = testing_helpers::random_dag(rng, 6, 0.4);
        const auto members = brute_mec(g);
        const Pdag ess = essential_graph(g).pdag;
        for (const auto &e : g.edges()) {
            bool all = true;
            for (const auto &m : members) all = all && std::binary_search(m.begin(), m.end(), e);
            EXPECT_EQ(ess.has_directed(e.from, e.to), all);
        }
    }
}

TEST(Oracle, InterventionalEssentialGraphMatchesMemberAgreement) {
    // Members compatible with the interventional data: same cut-edge orientations.
    std::mt19937_64 rng(19);
    for (int t = 0; t < 40; ++t) {
        const Dag g = testing_helpers::random_dag(rng, 6, 0.4);
        const Intervention i{static_cast<NodeId>(t % 6), static_cast<NodeId>((t + 2) % 6)};
        const Pdag ess = essential_graph(g, Batch{i}).pdag;
        std::vector<std::vector<Edge>> compatible;
        for (const auto &m : brute_mec(g)) {
            bool ok = true;
            for (const auto &e : m)
                if (i.contains(e.from) != i.contains(e.to)) ok = ok && g.has_edge(e.from, e.to);
            if (ok) compatible.push_back(m);
        }
        for (const auto &e : g.edges()) {
            bool all = true;
            for (const auto &m : compatible) all = all && std::binary_search(m.begin(), m.end(), e);
            EXPECT_EQ(ess.has_directed(e.from, e.to), all);
        }
    }
}

TEST(Oracle, FinfFromExplicitPartition) {
    std::mt19937_64 rng(20);
    for (int t = 0; t < 30; ++t) {
        const Dag g = testing_helpers::random_dag(rng, 6, 0.4);
        const EssentialGraph ess = essential_graph(g);
        const DagEnsemble ens = enumerate_mec(ess);
        const Batch b{Intervention{static_cast<NodeId>(t % 6)}};
        std::map<std::vector<Edge>, int> classes;
        for (const auto &h : ens.dags) ++classes[r_oriented(b, h, ess.pdag)];
        double expected = 0;
        for (const auto &[k, n] : classes) expected -= n * std::log2(double(n));
        expected /= static_cast<double>(ens.size());
        EXPECT_NEAR(f_inf_tilde(b, ens, ess), expected, 1e-12);
    }
}

TEST(Oracle, LmoBeatsRandomFeasiblePoints) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1, 1), unit(0, 1);
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + t % 6;
        const double q = 1 + t % 3;
        std::vector<double> d(n), x(n);
        for (int i = 0; i < n; ++i) {
            d[i] = u(rng);
            x[i] = unit(rng) * 0.8;
        }
        const auto v = lmo(d, x, q);
        double best = 0, sum = 0;
        for (int i = 0; i < n; ++i) {
            EXPECT_GE(v[i], 0.0);
            EXPECT_LE(v[i], 1.0 - x[i] + 1e-12);
            best += d[i] * v[i];
            sum += v[i];
        }
        EXPECT_LE(sum, q + 1e-12);
        for (int k = 0; k < 300; ++k) {
            std::vector<double> w(n);
            double s = 0;
            for (int i = 0; i < n; ++i) s += w[i] = unit(rng) * (1.0 - x[i]);
            const double scale = s > q ? q / s : 1.0;
            double val = 0;
            for (int i = 0; i < n; ++i) val += d[i] * w[i] * scale;
            EXPECT_LE(val, best + 1e-12);
        }
    }
}

TEST(Oracle, EvaluatorMatchesDirectCount) {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 30; ++t) {
        const Dag g = testing_helpers::random_dag(rng, 7, 0.35);
        const EssentialGraph ess = essential_graph(g);
        const DagEnsemble ens = design_ensemble(ess, 8, t);
        const Batch base{Intervention{static_cast<NodeId>(t % 7)}};
        EoEvaluator eval(ess, ens, {}, base);
        for (NodeId v = 0; v < 7; ++v) {
            const Batch b = base.with(Intervention{v, static_cast<NodeId>((v + 3) % 7)});
            double direct = 0;
            for (std::size_t m = 0; m < ens.size(); ++m)
                direct += ens.weights[m] * static_cast<double>(r_oriented(b, ens.dags[m], ess.pdag).size());
            EXPECT_NEAR(eval.value(Intervention{v, static_cast<NodeId>((v + 3) % 7)}), direct, 1e-12);
        }
    }
}
