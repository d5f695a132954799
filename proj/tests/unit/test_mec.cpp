#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"

using namespace mped;

TEST(EssentialGraph, Examples) {
    const EssentialGraph tree = essential_graph(tree5());
    EXPECT_EQ(tree.pdag.num_undirected(), 4);
    EXPECT_EQ(tree.pdag.num_directed(), 0);
    const EssentialGraph collider = essential_graph(Dag(3, {{0, 2}, {1, 2}}));
    EXPECT_EQ(collider.pdag.num_undirected(), 0);
    EXPECT_EQ(essential_graph(tree5(), Batch{Intervention{1, 2}}).pdag.num_undirected(), 0);
}

TEST(EssentialGraph, PropagatesBelowColliders) {
    // 0 -> 2 <- 1, 2 - 3 must become 2 -> 3.
    const EssentialGraph e = essential_graph(Dag(4, {{0, 2}, {1, 2}, {2, 3}}));
    EXPECT_TRUE(e.pdag.has_directed(2, 3));
}

TEST(EnumerateMec, Examples) {
    EXPECT_EQ(enumerate_mec(essential_graph(tree5())).size(), 5u);
    const Dag collider(3, {{0, 2}, {1, 2}});
    const auto one = enumerate_mec(essential_graph(collider));
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one.dags[0], collider);
    EXPECT_EQ(enumerate_mec(essential_graph(Dag(3, {{0, 1}, {1, 2}}))).size(), 3u);
}

TEST(EnumerateMec, OneMemberPerRootOnTree) {
    const auto ens = enumerate_mec(essential_graph(tree5()));
    std::set<NodeId> roots;
    for (const auto &g : ens.dags)
        for (NodeId v = 0; v < 5; ++v)
            if (g.parents(v).empty()) roots.insert(v);
    EXPECT_EQ(roots.size(), 5u);
    EXPECT_DOUBLE_EQ(ens.total_weight(), 1.0);
}

TEST(EnumerateMec, CapAndCount) {
    const EssentialGraph k6 = essential_graph(Dag(6, [] {
        std::vector<Edge> e;
        for (int a = 0; a < 6; ++a)
            for (int b = a + 1; b < 6; ++b) e.push_back({a, b});
        return e;
    }()));
    EXPECT_EQ(count_mec(k6), 720u);
    EXPECT_EQ(count_mec(k6, 100), 101u);
    EXPECT_THROW(enumerate_mec(k6, 100), CapExceeded);
}

TEST(EnumerateMec, MembersShareSkeletonAndColliders) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 30; ++t) {
        const Dag g = testing_helpers::random_dag(rng, 7, 0.4);
        const EssentialGraph ess = essential_graph(g);
        const auto ens = enumerate_mec(ess);
        EXPECT_NE(std::find(ens.dags.begin(), ens.dags.end(), g), ens.dags.end());
        for (const auto &h : ens.dags) {
            EXPECT_EQ(skeleton(h), skeleton(g));
            EXPECT_EQ(v_structures(h), v_structures(g));
            EXPECT_EQ(essential_graph(h).pdag, ess.pdag);
        }
    }
}

TEST(InterventionalClasses, TreeExamples) {
    const EssentialGraph ess = essential_graph(tree5());
    const auto ens = enumerate_mec(ess);
    EXPECT_EQ(interventional_classes(ens, Batch{Intervention{1, 2}}, ess).classes.size(), 5u);
    const auto none = interventional_classes(ens, Batch{}, ess);
    ASSERT_EQ(none.classes.size(), 1u);
    EXPECT_EQ(none.classes[0].size(), 5u);
    auto sizes = interventional_classes(ens, Batch{Intervention{1}}, ess).sizes();
    std::sort(sizes.begin(), sizes.end());
    EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 1, 1, 2}));
}

TEST(SampleEnsemble, SupportAndSize) {
    const EssentialGraph ess = essential_graph(tree5());
    const auto all = enumerate_mec(ess);
    const auto s = sample_ensemble(ess, 40, 9);
    EXPECT_EQ(s.size(), 40u);
    for (const auto &g : s.dags) EXPECT_NE(std::find(all.dags.begin(), all.dags.end(), g), all.dags.end());
    const Dag collider(3, {{0, 2}, {1, 2}});
    const auto single = sample_ensemble(essential_graph(collider), 1, 0);
    EXPECT_EQ(single.dags.at(0), collider);
}

TEST(SampleEnsemble, UniformFrequencies) {
    const EssentialGraph ess = essential_graph(tree5());
    const auto all = enumerate_mec(ess);
    constexpr int n = 100000;
    const auto s = sample_ensemble(ess, n, 10);
    std::vector<int> counts(all.size(), 0);
    for (const auto &g : s.dags) ++counts[std::find(all.dags.begin(), all.dags.end(), g) - all.dags.begin()];
    const double sigma = std::sqrt(n * 0.2 * 0.8);
    for (int c : counts) EXPECT_LE(std::abs(c - n * 0.2), 3 * sigma);
}

TEST(NonsubmodularExample, Structure) {
    const auto ce = nonsubmodular_example();
    ASSERT_EQ(ce.ensemble.size(), 3u);
    for (const auto &g : ce.ensemble.dags) EXPECT_EQ(essential_graph(g).pdag, ce.ess.pdag);
    EXPECT_TRUE(std::includes(ce.larger.begin(), ce.larger.end(), ce.smaller.begin(), ce.smaller.end()));
    EXPECT_FALSE(ce.larger.contains(ce.added));
    EXPECT_EQ(ce.ensemble.dags[0].edges(), (std::vector<Edge>{{0, 1}, {4, 0}, {4, 1}, {4, 3}, {4, 5}, {5, 2}}));
}

TEST(NonsubmodularExample, DiminishingReturnsFails) {
    const auto ce = nonsubmodular_example();
    auto F = [&](const Intervention &i) { return f_inf_tilde(Batch{i}, ce.ensemble, ce.ess); };
    const double small_gain = F(ce.smaller.with(ce.added)) - F(ce.smaller);
    const double large_gain = F(ce.larger.with(ce.added)) - F(ce.larger);
    EXPECT_LT(small_gain, large_gain);
}
