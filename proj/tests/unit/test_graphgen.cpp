#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"

using namespace mped;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    const fs::path dir = fs::temp_directory_path() / "mped_graphgen_tests";
    fs::create_directories(dir);
    return dir / name;
}

int components(const Dag &g) {
    std::vector<int> parent(g.p());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
    for (const auto &e : g.edges()) parent[find(e.from)] = find(e.to);
    int c = 0;
    for (int v = 0; v < g.p(); ++v) c += find(v) == v;
    return c;
}

} // namespace

TEST(ParseGraphSpec, Kinds) {
    const GraphSpec er = parse_graph_spec("er:p=15,rho=0.15,mec=20-200");
    EXPECT_EQ(er.kind, GraphKind::er);
    EXPECT_EQ(er.p, 15);
    EXPECT_DOUBLE_EQ(er.rho, 0.15);
    ASSERT_TRUE(er.mec_size_range);
    EXPECT_EQ(er.mec_size_range->second, 200u);
    EXPECT_EQ(parse_graph_spec("star").star_sizes, (std::vector<int>{7, 7, 6}));
    EXPECT_EQ(parse_graph_spec("star:sizes=3/4").p, 7);
    EXPECT_EQ(parse_graph_spec("tree5").p, 5);
    EXPECT_EQ(parse_graph_spec("file:x.tsv").path, "x.tsv");
}

TEST(ParseGraphSpec, Rejects) {
    EXPECT_THROW(parse_graph_spec("nosuch"), InvalidArgument);
    EXPECT_THROW(parse_graph_spec("er:p=5,rho=0"), InvalidArgument);
    EXPECT_THROW(parse_graph_spec("er:p=5,rho=1.5"), InvalidArgument);
    EXPECT_THROW(parse_graph_spec("er:p=x"), InvalidArgument);
    EXPECT_THROW(parse_graph_spec("star:sizes=1/4"), InvalidArgument);
    EXPECT_THROW(parse_graph_spec("er:p=5,mec=9-3"), InvalidArgument);
    EXPECT_THROW(parse_graph_spec("er:color=red"), InvalidArgument);
}

TEST(GenDag, StarForest) {
    const Dag g = gen_dag(parse_graph_spec("star:sizes=7/7/6"));
    EXPECT_EQ(g.num_edges(), 17u);
    EXPECT_EQ(components(g), 3);
}

TEST(GenDag, CompleteAndFullDensity) {
    const Dag k5 = gen_dag(parse_graph_spec("complete:p=5"));
    EXPECT_EQ(k5.num_edges(), 10u);
    GraphSpec er = parse_graph_spec("er:p=7,rho=1");
    er.seed = 3;
    GraphSpec full = parse_graph_spec("complete:p=7");
    full.seed = 3;
    EXPECT_EQ(gen_dag(er), gen_dag(full));
}

TEST(GenDag, TreeIsSpanning) {
    GraphSpec spec = parse_graph_spec("tree:p=12");
    for (std::uint64_t s = 0; s < 20; ++s) {
        spec.seed = s;
        const Dag g = gen_dag(spec);
        EXPECT_EQ(g.num_edges(), 11u);
        EXPECT_EQ(components(g), 1);
        EXPECT_EQ(count_mec(essential_graph(g)), 12u);
    }
}

TEST(GenDag, ErEdgeCountConcentrates) {
    GraphSpec spec = parse_graph_spec("er:p=10,rho=0.3");
    constexpr int draws = 10000;
    double sum = 0;
    for (int s = 0; s < draws; ++s) {
        spec.seed = static_cast<std::uint64_t>(s);
        sum += static_cast<double>(gen_dag(spec).num_edges());
    }
    const double pairs = 45;
    const double mean = sum / draws;
    const double sigma = std::sqrt(pairs * 0.3 * 0.7 / draws);
    EXPECT_LE(std::abs(mean - 0.3 * pairs), 3 * sigma);
}

TEST(GenDag, MecRangeFilter) {
    GraphSpec spec = parse_graph_spec("er:p=8,rho=0.3,mec=3-30");
    for (std::uint64_t s = 0; s < 20; ++s) {
        spec.seed = s;
        const std::size_t n = count_mec(essential_graph(gen_dag(spec)));
        EXPECT_GE(n, 3u);
        EXPECT_LE(n, 30u);
    }
}

TEST(GenDag, RetryExhausted) {
    GraphSpec spec = parse_graph_spec("er:p=4,rho=0.5,mec=1000-2000,retries=5");
    EXPECT_THROW(gen_dag(spec), RetryExhausted);
}

TEST(LoadEdgeList, TwoLineFile) {
    std::istringstream in("G1\tG2\t1\nG1\tG3\t1\n");
    const NamedDag nd = load_edge_list_named(in);
    EXPECT_EQ(nd.dag.p(), 3);
    EXPECT_EQ(nd.dag.edges(), (std::vector<Edge>{{0, 1}, {0, 2}}));
    EXPECT_EQ(nd.names, (std::vector<std::string>{"G1", "G2", "G3"}));
}

TEST(LoadEdgeList, ZeroWeightLinesAddNoEdge) {
    std::istringstream in("G1 G2 1\nG2 G3 0\n# comment\n\nG3 G1 0\n");
    const NamedDag nd = load_edge_list_named(in);
    EXPECT_EQ(nd.dag.p(), 3);
    EXPECT_EQ(nd.dag.num_edges(), 1u);
}

TEST(LoadEdgeList, Errors) {
    std::istringstream cyc("a b\nb a\n");
    EXPECT_THROW(load_edge_list_named(cyc), GraphError);
    std::istringstream cyc3("a b\nb c\nc a\n");
    EXPECT_THROW(load_edge_list_named(cyc3), GraphError);
    std::istringstream bad("a b 1\nonlyone\n");
    try {
        load_edge_list_named(bad);
        FAIL() << "expected a parse error";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream weight("a b x\n");
    EXPECT_THROW(load_edge_list_named(weight), ParseError);
    std::istringstream loop("a a\n");
    EXPECT_THROW(load_edge_list_named(loop), ParseError);
    std::istringstream dup("a b\na b\n");
    EXPECT_THROW(load_edge_list_named(dup), ParseError);
    EXPECT_THROW(load_edge_list(scratch("does_not_exist.tsv")), IoError);
}

TEST(SaveEdgeList, TreeIsSortedAndRoundTrips) {
    std::ostringstream out;
    write_edge_list(tree5(), out);
    EXPECT_EQ(out.str(), "#nodes 5\n0\t1\n0\t2\n1\t3\n1\t4\n");
    std::istringstream in(out.str());
    EXPECT_EQ(load_edge_list_named(in).dag, tree5());
}

TEST(SaveEdgeList, RoundTripRandomDags) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 100; ++t) {
        const Dag g = testing_helpers::random_dag(rng, 2 + t % 15, 0.2);
        const fs::path path = scratch("rt.tsv");
        save_edge_list(g, path);
        EXPECT_EQ(load_edge_list(path), g);
        EXPECT_EQ(gen_dag(parse_graph_spec(path.string())), g);
    }
}

TEST(SaveBatch, Format) {
    std::ostringstream empty;
    write_batch(Batch{}, empty);
    EXPECT_EQ(empty.str(), "");
    std::ostringstream one;
    write_batch(Batch{Intervention{2, 1}}, one);
    EXPECT_EQ(one.str(), "1 2\n");
    const Batch b{Intervention{0, 3}, Intervention{4}};
    save_batch(b, scratch("b.txt"));
    EXPECT_EQ(load_batch(scratch("b.txt")), b);
    std::istringstream bad("1 x\n");
    EXPECT_THROW(read_batch(bad), ParseError);
}

TEST(GenDag, AlwaysAcyclic) {
    for (const char *text : {"er:p=20,rho=0.5", "tree:p=20", "star:sizes=5/4", "complete:p=9"}) {
        GraphSpec spec = parse_graph_spec(text);
        for (std::uint64_t s = 0; s < 20; ++s) {
            spec.seed = s;
            const Dag g = gen_dag(spec);
            EXPECT_TRUE(is_acyclic(g.edges(), g.p()));
        }
    }
}
