#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mped/graph.hpp"
#include "mped/mec.hpp"
#include "mped/random.hpp"

namespace mped {

enum class GraphKind { er, tree, star_forest, complete, tree5, file };

/// Recipe for a (random) ground-truth DAG.
struct GraphSpec {
    GraphKind kind = GraphKind::er;
    int p = 10;
    double rho = 0.1;
    std::vector<int> star_sizes;
    std::string path;
    std::uint64_t seed = 0;
    std::optional<std::pair<std::size_t, std::size_t>> mec_size_range;
    int retries = 10000;

    void validate() const {
        switch (kind) {
        case GraphKind::er:
            if (!(rho > 0.0 && rho <= 1.0)) throw InvalidArgument("er density must lie in (0, 1]");
            [[fallthrough]];
        case GraphKind::tree:
        case GraphKind::complete:
            if (p < 1 || p > kMaxNodes) throw InvalidArgument("node count out of range");
            break;
        case GraphKind::star_forest:
            if (star_sizes.empty()) throw InvalidArgument("star forest needs at least one star");
            for (int s : star_sizes)
                if (s < 2) throw InvalidArgument("star sizes must be at least 2");
            break;
        case GraphKind::tree5:
            break;
        case GraphKind::file:
            if (path.empty()) throw InvalidArgument("graph file path is empty");
            break;
        }
        if (mec_size_range && mec_size_range->first > mec_size_range->second)
            throw InvalidArgument("MEC size range has lo > hi");
        if (retries < 1) throw InvalidArgument("retries must be positive");
    }
};

/// The five-node tree 0->1, 0->2, 1->3, 1->4.
inline Dag tree5() { return Dag(5, {{0, 1}, {0, 2}, {1, 3}, {1, 4}}); }

namespace detail {

inline std::vector<NodeId> random_permutation(int p, Rng &rng) {
    std::vector<NodeId> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

inline std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

template <class T>
T parse_number(const std::string &text, const std::string &what) {
    T value{};
    const char *first = text.data();
    const char *last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw InvalidArgument("invalid " + what + ": '" + text + "'");
    return value;
}

inline double parse_double(const std::string &text, const std::string &what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception &) {
        throw InvalidArgument("invalid " + what + ": '" + text + "'");
    }
}

inline Dag generate_once(const GraphSpec &spec, Rng &rng) {
    std::vector<Edge> edges;
    switch (spec.kind) {
    case GraphKind::er:
    case GraphKind::complete: {
        const auto perm = random_permutation(spec.p, rng);
        const double rho = spec.kind == GraphKind::complete ? 1.0 : spec.rho;
        std::bernoulli_distribution keep(rho);
        for (int a = 0; a < spec.p; ++a)
            for (int b = a + 1; b < spec.p; ++b)
                if (keep(rng)) edges.push_back({perm[a], perm[b]});
        return Dag(spec.p, std::move(edges));
    }
    case GraphKind::tree: {
        const auto perm = random_permutation(spec.p, rng);
        for (int k = 1; k < spec.p; ++k) {
            std::uniform_int_distribution<int> parent(0, k - 1);
            edges.push_back({perm[parent(rng)], perm[k]});
        }
        return Dag(spec.p, std::move(edges));
    }
    case GraphKind::star_forest: {
        const int p = std::accumulate(spec.star_sizes.begin(), spec.star_sizes.end(), 0);
        const auto perm = random_permutation(p, rng);
        int at = 0;
        for (int size : spec.star_sizes) {
            const NodeId hub = perm[at];
            for (int k = 1; k < size; ++k) edges.push_back({hub, perm[at + k]});
            at += size;
        }
        return Dag(p, std::move(edges));
    }
    case GraphKind::tree5:
        return tree5();
    case GraphKind::file:
        break;
    }
    throw InvalidArgument("graph kind cannot be generated");
}

} // namespace detail

/// Parses `kind[:key=value,...]`, e.g. `er:p=15,rho=0.15,mec=20-200`,
/// `star:sizes=7/7/6`, `complete:p=5`, `tree:p=8`, `tree5`, `file:path`.
/// A string naming an existing file is read as an edge list.
inline GraphSpec parse_graph_spec(const std::string &text) {
    GraphSpec spec;
    const auto colon = text.find(':');
    const std::string kind = detail::trim(text.substr(0, colon));
    const std::string rest = colon == std::string::npos ? std::string() : text.substr(colon + 1);
    if (kind == "file") {
        spec.kind = GraphKind::file;
        spec.path = rest;
        spec.validate();
        return spec;
    }
    if (kind == "er") spec.kind = GraphKind::er;
    else if (kind == "tree") spec.kind = GraphKind::tree;
    else if (kind == "star" || kind == "star_forest") spec.kind = GraphKind::star_forest;
    else if (kind == "complete") spec.kind = GraphKind::complete;
    else if (kind == "tree5") spec.kind = GraphKind::tree5;
    else if (std::filesystem::exists(text)) {
        spec.kind = GraphKind::file;
        spec.path = text;
        return spec;
    } else
        throw InvalidArgument("unknown graph kind '" + kind + "'");

    if (!rest.empty()) {
        for (const auto &item : detail::split(rest, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw InvalidArgument("graph option '" + item + "' is not key=value");
            const std::string key = detail::trim(item.substr(0, eq));
            const std::string val = detail::trim(item.substr(eq + 1));
            if (key == "p") spec.p = detail::parse_number<int>(val, "node count");
            else if (key == "rho") spec.rho = detail::parse_double(val, "density");
            else if (key == "sizes") {
                spec.star_sizes.clear();
                for (const auto &s : detail::split(val, '/')) spec.star_sizes.push_back(detail::parse_number<int>(s, "star size"));
            } else if (key == "mec") {
                const auto dash = val.find('-');
                if (dash == std::string::npos) throw InvalidArgument("mec range must be lo-hi");
                spec.mec_size_range = std::make_pair(detail::parse_number<std::size_t>(val.substr(0, dash), "mec bound"),
                                                     detail::parse_number<std::size_t>(val.substr(dash + 1), "mec bound"));
            } else if (key == "retries") spec.retries = detail::parse_number<int>(val, "retry count");
            else if (key == "seed") spec.seed = detail::parse_number<std::uint64_t>(val, "seed");
            else throw InvalidArgument("unknown graph option '" + key + "'");
        }
    }
    if (spec.kind == GraphKind::star_forest && spec.star_sizes.empty()) spec.star_sizes = {7, 7, 6};
    if (spec.kind == GraphKind::tree5) spec.p = 5;
    if (spec.kind == GraphKind::star_forest)
        spec.p = std::accumulate(spec.star_sizes.begin(), spec.star_sizes.end(), 0);
    spec.validate();
    return spec;
}

/// Edge list with the external node names, in id order.
struct NamedDag {
    Dag dag;
    std::vector<std::string> names;
};

/// Reads `SRC DST [WEIGHT]` lines (tab or space separated). Names get dense
/// ids in order of first appearance; a `#nodes N` header pre-registers the
/// names 0..N-1. Other `#` lines are comments. Weight-0 lines declare their
/// nodes but add no edge.
inline NamedDag load_edge_list_named(std::istream &in) {
    std::unordered_map<std::string, NodeId> ids;
    std::vector<std::string> names;
    auto id_of = [&](const std::string &name) {
        auto [it, fresh] = ids.try_emplace(name, static_cast<NodeId>(names.size()));
        if (fresh) names.push_back(name);
        return it->second;
    };
    std::vector<Edge> edges;
    std::map<std::pair<NodeId, NodeId>, std::size_t> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            std::istringstream hs(t.substr(1));
            std::string word;
            long long count = 0;
            if (hs >> word && word == "nodes") {
                if (!(hs >> count) || count < 0 || count > kMaxNodes) throw ParseError(lineno, "bad #nodes header");
                for (long long k = 0; k < count; ++k) id_of(std::to_string(k));
            }
            continue;
        }
        std::istringstream ls(t);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.size() < 2 || tok.size() > 3) throw ParseError(lineno, "expected 'SRC DST [WEIGHT]'");
        double weight = 1.0;
        if (tok.size() == 3) {
            try {
                std::size_t used = 0;
                weight = std::stod(tok[2], &used);
                if (used != tok[2].size()) throw std::invalid_argument(tok[2]);
            } catch (const std::exception &) {
                throw ParseError(lineno, "invalid weight '" + tok[2] + "'");
            }
        }
        const NodeId u = id_of(tok[0]);
        const NodeId v = id_of(tok[1]);
        if (weight == 0.0) continue;
        if (u == v) throw ParseError(lineno, "self-loop on '" + tok[0] + "'");
        if (auto it = seen.find({v, u}); it != seen.end())
            throw GraphError("edge list contains a directed cycle: '" + tok[0] + "' and '" + tok[1] +
                             "' point at each other (lines " + std::to_string(it->second) + " and " +
                             std::to_string(lineno) + ")");
        if (auto it = seen.find({u, v}); it != seen.end())
            throw ParseError(lineno, "duplicate edge '" + tok[0] + "' -> '" + tok[1] + "' (first on line " +
                                         std::to_string(it->second) + ")");
        seen.emplace(std::make_pair(u, v), lineno);
        edges.push_back({u, v});
    }
    if (names.empty()) throw ParseError(lineno, "edge list declares no nodes");
    if (static_cast<int>(names.size()) > kMaxNodes) throw ParseError(lineno, "too many nodes");
    if (!is_acyclic(edges, static_cast<int>(names.size()))) throw GraphError("edge list contains a directed cycle");
    return {Dag(static_cast<int>(names.size()), std::move(edges)), std::move(names)};
}

inline NamedDag load_edge_list_named(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return load_edge_list_named(in);
}

inline Dag load_edge_list(const std::filesystem::path &path) { return load_edge_list_named(path).dag; }

/// `#nodes p` followed by sorted `u<TAB>v` lines.
inline void write_edge_list(const Dag &dag, std::ostream &out) {
    out << "#nodes " << dag.p() << '\n';
    for (const auto &e : dag.edges()) out << e.from << '\t' << e.to << '\n';
}

inline void save_edge_list(const Dag &dag, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_edge_list(dag, out);
    if (!out) throw IoError("write failed: " + path.string());
}

inline void write_batch(const Batch &batch, std::ostream &out) {
    for (const auto &i : batch) {
        bool first = true;
        for (NodeId v : i) {
            out << (first ? "" : " ") << v;
            first = false;
        }
        out << '\n';
    }
}

inline void save_batch(const Batch &batch, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_batch(batch, out);
    if (!out) throw IoError("write failed: " + path.string());
}

inline Batch read_batch(std::istream &in) {
    Batch b;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ls(t);
        std::vector<NodeId> targets;
        for (std::string w; ls >> w;) {
            NodeId v = 0;
            auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
            if (ec != std::errc() || ptr != w.data() + w.size() || v < 0)
                throw ParseError(lineno, "invalid node id '" + w + "'");
            targets.push_back(v);
        }
        b.insert(Intervention(std::move(targets)));
    }
    return b;
}

inline Batch load_batch(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_batch(in);
}

/// Draws a DAG from `spec` (seeded by spec.seed), rejection-sampling on the
/// MEC size when a range is set.
inline Dag gen_dag(const GraphSpec &spec) {
    spec.validate();
    if (spec.kind == GraphKind::file) return load_edge_list(spec.path);
    Rng rng(spec.seed);
    if (!spec.mec_size_range) return detail::generate_once(spec, rng);
    const auto [lo, hi] = *spec.mec_size_range;
    for (int attempt = 0; attempt < spec.retries; ++attempt) {
        Dag g = detail::generate_once(spec, rng);
        const std::size_t n = count_mec(essential_graph(g), hi);
        if (n >= lo && n <= hi) return g;
    }
    throw RetryExhausted("no graph with MEC size in [" + std::to_string(lo) + ", " + std::to_string(hi) + "] after " +
                         std::to_string(spec.retries) + " attempts");
}

} // namespace mped
