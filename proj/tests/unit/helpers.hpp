#pragma once

#include <random>
#include <vector>

#include "mped/mped.hpp"

namespace testing_helpers {

inline mped::Dag t5() { return mped::tree5(); }

// Random DAG under a random permutation; each forward pair kept with probability rho.
inline mped::Dag random_dag(std::mt19937_64 &rng, int p, double rho) {
    mped::GraphSpec spec;
    spec.kind = mped::GraphKind::er;
    spec.p = p;
    spec.rho = rho;
    spec.seed = rng();
    return mped::gen_dag(spec);
}

inline mped::Pdag undirected(int p, std::initializer_list<std::pair<int, int>> edges) {
    mped::Pdag g(p);
    for (auto [a, b] : edges) g.add_undirected(a, b);
    return g;
}

} // namespace testing_helpers
