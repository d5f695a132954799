// Designs batches for the five-node tree 0->1, 0->2, 1->3, 1->4 and shows
// how much of the tree each algorithm identifies.
#include <iostream>

#include "mped/mped.hpp"

int main() {
    using namespace mped;
    const Dag truth = tree5();
    const EssentialGraph ess = essential_graph(truth);
    const DagEnsemble ens = enumerate_mec(ess);
    std::cout << "undirected edges: " << ess.pdag.num_undirected() << ", equivalence class size: " << ens.size() << "\n\n";

    struct Setting {
        const char *algo;
        int m, q;
    };
    for (const Setting s : {Setting{"rand", 1, 2}, Setting{"greedy1", 1, 1}, Setting{"greedy1", 2, 1},
                            Setting{"dgc", 1, 2}, Setting{"ssg_b", 1, 2}}) {
        DesignProblem problem{ess, ens, s.m, s.q, Objective::eo, {}, 7};
        const Batch b = design_batch(s.algo, problem, NmscgParams{});
        std::cout << s.algo << " (m=" << s.m << ", q=" << s.q << "): ";
        for (const auto &i : b) {
            std::cout << '{';
            for (std::size_t k = 0; k < i.size(); ++k) std::cout << (k ? "," : "") << i.targets()[k];
            std::cout << "} ";
        }
        std::cout << "-> F_EO " << f_eo(b, ens, ess) << ", oriented fraction " << oriented_fraction(b, truth, ess)
                  << '\n';
    }
}
