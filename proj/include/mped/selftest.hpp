#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mped/mped.hpp"
#include "mped/stats.hpp"

namespace mped::selftest {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Random test instance: a DAG, its essential graph and a design ensemble.
struct Instance {
    Dag truth;
    EssentialGraph ess;
    DagEnsemble ens;
};

/// ER DAG with p in [p_lo, p_hi] and density in [0.2, 0.7]; the ensemble is
/// the whole class when it has at most `ens_cap` members, else `ens_cap` draws.
inline Instance random_instance(Rng &rng, int p_lo, int p_hi, std::size_t ens_cap) {
    std::uniform_int_distribution<int> pd(p_lo, p_hi);
    std::uniform_real_distribution<double> rd(0.2, 0.7);
    GraphSpec spec;
    spec.kind = GraphKind::er;
    spec.p = pd(rng);
    spec.rho = rd(rng);
    spec.seed = rng();
    Dag g = gen_dag(spec);
    EssentialGraph ess = essential_graph(g);
    DagEnsemble ens = design_ensemble(ess, ens_cap, rng());
    return {g, ess, ens};
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline Intervention from_mask(std::uint32_t mask, int p) {
    std::vector<NodeId> v;
    for (int i = 0; i < p; ++i)
        if (mask >> i & 1u) v.push_back(i);
    return Intervention(std::move(v));
}

inline std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

} // namespace detail

inline CriterionResult criterion1() {
    CriterionResult r{1, "tree identification", false, "", 0.0};
    const Dag t = tree5();
    const EssentialGraph ess = essential_graph(t);
    const std::size_t size = count_mec(ess);
    const DagEnsemble ens = enumerate_mec(ess);
    DesignProblem two_singles{ess, ens, 2, 1, Objective::eo, {}, 1};
    const double greedy_frac = oriented_fraction(baseline_greedy_single(two_singles), t, ess);
    int dgc_full = 0;
    for (int s = 0; s < 20; ++s) {
        DesignProblem pr{ess, ens, 1, 2, Objective::eo, {}, static_cast<std::uint64_t>(s)};
        if (oriented_fraction(dgc(pr), t, ess) == 1.0) ++dgc_full;
    }
    r.passed = size == 5 && greedy_frac == 1.0 && dgc_full >= 18;
    r.detail = "MEC size " + std::to_string(size) + ", greedy1 fraction " + detail::fmt(greedy_frac) + ", dgc full in " +
               std::to_string(dgc_full) + "/20 seeds";
    return r;
}

inline CriterionResult criterion2() {
    CriterionResult r{2, "non-submodularity counterexample", false, "", 0.0};
    const auto ce = nonsubmodular_example();
    auto F = [&](const Intervention &i) { return f_inf_tilde(Batch{i}, ce.ensemble, ce.ess); };
    const double gain_small = F(ce.smaller.with(ce.added)) - F(ce.smaller);
    const double gain_large = F(ce.larger.with(ce.added)) - F(ce.larger);
    const bool nested = std::includes(ce.larger.begin(), ce.larger.end(), ce.smaller.begin(), ce.smaller.end()) &&
                        !ce.larger.contains(ce.added);
    r.passed = nested && gain_small < gain_large;
    r.detail = "gain on {1,2} = " + detail::fmt(gain_small) + ", gain on {1,2,3} = " + detail::fmt(gain_large);
    return r;
}

inline CriterionResult criterion3(std::uint64_t seed = 3) {
    CriterionResult r{3, "submodularity oracles", false, "", 0.0};
    constexpr double tol = 1e-9;
    Rng rng(seed);
    long long checks = 0;
    long long violations = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const Instance in = random_instance(rng, 3, 6, 10);
        const int p = in.truth.p();
        // Intervention-level: groundset of 6 random nonempty interventions, all ξ1 ⊆ ξ2.
        std::vector<Intervention> ground;
        std::uniform_int_distribution<std::uint32_t> md(1, (1u << p) - 1);
        while (ground.size() < 6) {
            Intervention cand = detail::from_mask(md(rng), p);
            if (std::find(ground.begin(), ground.end(), cand) == ground.end()) ground.push_back(cand);
        }
        const int G = static_cast<int>(ground.size());
        std::vector<double> value(1u << G);
        for (std::uint32_t s = 0; s < (1u << G); ++s) {
            Batch b;
            for (int k = 0; k < G; ++k)
                if (s >> k & 1u) b.insert(ground[k]);
            value[s] = f_eo(b, in.ens, in.ess);
        }
        for (std::uint32_t b2 = 0; b2 < (1u << G); ++b2)
            for (std::uint32_t b1 = b2;; b1 = (b1 - 1) & b2) {
                ++checks;
                if (value[b1] > value[b2] + tol) ++violations;
                for (int k = 0; k < G; ++k) {
                    if (b2 >> k & 1u) continue;
                    ++checks;
                    if (value[b1 | 1u << k] - value[b1] < value[b2 | 1u << k] - value[b2] - tol) ++violations;
                }
                if (b1 == 0) break;
            }
        // Node-restricted: all A ⊆ B ⊆ [p], v ∉ B, for ξ = ∅ and a random ξ.
        for (int variant = 0; variant < 2; ++variant) {
            Batch xi;
            if (variant == 1) xi.insert(detail::from_mask(md(rng), p));
            EoEvaluator eval(in.ess, in.ens, {}, xi);
            std::vector<double> fv(1u << p);
            for (std::uint32_t s = 0; s < (1u << p); ++s) fv[s] = eval.value(detail::from_mask(s, p));
            for (std::uint32_t B = 0; B < (1u << p); ++B)
                for (std::uint32_t A = B;; A = (A - 1) & B) {
                    for (int v = 0; v < p; ++v) {
                        if (B >> v & 1u) continue;
                        ++checks;
                        if (fv[A | 1u << v] - fv[A] < fv[B | 1u << v] - fv[B] - tol) ++violations;
                    }
                    if (A == 0) break;
                }
        }
    }
    r.passed = violations == 0;
    r.detail = std::to_string(violations) + " violations in " + std::to_string(checks) + " checks";
    return r;
}

inline CriterionResult criterion4(std::uint64_t seed = 4) {
    CriterionResult r{4, "Meek engine properties", false, "", 0.0};
    Rng rng(seed);
    int closure_failures = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const Instance in = random_instance(rng, 4, 12, 1);
        // Start from skeleton + colliders + a random intervention's cuts, unclosed.
        Pdag start(in.truth.p());
        const auto vs = v_structures(in.truth);
        for (const auto &e : in.truth.edges()) {
            const bool collider = std::any_of(vs.begin(), vs.end(), [&](const VStructure &v) {
                return v.k == e.to && (v.i == e.from || v.j == e.from);
            });
            if (collider)
                start.add_directed(e.from, e.to);
            else
                start.add_undirected(e.from, e.to);
        }
        std::vector<NodeId> targets;
        for (NodeId v = 0; v < in.truth.p(); ++v)
            if (std::bernoulli_distribution(0.3)(rng)) targets.push_back(v);
        start = orient_by_intervention(start, in.truth, Intervention(targets));
        const Pdag closed = meek_closure(start);
        if (!(meek_closure(closed) == closed)) ++closure_failures;
        for (int s = 0; s < 10; ++s)
            if (!(meek_closure(start, rng()) == closed)) ++closure_failures;
    }
    int property_failures = 0;
    for (int k = 0; k < 500; ++k) {
        const Instance in = random_instance(rng, 3, 10, 1);
        const int p = in.truth.p();
        auto random_intervention = [&] {
            std::vector<NodeId> t;
            for (NodeId v = 0; v < p; ++v)
                if (std::bernoulli_distribution(0.35)(rng)) t.push_back(v);
            return Intervention(t);
        };
        Batch xi1;
        Batch xi2;
        for (int j = 0; j < 2; ++j) {
            const Intervention i = random_intervention();
            xi1.insert(i);
            xi2.insert(i);
        }
        for (int j = 0; j < 2; ++j) xi2.insert(random_intervention());
        const auto r1 = r_oriented(xi1, in.truth, in.ess.pdag);
        const auto r2 = r_oriented(xi2, in.truth, in.ess.pdag);
        if (!std::includes(r2.begin(), r2.end(), r1.begin(), r1.end())) ++property_failures;
        const Intervention single = random_intervention();
        std::vector<NodeId> comp;
        for (NodeId v = 0; v < p; ++v)
            if (!single.contains(v)) comp.push_back(v);
        if (r_oriented(Batch{single}, in.truth, in.ess.pdag) !=
            r_oriented(Batch{Intervention(comp)}, in.truth, in.ess.pdag))
            ++property_failures;
        for (const auto &e : r2)
            if (!in.truth.has_edge(e.from, e.to)) ++property_failures;
    }
    r.passed = closure_failures == 0 && property_failures == 0;
    r.detail = std::to_string(closure_failures) + " closure mismatches (50 x 11), " + std::to_string(property_failures) +
               " monotonicity/symmetry/soundness failures (500 pairs)";
    return r;
}

inline CriterionResult criterion5(std::uint64_t seed = 5) {
    CriterionResult r{5, "separating systems", false, "", 0.0};
    Rng rng(seed);
    int failures = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int p = std::uniform_int_distribution<int>(2, 64)(rng);
        const int q = std::uniform_int_distribution<int>(1, p / 2)(rng);
        const auto ss = separate_agnostic(p, q);
        if (!verify_separation_all_pairs(ss, p)) ++failures;
        if (static_cast<long long>(ss.size()) > agnostic_size_bound(p, q)) ++failures;
        for (const auto &s : ss.sets)
            if (static_cast<int>(s.size()) > q || s.empty()) ++failures;

        GraphSpec spec;
        spec.kind = GraphKind::er;
        spec.p = p;
        spec.rho = std::uniform_real_distribution<double>(0.02, 0.5)(rng);
        spec.seed = rng();
        const EssentialGraph ess = essential_graph(gen_dag(spec));
        const auto gs = separate_graph_sensitive(ess.pdag, q);
        if (!verify_separation(gs, ess.pdag)) ++failures;
        for (const auto &s : gs.sets) {
            if (static_cast<int>(s.size()) > q) ++failures;
            for (NodeId a : s)
                for (NodeId b : s)
                    if (a < b && ess.pdag.has_undirected(a, b)) ++failures;
        }
    }
    Pdag k5(5);
    for (NodeId a = 0; a < 5; ++a)
        for (NodeId b = a + 1; b < 5; ++b) k5.add_undirected(a, b);
    bool singletons = true;
    for (int q = 1; q <= 5; ++q)
        for (const auto &s : separate_graph_sensitive(k5, q).sets) singletons = singletons && s.size() == 1;
    r.passed = failures == 0 && singletons;
    r.detail = std::to_string(failures) + " failures in 200 trials; K5 all singletons: " + (singletons ? "yes" : "no");
    return r;
}

inline CriterionResult criterion6(std::uint64_t seed = 6) {
    CriterionResult r{6, "greedy bound for agnostic SSG", false, "", 0.0};
    Rng rng(seed);
    int violations = 0;
    int done = 0;
    while (done < 100) {
        std::uniform_int_distribution<int> pd(4, 10);
        GraphSpec spec;
        spec.kind = GraphKind::er;
        spec.p = pd(rng);
        spec.rho = std::uniform_real_distribution<double>(0.2, 0.6)(rng);
        spec.seed = rng();
        const Dag g = gen_dag(spec);
        const EssentialGraph ess = essential_graph(g);
        if (count_mec(ess, 200) > 200) continue;
        const DagEnsemble ens = enumerate_mec(ess);
        const int q = std::uniform_int_distribution<int>(1, g.p() / 2)(rng);
        const auto sys = separate_agnostic(g.p(), q);
        const int m = std::uniform_int_distribution<int>(1, static_cast<int>(sys.size()))(rng);
        DesignProblem pr{ess, ens, m, q, Objective::mi_inf, {}, rng()};
        const Batch b = ssg(pr, SsgMode::agnostic);
        if (!greedy_bound_holds(b, sys.size(), pr)) ++violations;
        ++done;
    }
    r.passed = violations == 0;
    r.detail = std::to_string(violations) + " violations in 100 instances";
    return r;
}

inline CriterionResult criterion7(std::uint64_t seed = 7) {
    CriterionResult r{7, "gradient estimator", false, "", 0.0};
    Rng rng(seed);
    int outside = 0;
    int coords = 0;
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const Instance in = random_instance(rng, 3, 8, 10);
        const int p = in.truth.p();
        Batch xi;
        if (std::bernoulli_distribution(0.5)(rng)) {
            std::vector<NodeId> t;
            for (NodeId v = 0; v < p; ++v)
                if (std::bernoulli_distribution(0.3)(rng)) t.push_back(v);
            xi.insert(Intervention(t));
        }
        EoEvaluator eval(in.ess, in.ens, {}, xi);
        std::vector<double> x(static_cast<std::size_t>(p));
        for (auto &xi_v : x) xi_v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto st = estimate_gradient_stats(x, eval, 10000, rng);
        for (int i = 0; i < p; ++i) {
            auto hi = x;
            auto lo = x;
            hi[i] = 1.0;
            lo[i] = 0.0;
            const double exact = multilinear_value_exact(hi, eval) - multilinear_value_exact(lo, eval);
            const double se = std::sqrt(st.variance[i] / static_cast<double>(st.samples));
            const double err = std::abs(st.mean[i] - exact);
            ++coords;
            if (err > 3.0 * se + 1e-9) ++outside;
            if (se > 0) worst = std::max(worst, err / se);
        }
    }
    r.passed = outside == 0;
    r.detail = std::to_string(outside) + " of " + std::to_string(coords) + " coordinates outside 3 sigma (max " +
               detail::fmt(worst) + " sigma)";
    return r;
}

inline CriterionResult criterion8(std::uint64_t seed = 8) {
    CriterionResult r{8, "rounding", false, "", 0.0};
    Rng rng(seed);
    const std::vector<std::vector<double>> points{
        {0.5, 0.5}, {0.3, 0.7, 0.5, 0.5}, {0.15, 0.85, 0.4, 0.25, 0.35, 0.6, 0.1, 0.35}, {0.9, 0.05, 0.2, 0.4}};
    constexpr int trials = 10000;
    int outside = 0;
    int cardinality_failures = 0;
    int coords = 0;
    for (const auto &x : points) {
        double sum = 0.0;
        for (double v : x) sum += v;
        std::vector<int> hits(x.size(), 0);
        for (int t = 0; t < trials; ++t) {
            const Intervention i = dependent_round(x, rng);
            const auto k = static_cast<double>(i.size());
            if (k < std::floor(sum + 1e-9) || k > std::ceil(sum - 1e-9)) ++cardinality_failures;
            for (NodeId v : i) ++hits[v];
        }
        for (std::size_t c = 0; c < x.size(); ++c) {
            const double freq = static_cast<double>(hits[c]) / trials;
            const double sigma = std::sqrt(x[c] * (1.0 - x[c]) / trials);
            ++coords;
            if (std::abs(freq - x[c]) > 3.0 * sigma + 1e-12) ++outside;
        }
    }
    r.passed = outside == 0 && cardinality_failures == 0;
    r.detail = std::to_string(outside) + " of " + std::to_string(coords) + " marginals outside 3 sigma, " +
               std::to_string(cardinality_failures) + " cardinality failures in " +
               std::to_string(trials * static_cast<int>(points.size())) + " roundings";
    return r;
}

namespace detail {

inline std::map<std::string, std::vector<double>> by_algorithm(const std::vector<ResultRow> &rows, int m, int q) {
    std::map<std::string, std::vector<double>> out;
    for (const auto &row : rows)
        if (row.m == m && row.q == q) out[row.algorithm].push_back(row.value);
    return out;
}

} // namespace detail

inline CriterionResult criterion9(std::uint64_t seed = 9) {
    CriterionResult r{9, "directional performance", false, "", 0.0};
    ExperimentConfig er;
    er.graph = "er:p=15,rho=0.15,mec=20-200";
    er.algorithms = {"dgc", "ssg_b", "rand", "greedy1"};
    er.m_values = {2};
    er.q_values = {3};
    er.repeats = 30;
    er.seed = seed;
    er.reproducible = true;
    std::vector<std::string> errors;
    auto v = detail::by_algorithm(run_experiment(er, &errors), 2, 3);
    bool ok = errors.empty();
    std::ostringstream d;
    for (const auto &a : {"dgc", "ssg_b"})
        for (const auto &b : {"rand", "greedy1"}) {
            if (v[a].size() != 30 || v[b].size() != 30) {
                ok = false;
                continue;
            }
            const double pv = paired_t_greater(v[a], v[b]);
            ok = ok && pv < 0.05;
            d << a << ">" << b << " p=" << detail::fmt(pv) << "; ";
        }
    d << "means dgc " << detail::fmt(summarize(v["dgc"]).mean) << " ssg_b " << detail::fmt(summarize(v["ssg_b"]).mean)
      << " rand " << detail::fmt(summarize(v["rand"]).mean) << " greedy1 " << detail::fmt(summarize(v["greedy1"]).mean);

    ExperimentConfig star;
    star.graph = "star:sizes=7/7/6";
    star.algorithms = {"dgc", "ssg_b", "ssg_a"};
    star.m_values = {1};
    star.q_values = {3};
    star.repeats = 30;
    star.seed = seed + 1;
    star.reproducible = true;
    auto s = detail::by_algorithm(run_experiment(star, &errors), 1, 3);
    ok = ok && errors.empty() && s["dgc"].size() == 30 && s["ssg_b"].size() == 30 && s["ssg_a"].size() == 30;
    int lower = 0;
    for (std::size_t k = 0; k < s["ssg_a"].size() && k < s["ssg_b"].size(); ++k)
        if (s["ssg_a"][k] < s["ssg_b"][k]) ++lower;
    const double dgc_mean = summarize(s["dgc"]).mean;
    const double ssgb_mean = summarize(s["ssg_b"]).mean;
    ok = ok && dgc_mean >= 0.9 && ssgb_mean >= 0.9 && lower >= 21;
    d << " | star: dgc " << detail::fmt(dgc_mean) << " ssg_b " << detail::fmt(ssgb_mean) << " ssg_a "
      << detail::fmt(summarize(s["ssg_a"]).mean) << ", ssg_a lower in " << lower << "/30";
    for (const auto &e : errors) d << " | error: " << e;
    r.passed = ok;
    r.detail = d.str();
    return r;
}

inline CriterionResult criterion10(std::uint64_t seed = 10) {
    CriterionResult r{10, "K5 q-sensitivity", false, "", 0.0};
    ExperimentConfig k5;
    k5.graph = "complete:p=5";
    k5.algorithms = {"ssg_b", "dgc"};
    k5.m_values = {2};
    k5.q_values = {1, 2, 3};
    k5.repeats = 30;
    k5.seed = seed;
    k5.reproducible = true;
    std::vector<std::string> errors;
    const auto rows = run_experiment(k5, &errors);
    const auto q1 = detail::by_algorithm(rows, 2, 1);
    const auto q2 = detail::by_algorithm(rows, 2, 2);
    const auto q3 = detail::by_algorithm(rows, 2, 3);
    const bool identical = q1.at("ssg_b") == q2.at("ssg_b") && q1.at("ssg_b") == q3.at("ssg_b");
    const double d1 = summarize(q1.at("dgc")).mean;
    const double d3 = summarize(q3.at("dgc")).mean;
    r.passed = errors.empty() && identical && q1.at("ssg_b").size() == 30 && d3 > d1;
    r.detail = std::string("ssg_b identical across q: ") + (identical ? "yes" : "no") + " (mean " +
               detail::fmt(summarize(q1.at("ssg_b")).mean) + "); dgc mean q=1 " + detail::fmt(d1) + ", q=3 " +
               detail::fmt(d3);
    return r;
}

inline CriterionResult criterion11(std::uint64_t seed = 11) {
    CriterionResult r{11, "finite-sample sanity", false, "", 0.0};
    ExperimentConfig fin;
    fin.graph = "er:p=8,rho=0.2,mec=2-100";
    fin.algorithms = {"ssg_b", "rand"};
    fin.m_values = {2};
    fin.q_values = {2};
    fin.repeats = 50;
    fin.seed = seed;
    fin.mode = Mode::finite;
    fin.metric = "f_mi";
    fin.reproducible = true;
    std::vector<std::string> errors;
    auto v = detail::by_algorithm(run_experiment(fin, &errors), 2, 2);
    const bool complete = errors.empty() && v["ssg_b"].size() == 50 && v["rand"].size() == 50;
    const double pv = complete ? paired_t_greater(v["ssg_b"], v["rand"]) : 1.0;

    const Dag t = tree5();
    const auto sem = gen_sem(t, seed);
    const FiniteModel model(enumerate_mec(essential_graph(t)), simulate(sem, Intervention{}, 800, kDefaultClamp, seed));
    const double empty_mi = f_mi_estimate({}, model, {}, seed);
    const F1Shd point = eval_f1_shd(Posterior::point_mass(t), t);
    r.passed = complete && pv < 0.05 && empty_mi == 0.0 && point.f1 == 1.0 && point.shd == 0.0;
    r.detail = "mean f_mi ssg_b " + detail::fmt(summarize(v["ssg_b"]).mean) + " vs rand " +
               detail::fmt(summarize(v["rand"]).mean) + " (paired one-sided p=" + detail::fmt(pv) +
               "); f_mi(empty)=" + detail::fmt(empty_mi) + "; point mass F1=" + detail::fmt(point.f1) +
               " SHD=" + detail::fmt(point.shd);
    return r;
}

inline CriterionResult criterion12(std::uint64_t seed = 12) {
    CriterionResult r{12, "sequential-batch consistency", false, "", 0.0};
    Rng rng(seed);
    ExperimentConfig cfg;
    int failures = 0;
    int runs = 0;
    for (int inst = 0; inst < 30; ++inst) {
        const Instance in = random_instance(rng, 3, 8, 1);
        const int edges = static_cast<int>(in.truth.num_edges());
        for (const auto &alg : known_algorithms()) {
            if (alg == "ssg_a" && in.truth.p() < 2) continue;
            const auto trace = sequential_rounds(in.truth, alg, 1, 1, std::max(edges, 0), cfg, rng());
            ++runs;
            bool ok = trace.fully_oriented && static_cast<int>(trace.oriented_after_round.size()) <= edges;
            for (std::size_t k = 1; k < trace.oriented_after_round.size(); ++k)
                ok = ok && trace.oriented_after_round[k] >= trace.oriented_after_round[k - 1];
            if (!ok) ++failures;
        }
    }
    r.passed = failures == 0;
    r.detail = std::to_string(failures) + " failures in " + std::to_string(runs) + " runs";
    return r;
}

struct CriterionSpec {
    int id;
    double limit_seconds; // <= 0: no runtime bound
    std::function<CriterionResult()> run;
};

inline std::vector<CriterionSpec> all_criteria() {
    return {{1, 1.0, [] { return criterion1(); }},     {2, 1.0, [] { return criterion2(); }},
            {3, 120.0, [] { return criterion3(); }},   {4, 120.0, [] { return criterion4(); }},
            {5, 60.0, [] { return criterion5(); }},    {6, 300.0, [] { return criterion6(); }},
            {7, 300.0, [] { return criterion7(); }},   {8, 0.0, [] { return criterion8(); }},
            {9, 900.0, [] { return criterion9(); }},   {10, 0.0, [] { return criterion10(); }},
            {11, 900.0, [] { return criterion11(); }}, {12, 0.0, [] { return criterion12(); }}};
}

/// Runs the selected criteria (all when `ids` is empty), printing one
/// PASS/FAIL line each. Returns the number of failures.
inline int run_all(std::ostream &out, const std::vector<int> &ids = {}) {
    int failed = 0;
    for (const auto &c : all_criteria()) {
        if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
        const auto start = detail::Clock::now();
        CriterionResult res;
        try {
            res = c.run();
        } catch (const std::exception &e) {
            res = {c.id, "criterion " + std::to_string(c.id), false, std::string("exception: ") + e.what(), 0.0};
        }
        res.seconds = std::chrono::duration<double>(detail::Clock::now() - start).count();
        if (c.limit_seconds > 0 && res.seconds > c.limit_seconds) {
            res.passed = false;
            res.detail += "; runtime " + detail::fmt(res.seconds) + " s exceeds " + detail::fmt(c.limit_seconds) + " s";
        }
        if (!res.passed) ++failed;
        out << (res.passed ? "PASS" : "FAIL") << " criterion " << res.id << " (" << res.name << "): " << res.detail
            << " [" << detail::fmt(res.seconds) << " s]" << std::endl;
    }
    return failed;
}

} // namespace mped::selftest
