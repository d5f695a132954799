#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iterator>
#include <limits>
#include <memory>
#include <numeric>
#include <queue>
#include <random>
#include <vector>

#include "mped/graph.hpp"
#include "mped/mec.hpp"
#include "mped/objectives.hpp"
#include "mped/random.hpp"
#include "mped/sepsys.hpp"

namespace mped {

enum class Objective { eo, mi_inf };

struct DesignProblem {
    EssentialGraph ess;
    DagEnsemble ens;
    int m = 1;
    int q = 1;
    Objective objective = Objective::eo;
    EoWeights weights;
    std::uint64_t seed = 0;

    int p() const noexcept { return ess.pdag.p(); }

    void validate() const {
        if (m < 0) throw InvalidArgument("m must be nonnegative");
        if (q < 1 || q > p()) throw InvalidArgument("q must lie in [1, p]");
        if (ens.empty()) throw InvalidArgument("design ensemble is empty");
    }
};

struct NmscgParams {
    int iterations = 100;
    int samples = 8;
    int rounding_repeats = 10;
    double rho_scale = 4.0;
    double rho_offset = 8.0;
    double rho_power = 2.0 / 3.0;

    /// Momentum weight for step t (1-based), capped at 1.
    double rho(int t) const { return std::min(1.0, rho_scale / std::pow(t + rho_offset, rho_power)); }

    void validate() const {
        if (iterations < 1 || samples < 1 || rounding_repeats < 1)
            throw InvalidArgument("NMSCG iterations, samples and rounding repeats must be positive");
    }
};

/// Linear maximization over {0 <= v <= 1 - x, Σv <= q}: fill coordinates with
/// positive direction in decreasing order (ties by index).
inline std::vector<double> lmo(const std::vector<double> &d, const std::vector<double> &x, double q) {
    if (d.size() != x.size()) throw InvalidArgument("direction and point differ in dimension");
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
    std::vector<double> v(d.size(), 0.0);
    double budget = q;
    for (std::size_t i : order) {
        if (!(d[i] > 0.0) || budget <= 0.0) break;
        const double room = std::max(0.0, 1.0 - x[i]);
        v[i] = std::min(room, budget);
        budget -= v[i];
    }
    return v;
}

/// Stochastic continuous greedy on the multilinear extension of
/// I ↦ F_EO(base ∪ {I}) with momentum-averaged gradients.
inline std::vector<double> nmscg(const EoEvaluator &eval, int q, const NmscgParams &params, Rng &rng) {
    params.validate();
    const auto p = static_cast<std::size_t>(eval.p());
    std::vector<double> x(p, 0.0);
    std::vector<double> d(p, 0.0);
    const double step = 1.0 / params.iterations;
    for (int t = 1; t <= params.iterations; ++t) {
        const auto g = estimate_gradient(x, eval, static_cast<std::size_t>(params.samples), rng);
        const double rho = params.rho(t);
        for (std::size_t i = 0; i < p; ++i) d[i] = (1.0 - rho) * d[i] + rho * g[i];
        const auto v = lmo(d, x, q);
        for (std::size_t i = 0; i < p; ++i) x[i] = std::min(1.0, x[i] + v[i] * step);
    }
    return x;
}

inline std::vector<double> nmscg(const DesignProblem &problem, const Batch &batch_so_far, const NmscgParams &params,
                                 Rng &rng) {
    EoEvaluator eval(problem.ess, problem.ens, problem.weights, batch_so_far);
    return nmscg(eval, problem.q, params, rng);
}

inline constexpr double kRoundEps = 1e-9;

/// Dependent rounding: repeatedly moves mass between two fractional
/// coordinates so that each stays in [0,1], the sum is unchanged and each
/// coordinate's expectation is preserved. A single leftover fractional
/// coordinate is rounded independently.
inline Intervention dependent_round(std::vector<double> x, Rng &rng) {
    auto fractional = [](double v) { return v > kRoundEps && v < 1.0 - kRoundEps; };
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t i = 0;
    for (;;) {
        while (i < x.size() && !fractional(x[i])) ++i;
        if (i == x.size()) break;
        std::size_t j = i + 1;
        while (j < x.size() && !fractional(x[j])) ++j;
        if (j == x.size()) {
            x[i] = unit(rng) < x[i] ? 1.0 : 0.0;
            break;
        }
        const double up = std::min(1.0 - x[i], x[j]);
        const double down = std::min(x[i], 1.0 - x[j]);
        if (unit(rng) < down / (up + down)) {
            x[i] += up;
            x[j] -= up;
        } else {
            x[i] -= down;
            x[j] += down;
        }
        for (std::size_t k : {i, j}) {
            if (x[k] <= kRoundEps) x[k] = 0.0;
            if (x[k] >= 1.0 - kRoundEps) x[k] = 1.0;
        }
    }
    std::vector<NodeId> chosen;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] >= 0.5) chosen.push_back(static_cast<NodeId>(k));
    return Intervention(std::move(chosen));
}

/// Best of `repeats` dependent roundings by F_EO(base ∪ {I}); earliest wins ties.
inline Intervention round(const std::vector<double> &x, const EoEvaluator &eval, int repeats, Rng &rng) {
    if (repeats < 1) throw InvalidArgument("rounding repeats must be positive");
    Intervention best;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < repeats; ++r) {
        Intervention cand = dependent_round(x, rng);
        const double val = eval.value(cand);
        if (val > best_value) {
            best_value = val;
            best = std::move(cand);
        }
    }
    return best;
}

/// Continuous-greedy batch design: m rounds of round(NMSCG(F_EO^ξ, q)).
inline Batch dgc(const DesignProblem &problem, const NmscgParams &params = {}) {
    problem.validate();
    params.validate();
    Rng rng(derive_seed(problem.seed, 0xD6C));
    EoEvaluator eval(problem.ess, problem.ens, problem.weights, problem.ess.prior);
    Batch out;
    for (int k = 0; k < problem.m; ++k) {
        const auto x = nmscg(eval, problem.q, params, rng);
        const Intervention pick = round(x, eval, params.rounding_repeats, rng);
        if (pick.empty()) continue;
        if (out.insert(pick)) eval.commit(pick);
    }
    return out;
}

/// Value of a candidate batch; greedy routines call it with growing batches.
using BatchObjective = std::function<double(const Batch &)>;

namespace detail {

// Marginal gains are compared on a 1e-9 grid so that equal rational gains
// computed along different paths tie exactly.
inline double canonical_gain(double g) { return std::round(g * 1e9) / 1e9; }

} // namespace detail

/// Lazy greedy selection of up to m members of `groundset`. Selects exactly
/// what naive greedy selects for a submodular objective (argmax marginal
/// gain, lowest groundset index on ties).
inline Batch lazy_greedy(const std::vector<Intervention> &groundset, int m, const BatchObjective &f,
                         const Batch &start = {}) {
    struct Entry {
        double gain;
        std::size_t index;
        int round;
    };
    auto worse = [](const Entry &a, const Entry &b) {
        if (a.gain != b.gain) return a.gain < b.gain;
        return a.index > b.index;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
    Batch chosen = start;
    double current = f(chosen);
    for (std::size_t i = 0; i < groundset.size(); ++i)
        heap.push({detail::canonical_gain(f(chosen.with(groundset[i])) - current), i, 0});
    std::vector<char> taken(groundset.size(), 0);
    for (int round = 0; round < m && !heap.empty();) {
        Entry top = heap.top();
        heap.pop();
        if (taken[top.index]) continue;
        if (top.round != round) {
            top.gain = detail::canonical_gain(f(chosen.with(groundset[top.index])) - current);
            top.round = round;
            heap.push(top);
            continue;
        }
        taken[top.index] = 1;
        chosen.insert(groundset[top.index]);
        current = f(chosen);
        ++round;
    }
    return chosen;
}

/// Objective handle for the design problem's configured objective. The
/// handle refers to `problem`, which must outlive it.
inline BatchObjective objective_handle(const DesignProblem &problem) {
    if (problem.objective == Objective::mi_inf) {
        return [&problem](const Batch &b) { return f_inf_tilde(b, problem.ens, problem.ess); };
    }
    auto eval = std::make_shared<EoEvaluator>(problem.ess, problem.ens, problem.weights, problem.ess.prior);
    return [eval](const Batch &b) {
        if (b.empty()) return eval->base_value();
        if (b.size() == 1) return eval->value(*b.begin());
        EoEvaluator extended = *eval;
        for (const auto &i : b) extended.commit(i);
        return extended.base_value();
    };
}

enum class SsgMode { agnostic, graph_sensitive, best_over_q };

inline SeparatingSystem build_system(const DesignProblem &problem, SeparationMode mode, int q) {
    return mode == SeparationMode::agnostic ? separate_agnostic(problem.p(), q)
                                            : separate_graph_sensitive(problem.ess.pdag, q);
}

/// Separating-system greedy with an explicit objective.
inline Batch ssg(const DesignProblem &problem, SsgMode mode, const BatchObjective &f) {
    problem.validate();
    if (mode == SsgMode::best_over_q) {
        Batch best;
        double best_value = -std::numeric_limits<double>::infinity();
        for (int q = 1; q <= problem.q; ++q) {
            const auto sys = build_system(problem, SeparationMode::graph_sensitive, q);
            Batch b = lazy_greedy(sys.sets, problem.m, f);
            const double val = f(b);
            if (val > best_value + 1e-12) {
                best_value = val;
                best = std::move(b);
            }
        }
        return best;
    }
    const auto sys = build_system(problem,
                                  mode == SsgMode::agnostic ? SeparationMode::agnostic
                                                            : SeparationMode::graph_sensitive,
                                  problem.q);
    return lazy_greedy(sys.sets, problem.m, f);
}

inline Batch ssg(const DesignProblem &problem, SsgMode mode) { return ssg(problem, mode, objective_handle(problem)); }

/// m interventions of q distinct nodes drawn uniformly from nodes incident
/// to an undirected edge.
inline Batch baseline_rand(const DesignProblem &problem) {
    const auto active = problem.ess.pdag.active_nodes();
    if (active.empty()) throw InvalidArgument("no undirected edges to intervene on");
    Rng rng(derive_seed(problem.seed, 0x2A4D));
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(problem.q), active.size());
    Batch out;
    for (int j = 0; j < problem.m; ++j) {
        std::vector<NodeId> pick;
        std::sample(active.begin(), active.end(), std::back_inserter(pick), static_cast<std::ptrdiff_t>(k), rng);
        out.insert(Intervention(std::move(pick)));
    }
    return out;
}

/// Greedy over single-node interventions under F_EO.
inline Batch baseline_greedy_single(const DesignProblem &problem) {
    if (problem.m <= 0) return {};
    std::vector<Intervention> singles;
    for (NodeId v = 0; v < problem.p(); ++v) singles.push_back(Intervention{v});
    EoEvaluator eval(problem.ess, problem.ens, problem.weights, problem.ess.prior);
    BatchObjective f = [&eval](const Batch &b) {
        EoEvaluator extended = eval;
        for (const auto &i : b) extended.commit(i);
        return extended.base_value();
    };
    return lazy_greedy(singles, problem.m, f);
}

/// F̃∞(batch) >= (1 - m/|S|) F̃∞(∅), with the factor floored at 0.
inline bool greedy_bound_holds(const Batch &batch, std::size_t system_size, const DesignProblem &problem) {
    const double empty = f_inf_tilde({}, problem.ens, problem.ess);
    const double got = f_inf_tilde(batch, problem.ens, problem.ess);
    const double factor =
        system_size == 0 ? 0.0 : std::max(0.0, 1.0 - static_cast<double>(problem.m) / static_cast<double>(system_size));
    return got >= factor * empty - 1e-9;
}

} // namespace mped
