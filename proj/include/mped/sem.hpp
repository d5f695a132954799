#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mped/graph.hpp"
#include "mped/mec.hpp"
#include "mped/random.hpp"

namespace mped {

/// Linear-Gaussian structural equation model X_j = Σ_i W(i,j) X_i + ε_j.
struct LinearSem {
    Dag dag;
    Eigen::MatrixXd weights; // p x p, entry (i, j) is the weight of i -> j
    Eigen::VectorXd noise_sd;

    int p() const noexcept { return dag.p(); }
};

/// Samples with the intervention (possibly empty) that produced each row.
struct Dataset {
    int p = 0;
    std::vector<Intervention> targets;
    std::vector<Eigen::VectorXd> samples;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }

    void append(const Dataset &other) {
        if (p == 0) p = other.p;
        if (other.p != p) throw InvalidArgument("datasets have different dimensions");
        targets.insert(targets.end(), other.targets.begin(), other.targets.end());
        samples.insert(samples.end(), other.samples.begin(), other.samples.end());
    }
};

inline constexpr double kDefaultClamp = 5.0;

/// Noise variance in likelihoods: fixed at 1, or the per-node maximum-likelihood estimate RSS/n.
enum class NoiseModel { unit, mle };

/// Edge weights uniform on [-1, -0.25] ∪ [0.25, 1], unit noise.
inline LinearSem gen_sem(const Dag &dag, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> magnitude(0.25, 1.0);
    std::bernoulli_distribution negative(0.5);
    LinearSem sem{dag, Eigen::MatrixXd::Zero(dag.p(), dag.p()), Eigen::VectorXd::Ones(dag.p())};
    for (const auto &e : dag.edges()) {
        const double w = magnitude(rng);
        sem.weights(e.from, e.to) = negative(rng) ? -w : w;
    }
    return sem;
}

/// n ancestral samples; intervened nodes are fixed to `clamp`.
inline Dataset simulate(const LinearSem &sem, const Intervention &intervention, std::size_t n, double clamp,
                        Rng &rng) {
    if (n == 0) throw InvalidArgument("sample count must be positive");
    const int p = sem.p();
    const auto order = sem.dag.topological_order();
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::vector<NodeId>> parents(static_cast<std::size_t>(p));
    for (NodeId v = 0; v < p; ++v) parents[v] = sem.dag.parents(v);
    Dataset data;
    data.p = p;
    data.targets.assign(n, intervention);
    data.samples.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
        for (NodeId v : order) {
            if (intervention.contains(v)) {
                x[v] = clamp;
                continue;
            }
            double val = sem.noise_sd[v] * noise(rng);
            for (NodeId u : parents[v]) val += sem.weights(u, v) * x[u];
            x[v] = val;
        }
        data.samples.push_back(std::move(x));
    }
    return data;
}

inline Dataset simulate(const LinearSem &sem, const Intervention &intervention, std::size_t n, double clamp,
                        std::uint64_t seed) {
    Rng rng(seed);
    return simulate(sem, intervention, n, clamp, rng);
}

/// Per-node Gram matrices over the rows in which the node was not intervened on.
class SufficientStats {
public:
    SufficientStats() = default;
    explicit SufficientStats(int p)
        : p_(p), gram_(static_cast<std::size_t>(p), Eigen::MatrixXd::Zero(p, p)), rows_(static_cast<std::size_t>(p), 0) {}

    explicit SufficientStats(const Dataset &data) : SufficientStats(data.p) { add(data); }

    void add(const Dataset &data) {
        if (data.p != p_) throw InvalidArgument("dataset dimension does not match statistics");
        for (std::size_t r = 0; r < data.size(); ++r) add_row(data.targets[r], data.samples[r]);
    }

    void add_row(const Intervention &target, const Eigen::VectorXd &x) {
        const Eigen::MatrixXd outer = x * x.transpose();
        for (NodeId j = 0; j < p_; ++j) {
            if (target.contains(j)) continue;
            gram_[j] += outer;
            ++rows_[j];
        }
    }

    int p() const noexcept { return p_; }
    const Eigen::MatrixXd &gram(NodeId j) const { return gram_[j]; }
    std::size_t rows(NodeId j) const { return rows_[j]; }

    /// Minimum-norm least-squares coefficients of node j on `parents` and the residual sum of squares.
    std::pair<Eigen::VectorXd, double> fit(NodeId j, const std::vector<NodeId> &parents) const {
        const Eigen::MatrixXd &S = gram_[j];
        const double syy = S(j, j);
        if (parents.empty()) return {Eigen::VectorXd(), std::max(0.0, syy)};
        const auto k = static_cast<Eigen::Index>(parents.size());
        Eigen::MatrixXd spp(k, k);
        Eigen::VectorXd spy(k);
        for (Eigen::Index a = 0; a < k; ++a) {
            spy[a] = S(parents[a], j);
            for (Eigen::Index b = 0; b < k; ++b) spp(a, b) = S(parents[a], parents[b]);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(spp);
        Eigen::VectorXd beta = cod.solve(spy);
        if (!beta.allFinite()) beta = Eigen::VectorXd::Zero(k);
        const double rss = syy - 2.0 * beta.dot(spy) + beta.dot(spp * beta);
        return {beta, std::max(0.0, rss)};
    }

private:
    int p_ = 0;
    std::vector<Eigen::MatrixXd> gram_;
    std::vector<std::size_t> rows_;
};

namespace detail {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;
inline constexpr double kMinVariance = 1e-12;

inline double node_log_likelihood(double rss, std::size_t rows, NoiseModel noise) {
    const auto n = static_cast<double>(rows);
    if (rows == 0) return 0.0;
    if (noise == NoiseModel::unit) return -0.5 * rss - 0.5 * n * kLog2Pi;
    const double var = std::max(rss / n, kMinVariance);
    return -0.5 * n * (kLog2Pi + std::log(var) + 1.0);
}

} // namespace detail

/// Gaussian log-likelihood of the data under the DAG's least-squares fit.
inline double log_likelihood(const Dag &g, const SufficientStats &stats, NoiseModel noise = NoiseModel::unit) {
    double ll = 0.0;
    for (NodeId j = 0; j < g.p(); ++j)
        ll += detail::node_log_likelihood(stats.fit(j, g.parents(j)).second, stats.rows(j), noise);
    return ll;
}

/// Normalized posterior over an ensemble of candidate DAGs.
struct Posterior {
    DagEnsemble ens;
    std::vector<double> log_weights;

    std::vector<double> probabilities() const {
        std::vector<double> out(log_weights.size());
        std::transform(log_weights.begin(), log_weights.end(), out.begin(), [](double lw) { return std::exp(lw); });
        return out;
    }

    /// Shannon entropy in bits.
    double entropy() const {
        double h = 0.0;
        for (double lw : log_weights) {
            const double w = std::exp(lw);
            if (w > 0.0) h -= w * lw / std::numbers::ln2;
        }
        return std::max(0.0, h);
    }

    static Posterior point_mass(const Dag &g) {
        return {DagEnsemble::uniform({g}), {0.0}};
    }
};

namespace detail {

inline std::vector<double> normalize_log(std::vector<double> lw) {
    const double top = *std::max_element(lw.begin(), lw.end());
    if (!std::isfinite(top)) throw InvalidArgument("posterior has no finite weight");
    double z = 0.0;
    for (double v : lw) z += std::exp(v - top);
    const double lz = top + std::log(z);
    for (double &v : lw) v -= lz;
    return lw;
}

// Log-likelihood per member, fitting each distinct (node, parent set) once.
inline std::vector<double> member_log_likelihoods(const DagEnsemble &ens, const SufficientStats &stats,
                                                  NoiseModel noise) {
    std::map<std::pair<NodeId, std::vector<NodeId>>, double> cache;
    std::vector<double> out;
    out.reserve(ens.size());
    for (const auto &g : ens.dags) {
        double ll = 0.0;
        for (NodeId j = 0; j < g.p(); ++j) {
            auto key = std::make_pair(j, g.parents(j));
            auto it = cache.find(key);
            if (it == cache.end()) {
                const double rss = stats.fit(j, key.second).second;
                it = cache.emplace(std::move(key), node_log_likelihood(rss, stats.rows(j), noise)).first;
            }
            ll += it->second;
        }
        out.push_back(ll);
    }
    return out;
}

inline Posterior posterior_from_stats(const DagEnsemble &ens, const SufficientStats &stats, NoiseModel noise) {
    if (ens.empty()) throw InvalidArgument("ensemble is empty");
    auto lw = member_log_likelihoods(ens, stats, noise);
    for (std::size_t m = 0; m < ens.size(); ++m)
        lw[m] += ens.weights[m] > 0.0 ? std::log(ens.weights[m]) : -std::numeric_limits<double>::infinity();
    return {ens, normalize_log(std::move(lw))};
}

} // namespace detail

/// Posterior ∝ a(G) · likelihood of the data under G's least-squares fit.
inline Posterior reweight_posterior(const DagEnsemble &ens, const Dataset &data,
                                    NoiseModel noise = NoiseModel::unit) {
    if (data.empty()) throw InvalidArgument("dataset is empty");
    return detail::posterior_from_stats(ens, SufficientStats(data), noise);
}

/// Least-squares SEM for a DAG given sufficient statistics.
inline LinearSem fit_sem(const Dag &g, const SufficientStats &stats, NoiseModel noise = NoiseModel::unit) {
    LinearSem sem{g, Eigen::MatrixXd::Zero(g.p(), g.p()), Eigen::VectorXd::Ones(g.p())};
    for (NodeId j = 0; j < g.p(); ++j) {
        const auto parents = g.parents(j);
        const auto [beta, rss] = stats.fit(j, parents);
        for (std::size_t a = 0; a < parents.size(); ++a) sem.weights(parents[a], j) = beta[static_cast<Eigen::Index>(a)];
        if (noise == NoiseModel::mle && stats.rows(j) > 0)
            sem.noise_sd[j] = std::sqrt(std::max(rss / static_cast<double>(stats.rows(j)), detail::kMinVariance));
    }
    return sem;
}

/// Candidate DAGs, the data seen so far and the resulting posterior.
struct FiniteModel {
    DagEnsemble ens;
    NoiseModel noise = NoiseModel::unit;
    SufficientStats stats;
    Posterior posterior;
    std::vector<LinearSem> fits;

    FiniteModel(DagEnsemble candidates, const Dataset &data, NoiseModel noise_model = NoiseModel::unit)
        : ens(std::move(candidates)), noise(noise_model), stats(data),
          posterior(detail::posterior_from_stats(ens, stats, noise)) {
        fits.reserve(ens.size());
        for (const auto &g : ens.dags) fits.push_back(fit_sem(g, stats, noise));
    }

    /// Adds new rows; the posterior and fits are recomputed.
    void observe(const Dataset &more) {
        stats.add(more);
        posterior = detail::posterior_from_stats(ens, stats, noise);
        for (std::size_t m = 0; m < ens.size(); ++m) fits[m] = fit_sem(ens.dags[m], stats, noise);
    }
};

struct MiOptions {
    std::size_t rows_per_intervention = 3;
    int repeats = 10;
    double clamp = kDefaultClamp;
};

/// Monte-Carlo expected entropy reduction (bits) of the posterior from
/// running `batch`: draw G from the posterior, simulate the batch under G's
/// fitted SEM, reweight, and average H(before) − H(after) over repeats.
inline double f_mi_estimate(const Batch &batch, const FiniteModel &model, const MiOptions &opt, std::uint64_t seed) {
    if (batch.empty() || model.ens.size() < 2) return 0.0;
    if (opt.repeats < 1) throw InvalidArgument("MI repeats must be positive");
    const double before = model.posterior.entropy();
    const auto probs = model.posterior.probabilities();
    double total = 0.0;
    for (int r = 0; r < opt.repeats; ++r) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
        std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
        const std::size_t m = pick(rng);
        SufficientStats stats = model.stats;
        for (const auto &i : batch)
            stats.add(simulate(model.fits[m], i, opt.rows_per_intervention, opt.clamp, rng));
        const Posterior after = detail::posterior_from_stats(model.ens, stats, model.noise);
        total += before - after.entropy();
    }
    return total / opt.repeats;
}

/// P(u -> v) = Σ_G P(G) 1(u -> v ∈ G), for every edge with positive mass.
inline std::map<Edge, double> edge_probabilities(const Posterior &post) {
    std::map<Edge, double> out;
    const auto probs = post.probabilities();
    for (std::size_t m = 0; m < post.ens.size(); ++m)
        for (const auto &e : post.ens.dags[m].edges()) out[e] += probs[m];
    for (auto &kv : out) kv.second = std::clamp(kv.second, 0.0, 1.0);
    return out;
}

/// Missing or extra adjacencies count 1; shared adjacencies with opposite orientation count 1.
inline int shd(const Dag &a, const Dag &b) {
    if (a.p() != b.p()) throw InvalidArgument("graphs have different node counts");
    int d = 0;
    for (NodeId u = 0; u < a.p(); ++u)
        for (NodeId v = u + 1; v < a.p(); ++v) {
            const bool adj_a = a.adjacent(u, v);
            const bool adj_b = b.adjacent(u, v);
            if (adj_a != adj_b)
                ++d;
            else if (adj_a && a.has_edge(u, v) != b.has_edge(u, v))
                ++d;
        }
    return d;
}

struct F1Shd {
    double f1 = 0.0;
    double shd = 0.0;
};

/// Best F1 of thresholded edge probabilities against the true edges (over
/// thresholds at the distinct positive probabilities), and posterior-weighted SHD.
inline F1Shd eval_f1_shd(const Posterior &post, const Dag &truth) {
    F1Shd out;
    const auto probs = post.probabilities();
    for (std::size_t m = 0; m < post.ens.size(); ++m) out.shd += probs[m] * shd(post.ens.dags[m], truth);

    const auto ep = edge_probabilities(post);
    std::vector<double> thresholds;
    for (const auto &kv : ep)
        if (kv.second > 0.0) thresholds.push_back(kv.second);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    const auto n_true = static_cast<double>(truth.num_edges());
    if (thresholds.empty()) {
        out.f1 = n_true == 0 ? 1.0 : 0.0;
        return out;
    }
    for (double t : thresholds) {
        double tp = 0.0;
        double predicted = 0.0;
        for (const auto &kv : ep) {
            if (kv.second < t) continue;
            predicted += 1.0;
            if (truth.has_edge(kv.first.from, kv.first.to)) tp += 1.0;
        }
        const double denom = predicted + n_true;
        const double f1 = denom > 0.0 ? 2.0 * tp / denom : 0.0;
        out.f1 = std::max(out.f1, f1);
    }
    return out;
}

} // namespace mped
