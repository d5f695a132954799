#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "mped/graph.hpp"
#include "mped/mec.hpp"
#include "mped/meek.hpp"
#include "mped/random.hpp"

namespace mped {

/// Edge weights w(e) for the weighted coverage objective. Pairs are stored
/// as (min, max); missing pairs weigh `fallback`.
struct EoWeights {
    std::map<std::pair<NodeId, NodeId>, double> edge;
    double fallback = 1.0;

    bool uniform() const noexcept { return edge.empty() && fallback == 1.0; }

    double of(NodeId u, NodeId v) const {
        if (edge.empty()) return fallback;
        auto it = edge.find({std::min(u, v), std::max(u, v)});
        return it == edge.end() ? fallback : it->second;
    }

    void set(NodeId u, NodeId v, double w) {
        if (!(w >= 0.0)) throw InvalidArgument("edge weights must be nonnegative");
        edge[{std::min(u, v), std::max(u, v)}] = w;
    }
};

/// Evaluates F_EO(base ∪ {I}) for many I. The closure of every member under
/// the fixed base batch is computed once and extended per query.
class EoEvaluator {
public:
    EoEvaluator(const EssentialGraph &ess, const DagEnsemble &ens, EoWeights weights = {}, const Batch &base = {})
        : ess_(&ess), ens_(&ens), weights_(std::move(weights)) {
        if (ens.dags.size() != ens.weights.size()) throw InvalidArgument("ensemble weights do not match members");
        for (double a : ens.weights)
            if (!(a >= 0.0)) throw InvalidArgument("ensemble weights must be nonnegative");
        for (const auto &g : ens.dags) check_pattern(ess.pdag, g);
        rebase(base);
    }

    /// Replaces the fixed batch; the cached closures are recomputed.
    void rebase(const Batch &base) {
        base_ = base;
        closed_.clear();
        closed_.reserve(ens_->size());
        base_value_ = 0.0;
        for (std::size_t m = 0; m < ens_->size(); ++m) {
            closed_.push_back(detail::extend_closure(ess_->pdag, ens_->dags[m], base));
            base_value_ += ens_->weights[m] * score(closed_.back());
        }
    }

    /// Extends the base batch with `i` (no-op for an empty intervention).
    void commit(const Intervention &i) {
        if (i.empty() || base_.contains(i)) return;
        base_.insert(i);
        base_value_ = 0.0;
        for (std::size_t m = 0; m < ens_->size(); ++m) {
            closed_[m] = detail::extend_closure(closed_[m], ens_->dags[m], i);
            base_value_ += ens_->weights[m] * score(closed_[m]);
        }
    }

    const Batch &base() const noexcept { return base_; }
    double base_value() const noexcept { return base_value_; }
    std::size_t members() const noexcept { return ens_->size(); }
    const DagEnsemble &ensemble() const noexcept { return *ens_; }
    const EssentialGraph &essential() const noexcept { return *ess_; }
    int p() const noexcept { return ess_->pdag.p(); }

    /// Weighted count of edges oriented in member m by base ∪ {i}.
    double member_value(std::size_t m, const Intervention &i) const {
        if (i.empty()) return score(closed_[m]);
        return score(detail::extend_closure(closed_[m], ens_->dags[m], i));
    }

    /// F_EO(base ∪ {i}).
    double value(const Intervention &i) const {
        if (i.empty()) return base_value_;
        double total = 0.0;
        for (std::size_t m = 0; m < ens_->size(); ++m) total += ens_->weights[m] * member_value(m, i);
        return total;
    }

    /// Weighted coverage score of a closed member graph relative to the essential graph.
    double score(const Pdag &closed) const {
        const Pdag &ess = ess_->pdag;
        const int W = ess.words();
        if (weights_.uniform()) {
            int c = 0;
            for (NodeId u = 0; u < ess.p(); ++u) {
                const bits::Word *now = closed.children(u);
                const bits::Word *before = ess.children(u);
                for (int k = 0; k < W; ++k) c += std::popcount(now[k] & ~before[k]);
            }
            return static_cast<double>(c);
        }
        double s = 0.0;
        for (NodeId u = 0; u < ess.p(); ++u) {
            const bits::Word *now = closed.children(u);
            const bits::Word *before = ess.children(u);
            for (int k = 0; k < W; ++k) {
                bits::Word x = now[k] & ~before[k];
                while (x != 0) {
                    s += weights_.of(u, k * 64 + std::countr_zero(x));
                    x &= x - 1;
                }
            }
        }
        return s;
    }

private:
    const EssentialGraph *ess_;
    const DagEnsemble *ens_;
    EoWeights weights_;
    Batch base_;
    std::vector<Pdag> closed_;
    double base_value_ = 0.0;
};

/// Weighted edge-orientation objective: Σ_G a(G) Σ_e w(e) 1(e ∈ R(batch, G)).
inline double f_eo(const Batch &batch, const DagEnsemble &ens, const EssentialGraph &ess, const EoWeights &w = {}) {
    return EoEvaluator(ess, ens, w, batch).base_value();
}

/// F_EO(batch ∪ {i_set}).
inline double f_eo_node_restricted(const Intervention &i_set, const Batch &batch, const DagEnsemble &ens,
                                   const EssentialGraph &ess, const EoWeights &w = {}) {
    return EoEvaluator(ess, ens, w, batch).value(i_set);
}

/// Soft-intervention scoring: every target counts as its own single-node
/// intervention.
inline double f_eo_soft(const Batch &batch, const DagEnsemble &ens, const EssentialGraph &ess,
                        const EoWeights &w = {}) {
    Batch singles;
    for (const auto &i : batch)
        for (NodeId v : i) singles.insert(Intervention{v});
    return f_eo(singles, ens, ess, w);
}

/// −mean over ensemble entries of log2 (size of the entry's interventional class).
inline double f_inf_tilde(const Batch &batch, const DagEnsemble &ens, const EssentialGraph &ess) {
    if (ens.empty()) throw InvalidArgument("ensemble is empty");
    const Partition part = interventional_classes(ens, batch, ess);
    double total = 0.0;
    for (const auto &cls : part.classes)
        total += static_cast<double>(cls.size()) * std::log2(static_cast<double>(cls.size()));
    return -total / static_cast<double>(ens.size());
}

inline constexpr int kMultilinearExactMaxNodes = 20;

/// Exact multilinear extension of I ↦ F_EO(batch ∪ {I}) by summing over all 2^p node subsets.
inline double multilinear_value_exact(const std::vector<double> &x, const EoEvaluator &eval) {
    const int p = eval.p();
    if (p > kMultilinearExactMaxNodes)
        throw InvalidArgument("exact multilinear evaluation is limited to " +
                              std::to_string(kMultilinearExactMaxNodes) + " nodes");
    if (static_cast<int>(x.size()) != p) throw InvalidArgument("point has the wrong dimension");
    double total = 0.0;
    std::vector<NodeId> members;
    for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
        double prob = 1.0;
        members.clear();
        for (int i = 0; i < p; ++i) {
            if (mask >> i & 1u) {
                prob *= x[i];
                members.push_back(i);
            } else {
                prob *= 1.0 - x[i];
            }
        }
        if (prob == 0.0) continue;
        total += prob * eval.value(Intervention(members));
    }
    return total;
}

inline double multilinear_value_exact(const std::vector<double> &x, const Batch &batch, const DagEnsemble &ens,
                                      const EssentialGraph &ess, const EoWeights &w = {}) {
    return multilinear_value_exact(x, EoEvaluator(ess, ens, w, batch));
}

/// Per-coordinate sample mean and unbiased sample variance of a gradient estimate.
struct GradientStats {
    std::vector<double> mean;
    std::vector<double> variance;
    std::size_t samples = 0;
};

namespace detail {

// One draw of (G, I); writes f̂(I ∪ {i}) − f̂(I ∖ {i}) for every i into `out`.
// f̂ is scaled by the total ensemble weight so that its mean over G ∝ a(G)
// equals F_EO.
inline void gradient_sample(const EoEvaluator &eval, const std::vector<double> &x, Rng &rng,
                            std::discrete_distribution<std::size_t> &pick, double total_weight,
                            std::vector<double> &out) {
    const int p = eval.p();
    const std::size_t m = pick(rng);
    std::vector<NodeId> drawn;
    std::vector<char> in(static_cast<std::size_t>(p), 0);
    for (int i = 0; i < p; ++i) {
        if (std::bernoulli_distribution(std::clamp(x[i], 0.0, 1.0))(rng)) {
            drawn.push_back(i);
            in[i] = 1;
        }
    }
    const Intervention base(drawn);
    const double f_base = total_weight * eval.member_value(m, base);
    out.assign(static_cast<std::size_t>(p), 0.0);
    for (int i = 0; i < p; ++i) {
        const double toggled = total_weight * eval.member_value(m, in[i] ? base.without(i) : base.with(i));
        out[i] = in[i] ? f_base - toggled : toggled - f_base;
    }
}

} // namespace detail

/// Unbiased stochastic gradient of the multilinear extension at x.
inline GradientStats estimate_gradient_stats(const std::vector<double> &x, const EoEvaluator &eval,
                                             std::size_t n_samples, Rng &rng) {
    const int p = eval.p();
    if (static_cast<int>(x.size()) != p) throw InvalidArgument("point has the wrong dimension");
    GradientStats st;
    st.mean.assign(static_cast<std::size_t>(p), 0.0);
    st.variance.assign(static_cast<std::size_t>(p), 0.0);
    if (n_samples == 0 || eval.members() == 0) return st;
    const auto &ens = eval.ensemble();
    const double total = ens.total_weight();
    if (total <= 0.0) return st;
    std::discrete_distribution<std::size_t> pick(ens.weights.begin(), ens.weights.end());
    std::vector<double> sample;
    std::vector<double> m2(static_cast<std::size_t>(p), 0.0);
    for (std::size_t s = 1; s <= n_samples; ++s) {
        detail::gradient_sample(eval, x, rng, pick, total, sample);
        for (int i = 0; i < p; ++i) {
            const double delta = sample[i] - st.mean[i];
            st.mean[i] += delta / static_cast<double>(s);
            m2[i] += delta * (sample[i] - st.mean[i]);
        }
    }
    st.samples = n_samples;
    if (n_samples > 1)
        for (int i = 0; i < p; ++i) st.variance[i] = m2[i] / static_cast<double>(n_samples - 1);
    return st;
}

inline std::vector<double> estimate_gradient(const std::vector<double> &x, const EoEvaluator &eval,
                                             std::size_t n_samples, Rng &rng) {
    return estimate_gradient_stats(x, eval, n_samples, rng).mean;
}

inline std::vector<double> estimate_gradient(const std::vector<double> &x, const Batch &batch,
                                             const DagEnsemble &ens, const EssentialGraph &ess,
                                             std::size_t n_samples, std::uint64_t seed, const EoWeights &w = {}) {
    EoEvaluator eval(ess, ens, w, batch);
    Rng rng(seed);
    return estimate_gradient(x, eval, n_samples, rng);
}

} // namespace mped
