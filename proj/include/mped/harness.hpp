#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <exception>
#include <type_traits>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mped/graphgen.hpp"
#include "mped/mec.hpp"
#include "mped/meek.hpp"
#include "mped/objectives.hpp"
#include "mped/optimize.hpp"
#include "mped/sem.hpp"

namespace mped {

enum class Mode { infinite, finite };

struct SemOptions {
    std::size_t observational = 800;
    std::size_t per_intervention = 3;
    double clamp = kDefaultClamp;
    int mi_repeats = 10;
    std::size_t max_candidates = 100;
    NoiseModel noise = NoiseModel::unit;
};

inline const std::vector<std::string> &known_algorithms() {
    static const std::vector<std::string> names{"rand", "greedy1", "dgc", "ssg_a", "ssg_b", "ssg_best_q"};
    return names;
}

inline const std::vector<std::string> &known_metrics() {
    static const std::vector<std::string> names{"edges_oriented_fraction", "f_inf", "f_mi", "f1", "shd"};
    return names;
}

struct ExperimentConfig {
    std::string graph = "tree5";
    std::vector<std::string> algorithms{"dgc"};
    std::vector<int> m_values{1};
    std::vector<int> q_values{1};
    int repeats = 1;
    std::uint64_t seed = 0;
    std::string metric = "edges_oriented_fraction";
    Mode mode = Mode::infinite;
    int threads = 1;
    bool reproducible = false;
    std::size_t ensemble_size = 40;
    NmscgParams nmscg;
    SemOptions sem;
    int rounds = 10;
    std::string out_dir = "results";
    std::vector<std::string> formats{"csv"};

    /// Throws ConfigError on any inconsistency.
    void validate() const {
        try {
            (void)parse_graph_spec(graph);
        } catch (const Error &e) {
            throw ConfigError(std::string("graph: ") + e.what());
        }
        if (algorithms.empty()) throw ConfigError("no algorithms selected");
        for (const auto &a : algorithms)
            if (std::find(known_algorithms().begin(), known_algorithms().end(), a) == known_algorithms().end())
                throw ConfigError("unknown algorithm '" + a + "'");
        if (m_values.empty() || q_values.empty()) throw ConfigError("m and q lists must be nonempty");
        for (int m : m_values)
            if (m < 0) throw ConfigError("m must be nonnegative");
        for (int q : q_values)
            if (q < 1) throw ConfigError("q must be at least 1");
        if (repeats < 1) throw ConfigError("repeats must be at least 1");
        if (threads < 1) throw ConfigError("threads must be at least 1");
        if (ensemble_size < 1) throw ConfigError("ensemble.size must be at least 1");
        if (rounds < 0) throw ConfigError("loop.rounds must be nonnegative");
        if (nmscg.iterations < 1 || nmscg.samples < 1 || nmscg.rounding_repeats < 1)
            throw ConfigError("nmscg parameters must be positive");
        if (sem.observational < 1 || sem.per_intervention < 1 || sem.mi_repeats < 1 || sem.max_candidates < 1)
            throw ConfigError("sem counts must be positive");
        const bool finite_metric = metric == "f_mi" || metric == "f1" || metric == "shd";
        const bool infinite_metric = metric == "edges_oriented_fraction" || metric == "f_inf";
        if (!finite_metric && !infinite_metric) throw ConfigError("unknown metric '" + metric + "'");
        if (mode == Mode::infinite && !infinite_metric)
            throw ConfigError("metric '" + metric + "' needs mode = finite");
        if (mode == Mode::finite && !finite_metric) throw ConfigError("metric '" + metric + "' needs mode = infinite");
        for (const auto &f : formats)
            if (f != "csv" && f != "svg") throw ConfigError("unknown output format '" + f + "'");
    }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string &v) {
    std::vector<std::string> out;
    for (auto &s : split(v, ','))
        if (!s.empty()) out.push_back(s);
    return out;
}

inline std::vector<int> parse_int_list(const std::string &key, const std::string &v) {
    std::vector<int> out;
    for (const auto &s : split_list(v)) {
        const auto dash = s.find('-', 1);
        try {
            if (dash != std::string::npos) {
                const int lo = parse_number<int>(s.substr(0, dash), key);
                const int hi = parse_number<int>(s.substr(dash + 1), key);
                if (lo > hi) throw ConfigError(key + ": empty range '" + s + "'");
                for (int k = lo; k <= hi; ++k) out.push_back(k);
            } else {
                out.push_back(parse_number<int>(s, key));
            }
        } catch (const InvalidArgument &e) {
            throw ConfigError(e.what());
        }
    }
    return out;
}

template <class T>
T config_number(const std::string &key, const std::string &v) {
    try {
        if constexpr (std::is_floating_point_v<T>)
            return static_cast<T>(parse_double(v, key));
        else
            return parse_number<T>(v, key);
    } catch (const InvalidArgument &e) {
        throw ConfigError(e.what());
    }
}

inline bool config_bool(const std::string &key, const std::string &v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

} // namespace detail

/// Sets one configuration key. Keys are documented in docs/config.md.
inline void apply_config_value(ExperimentConfig &cfg, const std::string &key, const std::string &value) {
    using namespace detail;
    if (key == "graph") cfg.graph = value;
    else if (key == "algorithms" || key == "algo") cfg.algorithms = split_list(value);
    else if (key == "m") cfg.m_values = parse_int_list(key, value);
    else if (key == "q") cfg.q_values = parse_int_list(key, value);
    else if (key == "repeats") cfg.repeats = config_number<int>(key, value);
    else if (key == "seed") cfg.seed = config_number<std::uint64_t>(key, value);
    else if (key == "metric") cfg.metric = value;
    else if (key == "mode") {
        if (value == "infinite") cfg.mode = Mode::infinite;
        else if (value == "finite") cfg.mode = Mode::finite;
        else throw ConfigError("mode must be infinite or finite");
    } else if (key == "threads") cfg.threads = config_number<int>(key, value);
    else if (key == "reproducible") cfg.reproducible = config_bool(key, value);
    else if (key == "ensemble.size") cfg.ensemble_size = config_number<std::size_t>(key, value);
    else if (key == "nmscg.iterations") cfg.nmscg.iterations = config_number<int>(key, value);
    else if (key == "nmscg.samples") cfg.nmscg.samples = config_number<int>(key, value);
    else if (key == "nmscg.rounding_repeats") cfg.nmscg.rounding_repeats = config_number<int>(key, value);
    else if (key == "sem.observational") cfg.sem.observational = config_number<std::size_t>(key, value);
    else if (key == "sem.per_intervention") cfg.sem.per_intervention = config_number<std::size_t>(key, value);
    else if (key == "sem.clamp") cfg.sem.clamp = config_number<double>(key, value);
    else if (key == "sem.mi_repeats") cfg.sem.mi_repeats = config_number<int>(key, value);
    else if (key == "sem.max_candidates") cfg.sem.max_candidates = config_number<std::size_t>(key, value);
    else if (key == "sem.noise") {
        if (value == "unit") cfg.sem.noise = NoiseModel::unit;
        else if (value == "mle") cfg.sem.noise = NoiseModel::mle;
        else throw ConfigError("sem.noise must be unit or mle");
    }
    else if (key == "loop.rounds") cfg.rounds = config_number<int>(key, value);
    else if (key == "output.dir") cfg.out_dir = value;
    else if (key == "output.formats") cfg.formats = split_list(value);
    else throw ConfigError("unknown configuration key '" + key + "'");
}

/// Reads `key = value` lines; `[section]` headers prefix the following keys
/// with `section.`; `#` and `;` start comments.
inline ExperimentConfig parse_config(std::istream &in, ExperimentConfig cfg = {}) {
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = detail::trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        try {
            apply_config_value(cfg, key, value);
        } catch (const ConfigError &e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path &path, ExperimentConfig cfg = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, std::move(cfg));
}

struct ResultRow {
    std::string algorithm;
    int m = 0;
    int q = 0;
    int repeat = 0;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0.0;
    double wall_ms = 0.0;

    bool operator==(const ResultRow &) const = default;
};

/// Candidate DAGs for designing against `ess`: the whole class when it has
/// at most `size` members, otherwise `size` uniform draws.
inline DagEnsemble design_ensemble(const EssentialGraph &ess, std::size_t size, std::uint64_t seed) {
    if (count_mec(ess, size) <= size) return enumerate_mec(ess);
    return sample_ensemble(ess, size, seed);
}

/// Fraction of the initially undirected edges of `ess` that `batch` orients in `truth` (1 if none).
inline double oriented_fraction(const Batch &batch, const Dag &truth, const EssentialGraph &ess) {
    const int undirected = ess.pdag.num_undirected();
    if (undirected == 0) return 1.0;
    return static_cast<double>(r_oriented(batch, truth, ess.pdag).size()) / undirected;
}

/// Designs a batch with a named algorithm for the infinite-sample objectives.
inline Batch design_batch(const std::string &algorithm, const DesignProblem &base, const NmscgParams &params) {
    DesignProblem problem = base;
    if (algorithm == "rand") return baseline_rand(problem);
    if (algorithm == "greedy1") return baseline_greedy_single(problem);
    if (algorithm == "dgc") {
        problem.objective = Objective::eo;
        return dgc(problem, params);
    }
    problem.objective = Objective::mi_inf;
    if (algorithm == "ssg_a") return ssg(problem, SsgMode::agnostic);
    if (algorithm == "ssg_b") return ssg(problem, SsgMode::graph_sensitive);
    if (algorithm == "ssg_best_q") return ssg(problem, SsgMode::best_over_q);
    throw ConfigError("unknown algorithm '" + algorithm + "'");
}

namespace detail {

inline SsgMode ssg_mode(const std::string &algorithm) {
    if (algorithm == "ssg_a") return SsgMode::agnostic;
    if (algorithm == "ssg_b") return SsgMode::graph_sensitive;
    return SsgMode::best_over_q;
}

inline bool is_ssg(const std::string &algorithm) { return algorithm.rfind("ssg", 0) == 0; }

inline std::uint64_t algorithm_seed(std::uint64_t repeat_seed, int m, int q) {
    return derive_seed(repeat_seed, (static_cast<std::uint64_t>(m) << 20) ^ static_cast<std::uint64_t>(q) ^ 0xA1600000ULL);
}

// Everything shared by the algorithms within one repeat.
struct RepeatContext {
    Dag truth;
    EssentialGraph ess;
    DagEnsemble design;
    std::optional<DagEnsemble> full; // evaluation class for f_inf
    std::optional<LinearSem> sem;
    std::optional<FiniteModel> model;
};

inline RepeatContext prepare_repeat(const ExperimentConfig &cfg, std::uint64_t repeat_seed) {
    GraphSpec spec = parse_graph_spec(cfg.graph);
    spec.seed = derive_seed(repeat_seed, 1);
    Dag truth = gen_dag(spec);
    EssentialGraph ess = essential_graph(truth);
    RepeatContext ctx{truth, ess, {}, std::nullopt, std::nullopt, std::nullopt};
    if (cfg.mode == Mode::infinite) {
        ctx.design = design_ensemble(ess, cfg.ensemble_size, derive_seed(repeat_seed, 2));
        if (cfg.metric == "f_inf") ctx.full = enumerate_mec(ess);
        return ctx;
    }
    ctx.sem = gen_sem(truth, derive_seed(repeat_seed, 3));
    const Dataset obs = simulate(*ctx.sem, Intervention{}, cfg.sem.observational, cfg.sem.clamp, derive_seed(repeat_seed, 4));
    const DagEnsemble candidates = design_ensemble(ess, cfg.sem.max_candidates, derive_seed(repeat_seed, 5));
    ctx.model.emplace(candidates, obs, cfg.sem.noise);
    ctx.design = DagEnsemble{candidates.dags, ctx.model->posterior.probabilities()};
    return ctx;
}

inline Batch design_in_context(const ExperimentConfig &cfg, const RepeatContext &ctx, const std::string &algorithm,
                               int m, int q, std::uint64_t seed, std::uint64_t repeat_seed) {
    DesignProblem problem{ctx.ess, ctx.design, m, q, Objective::eo, {}, seed};
    if (cfg.mode == Mode::finite && is_ssg(algorithm)) {
        MiOptions opt{cfg.sem.per_intervention, cfg.sem.mi_repeats, cfg.sem.clamp};
        const std::uint64_t crn = derive_seed(repeat_seed, 6);
        const FiniteModel &model = *ctx.model;
        BatchObjective f = [&model, opt, crn](const Batch &b) { return f_mi_estimate(b, model, opt, crn); };
        problem.validate();
        return ssg(problem, ssg_mode(algorithm), f);
    }
    return design_batch(algorithm, problem, cfg.nmscg);
}

inline double score_in_context(const ExperimentConfig &cfg, const RepeatContext &ctx, const Batch &batch,
                               std::uint64_t repeat_seed) {
    if (cfg.metric == "edges_oriented_fraction") return oriented_fraction(batch, ctx.truth, ctx.ess);
    if (cfg.metric == "f_inf") return f_inf_tilde(batch, *ctx.full, ctx.ess);
    MiOptions opt{cfg.sem.per_intervention, cfg.sem.mi_repeats, cfg.sem.clamp};
    if (cfg.metric == "f_mi") return f_mi_estimate(batch, *ctx.model, opt, derive_seed(repeat_seed, 7));
    FiniteModel updated = *ctx.model;
    std::uint64_t k = 0;
    for (const auto &i : batch)
        updated.observe(simulate(*ctx.sem, i, cfg.sem.per_intervention, cfg.sem.clamp, derive_seed(repeat_seed, 100 + k++)));
    const F1Shd r = eval_f1_shd(updated.posterior, ctx.truth);
    return cfg.metric == "f1" ? r.f1 : r.shd;
}

template <class Job>
void run_parallel(int n, int threads, Job &&job) {
    const int workers = std::max(1, std::min(threads, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto &t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace detail

/// Runs every (repeat, m, q, algorithm) combination. Failures of single
/// combinations are appended to `errors` (when given) and produce no row.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig &cfg, std::vector<std::string> *errors = nullptr) {
    cfg.validate();
    std::vector<std::vector<ResultRow>> per_repeat(static_cast<std::size_t>(cfg.repeats));
    std::vector<std::vector<std::string>> per_repeat_errors(static_cast<std::size_t>(cfg.repeats));
    detail::run_parallel(cfg.repeats, cfg.threads, [&](int r) {
        const std::uint64_t repeat_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        auto &rows = per_repeat[r];
        auto &errs = per_repeat_errors[r];
        std::optional<detail::RepeatContext> ctx;
        try {
            ctx = detail::prepare_repeat(cfg, repeat_seed);
        } catch (const Error &e) {
            errs.push_back("repeat " + std::to_string(r) + ": " + e.what());
            return;
        }
        for (int m : cfg.m_values)
            for (int q : cfg.q_values)
                for (const auto &alg : cfg.algorithms) {
                    const auto start = std::chrono::steady_clock::now();
                    try {
                        const Batch b =
                            detail::design_in_context(cfg, *ctx, alg, m, q, detail::algorithm_seed(repeat_seed, m, q), repeat_seed);
                        const double value = detail::score_in_context(cfg, *ctx, b, repeat_seed);
                        const double ms =
                            cfg.reproducible
                                ? 0.0
                                : std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                        rows.push_back({alg, m, q, r, repeat_seed, cfg.metric, value, ms});
                    } catch (const Error &e) {
                        errs.push_back(alg + " m=" + std::to_string(m) + " q=" + std::to_string(q) + " repeat " +
                                       std::to_string(r) + ": " + e.what());
                    }
                }
    });
    std::vector<ResultRow> out;
    for (auto &rows : per_repeat) out.insert(out.end(), rows.begin(), rows.end());
    if (errors != nullptr)
        for (auto &errs : per_repeat_errors) errors->insert(errors->end(), errs.begin(), errs.end());
    return out;
}

/// Number of oriented edges (relative to the starting essential graph) after each round.
struct SequentialTrace {
    int initial_undirected = 0;
    std::vector<int> oriented_after_round;
    std::vector<Batch> batches;
    bool fully_oriented = false;
};

/// Repeatedly designs a batch against the current essential graph, applies
/// it to `truth` and recomputes the essential graph, until everything is
/// oriented or `rounds` rounds have run.
inline SequentialTrace sequential_rounds(const Dag &truth, const std::string &algorithm, int m, int q, int rounds,
                                         const ExperimentConfig &cfg, std::uint64_t seed) {
    EssentialGraph start = essential_graph(truth);
    SequentialTrace trace;
    trace.initial_undirected = start.pdag.num_undirected();
    EssentialGraph ess = start;
    Batch prior;
    for (int round = 0; round < rounds && ess.pdag.num_undirected() > 0; ++round) {
        const std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(round));
        const DagEnsemble ens = design_ensemble(ess, cfg.ensemble_size, derive_seed(rs, 1));
        DesignProblem problem{ess, ens, m, std::min(q, truth.p()), Objective::eo, {}, derive_seed(rs, 2)};
        const Batch b = design_batch(algorithm, problem, cfg.nmscg);
        for (const auto &i : b) prior.insert(i);
        ess = essential_graph(truth, prior);
        trace.batches.push_back(b);
        trace.oriented_after_round.push_back(trace.initial_undirected - ess.pdag.num_undirected());
    }
    trace.fully_oriented = ess.pdag.num_undirected() == 0;
    return trace;
}

/// Sequential rounds for every repeat, algorithm and (m, q); one row per
/// round with the cumulative oriented fraction (repeat column = repeat index,
/// metric = "oriented_fraction_round_<k>").
inline std::vector<ResultRow> run_sequential_batches(const ExperimentConfig &cfg,
                                                     std::vector<std::string> *errors = nullptr) {
    cfg.validate();
    if (cfg.mode != Mode::infinite) throw ConfigError("sequential batches run in infinite mode only");
    std::vector<std::vector<ResultRow>> per_repeat(static_cast<std::size_t>(cfg.repeats));
    std::vector<std::vector<std::string>> per_repeat_errors(static_cast<std::size_t>(cfg.repeats));
    detail::run_parallel(cfg.repeats, cfg.threads, [&](int r) {
        const std::uint64_t repeat_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        GraphSpec spec = parse_graph_spec(cfg.graph);
        spec.seed = derive_seed(repeat_seed, 1);
        Dag truth;
        try {
            truth = gen_dag(spec);
        } catch (const Error &e) {
            per_repeat_errors[r].push_back("repeat " + std::to_string(r) + ": " + e.what());
            return;
        }
        for (int m : cfg.m_values)
            for (int q : cfg.q_values)
                for (const auto &alg : cfg.algorithms) {
                    const auto start = std::chrono::steady_clock::now();
                    try {
                        const auto trace =
                            sequential_rounds(truth, alg, m, q, cfg.rounds, cfg, detail::algorithm_seed(repeat_seed, m, q));
                        const double ms =
                            cfg.reproducible
                                ? 0.0
                                : std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                        for (std::size_t k = 0; k < trace.oriented_after_round.size(); ++k) {
                            const double frac = trace.initial_undirected == 0
                                                    ? 1.0
                                                    : static_cast<double>(trace.oriented_after_round[k]) /
                                                          trace.initial_undirected;
                            per_repeat[r].push_back({alg, m, q, r, repeat_seed,
                                                     "oriented_fraction_round_" + std::to_string(k + 1), frac,
                                                     k + 1 == trace.oriented_after_round.size() ? ms : 0.0});
                        }
                    } catch (const Error &e) {
                        per_repeat_errors[r].push_back(alg + " m=" + std::to_string(m) + " q=" + std::to_string(q) +
                                                       " repeat " + std::to_string(r) + ": " + e.what());
                    }
                }
    });
    std::vector<ResultRow> out;
    for (auto &rows : per_repeat) out.insert(out.end(), rows.begin(), rows.end());
    if (errors != nullptr)
        for (auto &errs : per_repeat_errors) errors->insert(errors->end(), errs.begin(), errs.end());
    return out;
}

inline constexpr const char *kCsvHeader = "algorithm,m,q,repeat,seed,metric,value,wall_ms";

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

inline void check_csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n\r") != std::string::npos) throw InvalidArgument("CSV field contains a delimiter: " + s);
}

} // namespace detail

inline void write_csv(const std::vector<ResultRow> &rows, std::ostream &out) {
    out << kCsvHeader << '\n';
    for (const auto &r : rows) {
        detail::check_csv_field(r.algorithm);
        detail::check_csv_field(r.metric);
        out << r.algorithm << ',' << r.m << ',' << r.q << ',' << r.repeat << ',' << r.seed << ',' << r.metric << ','
            << detail::format_double(r.value) << ',' << detail::format_double(r.wall_ms) << '\n';
    }
}

inline void emit_csv(const std::vector<ResultRow> &rows, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_csv(rows, out);
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<ResultRow> read_csv(std::istream &in) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line) || detail::trim(line) != kCsvHeader) throw ParseError(1, "missing CSV header");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 8) throw ParseError(lineno, "expected 8 fields");
        try {
            ResultRow r;
            r.algorithm = f[0];
            r.m = detail::parse_number<int>(f[1], "m");
            r.q = detail::parse_number<int>(f[2], "q");
            r.repeat = detail::parse_number<int>(f[3], "repeat");
            r.seed = detail::parse_number<std::uint64_t>(f[4], "seed");
            r.metric = f[5];
            r.value = detail::parse_double(f[6], "value");
            r.wall_ms = detail::parse_double(f[7], "wall_ms");
            rows.push_back(std::move(r));
        } catch (const InvalidArgument &e) {
            throw ParseError(lineno, e.what());
        }
    }
    return rows;
}

inline std::vector<ResultRow> read_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_csv(in);
}

namespace detail {

inline std::string xml_escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string fmt(double v, int precision = 3) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(precision);
    s << v;
    return s.str();
}

} // namespace detail

/// Line chart of mean ± 1 SD per series against q (when several q values
/// occur) or m.
inline void write_svg(const std::vector<ResultRow> &rows, const std::string &metric, std::ostream &out,
                      const std::string &m_label = "m") {
    std::set<int> ms;
    std::set<int> qs;
    for (const auto &r : rows)
        if (r.metric == metric) {
            ms.insert(r.m);
            qs.insert(r.q);
        }
    const bool by_q = qs.size() > 1;
    const bool label_other = by_q && ms.size() > 1;
    std::map<std::string, std::map<int, std::vector<double>>> series;
    for (const auto &r : rows) {
        if (r.metric != metric) continue;
        std::string name = r.algorithm;
        if (label_other) name += " m=" + std::to_string(r.m);
        series[name][by_q ? r.q : r.m].push_back(r.value);
    }
    struct Point {
        int x;
        double mean;
        double sd;
    };
    std::map<std::string, std::vector<Point>> pts;
    double lo = 0.0;
    double hi = 1.0;
    int xmin = 0;
    int xmax = 1;
    bool first = true;
    for (const auto &[name, byx] : series)
        for (const auto &[x, vals] : byx) {
            double mean = 0.0;
            for (double v : vals) mean += v;
            mean /= static_cast<double>(vals.size());
            double var = 0.0;
            for (double v : vals) var += (v - mean) * (v - mean);
            const double sd = vals.size() > 1 ? std::sqrt(var / static_cast<double>(vals.size() - 1)) : 0.0;
            pts[name].push_back({x, mean, sd});
            if (first) {
                lo = mean - sd;
                hi = mean + sd;
                xmin = xmax = x;
                first = false;
            }
            lo = std::min(lo, mean - sd);
            hi = std::max(hi, mean + sd);
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
        }
    if (hi - lo < 1e-9) {
        lo -= 0.5;
        hi += 0.5;
    }
    if (xmax == xmin) {
        --xmin;
        ++xmax;
    }
    const double W = 640, H = 400, left = 70, right = 170, top = 40, bottom = 60;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
    auto sy = [&](double y) { return top + (hi - y) / (hi - lo) * (H - top - bottom); };
    static const char *palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
        << ' ' << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
        << detail::xml_escape(metric) << " (mean ± 1 SD)</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
        << "\" stroke=\"black\"/>\n";
    for (int x = xmin; x <= xmax; ++x)
        out << "<text x=\"" << detail::fmt(sx(x), 1) << "\" y=\"" << H - bottom + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << x << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double y = lo + (hi - lo) * k / 4.0;
        out << "<text x=\"" << left - 6 << "\" y=\"" << detail::fmt(sy(y) + 4, 1)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::fmt(y) << "</text>\n";
    }
    out << "<text x=\"" << detail::fmt((left + W - right) / 2, 1) << "\" y=\"" << H - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << detail::xml_escape(by_q ? std::string("q") : m_label)
        << "</text>\n";
    int colour = 0;
    for (const auto &[name, points] : pts) {
        const char *c = palette[colour % 8];
        std::ostringstream poly;
        for (const auto &pt : points) poly << detail::fmt(sx(pt.x), 2) << ',' << detail::fmt(sy(pt.mean), 2) << ' ';
        out << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"" << detail::trim(poly.str())
            << "\"/>\n";
        for (const auto &pt : points) {
            out << "<line x1=\"" << detail::fmt(sx(pt.x), 2) << "\" y1=\"" << detail::fmt(sy(pt.mean - pt.sd), 2)
                << "\" x2=\"" << detail::fmt(sx(pt.x), 2) << "\" y2=\"" << detail::fmt(sy(pt.mean + pt.sd), 2)
                << "\" stroke=\"" << c << "\"/>\n";
            out << "<circle cx=\"" << detail::fmt(sx(pt.x), 2) << "\" cy=\"" << detail::fmt(sy(pt.mean), 2)
                << "\" r=\"3\" fill=\"" << c << "\"/>\n";
        }
        const double ly = top + 18.0 * colour;
        out << "<rect x=\"" << W - right + 15 << "\" y=\"" << ly << "\" width=\"12\" height=\"12\" fill=\"" << c
            << "\"/>\n";
        out << "<text x=\"" << W - right + 33 << "\" y=\"" << ly + 10
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << detail::xml_escape(name) << "</text>\n";
        ++colour;
    }
    out << "</svg>\n";
}

/// Re-keys sequential-round rows for charting: metric "oriented_fraction",
/// with the round number in the m column and the series label carrying m and q.
inline std::vector<ResultRow> rounds_as_chart_rows(const std::vector<ResultRow> &rows) {
    static const std::string prefix = "oriented_fraction_round_";
    std::vector<ResultRow> out;
    for (const auto &r : rows) {
        if (r.metric.rfind(prefix, 0) != 0) continue;
        ResultRow c = r;
        c.algorithm = r.algorithm + " m=" + std::to_string(r.m) + " q=" + std::to_string(r.q);
        c.m = std::stoi(r.metric.substr(prefix.size()));
        c.q = 0;
        c.metric = "oriented_fraction";
        out.push_back(std::move(c));
    }
    return out;
}

/// Writes results.csv and/or one `<metric>.svg` per metric into `dir`.
/// Returns the written paths.
inline std::vector<std::filesystem::path> emit(const std::vector<ResultRow> &rows, const std::filesystem::path &dir,
                                               const std::vector<std::string> &formats) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    for (const auto &f : formats) {
        if (f == "csv") {
            emit_csv(rows, dir / "results.csv");
            written.push_back(dir / "results.csv");
        } else if (f == "svg") {
            std::set<std::string> metrics;
            for (const auto &r : rows) metrics.insert(r.metric);
            for (const auto &metric : metrics) {
                const auto path = dir / (metric + ".svg");
                std::ofstream out(path);
                if (!out) throw IoError("cannot write " + path.string());
                write_svg(rows, metric, out);
                written.push_back(path);
            }
        } else {
            throw ConfigError("unknown output format '" + f + "'");
        }
    }
    return written;
}

} // namespace mped
