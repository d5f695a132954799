#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mped/mped.hpp"
#include "mped/selftest.hpp"

namespace fs = std::filesystem;
using namespace mped;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2 };

// Flags shared by the experiment subcommands. Every flag is optional and
// overrides the matching config key when given.
struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> graph, algo, m, q, repeats, seed, mode, out, formats, threads, metric, rounds;
    bool reproducible = false;

    void attach(CLI::App *app, bool with_rounds) {
        app->add_option("--config", config, "Key-value config file (see docs/config.md)");
        app->add_option("--graph", graph, "Graph spec or edge-list file");
        app->add_option("--algo", algo, "Comma-separated algorithms");
        app->add_option("--m", m, "Batch sizes, e.g. 1,2 or 1-4");
        app->add_option("--q", q, "Intervention sizes, e.g. 1,3");
        app->add_option("--repeats", repeats, "Number of repeats");
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--mode", mode, "infinite|finite");
        app->add_option("--metric", metric, "Scoring metric");
        app->add_option("--out", out, "Output directory");
        app->add_option("--formats", formats, "Output formats, e.g. csv,svg");
        app->add_option("--threads", threads, "Worker threads");
        app->add_flag("--reproducible", reproducible, "Bitwise-stable output (zero wall times)");
        if (with_rounds) app->add_option("--rounds", rounds, "Maximum number of batch rounds");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg = config ? load_config(*config) : ExperimentConfig{};
        auto set = [&](const char *key, const std::optional<std::string> &v) {
            if (v) apply_config_value(cfg, key, *v);
        };
        set("graph", graph);
        set("algorithms", algo);
        set("m", m);
        set("q", q);
        set("repeats", repeats);
        set("seed", seed);
        set("mode", mode);
        set("metric", metric);
        set("output.dir", out);
        set("output.formats", formats);
        set("threads", threads);
        set("loop.rounds", rounds);
        if (reproducible) cfg.reproducible = true;
        // `--mode finite` alone should not trip over the infinite-mode default metric.
        if (!metric && cfg.mode == Mode::finite && cfg.metric == ExperimentConfig{}.metric) cfg.metric = "f_mi";
        cfg.validate();
        return cfg;
    }
};

void report_errors(const std::vector<std::string> &errors) {
    for (const auto &e : errors) std::cerr << "error: " << e << '\n';
}

Dag graph_from(const std::string &text, std::uint64_t seed) {
    GraphSpec spec = parse_graph_spec(text);
    spec.seed = seed;
    return gen_dag(spec);
}

int cmd_gen(const std::string &graph, std::uint64_t seed, int count, const std::optional<std::string> &out) {
    if (count < 1) throw ConfigError("--count must be at least 1");
    for (int k = 0; k < count; ++k) {
        const Dag g = graph_from(graph, count == 1 ? seed : derive_seed(seed, static_cast<std::uint64_t>(k)));
        const std::size_t mec = count_mec(essential_graph(g));
        if (!out) {
            if (count > 1) std::cout << "# graph " << k << '\n';
            write_edge_list(g, std::cout);
        } else {
            fs::path path = *out;
            if (count > 1) {
                fs::create_directories(path);
                path /= "graph_" + std::to_string(k) + ".tsv";
            }
            save_edge_list(g, path);
            std::cerr << path.string() << ": ";
        }
        std::cerr << "p=" << g.p() << " edges=" << g.num_edges() << " mec=" << mec << '\n';
    }
    return kOk;
}

int cmd_design(const std::string &graph, const std::string &algo, int m, int q, std::uint64_t seed,
               std::size_t ensemble, const std::optional<std::string> &out) {
    const Dag g = graph_from(graph, seed);
    const EssentialGraph ess = essential_graph(g);
    const DagEnsemble ens = design_ensemble(ess, ensemble, derive_seed(seed, 2));
    DesignProblem problem{ess, ens, m, q, Objective::eo, {}, derive_seed(seed, 3)};
    problem.validate();
    const Batch batch = design_batch(algo, problem, NmscgParams{});
    if (out)
        save_batch(batch, *out);
    else
        write_batch(batch, std::cout);
    std::cerr << algo << ": " << batch.size() << " interventions, oriented fraction "
              << oriented_fraction(batch, g, ess) << " against the loaded graph\n";
    return kOk;
}

int cmd_eval(const std::string &graph, const std::string &batch_file, const std::string &metric, std::uint64_t seed) {
    const Dag g = graph_from(graph, seed);
    const EssentialGraph ess = essential_graph(g);
    const Batch batch = load_batch(batch_file);
    for (const auto &i : batch)
        for (NodeId v : i)
            if (v < 0 || v >= g.p()) throw ConfigError("batch targets node " + std::to_string(v) + " outside the graph");
    double value = 0.0;
    if (metric == "edges_oriented_fraction")
        value = oriented_fraction(batch, g, ess);
    else if (metric == "f_inf")
        value = f_inf_tilde(batch, enumerate_mec(ess), ess);
    else
        throw ConfigError("eval supports edges_oriented_fraction and f_inf");
    std::cout << metric << ',' << detail::format_double(value) << '\n';
    return kOk;
}

int cmd_sweep(const Overrides &o) {
    const ExperimentConfig cfg = o.resolve();
    std::vector<std::string> errors;
    const auto rows = run_experiment(cfg, &errors);
    for (const auto &p : emit(rows, cfg.out_dir, cfg.formats)) std::cerr << "wrote " << p.string() << '\n';
    report_errors(errors);
    return errors.empty() ? kOk : kRuntime;
}

int cmd_loop(const Overrides &o) {
    const ExperimentConfig cfg = o.resolve();
    std::vector<std::string> errors;
    const auto rows = run_sequential_batches(cfg, &errors);
    std::vector<std::string> formats;
    bool svg = false;
    // Per-round rows would give one chart per round; chart the rounds on one axis instead.
    for (const auto &f : cfg.formats) {
        if (f == "svg")
            svg = true;
        else
            formats.push_back(f);
    }
    for (const auto &p : emit(rows, cfg.out_dir, formats)) std::cerr << "wrote " << p.string() << '\n';
    if (svg) {
        const fs::path path = fs::path(cfg.out_dir) / "oriented_fraction.svg";
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());
        write_svg(rounds_as_chart_rows(rows), "oriented_fraction", out, "round");
        std::cerr << "wrote " << path.string() << '\n';
    }
    report_errors(errors);
    return errors.empty() ? kOk : kRuntime;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Batched intervention design for causal structure learning"};
    app.require_subcommand(1);

    auto *gen = app.add_subcommand("gen", "Generate random DAGs as edge lists");
    std::string gen_graph = "er:p=10,rho=0.2";
    std::uint64_t gen_seed = 0;
    int gen_count = 1;
    std::optional<std::string> gen_out;
    gen->add_option("--graph", gen_graph, "Graph spec")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Seed")->capture_default_str();
    gen->add_option("--count", gen_count, "Number of graphs")->capture_default_str();
    gen->add_option("--out", gen_out, "Output file (directory when --count > 1); stdout if omitted");

    auto *design = app.add_subcommand("design", "Design one batch for a graph");
    std::string d_graph, d_algo = "dgc";
    int d_m = 1, d_q = 1;
    std::uint64_t d_seed = 0;
    std::size_t d_ensemble = 40;
    std::optional<std::string> d_out;
    design->add_option("--graph", d_graph, "Graph spec or edge-list file")->required();
    design->add_option("--algo", d_algo, "Algorithm")->capture_default_str();
    design->add_option("--m", d_m, "Number of interventions")->capture_default_str();
    design->add_option("--q", d_q, "Targets per intervention")->capture_default_str();
    design->add_option("--seed", d_seed, "Seed")->capture_default_str();
    design->add_option("--ensemble", d_ensemble, "Design ensemble size")->capture_default_str();
    design->add_option("--out", d_out, "Batch file; stdout if omitted");

    auto *eval = app.add_subcommand("eval", "Score a batch file against a graph");
    std::string e_graph, e_batch, e_metric = "edges_oriented_fraction";
    std::uint64_t e_seed = 0;
    eval->add_option("--graph", e_graph, "Graph spec or edge-list file (the ground truth)")->required();
    eval->add_option("--batch", e_batch, "Batch file, one intervention per line")->required();
    eval->add_option("--metric", e_metric, "edges_oriented_fraction|f_inf")->capture_default_str();
    eval->add_option("--seed", e_seed, "Seed for generated graphs")->capture_default_str();

    auto *sweep = app.add_subcommand("sweep", "Compare algorithms over an (m, q) grid");
    Overrides sweep_opts;
    sweep_opts.attach(sweep, false);

    auto *loop = app.add_subcommand("loop", "Run sequential batch rounds until fully oriented");
    Overrides loop_opts;
    loop_opts.attach(loop, true);

    auto *self = app.add_subcommand("selftest", "Run the acceptance criteria");
    std::vector<int> only;
    self->add_option("--only", only, "Criterion ids to run (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*gen) return cmd_gen(gen_graph, gen_seed, gen_count, gen_out);
        if (*design) return cmd_design(d_graph, d_algo, d_m, d_q, d_seed, d_ensemble, d_out);
        if (*eval) return cmd_eval(e_graph, e_batch, e_metric, e_seed);
        if (*sweep) return cmd_sweep(sweep_opts);
        if (*loop) return cmd_loop(loop_opts);
        if (*self) return selftest::run_all(std::cout, only) == 0 ? kOk : kRuntime;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const InvalidArgument &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ParseError &e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}
