#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "deanon/harness.hpp"
#include "deanon/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace deanon;

namespace {

json row_json(const ResultRow& r) {
    return json{{"solver", to_string(r.solver)}, {"N", r.n},
                {"Q", r.q},                     {"accuracy", r.accuracy},
                {"nme", r.nme},                 {"relative_nme", r.relative_nme},
                {"f0_final", r.f0_final},       {"status", r.status},
                {"seed", r.seed},               {"wall_ms", r.wall_ms}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seedless de-anonymization of networks with overlapping communities"};
    app.require_subcommand(1);

    // generate
    SyntheticSpec gen;
    std::string gen_out = "instance";
    std::string gen_overlap = "ol";
    std::optional<double> gen_s;
    std::optional<Index> gen_q;
    bool gen_unweighted = false;
    auto* generate = app.add_subcommand("generate", "Write a synthetic OSBM instance bundle");
    generate->add_option("--n", gen.n, "Number of nodes")->check(CLI::Range(2, 100000));
    generate->add_option("--eta", gen.eta, "Community ratio Q/N");
    generate->add_option("--q", gen_q, "Number of communities (overrides --eta)");
    generate->add_option("--a", gen.a, "Edge model parameter a");
    generate->add_option("--s", gen_s, "Sampling probability for both observations");
    generate->add_option("--s1", gen.s1, "Sampling probability of the published graph");
    generate->add_option("--s2", gen.s2, "Sampling probability of the auxiliary graph");
    generate->add_option("--membership-prob", gen.membership_prob, "Community membership probability");
    generate->add_option("--overlap", gen_overlap, "ol or nol")->check(CLI::IsMember({"ol", "nol"}));
    generate->add_option("--seed", gen.seed, "RNG seed");
    generate->add_option("--out", gen_out, "Output directory");
    generate->add_flag("--unweighted", gen_unweighted, "Skip weight validation (s may be 1)");

    // solve
    std::string solve_dir;
    std::string solve_solver = "cbda";
    std::optional<double> solve_mu;
    std::uint64_t solve_seed = 0;
    bool solve_unweighted = false;
    std::string solve_trace;
    CbdaConfig solve_cbda;
    GaConfig solve_ga;
    auto* solve = app.add_subcommand("solve", "Run one solver on an instance bundle and print JSON");
    solve->add_option("--instance", solve_dir, "Instance bundle directory")->required()->check(CLI::ExistingDirectory);
    solve->add_option("--solver", solve_solver, "cbda, ga or oracle")->check(CLI::IsMember({"cbda", "ga", "oracle"}));
    solve->add_option("--mu", solve_mu, "Community penalty coefficient");
    solve->add_option("--seed", solve_seed, "RNG seed");
    solve->add_option("--max-inner-iters", solve_cbda.max_inner_iters, "CBDA inner iteration cap");
    solve->add_option("--max-total-iters", solve_cbda.max_total_iters, "CBDA total iteration cap (0 = none)");
    solve->add_option("--restarts", solve_cbda.restarts, "CBDA extra random starts");
    solve->add_option("--trace", solve_trace, "Write the CBDA trace as JSON lines");
    solve->add_option("--generations", solve_ga.generations, "GA generations");
    solve->add_option("--population", solve_ga.population_size, "GA population size");
    auto* solve_w = solve->add_flag("--weighted", "Use community weights (default)");
    solve->add_flag("--unweighted", solve_unweighted, "Use the all-ones weight matrix")->excludes(solve_w);

    // oracle-check
    Index oc_n = 5;
    int oc_trials = 10;
    std::uint64_t oc_seed = 0;
    auto* ocheck = app.add_subcommand("oracle-check", "Small-n exhaustive property suite");
    ocheck->add_option("--n", oc_n, "Instance size (2..7)");
    ocheck->add_option("--trials", oc_trials, "Number of random instances");
    ocheck->add_option("--seed", oc_seed, "RNG seed");

    // sweep
    std::string sw_config, sw_out, sw_overlap;
    std::optional<std::uint64_t> sw_seed;
    std::optional<int> sw_jobs;
    bool sw_paper = false, sw_weighted = false, sw_unweighted = false;
    auto* sweep = app.add_subcommand("sweep", "Run an experiment grid and write results.csv");
    sweep->add_option("--config", sw_config, "Experiment config (JSON)")->check(CLI::ExistingFile);
    sweep->add_option("--out", sw_out, "Output directory");
    sweep->add_option("--seed", sw_seed, "Base RNG seed");
    sweep->add_option("--jobs", sw_jobs, "Worker threads");
    sweep->add_flag("--paper-grid", sw_paper, "Use the full published parameter grid");
    auto* sw_w = sweep->add_flag("--weighted", sw_weighted, "Use community weights");
    sweep->add_flag("--unweighted", sw_unweighted, "Use the all-ones weight matrix")->excludes(sw_w);
    sweep->add_option("--overlap", sw_overlap, "Restrict to ol or nol")->check(CLI::IsMember({"ol", "nol"}));

    // ga-run
    std::string ga_dir, ga_history;
    GaConfig ga_cfg;
    bool ga_unweighted = false;
    auto* garun = app.add_subcommand("ga-run", "Multi-run GA baseline with accuracy spread");
    garun->add_option("--instance", ga_dir, "Instance bundle directory")->required()->check(CLI::ExistingDirectory);
    garun->add_option("--runs", ga_cfg.runs, "Independent runs");
    garun->add_option("--generations", ga_cfg.generations, "Generations per run");
    garun->add_option("--population", ga_cfg.population_size, "Population size");
    garun->add_option("--crossover-rate", ga_cfg.crossover_rate, "PMX probability");
    garun->add_option("--mutation-rate", ga_cfg.mutation_rate, "Transposition probability");
    garun->add_option("--elitism", ga_cfg.elitism_count, "Elites copied per generation");
    garun->add_option("--seed", ga_cfg.rng_seed, "Base RNG seed");
    garun->add_option("--history", ga_history, "CSV of the first run's best-f0 history");
    garun->add_flag("--unweighted", ga_unweighted, "Use the all-ones weight matrix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            if (gen_s) gen.s1 = gen.s2 = *gen_s;
            gen.q = gen_q;
            gen.overlap = overlap_from_string(gen_overlap);
            gen.weighted = !gen_unweighted;
            const InstanceBundle b = make_synthetic(gen);
            save_bundle(gen_out, b);
            std::cout << json{{"out", gen_out},
                              {"n", b.meta.n},
                              {"communities", b.meta.q},
                              {"published_edges", b.instance.published.edge_count()},
                              {"auxiliary_edges", b.instance.auxiliary.edge_count()},
                              {"seed", b.meta.seed}}
                             .dump()
                      << '\n';
            return 0;
        }
        if (solve->parsed()) {
            const InstanceBundle b = load_bundle(solve_dir, !solve_unweighted, solve_mu);
            CbdaTrace trace;
            ResultRow row = solve_bundle(b, solver_from_string(solve_solver), solve_cbda, solve_ga, solve_seed, &trace);
            row.weighted = !solve_unweighted;
            if (!solve_trace.empty() && row.solver == SolverKind::Cbda) {
                std::ofstream t(solve_trace, std::ios::trunc);
                t << trace.to_json_lines();
            }
            std::cout << row_json(row).dump() << '\n';
            return 0;
        }
        if (ocheck->parsed()) {
            const OracleCheckReport report = oracle_check(oc_n, oc_trials, oc_seed);
            for (const auto& line : report.lines) {
                std::cout << (line.pass ? "PASS " : "FAIL ") << line.name;
                if (!line.detail.empty()) std::cout << "  (" << line.detail << ")";
                std::cout << '\n';
            }
            return report.all_pass() ? 0 : 1;
        }
        if (sweep->parsed()) {
            ExperimentConfig cfg = sw_config.empty() ? ExperimentConfig{} : load_experiment(sw_config);
            if (sw_paper) cfg.use_full_grid();
            if (!sw_out.empty()) cfg.output_dir = sw_out;
            if (sw_seed) cfg.rng_seed = *sw_seed;
            if (sw_jobs) cfg.jobs = *sw_jobs;
            if (sw_weighted) cfg.weighted = true;
            if (sw_unweighted) cfg.weighted = false;
            if (!sw_overlap.empty()) cfg.overlap_modes = {overlap_from_string(sw_overlap)};
            const ResultTable table = run_experiment(cfg);
            std::cout << json{{"rows", table.rows.size()}, {"output_dir", cfg.output_dir.string()}}.dump() << '\n';
            return 0;
        }
        if (garun->parsed()) {
            const InstanceBundle b = load_bundle(ga_dir, !ga_unweighted);
            if (!b.truth) throw ConfigError("instance has no true mapping; accuracy is undefined");
            const GaSpread spread = ga_average_accuracy(b.instance, ga_cfg, *b.truth);
            if (!ga_history.empty()) {
                GaConfig first = ga_cfg;
                first.rng_seed = Rng::derive(ga_cfg.rng_seed, 0);
                write_history_csv(ga_history, ga_solve(b.instance, first).history);
            }
            std::cout << json{{"runs", ga_cfg.runs},
                              {"mean_accuracy", spread.mean},
                              {"min_accuracy", spread.min},
                              {"max_accuracy", spread.max},
                              {"accuracies", spread.accuracies}}
                             .dump()
                      << '\n';
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
