#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "deanon/io.hpp"
#include "support.hpp"

using namespace deanon;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("deanon_harness_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

ExperimentConfig tiny_config(const fs::path& out) {
    ExperimentConfig c;
    c.n_values = {12};
    c.s_values = {0.7};
    c.a_values = {3.0};
    c.eta_values = {0.25};
    c.overlap_modes = {OverlapMode::Overlapping};
    c.output_dir = out;
    return c;
}

}  // namespace

TEST_CASE("community count from the ratio") {
    CHECK(community_count(200, 0.1) == 20);
    CHECK(community_count(50, 0.05) == 3);
    CHECK(community_count(5, 0.01) == 1);
    CHECK_THROWS_AS(community_count(10, 0.0), ConfigError);

    SyntheticSpec spec;
    spec.n = 200;
    spec.eta = 0.1;
    spec.seed = 4;
    CHECK(make_synthetic(spec).instance.communities.communities() == 20);
}

TEST_CASE("non-overlapping reduction keeps one membership") {
    const auto s = osbm_generate(100, 8, 0.4, OsbmEdgeModel{3.0}, 1);
    const CommunityMatrix nol = to_non_overlapping(s.communities, 2);
    for (Index i = 0; i < 100; ++i) {
        CHECK(nol.row_size(i) == 1);
        for (Index c = 0; c < 8; ++c) {
            if (nol.member(i, c)) CHECK(s.communities.member(i, c));
        }
    }
    SyntheticSpec spec;
    spec.n = 60;
    spec.overlap = OverlapMode::NonOverlapping;
    spec.seed = 3;
    const auto b = make_synthetic(spec);
    for (Index i = 0; i < 60; ++i) CHECK(b.instance.communities.row_size(i) == 1);
}

TEST_CASE("synthetic bundles are reproducible and consistent") {
    SyntheticSpec spec;
    spec.n = 40;
    spec.seed = 8;
    const auto x = make_synthetic(spec);
    const auto y = make_synthetic(spec);
    CHECK(x.instance.published == y.instance.published);
    CHECK(x.instance.auxiliary == y.instance.auxiliary);
    CHECK(*x.truth == *y.truth);
    CHECK(apply_permutation(*x.truth, x.instance.communities.matrix()) == x.instance.communities.matrix());
    CHECK(x.instance.mu == doctest::Approx(default_mu(x.instance.weights)));

    spec.weighted = false;
    CHECK(make_synthetic(spec).instance.weights.matrix() == unweighted_matrix(40).matrix());
}

TEST_CASE("bundle save and load round trip") {
    SyntheticSpec spec;
    spec.n = 30;
    spec.seed = 5;
    const auto b = make_synthetic(spec);
    const fs::path dir = temp_dir("bundle");
    save_bundle(dir, b);
    const auto back = load_bundle(dir);
    CHECK(back.instance.published == b.instance.published);
    CHECK(back.instance.auxiliary == b.instance.auxiliary);
    CHECK(back.instance.communities == b.instance.communities);
    CHECK(back.instance.weights.matrix() == b.instance.weights.matrix());
    CHECK(back.instance.mu == b.instance.mu);
    CHECK(*back.truth == *b.truth);
    CHECK(back.meta.seed == 5);

    CHECK_THROWS_AS(load_bundle(temp_dir("missing")), ConfigError);
}

TEST_CASE("bfs ball extraction") {
    const auto s = osbm_generate(80, 4, 0.3, OsbmEdgeModel{3.0}, 6);
    const auto nodes = bfs_ball(s.underlying, 25, 9);
    CHECK(nodes.size() == 25);
    CHECK(std::set<Index>(nodes.begin(), nodes.end()).size() == 25);
    CHECK(bfs_ball(s.underlying, 25, 9) == nodes);

    // A graph with no edges falls back to fresh roots.
    CHECK(bfs_ball(AdjacencyMatrix(10), 10, 1).size() == 10);
    CHECK_THROWS_AS(bfs_ball(AdjacencyMatrix(5), 6, 1), ConfigError);
}

TEST_CASE("single cell yields one data row") {
    const fs::path out = temp_dir("single");
    const ResultTable t = run_experiment(tiny_config(out));
    CHECK(t.rows.size() == 1);
    const auto lines = lines_of(out / "results.csv");
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == csv_header());
    CHECK(fs::exists(out / "config.json"));

    // Every row is self-describing.
    std::istringstream row(lines[1]);
    std::vector<std::string> fields;
    for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
    CHECK(fields.size() == 18);
    CHECK(fields[0] == "synthetic");
    CHECK(fields[1] == "12");
    CHECK(fields[2] == "3");
    CHECK(fields[9] == "cbda");
}

TEST_CASE("re-running a config reproduces accuracy values") {
    ExperimentConfig c = tiny_config(temp_dir("rerun"));
    c.repetitions = 3;
    c.solvers = {SolverKind::Cbda, SolverKind::Ga};
    c.ga.generations = 20;
    c.ga.population_size = 20;
    c.jobs = 2;
    const ResultTable x = run_experiment(c);
    const ResultTable y = run_experiment(c);
    REQUIRE(x.rows.size() == 6);
    for (std::size_t k = 0; k < x.rows.size(); ++k) {
        CHECK(x.rows[k].accuracy == y.rows[k].accuracy);
        CHECK(x.rows[k].f0_final == y.rows[k].f0_final);
        CHECK(x.rows[k].seed == y.rows[k].seed);
    }
    CHECK(x.mean_accuracy(SolverKind::Cbda) >= 0.0);
    CHECK(std::isnan(x.mean_accuracy(SolverKind::Oracle)));
}

TEST_CASE("overlap modes share repetition seeds") {
    ExperimentConfig c = tiny_config("");
    c.overlap_modes = {OverlapMode::Overlapping, OverlapMode::NonOverlapping};
    c.repetitions = 2;
    const ResultTable t = run_experiment(c);
    REQUIRE(t.rows.size() == 4);
    CHECK(t.rows[0].seed == t.rows[2].seed);
    CHECK(t.rows[1].seed == t.rows[3].seed);
    CHECK(t.rows[0].seed != t.rows[1].seed);
}

TEST_CASE("infeasible configurations fail before running") {
    ExperimentConfig c = tiny_config("");
    c.s_values = {1.0};
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    c = tiny_config("");
    c.repetitions = 0;
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    c = tiny_config("");
    c.solvers = {SolverKind::Oracle};
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    c = tiny_config("");
    c.dataset = DatasetKind::SampledReal;
    c.edge_list = "/nonexistent/graph.edges";
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    c = tiny_config("");
    c.dataset = DatasetKind::CrossDomain;
    c.bundle_dir = "/nonexistent";
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
    CHECK_THROWS_AS(overlap_from_string("both"), ConfigError);
    CHECK_THROWS_AS(solver_from_string("coba"), ConfigError);
}

TEST_CASE("config json round trip") {
    ExperimentConfig c = tiny_config("somewhere");
    c.solvers = {SolverKind::Ga, SolverKind::Cbda};
    c.cbda.mu = 2.5;
    c.cbda.max_total_iters = 17;
    c.ga.generations = 33;
    c.rng_seed = 99;
    const ExperimentConfig d = experiment_from_json(to_json(c));
    CHECK(d.n_values == c.n_values);
    CHECK(d.eta_values == c.eta_values);
    CHECK(d.solvers == c.solvers);
    CHECK(d.cbda.mu == 2.5);
    CHECK(d.cbda.max_total_iters == 17);
    CHECK(d.ga.generations == 33);
    CHECK(d.rng_seed == 99);
    CHECK(d.output_dir == c.output_dir);

    ExperimentConfig p;
    p.use_full_grid();
    CHECK(p.n_values == std::vector<Index>{500, 1000, 1500, 2000});
    CHECK(experiment_from_json(nlohmann::json{{"paper_grid", true}}).a_values == std::vector<double>{3, 5, 7, 9});
    CHECK_THROWS_AS(experiment_from_json(nlohmann::json{{"N", "many"}}), ConfigError);
    CHECK_THROWS_AS(experiment_from_json(nlohmann::json{{"dataset", "sampled-real"}}), ConfigError);
    CHECK(experiment_from_json(nlohmann::json{{"dataset", "sampled-real"}, {"a", {4.0}}}).a_values ==
          std::vector<double>{4.0});
}

TEST_CASE("sampled-real and cross-domain datasets") {
    const fs::path dir = temp_dir("datasets");
    const auto s = osbm_generate(120, 6, 0.3, OsbmEdgeModel{2.0}, 12);
    write_edge_list(dir / "graph.edges", s.underlying);
    write_communities(dir / "graph.comm", s.communities);

    ExperimentConfig c = tiny_config("");
    c.dataset = DatasetKind::SampledReal;
    c.edge_list = dir / "graph.edges";
    c.community_file = dir / "graph.comm";
    c.source_nodes = 120;
    c.source_communities = 6;
    c.n_values = {20};
    c.overlap_modes = {OverlapMode::Overlapping, OverlapMode::NonOverlapping};
    const ResultTable t = run_experiment(c);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].dataset == "sampled-real");
    CHECK(t.rows[0].n == 20);

    SyntheticSpec spec;
    spec.n = 15;
    spec.seed = 2;
    save_bundle(dir / "bundle", make_synthetic(spec));
    ExperimentConfig x = tiny_config("");
    x.dataset = DatasetKind::CrossDomain;
    x.bundle_dir = dir / "bundle";
    x.repetitions = 2;
    const ResultTable u = run_experiment(x);
    REQUIRE(u.rows.size() == 2);
    CHECK(u.rows[0].dataset == "cross-domain");
    CHECK(u.rows[0].n == 15);
    CHECK(u.rows[0].accuracy >= 0.0);
}

TEST_CASE("solve_bundle with every solver") {
    const auto b = testing::small_instance(6, 10);
    for (SolverKind s : {SolverKind::Cbda, SolverKind::Ga, SolverKind::Oracle}) {
        GaConfig ga;
        ga.generations = 10;
        ga.population_size = 10;
        const ResultRow r = solve_bundle(b, s, {}, ga, 1);
        CHECK(r.accuracy >= 0.0);
        CHECK(r.accuracy <= 1.0);
        CHECK(r.relative_nme == doctest::Approx(1.0 - r.accuracy));
        CHECK(r.solver == s);
    }
}

TEST_CASE("oracle check passes on small instances") {
    const OracleCheckReport r = oracle_check(5, 4, 0);
    CHECK(r.lines.size() == 5);
    CHECK(r.ratios.size() == 4);
    CHECK(r.all_pass());
    CHECK_THROWS_AS(oracle_check(8, 1, 0), ConfigError);
}
