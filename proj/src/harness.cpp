#include "deanon/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "deanon/io.hpp"
#include "deanon/lap.hpp"
#include "deanon/oracle.hpp"
#include "deanon/rng.hpp"

namespace deanon {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* to_string(OverlapMode m) { return m == OverlapMode::Overlapping ? "ol" : "nol"; }

const char* to_string(DatasetKind k) {
    switch (k) {
        case DatasetKind::Synthetic: return "synthetic";
        case DatasetKind::SampledReal: return "sampled-real";
        case DatasetKind::CrossDomain: return "cross-domain";
    }
    return "unknown";
}

const char* to_string(SolverKind s) {
    switch (s) {
        case SolverKind::Cbda: return "cbda";
        case SolverKind::Ga: return "ga";
        case SolverKind::Oracle: return "oracle";
    }
    return "unknown";
}

OverlapMode overlap_from_string(const std::string& s) {
    if (s == "ol" || s == "OL") return OverlapMode::Overlapping;
    if (s == "nol" || s == "NOL") return OverlapMode::NonOverlapping;
    throw ConfigError("unknown overlap mode '" + s + "' (expected ol or nol)");
}

DatasetKind dataset_from_string(const std::string& s) {
    if (s == "synthetic") return DatasetKind::Synthetic;
    if (s == "sampled-real") return DatasetKind::SampledReal;
    if (s == "cross-domain") return DatasetKind::CrossDomain;
    throw ConfigError("unknown dataset kind '" + s + "'");
}

SolverKind solver_from_string(const std::string& s) {
    if (s == "cbda") return SolverKind::Cbda;
    if (s == "ga") return SolverKind::Ga;
    if (s == "oracle") return SolverKind::Oracle;
    throw ConfigError("unknown solver '" + s + "'");
}

Index community_count(Index n, double eta) {
    if (!(eta > 0.0)) throw ConfigError("community ratio eta must be positive");
    return std::max<Index>(1, static_cast<Index>(std::llround(eta * static_cast<double>(n))));
}

CommunityMatrix to_non_overlapping(const CommunityMatrix& m, std::uint64_t seed) {
    Rng rng(seed);
    CommunityMatrix out(m.n(), m.communities());
    for (Index i = 0; i < m.n(); ++i) {
        std::vector<Index> own;
        for (Index c = 0; c < m.communities(); ++c) {
            if (m.member(i, c)) own.push_back(c);
        }
        const Index pick = own.empty() ? static_cast<Index>(rng.below(m.communities())) : own[rng.below(own.size())];
        out.set(i, pick, true);
    }
    return out;
}

WeightMatrix weights_for(const CommunityMatrix& m, const BundleMeta& meta, bool weighted, bool allow_clamp) {
    if (!weighted) return unweighted_matrix(m.n());
    return build_weight_matrix(m, meta.a, meta.s1, meta.s2, allow_clamp);
}

InstanceBundle make_synthetic(const SyntheticSpec& spec) {
    const Index q = spec.q ? *spec.q : community_count(spec.n, spec.eta);
    const OsbmEdgeModel model{spec.a};
    OsbmSample sample = osbm_generate(spec.n, q, spec.membership_prob, model, Rng::derive(spec.seed, 10));
    if (spec.overlap == OverlapMode::NonOverlapping) {
        sample.communities = to_non_overlapping(sample.communities, Rng::derive(spec.seed, 11));
        sample.underlying = osbm_edges(sample.communities, model, Rng::derive(spec.seed, 12));
    }
    GraphTriple t = observe(sample.underlying, sample.communities, spec.s1, spec.s2, Rng::derive(spec.seed, 13));

    InstanceBundle b;
    b.meta.n = spec.n;
    b.meta.q = q;
    b.meta.s1 = spec.s1;
    b.meta.s2 = spec.s2;
    b.meta.a = spec.a;
    b.meta.membership_prob = spec.membership_prob;
    b.meta.overlap = spec.overlap;
    b.meta.seed = spec.seed;
    b.meta.true_mapping = t.true_perm.mapping();
    WeightMatrix w = weights_for(t.communities, b.meta, spec.weighted, spec.allow_clamp);
    b.instance = make_instance(std::move(t.published), std::move(t.auxiliary), std::move(t.communities), std::move(w),
                               spec.s1, spec.s2, spec.mu);
    b.truth = std::move(t.true_perm);
    return b;
}

namespace {

json meta_to_json(const BundleMeta& m) {
    return json{{"format", "deanon-instance/1"},
                {"n", m.n},
                {"communities", m.q},
                {"s1", m.s1},
                {"s2", m.s2},
                {"a", m.a},
                {"membership_prob", m.membership_prob},
                {"overlap", to_string(m.overlap)},
                {"dataset", m.dataset},
                {"seed", m.seed},
                {"rng", Rng::kName},
                {"true_mapping", m.true_mapping}};
}

BundleMeta meta_from_json(const json& j) {
    BundleMeta m;
    try {
        m.n = j.at("n").get<Index>();
        m.q = j.at("communities").get<Index>();
        m.s1 = j.at("s1").get<double>();
        m.s2 = j.at("s2").get<double>();
        m.a = j.at("a").get<double>();
        m.membership_prob = j.value("membership_prob", kDefaultMembershipProb);
        m.overlap = overlap_from_string(j.value("overlap", std::string("ol")));
        m.dataset = j.value("dataset", std::string("synthetic"));
        m.seed = j.value("seed", std::uint64_t{0});
        m.true_mapping = j.value("true_mapping", std::vector<int>{});
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad instance metadata: ") + e.what());
    }
    return m;
}

}  // namespace

void save_bundle(const fs::path& dir, const InstanceBundle& bundle) {
    fs::create_directories(dir);
    write_edge_list(dir / "published.edges", bundle.instance.published);
    write_edge_list(dir / "auxiliary.edges", bundle.instance.auxiliary);
    write_communities(dir / "communities.txt", bundle.instance.communities);
    BundleMeta meta = bundle.meta;
    if (bundle.truth) meta.true_mapping = bundle.truth->mapping();
    std::ofstream out(dir / "meta.json", std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "meta.json").string());
    out << meta_to_json(meta).dump(2) << '\n';
}

InstanceBundle load_bundle(const fs::path& dir, bool weighted, std::optional<double> mu, bool allow_clamp) {
    std::ifstream in(dir / "meta.json");
    if (!in) throw ConfigError("missing " + (dir / "meta.json").string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("meta.json: ") + e.what());
    }
    InstanceBundle b;
    b.meta = meta_from_json(j);
    AdjacencyMatrix a = read_edge_list(dir / "published.edges", b.meta.n);
    AdjacencyMatrix bb = read_edge_list(dir / "auxiliary.edges", b.meta.n);
    CommunityMatrix m = read_communities(dir / "communities.txt", b.meta.n, b.meta.q, false);
    WeightMatrix w = weights_for(m, b.meta, weighted, allow_clamp);
    b.instance = make_instance(std::move(a), std::move(bb), std::move(m), std::move(w), b.meta.s1, b.meta.s2, mu);
    if (!b.meta.true_mapping.empty()) {
        if (static_cast<Index>(b.meta.true_mapping.size()) != b.meta.n) throw ConfigError("true_mapping has wrong length");
        b.truth = Permutation(b.meta.true_mapping);
    }
    return b;
}

std::vector<Index> bfs_ball(const AdjacencyMatrix& g, Index size, std::uint64_t seed) {
    const Index n = g.n();
    if (size > n) throw ConfigError("requested subgraph larger than the source graph");
    Rng rng(seed);
    std::vector<char> seen(n, 0);
    std::vector<Index> order;
    order.reserve(size);
    std::vector<Index> unvisited(n);
    std::iota(unvisited.begin(), unvisited.end(), 0);
    rng.shuffle(unvisited);
    std::size_t next_root = 0;
    while (static_cast<Index>(order.size()) < size) {
        while (seen[unvisited[next_root]]) ++next_root;
        std::deque<Index> frontier{unvisited[next_root]};
        seen[unvisited[next_root]] = 1;
        while (!frontier.empty() && static_cast<Index>(order.size()) < size) {
            const Index u = frontier.front();
            frontier.pop_front();
            order.push_back(u);
            for (Index v = 0; v < n; ++v) {
                if (g.has_edge(u, v) && !seen[v]) {
                    seen[v] = 1;
                    frontier.push_back(v);
                }
            }
        }
    }
    return order;
}

void ExperimentConfig::use_full_grid() {
    n_values = {500, 1000, 1500, 2000};
    s_values = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    a_values = {3, 5, 7, 9};
    eta_values = {0.05, 0.1};
    overlap_modes = {OverlapMode::Overlapping, OverlapMode::NonOverlapping};
}

void ExperimentConfig::validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    if (solvers.empty()) throw ConfigError("no solvers selected");
    if (s_values.empty() || a_values.empty()) throw ConfigError("empty parameter grid");
    for (double s : s_values) {
        if (!(s > 0.0 && s <= 1.0)) throw ConfigError("sampling probability outside (0, 1]");
        if (weighted && s >= 1.0) throw ConfigError("weighted runs need s < 1");
    }
    for (double a : a_values) {
        if (!(a > 0.0)) throw ConfigError("a must be positive");
    }
    if (!(membership_prob > 0.0 && membership_prob <= 1.0)) throw ConfigError("membership_prob outside (0, 1]");
    switch (dataset) {
        case DatasetKind::Synthetic:
        case DatasetKind::SampledReal:
            if (n_values.empty() || eta_values.empty() || overlap_modes.empty()) throw ConfigError("empty parameter grid");
            for (Index n : n_values) {
                if (n < 2) throw ConfigError("N must be at least 2");
                for (SolverKind s : solvers) {
                    if (s == SolverKind::Oracle && n > static_cast<Index>(kWempOracleMaxN)) {
                        throw ConfigError("oracle solver needs N <= 8");
                    }
                }
            }
            for (double e : eta_values) {
                if (!(e > 0.0)) throw ConfigError("eta must be positive");
            }
            break;
        case DatasetKind::CrossDomain: break;
    }
    if (dataset == DatasetKind::SampledReal) {
        if (!fs::exists(edge_list)) throw ConfigError("edge list not found: " + edge_list.string());
        if (!fs::exists(community_file)) throw ConfigError("community file not found: " + community_file.string());
        if (source_nodes < 2 || source_communities < 1) throw ConfigError("source_nodes and source_communities required");
        for (Index n : n_values) {
            if (n > source_nodes) throw ConfigError("N exceeds the source graph size");
        }
    }
    if (dataset == DatasetKind::CrossDomain && !fs::exists(bundle_dir / "meta.json")) {
        throw ConfigError("instance bundle not found: " + bundle_dir.string());
    }
    if (solvers.end() != std::find(solvers.begin(), solvers.end(), SolverKind::Ga)) ::deanon::validate(ga);
}

json to_json(const ExperimentConfig& c) {
    std::vector<std::string> modes, solvers;
    for (auto m : c.overlap_modes) modes.emplace_back(to_string(m));
    for (auto s : c.solvers) solvers.emplace_back(to_string(s));
    json cbda = {{"max_inner_iters", c.cbda.max_inner_iters},
                 {"restarts", c.cbda.restarts},
                 {"max_total_iters", c.cbda.max_total_iters}};
    cbda["delta"] = c.cbda.delta ? json(*c.cbda.delta) : json(nullptr);
    cbda["delta_xi"] = c.cbda.delta_xi ? json(*c.cbda.delta_xi) : json(nullptr);
    cbda["xi_max"] = c.cbda.xi_max ? json(*c.cbda.xi_max) : json(nullptr);
    cbda["mu"] = c.cbda.mu ? json(*c.cbda.mu) : json(nullptr);
    json ga = {{"population_size", c.ga.population_size}, {"generations", c.ga.generations},
               {"crossover_rate", c.ga.crossover_rate},   {"mutation_rate", c.ga.mutation_rate},
               {"elitism_count", c.ga.elitism_count},     {"runs", c.ga.runs}};
    return json{{"dataset", to_string(c.dataset)},
                {"edge_list", c.edge_list.string()},
                {"community_file", c.community_file.string()},
                {"source_nodes", c.source_nodes},
                {"source_communities", c.source_communities},
                {"bundle_dir", c.bundle_dir.string()},
                {"N", c.n_values},
                {"s", c.s_values},
                {"a", c.a_values},
                {"eta", c.eta_values},
                {"overlap", modes},
                {"solvers", solvers},
                {"membership_prob", c.membership_prob},
                {"weighted", c.weighted},
                {"allow_clamp", c.allow_clamp},
                {"repetitions", c.repetitions},
                {"output_dir", c.output_dir.string()},
                {"rng_seed", c.rng_seed},
                {"rng", Rng::kName},
                {"jobs", c.jobs},
                {"write_traces", c.write_traces},
                {"cbda", cbda},
                {"ga", ga}};
}

ExperimentConfig experiment_from_json(const json& j) {
    ExperimentConfig c;
    try {
        if (j.contains("dataset")) c.dataset = dataset_from_string(j["dataset"].get<std::string>());
        c.edge_list = j.value("edge_list", std::string{});
        c.community_file = j.value("community_file", std::string{});
        c.source_nodes = j.value("source_nodes", Index{0});
        c.source_communities = j.value("source_communities", Index{0});
        c.bundle_dir = j.value("bundle_dir", std::string{});
        if (j.contains("N")) c.n_values = j["N"].get<std::vector<Index>>();
        if (j.contains("s")) c.s_values = j["s"].get<std::vector<double>>();
        if (j.contains("a")) {
            c.a_values = j["a"].get<std::vector<double>>();
        } else if (c.dataset == DatasetKind::SampledReal) {
            // Real graphs carry no edge model; the weight parameter must be chosen explicitly.
            throw ConfigError("sampled-real configs must set \"a\" for the weights");
        }
        if (j.contains("eta")) c.eta_values = j["eta"].get<std::vector<double>>();
        if (j.contains("overlap")) {
            c.overlap_modes.clear();
            for (const auto& m : j["overlap"]) c.overlap_modes.push_back(overlap_from_string(m.get<std::string>()));
        }
        if (j.contains("solvers")) {
            c.solvers.clear();
            for (const auto& s : j["solvers"]) c.solvers.push_back(solver_from_string(s.get<std::string>()));
        }
        c.membership_prob = j.value("membership_prob", kDefaultMembershipProb);
        c.weighted = j.value("weighted", true);
        c.allow_clamp = j.value("allow_clamp", false);
        c.repetitions = j.value("repetitions", 1);
        c.output_dir = j.value("output_dir", std::string("results"));
        c.rng_seed = j.value("rng_seed", std::uint64_t{0});
        c.jobs = j.value("jobs", 1);
        c.write_traces = j.value("write_traces", false);
        if (j.contains("cbda")) {
            const auto& b = j["cbda"];
            auto opt = [&](const char* key) -> std::optional<double> {
                if (!b.contains(key) || b[key].is_null()) return std::nullopt;
                return b[key].get<double>();
            };
            c.cbda.delta = opt("delta");
            c.cbda.delta_xi = opt("delta_xi");
            c.cbda.xi_max = opt("xi_max");
            c.cbda.mu = opt("mu");
            c.cbda.max_inner_iters = b.value("max_inner_iters", c.cbda.max_inner_iters);
            c.cbda.restarts = b.value("restarts", c.cbda.restarts);
            c.cbda.max_total_iters = b.value("max_total_iters", c.cbda.max_total_iters);
        }
        if (j.contains("ga")) {
            const auto& g = j["ga"];
            c.ga.population_size = g.value("population_size", c.ga.population_size);
            c.ga.generations = g.value("generations", c.ga.generations);
            c.ga.crossover_rate = g.value("crossover_rate", c.ga.crossover_rate);
            c.ga.mutation_rate = g.value("mutation_rate", c.ga.mutation_rate);
            c.ga.elitism_count = g.value("elitism_count", c.ga.elitism_count);
            c.ga.runs = g.value("runs", c.ga.runs);
        }
        if (j.value("paper_grid", false)) c.use_full_grid();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad experiment config: ") + e.what());
    }
    return c;
}

ExperimentConfig load_experiment(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return experiment_from_json(j);
}

std::string csv_header() {
    return "dataset,N,Q,eta,a,s1,s2,overlap_mode,weighted,solver,repetition,seed,accuracy,nme,relative_nme,f0_final,"
           "wall_ms,status";
}

std::string to_csv(const ResultRow& r) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << r.dataset << ',' << r.n << ',' << r.q << ',' << r.eta << ',' << r.a << ',' << r.s1 << ',' << r.s2 << ','
        << to_string(r.overlap) << ',' << (r.weighted ? 1 : 0) << ',' << to_string(r.solver) << ',' << r.repetition
        << ',' << r.seed << ',' << r.accuracy << ',' << r.nme << ',' << r.relative_nme << ',' << r.f0_final << ','
        << std::setprecision(6) << r.wall_ms << ',' << r.status;
    return out.str();
}

namespace {

template <typename Field>
double mean_of(const std::vector<ResultRow>& rows, SolverKind s, std::optional<OverlapMode> mode, std::optional<Index> n,
               Field field) {
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& r : rows) {
        if (r.solver != s || (mode && r.overlap != *mode) || (n && r.n != *n)) continue;
        total += field(r);
        ++count;
    }
    return count ? total / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double ResultTable::mean_accuracy(SolverKind s, std::optional<OverlapMode> mode, std::optional<Index> n) const {
    return mean_of(rows, s, mode, n, [](const ResultRow& r) { return r.accuracy; });
}

double ResultTable::mean_relative_nme(SolverKind s, std::optional<OverlapMode> mode, std::optional<Index> n) const {
    return mean_of(rows, s, mode, n, [](const ResultRow& r) { return r.relative_nme; });
}

ResultRow solve_bundle(const InstanceBundle& bundle, SolverKind solver, const CbdaConfig& cbda, const GaConfig& ga,
                       std::uint64_t seed, CbdaTrace* trace_out) {
    const auto t0 = std::chrono::steady_clock::now();
    ResultRow row;
    row.dataset = bundle.meta.dataset;
    row.n = bundle.instance.n();
    row.q = bundle.instance.communities.communities();
    row.a = bundle.meta.a;
    row.s1 = bundle.meta.s1;
    row.s2 = bundle.meta.s2;
    row.overlap = bundle.meta.overlap;
    row.solver = solver;
    row.seed = seed;

    Permutation perm;
    switch (solver) {
        case SolverKind::Cbda: {
            CbdaResult r = cbda_solve(bundle.instance, cbda, seed);
            row.status = to_string(r.trace.status);
            row.f0_final = r.trace.f0_final;
            perm = std::move(r.perm);
            if (trace_out) *trace_out = std::move(r.trace);
            break;
        }
        case SolverKind::Ga: {
            GaConfig g = ga;
            g.rng_seed = Rng::derive(seed, 7);
            GaResult r = ga_solve(bundle.instance, g);
            row.status = "ga";
            row.f0_final = r.best_f0;
            perm = std::move(r.perm);
            break;
        }
        case SolverKind::Oracle: {
            OracleResult r = brute_wemp(bundle.instance);
            row.status = "exact";
            row.f0_final = r.value;
            perm = std::move(r.perm);
            break;
        }
    }
    if (bundle.truth) {
        row.accuracy = accuracy(perm, *bundle.truth);
        row.nme = nme(perm, *bundle.truth);
        row.relative_nme = relative_nme(perm, *bundle.truth);
    } else {
        row.accuracy = std::numeric_limits<double>::quiet_NaN();
        row.relative_nme = std::numeric_limits<double>::quiet_NaN();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

namespace {

struct Cell {
    Index n = 0;
    double s = 0.0;
    double a = 0.0;
    double eta = 0.0;
    OverlapMode overlap = OverlapMode::Overlapping;
    int repetition = 0;
};

InstanceBundle sampled_real_instance(const ExperimentConfig& cfg, const AdjacencyMatrix& source,
                                     const CommunityMatrix& source_m, const Cell& cell, std::uint64_t seed) {
    const auto nodes = bfs_ball(source, cell.n, Rng::derive(seed, 20));
    AdjacencyMatrix u(cell.n);
    CommunityMatrix m(cell.n, source_m.communities());
    for (Index i = 0; i < cell.n; ++i) {
        for (Index c = 0; c < source_m.communities(); ++c) m.set(i, c, source_m.member(nodes[i], c));
        for (Index j = i + 1; j < cell.n; ++j) {
            if (source.has_edge(nodes[i], nodes[j])) u.add_edge(i, j);
        }
    }
    if (cell.overlap == OverlapMode::NonOverlapping) m = to_non_overlapping(m, Rng::derive(seed, 11));
    for (Index i = 0; i < cell.n; ++i) {
        if (m.row_size(i) == 0) throw ConfigError("sampled node without community membership");
    }
    GraphTriple t = observe(u, m, cell.s, cell.s, Rng::derive(seed, 13));
    InstanceBundle b;
    b.meta.n = cell.n;
    b.meta.q = m.communities();
    b.meta.s1 = b.meta.s2 = cell.s;
    b.meta.a = cell.a;
    b.meta.overlap = cell.overlap;
    b.meta.dataset = "sampled-real";
    b.meta.seed = seed;
    WeightMatrix w = weights_for(t.communities, b.meta, cfg.weighted, cfg.allow_clamp);
    b.instance = make_instance(std::move(t.published), std::move(t.auxiliary), std::move(t.communities), std::move(w),
                               cell.s, cell.s, cfg.cbda.mu);
    b.truth = std::move(t.true_perm);
    return b;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    std::vector<Cell> cells;
    if (cfg.dataset == DatasetKind::CrossDomain) {
        for (int r = 0; r < cfg.repetitions; ++r) cells.push_back({0, 0.0, 0.0, 0.0, OverlapMode::Overlapping, r});
    } else {
        for (Index n : cfg.n_values)
            for (double s : cfg.s_values)
                for (double a : cfg.a_values)
                    for (double eta : cfg.eta_values)
                        for (OverlapMode m : cfg.overlap_modes)
                            for (int r = 0; r < cfg.repetitions; ++r) cells.push_back({n, s, a, eta, m, r});
    }

    AdjacencyMatrix source;
    CommunityMatrix source_m;
    std::optional<InstanceBundle> fixed;
    if (cfg.dataset == DatasetKind::SampledReal) {
        source = read_edge_list(cfg.edge_list, cfg.source_nodes);
        source_m = read_communities(cfg.community_file, cfg.source_nodes, cfg.source_communities, true);
    } else if (cfg.dataset == DatasetKind::CrossDomain) {
        fixed = load_bundle(cfg.bundle_dir, cfg.weighted, cfg.cbda.mu, cfg.allow_clamp);
        fixed->meta.dataset = "cross-domain";
    }

    const std::size_t per_cell = cfg.solvers.size();
    std::vector<ResultRow> rows(cells.size() * per_cell);
    std::vector<std::string> traces(rows.size());
    std::vector<std::exception_ptr> errors(cells.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (std::size_t k = next++; k < cells.size(); k = next++) {
            try {
                const Cell& cell = cells[k];
                const std::uint64_t seed = Rng::derive(cfg.rng_seed, static_cast<std::uint64_t>(cell.repetition));
                InstanceBundle bundle;
                if (cfg.dataset == DatasetKind::Synthetic) {
                    SyntheticSpec spec;
                    spec.n = cell.n;
                    spec.eta = cell.eta;
                    spec.a = cell.a;
                    spec.s1 = spec.s2 = cell.s;
                    spec.membership_prob = cfg.membership_prob;
                    spec.overlap = cell.overlap;
                    spec.weighted = cfg.weighted;
                    spec.allow_clamp = cfg.allow_clamp;
                    spec.mu = cfg.cbda.mu;
                    spec.seed = seed;
                    bundle = make_synthetic(spec);
                } else if (cfg.dataset == DatasetKind::SampledReal) {
                    bundle = sampled_real_instance(cfg, source, source_m, cell, seed);
                } else {
                    bundle = *fixed;
                }
                for (std::size_t s = 0; s < per_cell; ++s) {
                    CbdaTrace trace;
                    ResultRow row = solve_bundle(bundle, cfg.solvers[s], cfg.cbda, cfg.ga, seed, &trace);
                    row.eta = cfg.dataset == DatasetKind::CrossDomain
                                  ? static_cast<double>(row.q) / static_cast<double>(row.n)
                                  : cell.eta;
                    row.weighted = cfg.weighted;
                    row.repetition = cell.repetition;
                    if (cfg.write_traces && cfg.solvers[s] == SolverKind::Cbda) traces[k * per_cell + s] = trace.to_json_lines();
                    rows[k * per_cell + s] = std::move(row);
                }
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int n_threads = std::min<int>(cfg.jobs, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    if (!cfg.output_dir.empty()) {
        fs::create_directories(cfg.output_dir);
        std::ofstream csv(cfg.output_dir / "results.csv", std::ios::trunc);
        if (!csv) throw Error("cannot write results.csv");
        csv << csv_header() << '\n';
        for (const auto& r : rows) csv << to_csv(r) << '\n';
        std::ofstream conf(cfg.output_dir / "config.json", std::ios::trunc);
        json materialized = to_json(cfg);
        materialized["notes"] = {{"membership_prob_default", kDefaultMembershipProb},
                                 {"membership_prob_is_default", cfg.membership_prob == kDefaultMembershipProb}};
        conf << materialized.dump(2) << '\n';
        if (cfg.write_traces) {
            fs::create_directories(cfg.output_dir / "traces");
            for (std::size_t k = 0; k < traces.size(); ++k) {
                if (traces[k].empty()) continue;
                std::ofstream t(cfg.output_dir / "traces" / ("job_" + std::to_string(k) + ".jsonl"), std::ios::trunc);
                t << traces[k];
            }
        }
    }
    return ResultTable{std::move(rows)};
}

bool OracleCheckReport::all_pass() const {
    return std::all_of(lines.begin(), lines.end(), [](const Line& l) { return l.pass; });
}

OracleCheckReport oracle_check(Index n, int trials, std::uint64_t seed) {
    if (n < 2 || n > static_cast<Index>(kMmseOracleMaxN)) throw ConfigError("oracle-check needs 2 <= n <= 7");
    if (trials < 1) throw ConfigError("trials must be at least 1");
    OracleCheckReport report;
    bool wemp_bound = true, mmse_bound = true, cbda_bound = true, ratio_range = true;
    int cbda_hits = 0;
    for (int t = 0; t < trials; ++t) {
        SyntheticSpec spec;
        spec.n = n;
        spec.q = 3;
        spec.a = 3.0;
        spec.s1 = spec.s2 = 0.7;
        spec.membership_prob = 0.4;
        spec.seed = Rng::derive(seed, static_cast<std::uint64_t>(t));
        const InstanceBundle b = make_synthetic(spec);
        const ProblemInstance& inst = b.instance;
        const RatioReport rr = approx_ratio_report(inst);
        Rng rng(Rng::derive(spec.seed, 99));
        for (int k = 0; k < 50; ++k) {
            std::vector<int> m(n);
            std::iota(m.begin(), m.end(), 0);
            rng.shuffle(m);
            const Permutation p(m);
            wemp_bound = wemp_bound && rr.wemp.value <= f0(p, inst);
            mmse_bound = mmse_bound && rr.mmse.value >= mmse_objective(p, inst);
        }
        const CbdaResult c = cbda_solve(inst);
        cbda_bound = cbda_bound && c.trace.f0_final >= rr.wemp.value - 1e-9;
        cbda_hits += c.trace.f0_final <= rr.wemp.value + 1e-6;
        ratio_range = ratio_range && rr.ratio > 0.0 && rr.ratio <= 1.0 + 1e-12;
        report.ratios.push_back(rr.ratio);
    }
    const double mean_ratio =
        std::accumulate(report.ratios.begin(), report.ratios.end(), 0.0) / static_cast<double>(report.ratios.size());
    auto fmt = [](double v) {
        std::ostringstream o;
        o << std::setprecision(6) << v;
        return o.str();
    };
    report.lines.push_back({"wemp_minimum_is_lower_bound", wemp_bound, "50 random permutations per trial"});
    report.lines.push_back({"mmse_maximum_is_upper_bound", mmse_bound, "50 random permutations per trial"});
    report.lines.push_back({"cbda_not_below_wemp_minimum", cbda_bound,
                            "cbda reached the minimum on " + std::to_string(cbda_hits) + "/" + std::to_string(trials)});
    report.lines.push_back({"ratio_in_unit_interval", ratio_range, ""});
    report.lines.push_back({"mean_ratio_at_least_half", mean_ratio >= 0.5, "mean ratio " + fmt(mean_ratio)});
    return report;
}

}  // namespace deanon
