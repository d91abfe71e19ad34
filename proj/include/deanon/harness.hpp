#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "deanon/baseline_ga.hpp"
#include "deanon/cbda.hpp"

namespace deanon {

enum class OverlapMode { Overlapping, NonOverlapping };
enum class DatasetKind { Synthetic, SampledReal, CrossDomain };
enum class SolverKind { Cbda, Ga, Oracle };

const char* to_string(OverlapMode m);
const char* to_string(DatasetKind k);
const char* to_string(SolverKind s);
OverlapMode overlap_from_string(const std::string& s);
DatasetKind dataset_from_string(const std::string& s);
SolverKind solver_from_string(const std::string& s);

// Default community membership probability for synthetic instances.
inline constexpr double kDefaultMembershipProb = 0.2;

// Number of communities for a community ratio eta: round(eta * N), at least 1.
Index community_count(Index n, double eta);

// Keeps one uniformly chosen community per node (a fresh uniform one for empty rows).
CommunityMatrix to_non_overlapping(const CommunityMatrix& m, std::uint64_t seed);

struct BundleMeta {
    Index n = 0;
    Index q = 0;
    double s1 = 0.5;
    double s2 = 0.5;
    double a = 3.0;
    double membership_prob = kDefaultMembershipProb;
    OverlapMode overlap = OverlapMode::Overlapping;
    std::string dataset = "synthetic";
    std::uint64_t seed = 0;
    std::vector<int> true_mapping;  // empty when unknown
};

/// A de-anonymization task with its ground truth and provenance.
struct InstanceBundle {
    ProblemInstance instance;
    std::optional<Permutation> truth;
    BundleMeta meta;
};

struct SyntheticSpec {
    Index n = 50;
    double eta = 0.1;
    std::optional<Index> q;  // overrides eta
    double a = 3.0;
    double s1 = 0.6;
    double s2 = 0.6;
    double membership_prob = kDefaultMembershipProb;
    OverlapMode overlap = OverlapMode::Overlapping;
    bool weighted = true;
    bool allow_clamp = false;
    std::optional<double> mu;
    std::uint64_t seed = 0;
};

// OSBM draw (communities, then NOL reduction, then edges), two samplings and a
// community-preserving hidden permutation.
InstanceBundle make_synthetic(const SyntheticSpec& spec);

// Builds W from meta.a / s1 / s2, or the all-ones matrix when !weighted.
WeightMatrix weights_for(const CommunityMatrix& m, const BundleMeta& meta, bool weighted, bool allow_clamp = false);

// Directory layout: published.edges, auxiliary.edges, communities.txt, meta.json.
void save_bundle(const std::filesystem::path& dir, const InstanceBundle& bundle);
InstanceBundle load_bundle(const std::filesystem::path& dir, bool weighted = true, std::optional<double> mu = std::nullopt,
                           bool allow_clamp = false);

// Induced subgraph on a BFS ball of `size` nodes around a seeded random root;
// exhausted components continue from another random unvisited root.
std::vector<Index> bfs_ball(const AdjacencyMatrix& g, Index size, std::uint64_t seed);

struct ExperimentConfig {
    DatasetKind dataset = DatasetKind::Synthetic;
    // sampled-real: full graph and community files
    std::filesystem::path edge_list;
    std::filesystem::path community_file;
    Index source_nodes = 0;
    Index source_communities = 0;
    // cross-domain: an instance bundle directory
    std::filesystem::path bundle_dir;

    std::vector<Index> n_values{50, 100, 200};
    std::vector<double> s_values{0.6};
    std::vector<double> a_values{5.0};
    std::vector<double> eta_values{0.1};
    std::vector<OverlapMode> overlap_modes{OverlapMode::Overlapping, OverlapMode::NonOverlapping};
    std::vector<SolverKind> solvers{SolverKind::Cbda};
    double membership_prob = kDefaultMembershipProb;
    bool weighted = true;
    bool allow_clamp = false;
    int repetitions = 1;
    std::filesystem::path output_dir = "results";
    std::uint64_t rng_seed = 0;
    int jobs = 1;
    bool write_traces = false;
    CbdaConfig cbda;
    GaConfig ga;

    // Grid of the published study: N 500..2000, s 0.3..0.9, a 3..9, eta 0.05/0.1, OL and NOL.
    void use_full_grid();
    void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::filesystem::path& path);

struct ResultRow {
    std::string dataset;
    Index n = 0;
    Index q = 0;
    double eta = 0.0;
    double a = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    OverlapMode overlap = OverlapMode::Overlapping;
    bool weighted = true;
    SolverKind solver = SolverKind::Cbda;
    int repetition = 0;
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    std::size_t nme = 0;
    double relative_nme = 0.0;
    double f0_final = 0.0;
    double wall_ms = 0.0;
    std::string status;
};

std::string csv_header();
std::string to_csv(const ResultRow& r);

struct ResultTable {
    std::vector<ResultRow> rows;
    double mean_accuracy(SolverKind s, std::optional<OverlapMode> mode = std::nullopt,
                         std::optional<Index> n = std::nullopt) const;
    double mean_relative_nme(SolverKind s, std::optional<OverlapMode> mode = std::nullopt,
                             std::optional<Index> n = std::nullopt) const;
};

/// Runs every (grid cell, repetition, solver) job on a bounded worker pool.
/// Repetition r uses seed derive(rng_seed, r) in every cell, so cells that
/// differ only in one parameter share their random draws where possible.
/// Writes results.csv and config.json into output_dir when it is non-empty.
ResultTable run_experiment(const ExperimentConfig& cfg);

ResultRow solve_bundle(const InstanceBundle& bundle, SolverKind solver, const CbdaConfig& cbda, const GaConfig& ga,
                       std::uint64_t seed, CbdaTrace* trace_out = nullptr);

struct OracleCheckReport {
    struct Line {
        std::string name;
        bool pass = false;
        std::string detail;
    };
    std::vector<Line> lines;
    std::vector<double> ratios;
    bool all_pass() const;
};

// Small-n property suite: oracle bounds, CBDA never below the WEMP minimum,
// ratios in (0, 1] with mean >= 0.5.
OracleCheckReport oracle_check(Index n, int trials, std::uint64_t seed);

}  // namespace deanon
