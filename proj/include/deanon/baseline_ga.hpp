#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "deanon/objective.hpp"

namespace deanon {

struct GaConfig {
    int population_size = 100;
    int generations = 500;
    double crossover_rate = 0.9;
    double mutation_rate = 0.2;
    int elitism_count = 2;
    int runs = 10;
    std::uint64_t rng_seed = 0;
    // Seeds the first generation; remaining slots are filled with random permutations.
    std::vector<Permutation> initial_population;
};

void validate(const GaConfig& cfg);

struct GaResult {
    Permutation perm;
    double best_f0 = 0.0;
    // Best f0 seen so far, one entry per generation (entry 0 is the initial population).
    std::vector<double> history;
};

/// Generational GA over permutation mappings with fitness -f0: size-2 tournament
/// selection, partially-mapped crossover, random-transposition mutation, elitism.
GaResult ga_solve(const ProblemInstance& inst, const GaConfig& cfg);

// Partially-mapped crossover of a and b on the inclusive cut range [lo, hi]:
// the child takes a's genes inside the range and b's outside, repaired into a bijection.
std::vector<int> pmx_child(const std::vector<int>& a, const std::vector<int>& b, std::size_t lo, std::size_t hi);

struct GaSpread {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<double> accuracies;
};

// cfg.runs independent solves with seeds derived from cfg.rng_seed.
GaSpread ga_average_accuracy(const ProblemInstance& inst, const GaConfig& cfg, const Permutation& truth);

void write_history_csv(const std::filesystem::path& path, const std::vector<double>& history);

}  // namespace deanon
