#include "deanon/baseline_ga.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "deanon/rng.hpp"

namespace deanon {

void validate(const GaConfig& cfg) {
    auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (cfg.population_size < 2) throw ParameterError("population_size must be at least 2");
    if (cfg.generations < 0) throw ParameterError("generations must be nonnegative");
    if (cfg.elitism_count < 0 || cfg.elitism_count >= cfg.population_size) {
        throw ParameterError("elitism_count must lie in [0, population_size)");
    }
    if (!rate_ok(cfg.crossover_rate) || !rate_ok(cfg.mutation_rate)) throw ParameterError("rates must lie in [0, 1]");
    if (cfg.runs < 1) throw ParameterError("runs must be at least 1");
    if (static_cast<int>(cfg.initial_population.size()) > cfg.population_size) {
        throw ParameterError("initial population larger than population_size");
    }
}

std::vector<int> pmx_child(const std::vector<int>& a, const std::vector<int>& b, std::size_t lo, std::size_t hi) {
    const std::size_t n = a.size();
    std::vector<int> pos_in_a(n, -1);
    std::vector<int> child(n);
    for (std::size_t i = lo; i <= hi; ++i) {
        child[i] = a[i];
        pos_in_a[a[i]] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= lo && i <= hi) continue;
        int v = b[i];
        // Follow the segment mapping a[k] -> b[k] until v is not already placed.
        while (pos_in_a[v] >= 0) v = b[pos_in_a[v]];
        child[i] = v;
    }
    return child;
}

namespace {

struct Individual {
    std::vector<int> genes;
    double cost = 0.0;
};

double cost_of(const std::vector<int>& genes, const ProblemInstance& inst) { return f0(Permutation(genes), inst); }

}  // namespace

GaResult ga_solve(const ProblemInstance& inst, const GaConfig& cfg) {
    validate(cfg);
    const auto n = static_cast<std::size_t>(inst.n());
    const auto pop_size = static_cast<std::size_t>(cfg.population_size);
    Rng rng(cfg.rng_seed);

    std::vector<Individual> pop;
    pop.reserve(pop_size);
    for (const auto& p : cfg.initial_population) {
        require_dims(p.size() == n, "initial individual size differs from instance");
        pop.push_back({p.mapping(), 0.0});
    }
    while (pop.size() < pop_size) {
        std::vector<int> g(n);
        std::iota(g.begin(), g.end(), 0);
        rng.shuffle(g);
        pop.push_back({std::move(g), 0.0});
    }
    for (auto& ind : pop) ind.cost = cost_of(ind.genes, inst);

    auto better = [](const Individual& x, const Individual& y) { return x.cost < y.cost; };
    Individual best = *std::min_element(pop.begin(), pop.end(), better);
    GaResult result;
    result.history.push_back(best.cost);

    auto tournament = [&]() -> const Individual& {
        const Individual& x = pop[rng.below(pop_size)];
        const Individual& y = pop[rng.below(pop_size)];
        return y.cost < x.cost ? y : x;
    };
    auto mutate = [&](std::vector<int>& g) {
        if (n < 2 || !rng.bernoulli(cfg.mutation_rate)) return;
        const auto i = rng.below(n);
        auto j = rng.below(n - 1);
        if (j >= i) ++j;
        std::swap(g[i], g[j]);
    };

    for (int gen = 0; gen < cfg.generations; ++gen) {
        std::stable_sort(pop.begin(), pop.end(), better);
        std::vector<Individual> next(pop.begin(), pop.begin() + cfg.elitism_count);
        while (next.size() < pop_size) {
            std::vector<int> c1 = tournament().genes;
            std::vector<int> c2 = tournament().genes;
            if (n >= 2 && rng.bernoulli(cfg.crossover_rate)) {
                auto lo = rng.below(n);
                auto hi = rng.below(n);
                if (lo > hi) std::swap(lo, hi);
                auto k1 = pmx_child(c1, c2, lo, hi);
                auto k2 = pmx_child(c2, c1, lo, hi);
                c1 = std::move(k1);
                c2 = std::move(k2);
            }
            mutate(c1);
            mutate(c2);
            next.push_back({std::move(c1), 0.0});
            if (next.size() < pop_size) next.push_back({std::move(c2), 0.0});
        }
        for (std::size_t k = static_cast<std::size_t>(cfg.elitism_count); k < next.size(); ++k) {
            next[k].cost = cost_of(next[k].genes, inst);
        }
        pop = std::move(next);
        const Individual& gen_best = *std::min_element(pop.begin(), pop.end(), better);
        if (gen_best.cost < best.cost) best = gen_best;
        result.history.push_back(best.cost);
    }
    result.perm = Permutation(best.genes);
    result.best_f0 = best.cost;
    return result;
}

GaSpread ga_average_accuracy(const ProblemInstance& inst, const GaConfig& cfg, const Permutation& truth) {
    validate(cfg);
    GaSpread spread;
    for (int r = 0; r < cfg.runs; ++r) {
        GaConfig run_cfg = cfg;
        run_cfg.rng_seed = Rng::derive(cfg.rng_seed, static_cast<std::uint64_t>(r));
        spread.accuracies.push_back(accuracy(ga_solve(inst, run_cfg).perm, truth));
    }
    const auto& acc = spread.accuracies;
    spread.mean = std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(acc.size());
    const auto [lo, hi] = std::minmax_element(acc.begin(), acc.end());
    spread.min = *lo;
    spread.max = *hi;
    return spread;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<double>& history) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(17);
    out << "generation,best_f0\n";
    for (std::size_t g = 0; g < history.size(); ++g) out << g << ',' << history[g] << '\n';
}

}  // namespace deanon
