#include "hetbench/ea.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "hetbench/rng.hpp"

namespace hetbench {
namespace {

constexpr std::uint64_t kInitKey = 0x8F5D4C3B2A190807ull;
constexpr std::uint64_t kChildKey = 0x243F6A8885A308D3ull;

using clock_type = std::chrono::steady_clock;

double seconds_between(clock_type::time_point a, clock_type::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

std::vector<double> evaluate(ModelKind kind, const std::vector<std::uint64_t>& genomes,
                             std::uint64_t steps, batch_executor& executor) {
    BatchResult res = executor.run(BatchRequest{kind, genomes, steps});
    std::vector<double> fitnesses(genomes.size());
    for (std::size_t i = 0; i < genomes.size(); ++i) fitnesses[i] = res.results[i].fitness;
    return fitnesses;
}

} // namespace

EaResult run_ea(ModelKind kind, std::size_t population_size, std::uint64_t generations,
                std::uint64_t steps, batch_executor& executor, std::uint64_t seed) {
    if (population_size < 2 || population_size % 2 != 0)
        throw std::invalid_argument("run_ea: population_size must be even and >= 2");
    if (generations < 1) throw std::invalid_argument("run_ea: generations must be >= 1");

    PhaseProfile prof;
    auto timed = [](double& bucket, auto&& fn) {
        auto t0 = clock_type::now();
        fn();
        bucket += seconds_between(t0, clock_type::now());
    };
    auto t_start = clock_type::now();

    Population pop;
    timed(prof.bookkeeping_s, [&] {
        pop.genomes.resize(population_size);
        for (std::size_t i = 0; i < population_size; ++i)
            pop.genomes[i] = rng::at(seed ^ kInitKey, i);
    });
    timed(prof.evaluation_s,
          [&] { pop.fitnesses = evaluate(kind, pop.genomes, steps, executor); });

    const std::size_t mu = population_size / 2;
    for (std::uint64_t g = 1; g <= generations; ++g) {
        std::vector<std::uint64_t> parents;
        std::vector<double> parent_fitness;
        timed(prof.selection_s, [&] {
            std::vector<std::size_t> order(pop.genomes.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return pop.fitnesses[a] > pop.fitnesses[b];
            });
            parents.reserve(mu);
            parent_fitness.reserve(mu);
            for (std::size_t i = 0; i < mu; ++i) {
                parents.push_back(pop.genomes[order[i]]);
                parent_fitness.push_back(pop.fitnesses[order[i]]);
            }
        });

        std::vector<std::uint64_t> offspring(mu);
        timed(prof.variation_s, [&] {
            for (std::size_t i = 0; i < mu; ++i)
                offspring[i] = rng::at(parents[i] ^ kChildKey, (g << 32) + i);
        });

        std::vector<double> offspring_fitness;
        timed(prof.evaluation_s,
              [&] { offspring_fitness = evaluate(kind, offspring, steps, executor); });

        timed(prof.bookkeeping_s, [&] {
            pop.genomes = std::move(parents);
            pop.genomes.insert(pop.genomes.end(), offspring.begin(), offspring.end());
            pop.fitnesses = std::move(parent_fitness);
            pop.fitnesses.insert(pop.fitnesses.end(), offspring_fitness.begin(),
                                 offspring_fitness.end());
            pop.generation = g;
        });
    }

    prof.total_s = seconds_between(t_start, clock_type::now());
    double accounted =
        prof.selection_s + prof.variation_s + prof.evaluation_s + prof.bookkeeping_s;
    if (prof.total_s > accounted) prof.bookkeeping_s += prof.total_s - accounted;

    EaResult out;
    out.population = std::move(pop);
    out.profile = prof;
    out.best_fitness =
        *std::max_element(out.population.fitnesses.begin(), out.population.fitnesses.end());
    return out;
}

std::string report_profile(const PhaseProfile& profile) {
    std::vector<std::pair<std::string, double>> rows = {
        {"selection", profile.selection_s},
        {"variation", profile.variation_s},
        {"evaluation", profile.evaluation_s},
        {"bookkeeping", profile.bookkeeping_s},
    };
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    double total = profile.total_s;
    std::ostringstream out;
    char line[96];
    std::snprintf(line, sizeof(line), "%-12s %12s %9s\n", "phase", "seconds", "fraction");
    out << line;
    for (const auto& [name, secs] : rows) {
        std::snprintf(line, sizeof(line), "%-12s %12.6f %9.3f\n", name.c_str(), secs,
                      total > 0.0 ? secs / total : 0.0);
        out << line;
    }
    std::snprintf(line, sizeof(line), "%-12s %12.6f %9.3f\n", "total", total,
                  total > 0.0 ? 1.0 : 0.0);
    out << line;

    auto kv = [&](const char* key, double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "profile.%s=%.9g\n", key, v);
        out << buf;
    };
    kv("selection_s", profile.selection_s);
    kv("variation_s", profile.variation_s);
    kv("evaluation_s", profile.evaluation_s);
    kv("bookkeeping_s", profile.bookkeeping_s);
    kv("total_s", profile.total_s);
    kv("evaluation_fraction", profile.evaluation_fraction());
    return out.str();
}

} // namespace hetbench
