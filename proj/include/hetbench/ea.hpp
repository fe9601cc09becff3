#ifndef HETBENCH_EA_HPP
#define HETBENCH_EA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hetbench/executor.hpp"

namespace hetbench {

/// Genomes are bare variant seeds: the loop exists to measure where the
/// time goes, not to evolve interesting morphologies.
struct Population {
    std::vector<std::uint64_t> genomes;
    std::vector<double> fitnesses; // same length after evaluation
    std::uint64_t generation = 0;
};

/// Cumulative wall time per loop phase. Anything not attributed to the
/// three named phases is booked explicitly under bookkeeping, so the four
/// phases always sum to the measured total.
struct PhaseProfile {
    double selection_s = 0.0;
    double variation_s = 0.0;
    double evaluation_s = 0.0;
    double bookkeeping_s = 0.0;
    double total_s = 0.0;

    double evaluation_fraction() const {
        return total_s > 0.0 ? evaluation_s / total_s : 0.0;
    }
};

struct EaResult {
    Population population;
    PhaseProfile profile;
    double best_fitness = 0.0;
};

/// (mu + lambda) loop with mu = lambda = population_size / 2 and truncation
/// selection. Offspring seeds are hashed from (parent seed, generation,
/// slot), so the whole trajectory is a pure function of the arguments; the
/// surviving half keeps its fitness, which makes best fitness non-decreasing.
/// population_size must be even and >= 2, generations >= 1.
EaResult run_ea(ModelKind kind, std::size_t population_size, std::uint64_t generations,
                std::uint64_t steps, batch_executor& executor, std::uint64_t seed = 0);

/// Fixed-width phase table sorted by cumulative seconds, followed by
/// machine-parseable `profile.<key>=<value>` lines (one per line, %.9g)
/// including profile.evaluation_fraction.
std::string report_profile(const PhaseProfile& profile);

} // namespace hetbench

#endif
