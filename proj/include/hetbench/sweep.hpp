#ifndef HETBENCH_SWEEP_HPP
#define HETBENCH_SWEEP_HPP

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include "hetbench/config.hpp"
#include "hetbench/records.hpp"
#include "hetbench/scheduler.hpp"

namespace hetbench {

/// One row of work: a (model, n, steps, rep, strategy) tuple.
struct SweepCell {
    ModelKind model = ModelKind::Box;
    std::uint64_t n_variants = 0;
    std::uint64_t steps = 0;
    std::uint32_t rep = 0;
    Strategy strategy = Strategy::CpuOnly;
};

/// Row order is the sweep contract: models in config order, then variant
/// counts ascending, steps ascending, rep, and strategies in canonical
/// order (cpu, accel, hybrid) regardless of how the config lists them.
std::vector<SweepCell> enumerate_cells(const SweepConfig& config);

/// Row-count oracle: |cells| including rows that may end up error-marked.
std::uint64_t expected_row_count(const SweepConfig& config);

/// Test seams and progress callbacks; all optional.
struct SweepHooks {
    std::function<std::unique_ptr<batch_executor>(const SweepConfig&)> make_cpu;
    std::function<std::unique_ptr<batch_executor>(const SweepConfig&)> make_accel;
    std::function<void(const RunRecord&)> on_record;
    std::function<void(const std::string&)> log; // default: stderr
    const std::atomic<bool>* interrupt = nullptr; // checked between cells
};

struct SweepOutcome {
    std::vector<RunRecord> records; // previously persisted rows + new ones
    std::uint64_t rows_written = 0;
    std::uint64_t rows_skipped = 0; // resume hits
    std::uint64_t error_rows = 0;
    std::uint64_t degraded_rows = 0;
    bool interrupted = false;
    std::filesystem::path csv_path;
    std::filesystem::path jsonl_path;
    std::vector<std::filesystem::path> figure_files;
};

/// Runs every cell, appending each row to results.csv and results.jsonl as
/// soon as it exists (a crash loses at most the in-flight cell). Hybrid
/// cells calibrate once per (model, steps) and reuse the profile across
/// variant counts; the probe size is config.hybrid_probe_n, or the model's
/// largest variant count when 0. A failing cell is recorded with
/// wall_s = -1 and the sweep continues. With resume = true, rows whose
/// (model, strategy, n, steps, rep) key is already in results.csv are
/// skipped; without it any existing output files are replaced.
SweepOutcome run_sweep(const SweepConfig& config, bool resume = false,
                       const SweepHooks& hooks = {});

} // namespace hetbench

#endif
