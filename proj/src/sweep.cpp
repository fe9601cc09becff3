#include "hetbench/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "hetbench/figures.hpp"

namespace hetbench {
namespace {

double trace_mean(const std::vector<TracePoint>& trace) {
    if (trace.empty()) return 0.0;
    double sum = 0.0;
    for (const TracePoint& p : trace) sum += p.utilization;
    return sum / static_cast<double>(trace.size());
}

// Same seeds for every strategy of a cell: the back-ends must be timed on
// identical work.
std::vector<std::uint64_t> cell_seeds(std::uint64_t n) {
    std::vector<std::uint64_t> seeds(n);
    std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
    return seeds;
}

RunRecord identity_row(const SweepCell& cell) {
    RunRecord row;
    row.model = cell.model;
    row.strategy = cell.strategy;
    row.n_variants = cell.n_variants;
    row.steps = cell.steps;
    row.rep = cell.rep;
    return row;
}

} // namespace

std::vector<SweepCell> enumerate_cells(const SweepConfig& config) {
    std::vector<Strategy> strats;
    for (Strategy s : kAllStrategies)
        if (std::find(config.strategies.begin(), config.strategies.end(), s) !=
            config.strategies.end())
            strats.push_back(s);

    std::vector<SweepCell> cells;
    for (ModelKind model : config.models)
        for (std::uint64_t n : config.variants_per_model.at(model))
            for (std::uint64_t steps : config.steps_list)
                for (std::uint32_t rep = 0; rep < config.repetitions; ++rep)
                    for (Strategy s : strats) cells.push_back({model, n, steps, rep, s});
    return cells;
}

std::uint64_t expected_row_count(const SweepConfig& config) {
    return enumerate_cells(config).size();
}

SweepOutcome run_sweep(const SweepConfig& config, bool resume, const SweepHooks& hooks) {
    validate_config(config);

    std::function<void(const std::string&)> log = hooks.log;
    if (!log)
        log = [](const std::string& m) { std::fprintf(stderr, "[sweep] %s\n", m.c_str()); };

    SweepOutcome out;
    out.csv_path = config.output_dir / "results.csv";
    out.jsonl_path = config.output_dir / "results.jsonl";

    std::set<std::string> done;
    if (resume && std::filesystem::exists(out.csv_path)) {
        out.records = read_csv(out.csv_path);
        for (const RunRecord& r : out.records) done.insert(record_key(r));
    } else if (!resume) {
        std::error_code ec;
        std::filesystem::remove(out.csv_path, ec);
        std::filesystem::remove(out.jsonl_path, ec);
    }

    std::unique_ptr<batch_executor> cpu =
        hooks.make_cpu ? hooks.make_cpu(config)
                       : std::make_unique<cpu_executor>(config.workers, config.monitor_enabled);
    std::unique_ptr<batch_executor> accel =
        hooks.make_accel ? hooks.make_accel(config)
                         : std::make_unique<synthetic_executor>(config.device, config.mode);

    std::map<std::pair<ModelKind, std::uint64_t>, CalibrationProfile> calibrations;

    for (const SweepCell& cell : enumerate_cells(config)) {
        if (hooks.interrupt && hooks.interrupt->load()) {
            out.interrupted = true;
            log("interrupted; partial results are on disk");
            break;
        }

        RunRecord row = identity_row(cell);
        if (done.contains(record_key(row))) {
            ++out.rows_skipped;
            continue;
        }

        BatchRequest request{cell.model, cell_seeds(cell.n_variants), cell.steps};
        try {
            switch (cell.strategy) {
            case Strategy::CpuOnly: {
                BatchResult res = cpu->run(request);
                row.wall_s = res.wall_time_s;
                row.cpu_part_s = res.wall_time_s;
                row.cpu_util_mean = trace_mean(res.utilization_trace);
                break;
            }
            case Strategy::AccelOnly: {
                BatchResult res = accel->run(request);
                row.wall_s = res.wall_time_s;
                row.accel_part_s = res.wall_time_s;
                row.accel_fraction = 1.0;
                row.accel_util_mean = trace_mean(res.utilization_trace);
                break;
            }
            case Strategy::Hybrid: {
                auto key = std::make_pair(cell.model, cell.steps);
                auto it = calibrations.find(key);
                if (it == calibrations.end()) {
                    std::uint64_t probe = config.hybrid_probe_n;
                    if (probe == 0) probe = config.variants_per_model.at(cell.model).back();
                    CalibrationProfile prof =
                        calibrate(cell.model, cell.steps, probe, *cpu, *accel);
                    it = calibrations.emplace(key, prof).first;
                }
                AllocationPlan plan = plan_allocation(it->second, cell.n_variants);
                HybridResult res = run_hybrid(plan, request, *cpu, *accel,
                                              config.orchestration_overhead_s, config.mode);
                row.wall_s = res.wall_combined_s;
                row.cpu_part_s = res.t_cpu_part_s;
                row.accel_part_s = res.t_accel_part_s;
                row.accel_fraction = plan.accel_fraction;
                row.cpu_util_mean = trace_mean(res.cpu_result.utilization_trace);
                row.accel_util_mean = trace_mean(res.accel_result.utilization_trace);
                row.degraded = res.degraded;
                if (res.degraded) ++out.degraded_rows;
                break;
            }
            }
        } catch (const std::exception& e) {
            row = identity_row(cell);
            row.wall_s = kErrorWall;
            ++out.error_rows;
            log("cell " + record_key(row) + " failed: " + e.what());
        }
        row.timestamp = utc_timestamp_now();
        append_csv(out.csv_path, {row});
        append_jsonl(out.jsonl_path, {row});
        out.records.push_back(row);
        ++out.rows_written;
        if (hooks.on_record) hooks.on_record(row);
    }

    if (config.emit_figures && !out.interrupted && !out.records.empty())
        out.figure_files = emit_figures(out.records, config.output_dir / "figures", log);
    return out;
}

} // namespace hetbench
