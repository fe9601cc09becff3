#ifndef HETBENCH_SCHEDULER_HPP
#define HETBENCH_SCHEDULER_HPP

#include <cstdint>
#include <functional>
#include <string>

#include "hetbench/executor.hpp"

namespace hetbench {

/// Measured sequential wall times of both back-ends for one probe batch.
struct CalibrationProfile {
    ModelKind kind = ModelKind::Box;
    std::uint64_t steps = 0;
    std::uint64_t probe_n = 0;
    double t_cpu_s = 0.0;
    double t_accel_s = 0.0;
    double ratio_accel_over_cpu = 0.0;
    bool cpu_ok = true;
    bool accel_ok = true;
};

struct AllocationPlan {
    std::uint64_t n_total = 0;
    std::uint64_t n_cpu = 0;
    std::uint64_t n_accel = 0;
    double accel_fraction = 0.0;           // realized: n_accel / n_total
    double requested_accel_fraction = 0.0; // t_cpu / (t_cpu + t_accel), pre-rounding
};

struct HybridResult {
    double wall_combined_s = 0.0;
    double t_cpu_part_s = 0.0;
    double t_accel_part_s = 0.0;
    double overhead_s = 0.0;
    AllocationPlan plan;
    BatchResult cpu_result;
    BatchResult accel_result;
    std::vector<VariantResult> merged; // original seed order
    bool degraded = false;
};

/// Runs probe_n variants on the CPU back-end and then on the accelerator,
/// recording both wall times and their ratio. A back-end that throws is
/// flagged failed and the profile routes everything to the survivor.
CalibrationProfile calibrate(ModelKind kind, std::uint64_t steps, std::uint64_t probe_n,
                             batch_executor& cpu, batch_executor& accel);

/// Reverse-ratio split: the accelerator share is t_cpu / (t_cpu + t_accel).
/// A share that rounds to zero still gets one variant when its fraction is
/// at least 1 / (2 * n_total). Failed back-ends receive zero.
AllocationPlan plan_allocation(const CalibrationProfile& profile, std::uint64_t n_total);

using time_fn = std::function<double(std::uint64_t)>;

/// Exhaustive minimizer of max(cpu_time(n_cpu), accel_time(n_accel));
/// ties break toward the smaller accelerator share. Oracle for evaluating
/// the reverse-ratio heuristic.
AllocationPlan plan_allocation_optimal(const time_fn& cpu_time, const time_fn& accel_time,
                                       std::uint64_t n_total);

/// Dispatches the first n_cpu seeds to the CPU and the rest to the
/// accelerator. Emulated mode runs the shares concurrently and reads the
/// real clock (overhead is slept off); Modeled mode runs them back to back
/// so the synthetic side's computation cannot contend with the measured CPU
/// share, and composes the wall as max(parts) + overhead. If one back-end
/// fails its variants are re-dispatched to the other and the result is
/// flagged degraded.
HybridResult run_hybrid(const AllocationPlan& plan, const BatchRequest& request,
                        batch_executor& cpu, batch_executor& accel,
                        double orchestration_overhead_s, ExecMode mode);

inline double naive_sum(double t_cpu_seq_s, double t_accel_seq_s) {
    if (t_cpu_seq_s < 0.0 || t_accel_seq_s < 0.0)
        throw std::invalid_argument("naive_sum: times must be >= 0");
    return t_cpu_seq_s + t_accel_seq_s;
}

/// "cpu=75 accel=25" — the plan line printed by the CLI.
std::string format_plan(const AllocationPlan& plan);

} // namespace hetbench

#endif
