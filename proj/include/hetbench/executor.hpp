#ifndef HETBENCH_EXECUTOR_HPP
#define HETBENCH_EXECUTOR_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hetbench/simkernel.hpp"

namespace hetbench {

struct BatchRequest {
    ModelKind kind = ModelKind::Box;
    std::vector<std::uint64_t> seeds; // non-empty, order defines result order
    std::uint64_t steps = 1;          // >= 1
};

struct TracePoint {
    double t = 0.0;           // seconds since batch start
    double utilization = 0.0; // percent, [0, 100]
};

struct BatchResult {
    std::vector<VariantResult> results; // same order as request seeds
    double wall_time_s = 0.0;
    std::vector<TracePoint> utilization_trace;
};

/// One or more variants blew up; the rest of the batch still completed.
class batch_failure : public std::runtime_error {
public:
    batch_failure(std::vector<std::pair<std::uint64_t, std::string>> failed,
                  std::vector<VariantResult> completed);

    const std::vector<std::pair<std::uint64_t, std::string>>& failed() const { return failed_; }
    const std::vector<VariantResult>& completed() const { return completed_; }

private:
    std::vector<std::pair<std::uint64_t, std::string>> failed_;
    std::vector<VariantResult> completed_;
};

/// Parameters of the saturated-accelerator timing law
///   T(N, S) = startup + S * step_wave_cost * ceil(N / capacity)
/// optionally scaled by a seeded jitter factor in [1, 1 + jitter_fraction).
struct DevicePerfModel {
    double startup_s = 0.5;
    std::uint64_t capacity = 1024; // variants per fully parallel wave
    double step_wave_cost_s = 1e-4;
    double jitter_fraction = 0.0; // in [0, 1)

    std::uint64_t waves(std::uint64_t n) const { return (n + capacity - 1) / capacity; }
    double modeled_time_s(std::uint64_t n, std::uint64_t steps) const;
    double modeled_utilization(std::uint64_t n) const;
};

enum class ExecMode { Modeled, Emulated };

const char* to_string(ExecMode mode);
ExecMode parse_exec_mode(const std::string& name);

/// Uniform batch-execution contract shared by the CPU back-end, the
/// synthetic accelerator and the scheduler's test stubs.
class batch_executor {
public:
    virtual ~batch_executor() = default;
    virtual BatchResult run(const BatchRequest& request) = 0;
    virtual std::string name() const = 0;
};

/// Multi-worker CPU executor. Seeds are split into contiguous chunks, one
/// per worker; results merge back in input order. workers = 0 means the
/// hardware thread count.
class cpu_executor : public batch_executor {
public:
    explicit cpu_executor(unsigned workers = 0, bool monitor = true)
        : workers_(workers), monitor_(monitor) {}

    BatchResult run(const BatchRequest& request) override;
    std::string name() const override { return "cpu"; }

    unsigned effective_workers(std::size_t n) const;

    // Test seam: replaces the per-variant kernel call.
    using simulate_fn = std::function<VariantResult(ModelKind, std::uint64_t, std::uint64_t)>;
    BatchResult run_with(const BatchRequest& request, const simulate_fn& fn);

private:
    unsigned workers_;
    bool monitor_;
};

/// Synthetic accelerator: computes every variant through the simulation
/// kernel (so results are bit-identical to the CPU path) and reports wall
/// time from the device law. Emulated mode also blocks for that long.
class synthetic_executor : public batch_executor {
public:
    synthetic_executor(DevicePerfModel model, ExecMode mode)
        : model_(model), mode_(mode) {}

    BatchResult run(const BatchRequest& request) override;
    std::string name() const override { return "accel"; }

    const DevicePerfModel& model() const { return model_; }
    ExecMode mode() const { return mode_; }

private:
    DevicePerfModel model_;
    ExecMode mode_;
};

BatchResult run_batch_cpu(const BatchRequest& request, unsigned workers);
BatchResult run_batch_synthetic(const BatchRequest& request, const DevicePerfModel& model,
                                ExecMode mode);

/// True iff the CPU and synthetic back-ends agree checksum-for-checksum.
bool executor_contract_check(ModelKind kind, std::span<const std::uint64_t> seeds,
                             std::uint64_t steps);

void validate_request(const BatchRequest& request);

} // namespace hetbench

#endif
