#include "hetbench/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <optional>
#include <thread>

namespace hetbench {

namespace {

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

BatchRequest probe_request(ModelKind kind, std::uint64_t steps, std::uint64_t probe_n) {
    BatchRequest r;
    r.kind = kind;
    r.steps = steps;
    r.seeds.resize(probe_n);
    std::iota(r.seeds.begin(), r.seeds.end(), std::uint64_t{0});
    return r;
}

} // namespace

CalibrationProfile calibrate(ModelKind kind, std::uint64_t steps, std::uint64_t probe_n,
                             batch_executor& cpu, batch_executor& accel) {
    if (probe_n < 1) throw std::invalid_argument("calibrate: probe_n must be >= 1");

    CalibrationProfile p;
    p.kind = kind;
    p.steps = steps;
    p.probe_n = probe_n;

    const BatchRequest request = probe_request(kind, steps, probe_n);
    try {
        p.t_cpu_s = cpu.run(request).wall_time_s;
    } catch (const std::exception&) {
        p.cpu_ok = false;
    }
    try {
        p.t_accel_s = accel.run(request).wall_time_s;
    } catch (const std::exception&) {
        p.accel_ok = false;
    }

    if (!p.cpu_ok && !p.accel_ok)
        throw std::runtime_error("calibrate: both back-ends failed");
    if (p.cpu_ok && p.accel_ok)
        p.ratio_accel_over_cpu = p.t_accel_s / p.t_cpu_s;
    return p;
}

AllocationPlan plan_allocation(const CalibrationProfile& profile, std::uint64_t n_total) {
    if (n_total < 1) throw std::invalid_argument("plan_allocation: n_total must be >= 1");

    AllocationPlan plan;
    plan.n_total = n_total;

    if (!profile.accel_ok) {
        plan.n_accel = 0;
    } else if (!profile.cpu_ok) {
        plan.n_accel = n_total;
        plan.requested_accel_fraction = 1.0;
    } else {
        const double f = profile.t_cpu_s / (profile.t_cpu_s + profile.t_accel_s);
        plan.requested_accel_fraction = f;
        auto n_accel = static_cast<std::uint64_t>(
            std::llround(f * static_cast<double>(n_total)));
        n_accel = std::min(n_accel, n_total);
        // Floor rule: a share at or above half a variant's worth is never
        // rounded away entirely.
        const double floor_threshold = 1.0 / (2.0 * static_cast<double>(n_total));
        if (n_accel == 0 && f >= floor_threshold) n_accel = 1;
        if (n_accel == n_total && (1.0 - f) >= floor_threshold) n_accel = n_total - 1;
        plan.n_accel = n_accel;
    }

    plan.n_cpu = n_total - plan.n_accel;
    plan.accel_fraction =
        static_cast<double>(plan.n_accel) / static_cast<double>(n_total);
    return plan;
}

AllocationPlan plan_allocation_optimal(const time_fn& cpu_time, const time_fn& accel_time,
                                       std::uint64_t n_total) {
    if (n_total < 1)
        throw std::invalid_argument("plan_allocation_optimal: n_total must be >= 1");

    std::uint64_t best_k = 0;
    double best_cost = std::max(cpu_time(n_total), accel_time(0));
    for (std::uint64_t k = 1; k <= n_total; ++k) {
        const double cost = std::max(cpu_time(n_total - k), accel_time(k));
        if (cost < best_cost) {
            best_cost = cost;
            best_k = k;
        }
    }

    AllocationPlan plan;
    plan.n_total = n_total;
    plan.n_accel = best_k;
    plan.n_cpu = n_total - best_k;
    plan.accel_fraction = static_cast<double>(best_k) / static_cast<double>(n_total);
    plan.requested_accel_fraction = plan.accel_fraction;
    return plan;
}

HybridResult run_hybrid(const AllocationPlan& plan, const BatchRequest& request,
                        batch_executor& cpu, batch_executor& accel,
                        double orchestration_overhead_s, ExecMode mode) {
    validate_request(request);
    if (plan.n_total != request.seeds.size())
        throw std::invalid_argument("run_hybrid: plan size does not match request");
    if (orchestration_overhead_s < 0.0)
        throw std::invalid_argument("run_hybrid: overhead must be >= 0");

    BatchRequest cpu_req{request.kind,
                         {request.seeds.begin(), request.seeds.begin() + plan.n_cpu},
                         request.steps};
    BatchRequest accel_req{request.kind,
                           {request.seeds.begin() + plan.n_cpu, request.seeds.end()},
                           request.steps};

    std::optional<BatchResult> cpu_res, accel_res;
    std::exception_ptr cpu_err, accel_err;

    const auto run_cpu_part = [&] {
        try {
            cpu_res = cpu.run(cpu_req);
        } catch (...) {
            cpu_err = std::current_exception();
        }
    };
    const auto run_accel_part = [&] {
        try {
            accel_res = accel.run(accel_req);
        } catch (...) {
            accel_err = std::current_exception();
        }
    };

    const auto t0 = std::chrono::steady_clock::now();
    if (mode == ExecMode::Emulated) {
        // Concurrency-faithful: both shares race on the real clock.
        std::thread accel_thread;
        if (plan.n_accel > 0) accel_thread = std::thread(run_accel_part);
        if (plan.n_cpu > 0) run_cpu_part();
        if (accel_thread.joinable()) accel_thread.join();
    } else {
        // Modeled walls are composed, not raced, so the CPU share must be
        // measured without the synthetic back-end's variant computation
        // competing for cores.
        if (plan.n_cpu > 0) run_cpu_part();
        if (plan.n_accel > 0) run_accel_part();
    }

    bool degraded = false;
    if (cpu_err && accel_err) std::rethrow_exception(cpu_err);
    if (cpu_err) { // re-dispatch the CPU share to the surviving accelerator
        degraded = true;
        BatchResult redo = accel.run(cpu_req);
        if (!accel_res) {
            accel_res = std::move(redo);
        } else {
            accel_res->results.insert(accel_res->results.begin(), redo.results.begin(),
                                      redo.results.end());
        }
    }
    if (accel_err) {
        degraded = true;
        BatchResult redo = cpu.run(accel_req);
        if (!cpu_res) {
            cpu_res = std::move(redo);
        } else {
            cpu_res->results.insert(cpu_res->results.end(), redo.results.begin(),
                                    redo.results.end());
        }
    }

    HybridResult out;
    out.plan = plan;
    out.overhead_s = orchestration_overhead_s;
    out.degraded = degraded;
    out.t_cpu_part_s = (cpu_res && !cpu_err) ? cpu_res->wall_time_s : 0.0;
    out.t_accel_part_s = (accel_res && !accel_err) ? accel_res->wall_time_s : 0.0;

    if (mode == ExecMode::Emulated) {
        std::this_thread::sleep_for(std::chrono::duration<double>(orchestration_overhead_s));
        out.wall_combined_s = elapsed_s(t0);
    } else {
        // The synthetic device reports modeled time without blocking, so the
        // combined wall is composed rather than read from the clock.
        out.wall_combined_s =
            std::max(out.t_cpu_part_s, out.t_accel_part_s) + orchestration_overhead_s;
    }

    out.merged.reserve(request.seeds.size());
    if (cpu_res)
        out.merged.insert(out.merged.end(), cpu_res->results.begin(), cpu_res->results.end());
    if (accel_res)
        out.merged.insert(out.merged.end(), accel_res->results.begin(),
                          accel_res->results.end());
    if (cpu_res) out.cpu_result = std::move(*cpu_res);
    if (accel_res) out.accel_result = std::move(*accel_res);
    return out;
}

std::string format_plan(const AllocationPlan& plan) {
    return "cpu=" + std::to_string(plan.n_cpu) + " accel=" + std::to_string(plan.n_accel);
}

} // namespace hetbench
