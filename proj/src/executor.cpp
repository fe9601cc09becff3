#include "hetbench/executor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "hetbench/monitor.hpp"
#include "hetbench/rng.hpp"

namespace hetbench {

namespace {

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string failure_message(const std::vector<std::pair<std::uint64_t, std::string>>& failed) {
    std::string msg = "batch failed for seed " + std::to_string(failed.front().first);
    if (failed.size() > 1)
        msg += " (+" + std::to_string(failed.size() - 1) + " more)";
    msg += ": " + failed.front().second;
    return msg;
}

} // namespace

batch_failure::batch_failure(std::vector<std::pair<std::uint64_t, std::string>> failed,
                             std::vector<VariantResult> completed)
    : std::runtime_error(failure_message(failed)),
      failed_(std::move(failed)),
      completed_(std::move(completed)) {}

const char* to_string(ExecMode mode) {
    return mode == ExecMode::Modeled ? "modeled" : "emulated";
}

ExecMode parse_exec_mode(const std::string& name) {
    if (name == "modeled") return ExecMode::Modeled;
    if (name == "emulated") return ExecMode::Emulated;
    throw std::invalid_argument("unknown execution mode: " + name);
}

double DevicePerfModel::modeled_time_s(std::uint64_t n, std::uint64_t steps) const {
    double t = startup_s + static_cast<double>(steps) * step_wave_cost_s *
                               static_cast<double>(waves(n));
    if (jitter_fraction > 0.0) {
        const std::uint64_t key = rng::at(0x6A09E667F3BCC909ull, n * 1000003ull + steps);
        t *= 1.0 + jitter_fraction * rng::to_unit(key);
    }
    return t;
}

double DevicePerfModel::modeled_utilization(std::uint64_t n) const {
    return std::min(100.0, 100.0 * static_cast<double>(n) / static_cast<double>(capacity));
}

void validate_request(const BatchRequest& request) {
    if (request.seeds.empty())
        throw std::invalid_argument("batch request: seeds must be non-empty");
    if (request.steps < 1)
        throw std::invalid_argument("batch request: steps must be >= 1");
}

unsigned cpu_executor::effective_workers(std::size_t n) const {
    unsigned w = workers_;
    if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(w, n));
}

BatchResult cpu_executor::run(const BatchRequest& request) {
    return run_with(request, [](ModelKind kind, std::uint64_t seed, std::uint64_t steps) {
        return simulate(kind, seed, steps);
    });
}

BatchResult cpu_executor::run_with(const BatchRequest& request, const simulate_fn& fn) {
    validate_request(request);
    const std::size_t n = request.seeds.size();
    const unsigned workers = effective_workers(n);

    std::vector<VariantResult> results(n);
    std::vector<char> ok(n, 0);
    std::mutex fail_mutex;
    std::vector<std::pair<std::uint64_t, std::string>> failed;

    UtilSampler sampler;
    if (monitor_) sampler.start();
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t chunk = n / workers;
    const std::size_t extra = n % workers;
    std::size_t begin = 0;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t end = begin + chunk + (w < extra ? 1 : 0);
        threads.emplace_back([&, begin, end] {
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    results[i] = fn(request.kind, request.seeds[i], request.steps);
                    ok[i] = 1;
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(fail_mutex);
                    failed.emplace_back(request.seeds[i], e.what());
                }
            }
        });
        begin = end;
    }
    for (std::thread& t : threads) t.join();

    const double wall = std::max(elapsed_s(t0), 1e-9);
    std::vector<TracePoint> trace;
    if (monitor_)
        for (const UtilizationSample& s : sampler.stop())
            trace.push_back({s.t, s.cpu_percent});

    if (!failed.empty()) {
        std::sort(failed.begin(), failed.end());
        std::vector<VariantResult> completed;
        completed.reserve(n - failed.size());
        for (std::size_t i = 0; i < n; ++i)
            if (ok[i]) completed.push_back(results[i]);
        throw batch_failure(std::move(failed), std::move(completed));
    }

    BatchResult out;
    out.results = std::move(results);
    out.wall_time_s = wall;
    out.utilization_trace = std::move(trace);
    return out;
}

BatchResult synthetic_executor::run(const BatchRequest& request) {
    validate_request(request);
    const std::size_t n = request.seeds.size();
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<VariantResult> results(n);
    std::vector<std::pair<std::uint64_t, std::string>> failed;
    std::vector<VariantResult> completed;
    for (std::size_t i = 0; i < n; ++i) {
        try {
            results[i] = simulate(request.kind, request.seeds[i], request.steps);
            completed.push_back(results[i]);
        } catch (const std::exception& e) {
            failed.emplace_back(request.seeds[i], e.what());
        }
    }
    if (!failed.empty()) throw batch_failure(std::move(failed), std::move(completed));

    const double modeled = model_.modeled_time_s(n, request.steps);
    double wall = modeled;
    if (mode_ == ExecMode::Emulated) {
        const double remaining = modeled - elapsed_s(t0);
        if (remaining > 0.0)
            std::this_thread::sleep_for(std::chrono::duration<double>(remaining));
        wall = elapsed_s(t0);
    }

    const double u = model_.modeled_utilization(n);
    BatchResult out;
    out.results = std::move(results);
    out.wall_time_s = std::max(wall, 1e-9);
    out.utilization_trace = {{0.0, u}, {wall, u}};
    return out;
}

BatchResult run_batch_cpu(const BatchRequest& request, unsigned workers) {
    cpu_executor exec(workers);
    return exec.run(request);
}

BatchResult run_batch_synthetic(const BatchRequest& request, const DevicePerfModel& model,
                                ExecMode mode) {
    synthetic_executor exec(model, mode);
    return exec.run(request);
}

bool executor_contract_check(ModelKind kind, std::span<const std::uint64_t> seeds,
                             std::uint64_t steps) {
    try {
        BatchRequest request{kind, {seeds.begin(), seeds.end()}, steps};
        cpu_executor cpu(2, /*monitor=*/false);
        synthetic_executor accel(DevicePerfModel{}, ExecMode::Modeled);
        const BatchResult a = cpu.run(request);
        const BatchResult b = accel.run(request);
        if (a.results.size() != b.results.size()) return false;
        for (std::size_t i = 0; i < a.results.size(); ++i)
            if (a.results[i].checksum != b.results[i].checksum) return false;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace hetbench
