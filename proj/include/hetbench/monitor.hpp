#ifndef HETBENCH_MONITOR_HPP
#define HETBENCH_MONITOR_HPP

#include <atomic>
#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace hetbench {

struct UtilizationSample {
    double t = 0.0;             // seconds since run start
    double cpu_percent = 0.0;   // [0, 100]
    double accel_percent = 0.0; // [0, 100], device self-report
};

struct Stats {
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation (n-1 denominator)
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    double p95 = 0.0;

    // Percentiles from 3 repetitions are interpolation, not estimation;
    // consumers flag such rows in output metadata.
    bool small_sample() const { return n < 20; }
};

class unsupported_platform : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two-sided 95% Student-t critical value for `df` degrees of freedom
/// (df = 2 gives 4.303). df = 0 returns 0.
double student_t_critical_95(std::size_t df);

/// Mean, sample stddev, Student-t CI95 and interpolated p95.
/// Throws std::invalid_argument on empty input.
Stats summarize(std::span<const double> samples);

/// Instantaneous whole-system CPU utilization in [0, 100] from the OS
/// CPU accounting (short paired read). Throws unsupported_platform where
/// the interface is missing.
double sample_system_cpu();

/// Incremental /proc/stat reader: each sample() reports busy share since
/// the previous call. available() is false on unsupported platforms.
class CpuSampler {
public:
    CpuSampler();
    bool available() const { return available_; }
    double sample();

private:
    bool read_counters(std::uint64_t& busy, std::uint64_t& total);
    bool available_ = false;
    std::uint64_t last_busy_ = 0;
    std::uint64_t last_total_ = 0;
};

/// Background utilization sampler running at >= 10 Hz for the duration of a
/// batch. Degrades to an empty trace when the platform interface is missing.
class UtilSampler {
public:
    ~UtilSampler();
    void start();
    /// Stops the cadence, takes one final synchronized sample and returns
    /// the trace. Sample times are seconds since start().
    std::vector<UtilizationSample> stop();

private:
    void loop();
    std::thread thread_;
    std::atomic<bool> running_{false};
    CpuSampler cpu_;
    std::vector<UtilizationSample> trace_;
    std::chrono::steady_clock::time_point t0_;
};

enum class KneeRegime { Knee, AllFlat, AllLinear };

struct KneePoint {
    std::uint64_t n_variants = 0;
    double wall_s = 0.0;
};

struct KneeResult {
    std::uint64_t n = 0; // empirical capacity estimate (or sentinel)
    KneeRegime regime = KneeRegime::Knee;
};

/// Finds the largest n whose wall time stays within (1 + epsilon) of the
/// flat-prefix minimum. All-flat and all-linear series return the last and
/// first n respectively with the matching regime flag.
KneeResult detect_saturation_knee(std::span<const KneePoint> points, double epsilon = 0.05);

} // namespace hetbench

#endif
