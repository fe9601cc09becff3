#include "hetbench/monitor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace hetbench {

namespace {

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const bool swap = x > (a + 1.0) / (a + b + 2.0);
    if (swap) return 1.0 - incomplete_beta(b, a, 1.0 - x);

    const double tiny = 1e-300;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double f = d;
    for (int m = 1; m <= 300; ++m) {
        const double dm = static_cast<double>(m);
        double num = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        f *= d * c;

        num = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-14) break;
    }
    return std::exp(ln_front) * f / a;
}

double student_t_cdf(double t, double df) {
    if (t == 0.0) return 0.5;
    const double x = df / (df + t * t);
    const double p = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
    return t > 0.0 ? 1.0 - p : p;
}

} // namespace

double student_t_critical_95(std::size_t df) {
    if (df == 0) return 0.0;
    const double nu = static_cast<double>(df);
    double lo = 0.0, hi = 1000.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, nu) < 0.975)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Stats summarize(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("summarize: empty input");
    Stats s;
    s.n = samples.size();

    double sum = 0.0;
    for (double v : samples) sum += v;
    s.mean = sum / static_cast<double>(s.n);

    if (s.n > 1) {
        double ss = 0.0;
        for (double v : samples) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
        const double half = student_t_critical_95(s.n - 1) * s.stddev /
                            std::sqrt(static_cast<double>(s.n));
        s.ci95_low = s.mean - half;
        s.ci95_high = s.mean + half;
    } else {
        s.stddev = 0.0;
        s.ci95_low = s.ci95_high = s.mean;
    }

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = 0.95 * static_cast<double>(s.n - 1);
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, s.n - 1);
    s.p95 = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    return s;
}

bool CpuSampler::read_counters(std::uint64_t& busy, std::uint64_t& total) {
    std::ifstream in("/proc/stat");
    if (!in) return false;
    std::string cpu;
    std::uint64_t user = 0, nice = 0, system = 0, idle = 0, iowait = 0, irq = 0,
                  softirq = 0, steal = 0;
    in >> cpu >> user >> nice >> system >> idle >> iowait >> irq >> softirq >> steal;
    if (!in || cpu != "cpu") return false;
    busy = user + nice + system + irq + softirq + steal;
    total = busy + idle + iowait;
    return true;
}

CpuSampler::CpuSampler() {
    available_ = read_counters(last_busy_, last_total_);
}

double CpuSampler::sample() {
    if (!available_) throw unsupported_platform("CPU accounting interface unavailable");
    std::uint64_t busy = 0, total = 0;
    if (!read_counters(busy, total))
        throw unsupported_platform("CPU accounting interface unavailable");
    const std::uint64_t db = busy - last_busy_;
    const std::uint64_t dt = total - last_total_;
    last_busy_ = busy;
    last_total_ = total;
    if (dt == 0) return 0.0;
    return std::clamp(100.0 * static_cast<double>(db) / static_cast<double>(dt), 0.0, 100.0);
}

double sample_system_cpu() {
    CpuSampler sampler;
    if (!sampler.available())
        throw unsupported_platform("CPU accounting interface unavailable");
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    return sampler.sample();
}

UtilSampler::~UtilSampler() {
    if (running_.load()) (void)stop();
}

void UtilSampler::start() {
    trace_.clear();
    t0_ = std::chrono::steady_clock::now();
    if (!cpu_.available()) return; // degrade to empty trace
    running_.store(true);
    thread_ = std::thread([this] { loop(); });
}

void UtilSampler::loop() {
    while (running_.load(std::memory_order_relaxed)) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50)); // 20 Hz
        if (!running_.load(std::memory_order_relaxed)) break;
        const double t = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0_).count();
        try {
            trace_.push_back({t, cpu_.sample(), 0.0});
        } catch (const unsupported_platform&) {
            break;
        }
    }
}

std::vector<UtilizationSample> UtilSampler::stop() {
    if (running_.exchange(false)) {
        if (thread_.joinable()) thread_.join();
        const double t = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0_).count();
        try {
            trace_.push_back({t, cpu_.sample(), 0.0});
        } catch (const unsupported_platform&) {
        }
    }
    return std::move(trace_);
}

KneeResult detect_saturation_knee(std::span<const KneePoint> points, double epsilon) {
    if (points.size() < 3)
        throw std::invalid_argument("detect_saturation_knee: need at least 3 points");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i].n_variants <= points[i - 1].n_variants)
            throw std::invalid_argument("detect_saturation_knee: n must be strictly increasing");

    double t_min = points[0].wall_s;
    for (const KneePoint& p : points) t_min = std::min(t_min, p.wall_s);
    const double threshold = (1.0 + epsilon) * t_min;

    std::size_t last_flat = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i].wall_s <= threshold) last_flat = i;

    if (last_flat == points.size() - 1) return {points.back().n_variants, KneeRegime::AllFlat};
    if (last_flat == 0) return {points.front().n_variants, KneeRegime::AllLinear};
    return {points[last_flat].n_variants, KneeRegime::Knee};
}

} // namespace hetbench
