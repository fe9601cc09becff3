#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hetbench/config.hpp"
#include "hetbench/ea.hpp"
#include "hetbench/figures.hpp"
#include "hetbench/monitor.hpp"
#include "hetbench/records.hpp"
#include "hetbench/scheduler.hpp"
#include "hetbench/sweep.hpp"

namespace {

std::atomic<bool> g_interrupt{false};

void handle_sigint(int) { g_interrupt.store(true); }

const std::vector<std::string> kModelNames = {"box", "box_and_ball", "arm_with_rope",
                                              "humanoid"};

std::vector<hetbench::RunRecord> load_records(const std::string& input) {
    if (input.size() >= 6 && input.ends_with(".jsonl")) return hetbench::read_jsonl(input);
    return hetbench::read_csv(input);
}

} // namespace

int main(int argc, char** argv) {
    using namespace hetbench;

    CLI::App app{"hetbench: batch simulation benchmarks across CPU and a synthetic "
                 "accelerator"};
    app.require_subcommand(1);

    // bench
    auto* bench = app.add_subcommand("bench", "run a sweep described by a config file");
    std::string config_path;
    bool resume = false;
    int b_workers = -1;
    int b_reps = -1;
    std::string b_mode, b_output_dir;
    bench->add_option("--config", config_path, "sweep config, TOML or JSON")->required();
    bench->add_flag("--resume", resume, "skip rows already present in results.csv");
    bench->add_option("--workers", b_workers, "override workers (0 = hardware threads)")
        ->check(CLI::NonNegativeNumber);
    bench->add_option("--repetitions", b_reps, "override repetitions")
        ->check(CLI::PositiveNumber);
    bench->add_option("--mode", b_mode, "override execution mode")
        ->check(CLI::IsMember({"modeled", "emulated"}));
    bench->add_option("--output_dir", b_output_dir, "override output directory");

    // hybrid
    auto* hybrid = app.add_subcommand("hybrid", "calibrate, split and run one batch on "
                                                "both back-ends");
    std::string h_model;
    std::uint64_t h_variants = 0, h_steps = 0, h_probe = 0, h_capacity = 1024;
    bool h_emulated = false;
    int h_workers = 0;
    double h_overhead = 0.0, h_startup = 0.5, h_wave_cost = 1e-4, h_jitter = 0.0;
    hybrid->add_option("--model", h_model, "simulation model")
        ->required()
        ->check(CLI::IsMember(kModelNames));
    hybrid->add_option("--variants", h_variants, "batch size")
        ->required()
        ->check(CLI::PositiveNumber);
    hybrid->add_option("--steps", h_steps, "simulation steps per variant")
        ->required()
        ->check(CLI::PositiveNumber);
    hybrid->add_flag("--emulated", h_emulated, "block in real time instead of reporting "
                                               "modeled timings");
    hybrid->add_option("--probe", h_probe, "calibration batch size (0 = --variants)");
    hybrid->add_option("--overhead", h_overhead, "orchestration overhead seconds")
        ->check(CLI::NonNegativeNumber);
    hybrid->add_option("--workers", h_workers, "CPU workers (0 = hardware threads)")
        ->check(CLI::NonNegativeNumber);
    hybrid->add_option("--startup_s", h_startup, "device startup seconds")
        ->check(CLI::NonNegativeNumber);
    hybrid->add_option("--capacity", h_capacity, "device variants per wave")
        ->check(CLI::PositiveNumber);
    hybrid->add_option("--step_wave_cost_s", h_wave_cost, "device seconds per step-wave");
    hybrid->add_option("--jitter_fraction", h_jitter, "device timing jitter in [0,1)");

    // ea
    auto* ea = app.add_subcommand("ea", "run the evolutionary-loop demo and print its "
                                        "phase profile");
    std::string e_model;
    std::uint64_t e_pop = 0, e_gens = 0, e_steps = 1000, e_seed = 0;
    int e_workers = 0;
    ea->add_option("--model", e_model, "simulation model")
        ->required()
        ->check(CLI::IsMember(kModelNames));
    ea->add_option("--pop", e_pop, "population size (even, >= 2)")
        ->required()
        ->check(CLI::PositiveNumber);
    ea->add_option("--gens", e_gens, "generations")->required()->check(CLI::PositiveNumber);
    ea->add_option("--steps", e_steps, "simulation steps per evaluation")
        ->check(CLI::PositiveNumber);
    ea->add_option("--workers", e_workers, "CPU workers (0 = hardware threads)")
        ->check(CLI::NonNegativeNumber);
    ea->add_option("--seed", e_seed, "population seed");

    // plot
    auto* plot = app.add_subcommand("plot", "re-emit figures from persisted results");
    std::string p_input, p_out = "figures";
    plot->add_option("--input", p_input, "results.csv or results.jsonl")->required();
    plot->add_option("--out", p_out, "output directory");

    // knee
    auto* knee = app.add_subcommand("knee", "detect the accelerator saturation point in "
                                            "persisted results");
    std::string k_input, k_model;
    std::uint64_t k_steps = 0;
    double k_epsilon = 0.05;
    knee->add_option("--input", k_input, "results.csv or results.jsonl")->required();
    knee->add_option("--model", k_model, "simulation model")
        ->required()
        ->check(CLI::IsMember(kModelNames));
    knee->add_option("--steps", k_steps, "steps value to analyze (0 = largest present)");
    knee->add_option("--epsilon", k_epsilon, "flatness tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    std::signal(SIGINT, handle_sigint);

    try {
        if (*bench) {
            SweepConfig cfg = load_sweep_config(config_path);
            if (const char* env = std::getenv("HETBENCH_OUT"); env && *env)
                cfg.output_dir = env;
            if (!b_output_dir.empty()) cfg.output_dir = b_output_dir;
            if (b_workers >= 0) cfg.workers = static_cast<unsigned>(b_workers);
            if (b_reps > 0) cfg.repetitions = static_cast<std::uint32_t>(b_reps);
            if (!b_mode.empty()) cfg.mode = parse_exec_mode(b_mode);
            validate_config(cfg);

            SweepHooks hooks;
            hooks.interrupt = &g_interrupt;
            std::uint64_t total = expected_row_count(cfg);
            std::uint64_t seen = 0;
            hooks.on_record = [&](const RunRecord& r) {
                ++seen;
                std::printf("[%llu/%llu] %s wall=%s s%s\n",
                            static_cast<unsigned long long>(seen),
                            static_cast<unsigned long long>(total), record_key(r).c_str(),
                            format_g6(r.wall_s).c_str(),
                            r.error() ? " (error)" : (r.degraded ? " (degraded)" : ""));
            };

            SweepOutcome out = run_sweep(cfg, resume, hooks);
            std::printf("rows_written=%llu rows_skipped=%llu error_rows=%llu "
                        "degraded_rows=%llu\n",
                        static_cast<unsigned long long>(out.rows_written),
                        static_cast<unsigned long long>(out.rows_skipped),
                        static_cast<unsigned long long>(out.error_rows),
                        static_cast<unsigned long long>(out.degraded_rows));
            std::printf("results: %s\n", out.csv_path.string().c_str());
            for (const auto& f : out.figure_files)
                std::printf("figure: %s\n", f.string().c_str());
            if (out.interrupted) {
                std::fprintf(stderr, "interrupted; partial results flushed\n");
                return 2;
            }
            return out.degraded_rows > 0 ? 3 : 0;
        }

        if (*hybrid) {
            ModelKind kind = parse_model_kind(h_model);
            DevicePerfModel device{h_startup, h_capacity, h_wave_cost, h_jitter};
            ExecMode mode = h_emulated ? ExecMode::Emulated : ExecMode::Modeled;
            cpu_executor cpu(static_cast<unsigned>(h_workers), true);
            synthetic_executor accel(device, mode);

            std::uint64_t probe = h_probe == 0 ? h_variants : h_probe;
            CalibrationProfile prof = calibrate(kind, h_steps, probe, cpu, accel);
            std::printf("calibration: probe_n=%llu t_cpu=%s s t_accel=%s s ratio=%s\n",
                        static_cast<unsigned long long>(prof.probe_n),
                        format_g6(prof.t_cpu_s).c_str(), format_g6(prof.t_accel_s).c_str(),
                        format_g6(prof.ratio_accel_over_cpu).c_str());

            AllocationPlan plan = plan_allocation(prof, h_variants);
            std::printf("plan: %s (accel_fraction=%s)\n", format_plan(plan).c_str(),
                        format_g6(plan.accel_fraction).c_str());

            BatchRequest request{kind, {}, h_steps};
            request.seeds.resize(h_variants);
            std::iota(request.seeds.begin(), request.seeds.end(), std::uint64_t{0});
            HybridResult res = run_hybrid(plan, request, cpu, accel, h_overhead, mode);
            std::printf("wall_combined=%s s cpu_part=%s s accel_part=%s s overhead=%s s\n",
                        format_g6(res.wall_combined_s).c_str(),
                        format_g6(res.t_cpu_part_s).c_str(),
                        format_g6(res.t_accel_part_s).c_str(),
                        format_g6(res.overhead_s).c_str());
            if (res.degraded) {
                std::printf("degraded: one back-end failed; its share was re-dispatched\n");
                return 3;
            }
            return 0;
        }

        if (*ea) {
            ModelKind kind = parse_model_kind(e_model);
            cpu_executor cpu(static_cast<unsigned>(e_workers), false);
            EaResult res = run_ea(kind, e_pop, e_gens, e_steps, cpu, e_seed);
            std::fputs(report_profile(res.profile).c_str(), stdout);
            std::printf("best_fitness=%.9g\n", res.best_fitness);
            std::printf("generation=%llu population=%zu\n",
                        static_cast<unsigned long long>(res.population.generation),
                        res.population.genomes.size());
            return 0;
        }

        if (*plot) {
            std::vector<RunRecord> records = load_records(p_input);
            std::vector<std::filesystem::path> files = emit_figures(records, p_out);
            for (const auto& f : files) std::printf("figure: %s\n", f.string().c_str());
            std::printf("wrote %zu files to %s\n", files.size(), p_out.c_str());
            return 0;
        }

        if (*knee) {
            ModelKind kind = parse_model_kind(k_model);
            std::vector<RunRecord> records = load_records(k_input);

            std::uint64_t steps = k_steps;
            if (steps == 0)
                for (const RunRecord& r : records)
                    if (r.model == kind && r.strategy == Strategy::AccelOnly && !r.error())
                        steps = std::max(steps, r.steps);

            std::map<std::uint64_t, std::vector<double>> walls;
            for (const RunRecord& r : records)
                if (r.model == kind && r.strategy == Strategy::AccelOnly && !r.error() &&
                    r.steps == steps)
                    walls[r.n_variants].push_back(r.wall_s);
            if (walls.size() < 3)
                throw std::runtime_error("knee needs at least 3 accel variant counts for " +
                                         std::string(to_string(kind)));

            std::vector<KneePoint> points;
            for (const auto& [n, w] : walls)
                points.push_back({n, summarize(w).mean});
            KneeResult kr = detect_saturation_knee(points, k_epsilon);
            const char* regime = kr.regime == KneeRegime::Knee        ? "knee"
                                 : kr.regime == KneeRegime::AllFlat   ? "all_flat"
                                                                      : "all_linear";
            std::printf("knee: n=%llu regime=%s model=%s steps=%llu\n",
                        static_cast<unsigned long long>(kr.n), regime, to_string(kind),
                        static_cast<unsigned long long>(steps));
            return 0;
        }
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
