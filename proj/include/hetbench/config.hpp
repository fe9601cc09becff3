#ifndef HETBENCH_CONFIG_HPP
#define HETBENCH_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetbench/executor.hpp"
#include "hetbench/records.hpp"

#include "json.hpp"

namespace hetbench {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything a sweep needs, loadable from TOML or JSON. Unknown keys are
/// rejected so a typo cannot silently fall back to a default.
struct SweepConfig {
    std::vector<ModelKind> models;
    std::map<ModelKind, std::vector<std::uint64_t>> variants_per_model;
    std::vector<std::uint64_t> steps_list;
    std::uint32_t repetitions = 1;
    std::vector<Strategy> strategies;
    DevicePerfModel device;
    unsigned workers = 0; // 0 = hardware thread count
    ExecMode mode = ExecMode::Modeled;
    std::map<ModelKind, std::uint64_t> max_variants_cap; // absent model = uncapped
    std::filesystem::path output_dir = "out";
    double orchestration_overhead_s = 0.0;
    std::uint64_t hybrid_probe_n = 0; // 0 = auto: largest variant count of the model
    bool monitor_enabled = true;
    bool emit_figures = true;
};

/// Parses the TOML subset used by the shipped configs: [table] headers
/// (dotted paths allowed), `key = value` with strings, booleans, integers,
/// floats and (possibly multi-line) arrays, and # comments.
nlohmann::json parse_toml_subset(const std::string& text);

/// Strict schema application; throws config_error on unknown keys, type
/// mismatches or invariant violations. Variant lists are truncated at
/// max_variants before validation.
SweepConfig sweep_config_from_json(const nlohmann::json& doc);

/// Dispatches on extension (.json / .toml), falling back to content
/// sniffing: a leading '{' means JSON.
SweepConfig load_sweep_config(const std::filesystem::path& path);

/// Drops variant counts above the per-model cap. Idempotent.
void truncate_to_caps(SweepConfig& config);

/// Invariant checks shared by file loading and programmatic construction.
void validate_config(const SweepConfig& config);

} // namespace hetbench

#endif
