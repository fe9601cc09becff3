#ifndef HETBENCH_FIGURES_HPP
#define HETBENCH_FIGURES_HPP

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hetbench/records.hpp"

namespace hetbench {

/// Renders the standard chart set from persisted rows, one file group per
/// model present in `records`:
///   <model>_wall_vs_n.svg        wall time vs variant count per strategy,
///                                95% CI bands, log-2 x axis
///   <model>_accel_wall_util.svg  accelerator wall time, points colored by
///                                mean utilization
///   <model>_combined_overlay.svg sequential / naive-sum / combined lines
///                                plus accel-fraction bars (omitted with a
///                                logged notice when no hybrid rows exist)
///   <model>_wall_vs_steps.svg    wall time vs steps (only when the rows
///                                span more than one steps value)
/// Each .svg gets a .csv sidecar holding exactly the aggregates the chart
/// plots (means and CI bounds from the shared summarize routine) — figures
/// never compute their own statistics. Charts aggregate rows at the largest
/// steps value present; the steps chart uses the largest variant count.
/// Error-marked rows are excluded from aggregation.
/// Returns the list of files written.
std::vector<std::filesystem::path>
emit_figures(const std::vector<RunRecord>& records, const std::filesystem::path& out_dir,
             const std::function<void(const std::string&)>& log = {});

} // namespace hetbench

#endif
