#ifndef HETBENCH_RECORDS_HPP
#define HETBENCH_RECORDS_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetbench/simkernel.hpp"

namespace hetbench {

enum class Strategy { CpuOnly, AccelOnly, Hybrid };

inline constexpr Strategy kAllStrategies[] = {Strategy::CpuOnly, Strategy::AccelOnly,
                                              Strategy::Hybrid};

std::string to_string(Strategy s); // "cpu" / "accel" / "hybrid"
Strategy parse_strategy(const std::string& name);

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Marker wall value for cells that failed; the row is still emitted so a
/// resumed sweep does not retry it silently.
inline constexpr double kErrorWall = -1.0;

/// One persisted measurement row: a single (model, strategy, n, steps, rep)
/// cell of a sweep.
struct RunRecord {
    ModelKind model = ModelKind::Box;
    Strategy strategy = Strategy::CpuOnly;
    std::uint64_t n_variants = 0;
    std::uint64_t steps = 0;
    std::uint32_t rep = 0;
    double wall_s = 0.0;
    double cpu_part_s = 0.0;
    double accel_part_s = 0.0;
    double accel_fraction = 0.0;
    double cpu_util_mean = 0.0;
    double accel_util_mean = 0.0;
    bool degraded = false;
    std::string timestamp; // ISO-8601 UTC, second resolution

    bool error() const { return wall_s < 0.0; }
    bool operator==(const RunRecord&) const = default;
};

/// The CSV schema is a stable contract; readers reject anything else.
inline constexpr char kCsvHeader[] =
    "model,strategy,n_variants,steps,rep,wall_s,cpu_part_s,accel_part_s,"
    "accel_fraction,cpu_util_mean,accel_util_mean,degraded,timestamp";

/// Shortest decimal rendering with 6 significant digits (printf %.6g).
std::string format_g6(double v);

std::string utc_timestamp_now();

std::string to_csv_line(const RunRecord& r);
RunRecord parse_csv_line(const std::string& line);

/// Rounds every float field through the 6-digit CSV rendering, so the
/// result survives write_csv/read_csv bit-exactly.
RunRecord csv_canonical(const RunRecord& r);

/// "model|strategy|n|steps|rep" — identity of a row, used for resume.
std::string record_key(const RunRecord& r);

// Whole-file writers truncate; append_* create the file (and header, for
// CSV) on first use and flush after every batch so a crash loses at most
// the row being written.
void write_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);
void append_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_csv(const std::filesystem::path& path);

// JSON-lines mirror of the CSV with exact (round-trip) doubles.
void write_jsonl(const std::filesystem::path& path, const std::vector<RunRecord>& records);
void append_jsonl(const std::filesystem::path& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_jsonl(const std::filesystem::path& path);

} // namespace hetbench

#endif
