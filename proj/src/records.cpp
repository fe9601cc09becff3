#include "hetbench/records.hpp"

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hetbench {
namespace {

std::string split_error(const std::string& line, const char* what) {
    return std::string("bad record line (") + what + "): " + line;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& s, const std::string& line) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw io_error(split_error(line, "float field"));
    return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& line) {
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw io_error(split_error(line, "integer field"));
    return v;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, mode);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    return out;
}

nlohmann::json to_json(const RunRecord& r) {
    return nlohmann::json{{"model", to_string(r.model)},
                          {"strategy", to_string(r.strategy)},
                          {"n_variants", r.n_variants},
                          {"steps", r.steps},
                          {"rep", r.rep},
                          {"wall_s", r.wall_s},
                          {"cpu_part_s", r.cpu_part_s},
                          {"accel_part_s", r.accel_part_s},
                          {"accel_fraction", r.accel_fraction},
                          {"cpu_util_mean", r.cpu_util_mean},
                          {"accel_util_mean", r.accel_util_mean},
                          {"degraded", r.degraded},
                          {"timestamp", r.timestamp}};
}

RunRecord from_json(const nlohmann::json& j) {
    RunRecord r;
    r.model = parse_model_kind(j.at("model").get<std::string>());
    r.strategy = parse_strategy(j.at("strategy").get<std::string>());
    r.n_variants = j.at("n_variants").get<std::uint64_t>();
    r.steps = j.at("steps").get<std::uint64_t>();
    r.rep = j.at("rep").get<std::uint32_t>();
    r.wall_s = j.at("wall_s").get<double>();
    r.cpu_part_s = j.at("cpu_part_s").get<double>();
    r.accel_part_s = j.at("accel_part_s").get<double>();
    r.accel_fraction = j.at("accel_fraction").get<double>();
    r.cpu_util_mean = j.at("cpu_util_mean").get<double>();
    r.accel_util_mean = j.at("accel_util_mean").get<double>();
    r.degraded = j.at("degraded").get<bool>();
    r.timestamp = j.at("timestamp").get<std::string>();
    return r;
}

} // namespace

std::string to_string(Strategy s) {
    switch (s) {
    case Strategy::CpuOnly: return "cpu";
    case Strategy::AccelOnly: return "accel";
    case Strategy::Hybrid: return "hybrid";
    }
    return "?";
}

Strategy parse_strategy(const std::string& name) {
    if (name == "cpu") return Strategy::CpuOnly;
    if (name == "accel") return Strategy::AccelOnly;
    if (name == "hybrid") return Strategy::Hybrid;
    throw std::invalid_argument("unknown strategy: " + name);
}

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string utc_timestamp_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string to_csv_line(const RunRecord& r) {
    std::ostringstream out;
    out << to_string(r.model) << ',' << to_string(r.strategy) << ',' << r.n_variants << ','
        << r.steps << ',' << r.rep << ',' << format_g6(r.wall_s) << ','
        << format_g6(r.cpu_part_s) << ',' << format_g6(r.accel_part_s) << ','
        << format_g6(r.accel_fraction) << ',' << format_g6(r.cpu_util_mean) << ','
        << format_g6(r.accel_util_mean) << ',' << (r.degraded ? 1 : 0) << ',' << r.timestamp;
    return out.str();
}

RunRecord parse_csv_line(const std::string& line) {
    std::vector<std::string> f = split_csv(line);
    if (f.size() != 13) throw io_error(split_error(line, "field count"));
    RunRecord r;
    try {
        r.model = parse_model_kind(f[0]);
        r.strategy = parse_strategy(f[1]);
    } catch (const std::invalid_argument& e) {
        throw io_error(split_error(line, e.what()));
    }
    r.n_variants = parse_u64(f[2], line);
    r.steps = parse_u64(f[3], line);
    r.rep = static_cast<std::uint32_t>(parse_u64(f[4], line));
    r.wall_s = parse_double(f[5], line);
    r.cpu_part_s = parse_double(f[6], line);
    r.accel_part_s = parse_double(f[7], line);
    r.accel_fraction = parse_double(f[8], line);
    r.cpu_util_mean = parse_double(f[9], line);
    r.accel_util_mean = parse_double(f[10], line);
    std::uint64_t degraded = parse_u64(f[11], line);
    if (degraded > 1) throw io_error(split_error(line, "degraded flag"));
    r.degraded = degraded == 1;
    r.timestamp = f[12];
    return r;
}

RunRecord csv_canonical(const RunRecord& r) {
    RunRecord c = r;
    auto round6 = [](double v) { return std::strtod(format_g6(v).c_str(), nullptr); };
    c.wall_s = round6(r.wall_s);
    c.cpu_part_s = round6(r.cpu_part_s);
    c.accel_part_s = round6(r.accel_part_s);
    c.accel_fraction = round6(r.accel_fraction);
    c.cpu_util_mean = round6(r.cpu_util_mean);
    c.accel_util_mean = round6(r.accel_util_mean);
    return c;
}

std::string record_key(const RunRecord& r) {
    std::ostringstream out;
    out << to_string(r.model) << '|' << to_string(r.strategy) << '|' << r.n_variants << '|'
        << r.steps << '|' << r.rep;
    return out.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
    std::ofstream out = open_out(path, std::ios::trunc);
    out << kCsvHeader << '\n';
    for (const RunRecord& r : records) out << to_csv_line(r) << '\n';
    out.flush();
    if (!out) throw io_error("write failed: " + path.string());
}

void append_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
    bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out = open_out(path, std::ios::app);
    if (fresh) out << kCsvHeader << '\n';
    for (const RunRecord& r : records) out << to_csv_line(r) << '\n';
    out.flush();
    if (!out) throw io_error("write failed: " + path.string());
}

std::vector<RunRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open for reading: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty results file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw io_error("unexpected header in " + path.string() + ": " + line);
    std::vector<RunRecord> out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        out.push_back(parse_csv_line(line));
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
    std::ofstream out = open_out(path, std::ios::trunc);
    for (const RunRecord& r : records) out << to_json(r).dump() << '\n';
    out.flush();
    if (!out) throw io_error("write failed: " + path.string());
}

void append_jsonl(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
    std::ofstream out = open_out(path, std::ios::app);
    for (const RunRecord& r : records) out << to_json(r).dump() << '\n';
    out.flush();
    if (!out) throw io_error("write failed: " + path.string());
}

std::vector<RunRecord> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open for reading: " + path.string());
    std::vector<RunRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw io_error(split_error(line, "json"));
        try {
            out.push_back(from_json(j));
        } catch (const nlohmann::json::exception& e) {
            throw io_error(split_error(line, e.what()));
        } catch (const std::invalid_argument& e) {
            throw io_error(split_error(line, e.what()));
        }
    }
    return out;
}

} // namespace hetbench
