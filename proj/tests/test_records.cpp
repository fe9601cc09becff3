#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hetbench/config.hpp"
#include "hetbench/records.hpp"
#include "hetbench/rng.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace hetbench;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test case, removed on destruction.
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("hetbench_records_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

RunRecord sample_record() {
    RunRecord r;
    r.model = ModelKind::BoxAndBall;
    r.strategy = Strategy::Hybrid;
    r.n_variants = 1024;
    r.steps = 1000;
    r.rep = 2;
    r.wall_s = 0.875;
    r.cpu_part_s = 0.5;
    r.accel_part_s = 0.75;
    r.accel_fraction = 0.53125;
    r.cpu_util_mean = 97.25;
    r.accel_util_mean = 100.0;
    r.degraded = false;
    r.timestamp = "2026-08-25T12:00:00Z";
    return r;
}

RunRecord random_record(std::uint64_t seed) {
    RngStream rs(seed);
    RunRecord r;
    r.model = kAllModels[static_cast<std::size_t>(rs.next_unit() * 3.999)];
    r.strategy = kAllStrategies[static_cast<std::size_t>(rs.next_unit() * 2.999)];
    r.n_variants = static_cast<std::uint64_t>(rs.next_unit() * 1e6);
    r.steps = 1 + static_cast<std::uint64_t>(rs.next_unit() * 1e4);
    r.rep = static_cast<std::uint32_t>(rs.next_unit() * 10.0);
    r.wall_s = rs.next_range(-1.0, 1e4);
    r.cpu_part_s = rs.next_range(0.0, 1e3);
    r.accel_part_s = rs.next_range(0.0, 1e-2);
    r.accel_fraction = rs.next_unit();
    r.cpu_util_mean = rs.next_range(0.0, 100.0);
    r.accel_util_mean = rs.next_range(0.0, 100.0);
    r.degraded = rs.next_unit() < 0.2;
    r.timestamp = "2026-08-25T08:30:00Z";
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("strategy names round-trip") {
    CHECK(to_string(Strategy::CpuOnly) == "cpu");
    CHECK(to_string(Strategy::AccelOnly) == "accel");
    CHECK(to_string(Strategy::Hybrid) == "hybrid");
    for (Strategy s : kAllStrategies) CHECK(parse_strategy(to_string(s)) == s);
    CHECK_THROWS_AS(parse_strategy("gpu"), std::invalid_argument);
}

TEST_CASE("csv header is the frozen schema") {
    CHECK(std::string(kCsvHeader) ==
          "model,strategy,n_variants,steps,rep,wall_s,cpu_part_s,accel_part_s,"
          "accel_fraction,cpu_util_mean,accel_util_mean,degraded,timestamp");
}

TEST_CASE("format_g6 renders six significant digits") {
    CHECK(format_g6(0.5) == "0.5");
    CHECK(format_g6(0.0001) == "0.0001");
    CHECK(format_g6(123456.7) == "123457");
    CHECK(format_g6(0.000123456789) == "0.000123457");
    CHECK(format_g6(-1.0) == "-1");
    CHECK(format_g6(0.0) == "0");
    CHECK(format_g6(10000000.0) == "1e+07");
}

TEST_CASE("utc timestamp shape") {
    const std::string t = utc_timestamp_now();
    REQUIRE(t.size() == 20);
    CHECK(t[4] == '-');
    CHECK(t[7] == '-');
    CHECK(t[10] == 'T');
    CHECK(t[13] == ':');
    CHECK(t[16] == ':');
    CHECK(t.back() == 'Z');
    CHECK(t.substr(0, 2) == "20");
}

TEST_CASE("csv line round-trip for a representative record") {
    const RunRecord r = sample_record();
    const std::string line = to_csv_line(r);
    CHECK(line ==
          "box_and_ball,hybrid,1024,1000,2,0.875,0.5,0.75,0.53125,97.25,100,0,"
          "2026-08-25T12:00:00Z");
    CHECK(parse_csv_line(line) == r);
}

TEST_CASE("csv line parsing is strict") {
    const std::string good = to_csv_line(sample_record());
    CHECK_THROWS_AS(parse_csv_line(good + ",extra"), io_error);
    CHECK_THROWS_AS(parse_csv_line(good.substr(0, good.rfind(','))), io_error);
    CHECK_THROWS_AS(parse_csv_line("nope,hybrid,1,1,0,1,0,0,0,0,0,0,t"), io_error);
    CHECK_THROWS_AS(parse_csv_line("box,warp,1,1,0,1,0,0,0,0,0,0,t"), io_error);
    CHECK_THROWS_AS(parse_csv_line("box,cpu,x,1,0,1,0,0,0,0,0,0,t"), io_error);
    CHECK_THROWS_AS(parse_csv_line("box,cpu,1,1,0,oops,0,0,0,0,0,0,t"), io_error);
    CHECK_THROWS_AS(parse_csv_line("box,cpu,1,1,0,1,0,0,0,0,0,2,t"), io_error);
}

TEST_CASE("error rows keep the -1 wall marker") {
    RunRecord r = sample_record();
    CHECK_FALSE(r.error());
    r.wall_s = kErrorWall;
    CHECK(r.error());
    const RunRecord back = parse_csv_line(to_csv_line(r));
    CHECK(back.wall_s == -1.0);
    CHECK(back.error());
}

TEST_CASE("record_key identifies a sweep cell") {
    CHECK(record_key(sample_record()) == "box_and_ball|hybrid|1024|1000|2");
}

TEST_CASE("write_csv emits header-only for no records and LF line endings") {
    TempDir tmp;
    const fs::path p = tmp.path / "results.csv";
    write_csv(p, {});
    const std::string content = read_file(p);
    CHECK(content == std::string(kCsvHeader) + "\n");
    CHECK(content.find('\r') == std::string::npos);
    CHECK(read_csv(p).empty());

    write_csv(p, {sample_record()});
    CHECK(read_file(p).find('\r') == std::string::npos);
    const std::vector<RunRecord> back = read_csv(p);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == sample_record());
}

TEST_CASE("append_csv writes the header exactly once") {
    TempDir tmp;
    const fs::path p = tmp.path / "results.csv";
    append_csv(p, {sample_record()});
    RunRecord second = sample_record();
    second.rep = 3;
    append_csv(p, {second});

    const std::vector<RunRecord> back = read_csv(p);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == sample_record());
    CHECK(back[1] == second);

    const std::string content = read_file(p);
    std::size_t headers = 0, pos = 0;
    while ((pos = content.find(kCsvHeader, pos)) != std::string::npos) {
        ++headers;
        pos += 1;
    }
    CHECK(headers == 1);
}

TEST_CASE("read_csv rejects foreign headers and missing files") {
    TempDir tmp;
    const fs::path p = tmp.path / "other.csv";
    std::ofstream(p) << "a,b,c\n1,2,3\n";
    CHECK_THROWS_AS(read_csv(p), io_error);
    CHECK_THROWS_AS(read_csv(tmp.path / "absent.csv"), io_error);

    const fs::path empty = tmp.path / "empty.csv";
    std::ofstream(empty).flush();
    CHECK_THROWS_AS(read_csv(empty), io_error);
}

TEST_CASE("read_csv tolerates CRLF input") {
    TempDir tmp;
    const fs::path p = tmp.path / "crlf.csv";
    std::ofstream(p, std::ios::binary)
        << kCsvHeader << "\r\n" << to_csv_line(sample_record()) << "\r\n";
    const std::vector<RunRecord> back = read_csv(p);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == sample_record());
}

TEST_CASE("canonicalized records survive the csv round-trip exactly") {
    TempDir tmp;
    const fs::path p = tmp.path / "prop.csv";
    std::vector<RunRecord> canon;
    canon.reserve(1000);
    for (std::uint64_t i = 0; i < 1000; ++i) canon.push_back(csv_canonical(random_record(i)));
    write_csv(p, canon);
    const std::vector<RunRecord> back = read_csv(p);
    REQUIRE(back.size() == canon.size());
    for (std::size_t i = 0; i < canon.size(); ++i) {
        CAPTURE(i);
        CHECK(back[i] == canon[i]);
    }
    // csv_canonical is idempotent.
    for (std::size_t i = 0; i < 50; ++i) CHECK(csv_canonical(canon[i]) == canon[i]);
}

TEST_CASE("jsonl round-trips exact doubles without canonicalization") {
    TempDir tmp;
    const fs::path p = tmp.path / "results.jsonl";
    std::vector<RunRecord> records;
    for (std::uint64_t i = 0; i < 200; ++i) records.push_back(random_record(i));
    records[0].wall_s = 1.0 / 3.0;
    records[1].accel_fraction = 0.1 + 0.2; // not exactly 0.3

    write_jsonl(p, records);
    const std::vector<RunRecord> back = read_jsonl(p);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CAPTURE(i);
        CHECK(back[i] == records[i]);
    }

    RunRecord extra = sample_record();
    extra.rep = 9;
    append_jsonl(p, {extra});
    CHECK(read_jsonl(p).size() == records.size() + 1);

    const fs::path bad = tmp.path / "bad.jsonl";
    std::ofstream(bad) << "{not json}\n";
    CHECK_THROWS_AS(read_jsonl(bad), io_error);
}

TEST_CASE("toml subset parser handles the shipped syntax") {
    const std::string text = R"(# comment at the top
title = "sweep \"demo\""   # trailing comment
count = 1_024
ratio = 2.5e-1
flag = true
other = false

values = [1, 2,
          3,   # continues across lines
          4]

[device]
startup_s = 0.5

[nested.caps]
humanoid = 32768
)";
    const nlohmann::json doc = parse_toml_subset(text);
    CHECK(doc.at("title").get<std::string>() == "sweep \"demo\"");
    CHECK(doc.at("count").get<std::uint64_t>() == 1024);
    CHECK(doc.at("ratio").get<double>() == 0.25);
    CHECK(doc.at("flag").get<bool>() == true);
    CHECK(doc.at("other").get<bool>() == false);
    CHECK(doc.at("values") == nlohmann::json({1, 2, 3, 4}));
    CHECK(doc.at("device").at("startup_s").get<double>() == 0.5);
    CHECK(doc.at("nested").at("caps").at("humanoid").get<std::uint64_t>() == 32768);
}

TEST_CASE("toml subset parser reports duplicates and syntax errors with line numbers") {
    CHECK_THROWS_AS(parse_toml_subset("a = 1\na = 2\n"), config_error);
    try {
        parse_toml_subset("a = 1\na = 2\n");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_toml_subset("a 1\n"), config_error);
    CHECK_THROWS_AS(parse_toml_subset("a = [1, 2\n"), config_error);
    CHECK_THROWS_AS(parse_toml_subset("a = \"unterminated\n"), config_error);
}

TEST_CASE("sweep config from json: defaults and required keys") {
    nlohmann::json doc = {
        {"models", {"box"}},
        {"steps_list", {100}},
        {"strategies", {"cpu"}},
        {"variants", {{"box", {32, 64}}}},
    };
    const SweepConfig c = sweep_config_from_json(doc);
    CHECK(c.models == std::vector<ModelKind>{ModelKind::Box});
    CHECK(c.steps_list == std::vector<std::uint64_t>{100});
    CHECK(c.strategies == std::vector<Strategy>{Strategy::CpuOnly});
    CHECK(c.variants_per_model.at(ModelKind::Box) == std::vector<std::uint64_t>{32, 64});
    CHECK(c.repetitions == 1);
    CHECK(c.workers == 0);
    CHECK(c.mode == ExecMode::Modeled);
    CHECK(c.device.capacity == 1024);
    CHECK(c.output_dir == fs::path("out"));
    CHECK(c.hybrid_probe_n == 0);
    CHECK(c.monitor_enabled);
    CHECK(c.emit_figures);

    for (const char* missing : {"models", "steps_list", "strategies", "variants"}) {
        nlohmann::json broken = doc;
        broken.erase(missing);
        CAPTURE(missing);
        CHECK_THROWS_AS(sweep_config_from_json(broken), config_error);
    }
}

TEST_CASE("sweep config rejects unknown keys at every level") {
    nlohmann::json doc = {
        {"models", {"box"}},
        {"steps_list", {100}},
        {"strategies", {"cpu"}},
        {"variants", {{"box", {32}}}},
    };
    nlohmann::json bad = doc;
    bad["typo_key"] = 1;
    CHECK_THROWS_AS(sweep_config_from_json(bad), config_error);

    bad = doc;
    bad["device"] = {{"startup_s", 0.5}, {"warp_factor", 9}};
    CHECK_THROWS_AS(sweep_config_from_json(bad), config_error);

    bad = doc;
    bad["variants"]["not_a_model"] = {32};
    CHECK_THROWS_AS(sweep_config_from_json(bad), config_error);

    bad = doc;
    bad["max_variants"] = {{"not_a_model", 10}};
    CHECK_THROWS_AS(sweep_config_from_json(bad), config_error);

    bad = doc;
    bad["mode"] = "quantum";
    CHECK_THROWS_AS(sweep_config_from_json(bad), config_error);
}

TEST_CASE("caps truncate variant lists before validation") {
    nlohmann::json doc = {
        {"models", {"humanoid"}},
        {"steps_list", {100}},
        {"strategies", {"cpu"}},
        {"variants", {{"humanoid", {32, 1024, 32768, 65536, 131072}}}},
        {"max_variants", {{"humanoid", 32768}}},
    };
    SweepConfig c = sweep_config_from_json(doc);
    CHECK(c.variants_per_model.at(ModelKind::Humanoid) ==
          std::vector<std::uint64_t>{32, 1024, 32768});

    truncate_to_caps(c); // idempotent
    CHECK(c.variants_per_model.at(ModelKind::Humanoid) ==
          std::vector<std::uint64_t>{32, 1024, 32768});
}

TEST_CASE("validate_config rejects bad shapes") {
    nlohmann::json doc = {
        {"models", {"box"}},
        {"steps_list", {100, 1000}},
        {"strategies", {"cpu", "hybrid"}},
        {"variants", {{"box", {32, 64}}}},
    };
    CHECK_NOTHROW(sweep_config_from_json(doc));

    auto expect_bad = [&doc](const char* key, nlohmann::json value) {
        nlohmann::json bad = doc;
        bad[key] = std::move(value);
        CAPTURE(key);
        CHECK_THROWS_AS(sweep_config_from_json(bad), config_error);
    };
    expect_bad("models", nlohmann::json::array());
    expect_bad("models", {"box", "box"});
    expect_bad("steps_list", {1000, 100});
    expect_bad("steps_list", {100, 100});
    expect_bad("strategies", {"cpu", "cpu"});
    expect_bad("repetitions", 0);
    expect_bad("variants", {{"box", {64, 32}}});
    expect_bad("variants", {{"box", nlohmann::json::array()}});
    expect_bad("device", {{"capacity", 0}});
    expect_bad("device", {{"step_wave_cost_s", 0.0}});
    expect_bad("device", {{"jitter_fraction", 1.0}});
    expect_bad("device", {{"jitter_fraction", -0.1}});
    expect_bad("orchestration_overhead_s", -1.0);

    // A model listed in 'models' needs a variants entry.
    nlohmann::json missing = doc;
    missing["models"] = {"box", "humanoid"};
    CHECK_THROWS_AS(sweep_config_from_json(missing), config_error);
}

TEST_CASE("load_sweep_config dispatches on extension and sniffs JSON") {
    TempDir tmp;
    const std::string toml = R"(models = ["box"]
steps_list = [50]
strategies = ["cpu", "accel"]
repetitions = 2

[variants]
box = [8, 16]
)";
    const fs::path tp = tmp.path / "cfg.toml";
    std::ofstream(tp) << toml;
    SweepConfig c = load_sweep_config(tp);
    CHECK(c.repetitions == 2);
    CHECK(c.strategies.size() == 2);

    const std::string json = R"({"models":["box"],"steps_list":[50],
      "strategies":["cpu"],"variants":{"box":[8]}})";
    const fs::path jp = tmp.path / "cfg.json";
    std::ofstream(jp) << json;
    c = load_sweep_config(jp);
    CHECK(c.models.size() == 1);

    const fs::path np = tmp.path / "cfg.conf"; // no known extension: sniff
    std::ofstream(np) << json;
    c = load_sweep_config(np);
    CHECK(c.models.size() == 1);

    CHECK_THROWS_AS(load_sweep_config(tmp.path / "missing.toml"), config_error);
}

TEST_CASE("shipped configs load and match their declared shape") {
    const fs::path dir = HETBENCH_CONFIG_DIR;

    const SweepConfig grid = load_sweep_config(dir / "full_grid.toml");
    CHECK(grid.models.size() == 4);
    CHECK(grid.steps_list == std::vector<std::uint64_t>{1000});
    CHECK(grid.repetitions == 3);
    CHECK(grid.strategies.size() == 3);
    CHECK(grid.device.capacity == 1024);
    CHECK(grid.hybrid_probe_n == 1024);
    const auto& box = grid.variants_per_model.at(ModelKind::Box);
    CHECK(box.size() == 14);
    CHECK(std::find(box.begin(), box.end(), 2056) != box.end()); // deliberate: not 2048
    CHECK(grid.variants_per_model.at(ModelKind::Humanoid).back() == 32768);
    CHECK(grid.max_variants_cap.at(ModelKind::Humanoid) == 32768);

    const SweepConfig desk = load_sweep_config(dir / "desk_scale.toml");
    CHECK(desk.models.size() == 2);
    CHECK(desk.steps_list.size() == 2);
}
