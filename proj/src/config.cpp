#include "hetbench/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace hetbench {
namespace {

using nlohmann::json;

[[noreturn]] void fail(int line, const std::string& msg) {
    throw config_error("config line " + std::to_string(line) + ": " + msg);
}

bool bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

// --- TOML subset -----------------------------------------------------------
//
// Pass 1 folds multi-line arrays onto one logical line and strips comments;
// pass 2 is a plain line-oriented parser with a cursor-based value scanner.

std::string normalize(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool in_string = false;
    int bracket_depth = 0;
    int line = 1;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\' && i + 1 < text.size()) {
                out += c;
                out += text[++i];
                continue;
            }
            if (c == '\n') fail(line, "unterminated string");
            if (c == '"') in_string = false;
            out += c;
            continue;
        }
        switch (c) {
        case '"': in_string = true; out += c; break;
        case '#':
            while (i + 1 < text.size() && text[i + 1] != '\n') ++i;
            break;
        case '[': ++bracket_depth; out += c; break;
        case ']':
            if (bracket_depth > 0) --bracket_depth;
            out += c;
            break;
        case '\n':
            ++line;
            out += bracket_depth > 0 ? ' ' : '\n';
            break;
        default: out += c; break;
        }
    }
    if (in_string) fail(line, "unterminated string");
    return out;
}

struct Cursor {
    const std::string& s;
    std::size_t i = 0;
    int line;

    bool done() const { return i >= s.size(); }
    char peek() const { return done() ? '\0' : s[i]; }
    void skip_ws() {
        while (!done() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
};

std::string parse_basic_string(Cursor& c) {
    ++c.i; // opening quote
    std::string out;
    while (!c.done() && c.peek() != '"') {
        char ch = c.s[c.i++];
        if (ch == '\\') {
            if (c.done()) fail(c.line, "dangling escape");
            char e = c.s[c.i++];
            switch (e) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            default: fail(c.line, std::string("unsupported escape \\") + e);
            }
        } else {
            out += ch;
        }
    }
    if (c.done()) fail(c.line, "unterminated string");
    ++c.i; // closing quote
    return out;
}

json parse_value(Cursor& c);

json parse_array(Cursor& c) {
    ++c.i; // '['
    json arr = json::array();
    while (true) {
        c.skip_ws();
        if (c.peek() == ']') {
            ++c.i;
            return arr;
        }
        if (c.done()) fail(c.line, "unterminated array");
        arr.push_back(parse_value(c));
        c.skip_ws();
        if (c.peek() == ',') {
            ++c.i;
            continue;
        }
        if (c.peek() == ']') {
            ++c.i;
            return arr;
        }
        fail(c.line, "expected ',' or ']' in array");
    }
}

json parse_scalar_token(Cursor& c) {
    std::size_t start = c.i;
    while (!c.done()) {
        char ch = c.peek();
        if (ch == ' ' || ch == '\t' || ch == ',' || ch == ']') break;
        ++c.i;
    }
    std::string tok = c.s.substr(start, c.i - start);
    if (tok.empty()) fail(c.line, "expected a value");
    if (tok == "true") return true;
    if (tok == "false") return false;

    std::string digits;
    digits.reserve(tok.size());
    for (char ch : tok)
        if (ch != '_') digits += ch;

    bool integral = !digits.empty();
    for (std::size_t k = 0; k < digits.size(); ++k) {
        char ch = digits[k];
        if (k == 0 && (ch == '+' || ch == '-')) continue;
        if (!std::isdigit(static_cast<unsigned char>(ch))) {
            integral = false;
            break;
        }
    }
    if (integral && digits != "+" && digits != "-") {
        errno = 0;
        char* end = nullptr;
        long long v = std::strtoll(digits.c_str(), &end, 10);
        if (errno == ERANGE || *end != '\0') fail(c.line, "integer out of range: " + tok);
        return v;
    }
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(digits.c_str(), &end);
    if (end == digits.c_str() || *end != '\0' || errno == ERANGE)
        fail(c.line, "bad value: " + tok);
    return v;
}

json parse_value(Cursor& c) {
    c.skip_ws();
    char ch = c.peek();
    if (ch == '"') return parse_basic_string(c);
    if (ch == '[') return parse_array(c);
    return parse_scalar_token(c);
}

std::string parse_key(Cursor& c) {
    c.skip_ws();
    if (c.peek() == '"') return parse_basic_string(c);
    std::size_t start = c.i;
    while (!c.done() && bare_key_char(c.peek())) ++c.i;
    if (c.i == start) fail(c.line, "expected a key");
    return c.s.substr(start, c.i - start);
}

std::vector<std::string> parse_table_path(const std::string& body, int line) {
    std::vector<std::string> path;
    Cursor c{body, 0, line};
    while (true) {
        path.push_back(parse_key(c));
        c.skip_ws();
        if (c.done()) return path;
        if (c.peek() != '.') fail(line, "bad table header");
        ++c.i;
    }
}

} // namespace

nlohmann::json parse_toml_subset(const std::string& text) {
    json root = json::object();
    json* table = &root;

    std::istringstream in(normalize(text));
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view sv(raw);
        while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
        while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' || sv.back() == '\r'))
            sv.remove_suffix(1);
        if (sv.empty()) continue;

        if (sv.front() == '[') {
            if (sv.back() != ']') fail(line, "bad table header");
            std::string body(sv.substr(1, sv.size() - 2));
            table = &root;
            for (const std::string& part : parse_table_path(body, line)) {
                json& next = (*table)[part];
                if (next.is_null()) next = json::object();
                if (!next.is_object()) fail(line, "table redefines key '" + part + "'");
                table = &next;
            }
            continue;
        }

        std::string logical(sv);
        Cursor c{logical, 0, line};
        std::string key = parse_key(c);
        c.skip_ws();
        if (c.peek() != '=') fail(line, "expected '=' after key '" + key + "'");
        ++c.i;
        json value = parse_value(c);
        c.skip_ws();
        if (!c.done()) fail(line, "trailing characters after value");
        if (table->contains(key)) fail(line, "duplicate key '" + key + "'");
        (*table)[key] = std::move(value);
    }
    return root;
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& ctx) {
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key))
            throw config_error("unknown key '" + key + "' in " + ctx);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error(std::string("bad type for key '") + key + "'");
    }
}

std::uint64_t get_count(const json& j, const char* key, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw config_error(std::string("key '") + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

double get_number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw config_error(std::string("key '") + key + "' must be a number");
    return v.get<double>();
}

std::vector<std::uint64_t> count_list(const json& v, const std::string& ctx) {
    if (!v.is_array()) throw config_error(ctx + " must be an array of counts");
    std::vector<std::uint64_t> out;
    for (const json& e : v) {
        if (!e.is_number_integer() || e.get<long long>() <= 0)
            throw config_error(ctx + " entries must be positive integers");
        out.push_back(e.get<std::uint64_t>());
    }
    return out;
}

} // namespace

SweepConfig sweep_config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw config_error("config root must be a table");
    reject_unknown(doc,
                   {"models", "steps_list", "repetitions", "strategies", "workers", "mode",
                    "output_dir", "orchestration_overhead_s", "hybrid_probe_n",
                    "monitor_enabled", "emit_figures", "device", "variants", "max_variants"},
                   "config");

    SweepConfig cfg;

    if (!doc.contains("models")) throw config_error("missing required key 'models'");
    for (const json& m : doc.at("models")) {
        if (!m.is_string()) throw config_error("'models' entries must be strings");
        try {
            cfg.models.push_back(parse_model_kind(m.get<std::string>()));
        } catch (const std::invalid_argument& e) {
            throw config_error(e.what());
        }
    }

    if (!doc.contains("steps_list")) throw config_error("missing required key 'steps_list'");
    cfg.steps_list = count_list(doc.at("steps_list"), "'steps_list'");

    cfg.repetitions = static_cast<std::uint32_t>(get_count(doc, "repetitions", 1));

    if (!doc.contains("strategies")) throw config_error("missing required key 'strategies'");
    for (const json& s : doc.at("strategies")) {
        if (!s.is_string()) throw config_error("'strategies' entries must be strings");
        try {
            cfg.strategies.push_back(parse_strategy(s.get<std::string>()));
        } catch (const std::invalid_argument& e) {
            throw config_error(e.what());
        }
    }

    cfg.workers = static_cast<unsigned>(get_count(doc, "workers", 0));
    if (doc.contains("mode")) {
        try {
            cfg.mode = parse_exec_mode(get_or<std::string>(doc, "mode", "modeled"));
        } catch (const std::invalid_argument& e) {
            throw config_error(e.what());
        }
    }
    cfg.output_dir = get_or<std::string>(doc, "output_dir", "out");
    cfg.orchestration_overhead_s = get_number(doc, "orchestration_overhead_s", 0.0);
    cfg.hybrid_probe_n = get_count(doc, "hybrid_probe_n", 0);
    cfg.monitor_enabled = get_or<bool>(doc, "monitor_enabled", true);
    cfg.emit_figures = get_or<bool>(doc, "emit_figures", true);

    if (doc.contains("device")) {
        const json& d = doc.at("device");
        if (!d.is_object()) throw config_error("'device' must be a table");
        reject_unknown(d, {"startup_s", "capacity", "step_wave_cost_s", "jitter_fraction"},
                       "device");
        cfg.device.startup_s = get_number(d, "startup_s", cfg.device.startup_s);
        cfg.device.capacity = get_count(d, "capacity", cfg.device.capacity);
        cfg.device.step_wave_cost_s =
            get_number(d, "step_wave_cost_s", cfg.device.step_wave_cost_s);
        cfg.device.jitter_fraction = get_number(d, "jitter_fraction", cfg.device.jitter_fraction);
    }

    if (!doc.contains("variants")) throw config_error("missing required key 'variants'");
    const json& variants = doc.at("variants");
    if (!variants.is_object()) throw config_error("'variants' must be a table");
    for (const auto& [name, list] : variants.items()) {
        ModelKind kind;
        try {
            kind = parse_model_kind(name);
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("variants: ") + e.what());
        }
        cfg.variants_per_model[kind] = count_list(list, "variants." + name);
    }

    if (doc.contains("max_variants")) {
        const json& caps = doc.at("max_variants");
        if (!caps.is_object()) throw config_error("'max_variants' must be a table");
        for (const auto& [name, cap] : caps.items()) {
            ModelKind kind;
            try {
                kind = parse_model_kind(name);
            } catch (const std::invalid_argument& e) {
                throw config_error(std::string("max_variants: ") + e.what());
            }
            if (!cap.is_number_integer() || cap.get<long long>() <= 0)
                throw config_error("max_variants." + name + " must be a positive integer");
            cfg.max_variants_cap[kind] = cap.get<std::uint64_t>();
        }
    }

    truncate_to_caps(cfg);
    validate_config(cfg);
    return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    bool looks_json = path.extension() == ".json";
    if (path.extension() != ".toml" && !looks_json) {
        std::size_t first = text.find_first_not_of(" \t\r\n");
        looks_json = first != std::string::npos && text[first] == '{';
    }

    json doc;
    if (looks_json) {
        doc = json::parse(text, nullptr, false);
        if (doc.is_discarded())
            throw config_error("invalid JSON in config file: " + path.string());
    } else {
        doc = parse_toml_subset(text);
    }
    return sweep_config_from_json(doc);
}

void truncate_to_caps(SweepConfig& config) {
    for (auto& [kind, list] : config.variants_per_model) {
        auto cap = config.max_variants_cap.find(kind);
        if (cap == config.max_variants_cap.end()) continue;
        std::erase_if(list, [&](std::uint64_t n) { return n > cap->second; });
    }
}

void validate_config(const SweepConfig& config) {
    if (config.models.empty()) throw config_error("'models' must not be empty");
    if (config.steps_list.empty()) throw config_error("'steps_list' must not be empty");
    if (config.strategies.empty()) throw config_error("'strategies' must not be empty");
    if (config.repetitions < 1) throw config_error("'repetitions' must be >= 1");

    std::set<ModelKind> seen_models(config.models.begin(), config.models.end());
    if (seen_models.size() != config.models.size())
        throw config_error("'models' contains duplicates");
    std::set<Strategy> seen_strats(config.strategies.begin(), config.strategies.end());
    if (seen_strats.size() != config.strategies.size())
        throw config_error("'strategies' contains duplicates");

    if (!std::is_sorted(config.steps_list.begin(), config.steps_list.end()) ||
        std::adjacent_find(config.steps_list.begin(), config.steps_list.end()) !=
            config.steps_list.end())
        throw config_error("'steps_list' must be strictly increasing");

    for (ModelKind kind : config.models) {
        auto it = config.variants_per_model.find(kind);
        if (it == config.variants_per_model.end() || it->second.empty())
            throw config_error(std::string("no variant counts for model '") + to_string(kind) +
                               "' (all capped away?)");
        const auto& list = it->second;
        if (!std::is_sorted(list.begin(), list.end()) ||
            std::adjacent_find(list.begin(), list.end()) != list.end())
            throw config_error(std::string("variants.") + to_string(kind) +
                               " must be strictly increasing");
    }

    if (config.device.capacity < 1) throw config_error("device.capacity must be >= 1");
    if (config.device.startup_s < 0.0) throw config_error("device.startup_s must be >= 0");
    if (config.device.step_wave_cost_s <= 0.0)
        throw config_error("device.step_wave_cost_s must be > 0");
    if (config.device.jitter_fraction < 0.0 || config.device.jitter_fraction >= 1.0)
        throw config_error("device.jitter_fraction must be in [0, 1)");
    if (config.orchestration_overhead_s < 0.0)
        throw config_error("'orchestration_overhead_s' must be >= 0");
}

} // namespace hetbench
