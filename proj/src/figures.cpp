#include "hetbench/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "hetbench/monitor.hpp"

namespace hetbench {
namespace {

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string fmtpx(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c; break;
        }
    }
    return out;
}

const char* strategy_color(Strategy s) {
    switch (s) {
    case Strategy::CpuOnly: return "#1f77b4";
    case Strategy::AccelOnly: return "#d62728";
    case Strategy::Hybrid: return "#2ca02c";
    }
    return "#000000";
}

constexpr char kNaiveColor[] = "#9467bd";

// Blue (idle) to red (saturated) over [0, 100] percent.
std::string util_color(double u) {
    double t = std::clamp(u / 100.0, 0.0, 1.0);
    auto ch = [&](int a, int b) { return static_cast<int>(std::lround(a + t * (b - a))); };
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", ch(49, 222), ch(130, 45), ch(189, 38));
    return buf;
}

using Pt = std::pair<double, double>;

struct Svg {
    double width = 760;
    double height = 460;
    double ml = 80, mr = 40, mt = 40, mb = 58;
    std::ostringstream body;

    double plot_w() const { return width - ml - mr; }
    double plot_h() const { return height - mt - mb; }

    void line(double x1, double y1, double x2, double y2, const std::string& color,
              double w = 1.0) {
        body << "<line x1='" << fmtpx(x1) << "' y1='" << fmtpx(y1) << "' x2='" << fmtpx(x2)
             << "' y2='" << fmtpx(y2) << "' stroke='" << color << "' stroke-width='" << w
             << "'/>\n";
    }

    void poly(const char* tag, const std::vector<Pt>& pts, const std::string& attrs) {
        body << '<' << tag << " points='";
        for (const Pt& p : pts) body << fmtpx(p.first) << ',' << fmtpx(p.second) << ' ';
        body << "' " << attrs << "/>\n";
    }

    void polyline(const std::vector<Pt>& pts, const std::string& color, double w = 1.8) {
        if (pts.size() < 2) return;
        poly("polyline", pts,
             "fill='none' stroke='" + color + "' stroke-width='" + fmtpx(w) + "'");
    }

    void band(const std::vector<Pt>& upper, const std::vector<Pt>& lower,
              const std::string& color) {
        if (upper.size() < 2) return;
        std::vector<Pt> ring = upper;
        ring.insert(ring.end(), lower.rbegin(), lower.rend());
        poly("polygon", ring, "fill='" + color + "' fill-opacity='0.15' stroke='none'");
    }

    void circle(double x, double y, double r, const std::string& fill) {
        body << "<circle cx='" << fmtpx(x) << "' cy='" << fmtpx(y) << "' r='" << r
             << "' fill='" << fill << "'/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              double opacity = 1.0) {
        body << "<rect x='" << fmtpx(x) << "' y='" << fmtpx(y) << "' width='" << fmtpx(w)
             << "' height='" << fmtpx(h) << "' fill='" << fill << "' fill-opacity='" << opacity
             << "'/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12,
              const char* anchor = "start", const std::string& color = "#333333",
              const std::string& extra = "") {
        body << "<text x='" << fmtpx(x) << "' y='" << fmtpx(y) << "' font-size='" << size
             << "' font-family='sans-serif' text-anchor='" << anchor << "' fill='" << color
             << "' " << extra << '>' << xml_escape(s) << "</text>\n";
    }

    std::string render() const {
        std::ostringstream out;
        out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
            << height << "' viewBox='0 0 " << width << ' ' << height << "'>\n"
            << "<rect x='0' y='0' width='" << width << "' height='" << height
            << "' fill='white'/>\n"
            << body.str() << "</svg>\n";
        return out.str();
    }
};

// x positions are log2(n); collapses gracefully when only one n exists.
struct AxisX {
    double lo = 0.0, hi = 1.0;
    double px(const Svg& s, double n) const {
        double v = std::log2(n);
        if (hi - lo < 1e-12) return s.ml + s.plot_w() / 2.0;
        return s.ml + (v - lo) / (hi - lo) * s.plot_w();
    }
};

struct AxisY {
    double lo = 0.0, hi = 1.0;
    double py(const Svg& s, double v) const {
        if (hi - lo < 1e-12) return s.mt + s.plot_h() / 2.0;
        return s.mt + s.plot_h() - (v - lo) / (hi - lo) * s.plot_h();
    }
};

void draw_frame(Svg& svg, const AxisX& ax, const AxisY& ay,
                const std::vector<std::uint64_t>& x_ticks, const std::string& title,
                const std::string& x_label, const std::string& y_label) {
    svg.text(svg.ml, 22, title, 14, "start", "#111111");
    svg.body << "<rect x='" << fmtpx(svg.ml) << "' y='" << fmtpx(svg.mt) << "' width='"
             << fmtpx(svg.plot_w()) << "' height='" << fmtpx(svg.plot_h())
             << "' fill='none' stroke='#999999'/>\n";

    std::size_t stride = x_ticks.size() > 10 ? (x_ticks.size() + 9) / 10 : 1;
    for (std::size_t i = 0; i < x_ticks.size(); ++i) {
        if (i % stride != 0 && i + 1 != x_ticks.size()) continue;
        double x = ax.px(svg, static_cast<double>(x_ticks[i]));
        double y0 = svg.mt + svg.plot_h();
        svg.line(x, y0, x, y0 + 5, "#999999");
        svg.text(x, y0 + 18, std::to_string(x_ticks[i]), 10, "middle");
    }
    for (int i = 0; i <= 4; ++i) {
        double v = ay.lo + (ay.hi - ay.lo) * i / 4.0;
        double y = ay.py(svg, v);
        svg.line(svg.ml, y, svg.ml + svg.plot_w(), y, "#eeeeee");
        svg.line(svg.ml - 5, y, svg.ml, y, "#999999");
        char lab[32];
        std::snprintf(lab, sizeof(lab), "%.3g", v);
        svg.text(svg.ml - 8, y + 4, lab, 10, "end");
    }
    svg.text(svg.ml + svg.plot_w() / 2, svg.height - 12, x_label, 12, "middle");
    svg.text(18, svg.mt + svg.plot_h() / 2, y_label, 12, "middle", "#333333",
             "transform='rotate(-90 18 " + fmtpx(svg.mt + svg.plot_h() / 2) + ")'");
}

void draw_legend(Svg& svg, const std::vector<std::pair<std::string, std::string>>& entries) {
    double x = svg.ml + svg.plot_w() - 150;
    double y = svg.mt + 16;
    for (const auto& [label, color] : entries) {
        svg.line(x, y - 4, x + 22, y - 4, color, 2.5);
        svg.text(x + 28, y, label, 11);
        y += 16;
    }
}

// --- aggregation ------------------------------------------------------------

using RepMap = std::map<std::uint32_t, double>; // rep index -> value

struct SeriesCell {
    RepMap walls;
    RepMap utils;
    RepMap fracs; // hybrid only
};

// (strategy) -> (n, steps) -> per-rep values
using CellMap = std::map<Strategy, std::map<std::pair<std::uint64_t, std::uint64_t>, SeriesCell>>;

std::vector<double> values_of(const RepMap& m) {
    std::vector<double> out;
    out.reserve(m.size());
    for (const auto& [rep, v] : m) out.push_back(v);
    return out;
}

struct Agg {
    std::uint64_t x = 0; // n_variants or steps, depending on the chart
    Stats wall{};
    double util_mean = 0.0;
    Stats frac{};
    bool has_frac = false;
};

Agg make_agg(std::uint64_t x, const SeriesCell& cell) {
    Agg a;
    a.x = x;
    a.wall = summarize(values_of(cell.walls));
    if (!cell.utils.empty()) {
        double sum = 0.0;
        for (const auto& [rep, u] : cell.utils) sum += u;
        a.util_mean = sum / static_cast<double>(cell.utils.size());
    }
    if (!cell.fracs.empty()) {
        a.frac = summarize(values_of(cell.fracs));
        a.has_frac = true;
    }
    return a;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out << content;
    out.flush();
    if (!out) throw io_error("write failed: " + path.string());
}

std::string sidecar_row(ModelKind model, const std::string& series, std::uint64_t n,
                        std::uint64_t steps, const Stats& st) {
    std::ostringstream out;
    out << to_string(model) << ',' << series << ',' << n << ',' << steps << ',' << st.n << ','
        << fmt9(st.mean) << ',' << fmt9(st.ci95_low) << ',' << fmt9(st.ci95_high);
    return out.str();
}

constexpr char kSidecarHeader[] =
    "model,series,n_variants,steps,samples,mean_wall_s,ci95_low,ci95_high";

} // namespace

std::vector<std::filesystem::path>
emit_figures(const std::vector<RunRecord>& records, const std::filesystem::path& out_dir,
             const std::function<void(const std::string&)>& log) {
    auto notice = [&](const std::string& m) {
        if (log) log(m);
        else std::fprintf(stderr, "[figures] %s\n", m.c_str());
    };

    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> files;

    for (ModelKind model : kAllModels) {
        CellMap cells;
        std::uint64_t steps_max = 0, n_max = 0;
        std::set<std::uint64_t> steps_seen;
        for (const RunRecord& r : records) {
            if (r.model != model || r.error()) continue;
            SeriesCell& c = cells[r.strategy][{r.n_variants, r.steps}];
            c.walls[r.rep] = r.wall_s;
            c.utils[r.rep] =
                r.strategy == Strategy::CpuOnly ? r.cpu_util_mean : r.accel_util_mean;
            if (r.strategy == Strategy::Hybrid) c.fracs[r.rep] = r.accel_fraction;
            steps_max = std::max(steps_max, r.steps);
            n_max = std::max(n_max, r.n_variants);
            steps_seen.insert(r.steps);
        }
        if (cells.empty()) continue;
        std::string prefix = to_string(model);

        // Aggregates per strategy at the largest steps value, ordered by n.
        std::map<Strategy, std::vector<Agg>> by_n;
        std::set<std::uint64_t> all_n;
        for (const auto& [strategy, cmap] : cells)
            for (const auto& [key, cell] : cmap)
                if (key.second == steps_max) {
                    by_n[strategy].push_back(make_agg(key.first, cell));
                    all_n.insert(key.first);
                }
        for (auto& [strategy, aggs] : by_n)
            std::sort(aggs.begin(), aggs.end(),
                      [](const Agg& a, const Agg& b) { return a.x < b.x; });

        std::vector<std::uint64_t> xticks(all_n.begin(), all_n.end());
        AxisX ax{std::log2(static_cast<double>(xticks.front())),
                 std::log2(static_cast<double>(xticks.back()))};

        // (a) wall time vs variants per strategy, CI bands
        {
            double hi = 0.0;
            for (const auto& [strategy, aggs] : by_n)
                for (const Agg& a : aggs) hi = std::max(hi, a.wall.ci95_high);
            AxisY ay{0.0, hi > 0 ? hi * 1.08 : 1.0};

            Svg svg;
            draw_frame(svg, ax, ay, xticks,
                       prefix + ": wall time vs variants (steps=" +
                           std::to_string(steps_max) + ")",
                       "variants (log scale)", "wall time [s]");
            std::vector<std::pair<std::string, std::string>> legend;
            std::ostringstream side;
            side << kSidecarHeader << '\n';
            for (const auto& [strategy, aggs] : by_n) {
                std::string color = strategy_color(strategy);
                std::vector<Pt> mid, up, lo;
                for (const Agg& a : aggs) {
                    double x = ax.px(svg, static_cast<double>(a.x));
                    mid.push_back({x, ay.py(svg, a.wall.mean)});
                    up.push_back({x, ay.py(svg, a.wall.ci95_high)});
                    lo.push_back({x, ay.py(svg, a.wall.ci95_low)});
                    side << sidecar_row(model, to_string(strategy), a.x, steps_max, a.wall)
                         << '\n';
                }
                svg.band(up, lo, color);
                svg.polyline(mid, color);
                for (const Pt& p : mid) svg.circle(p.first, p.second, 2.5, color);
                legend.push_back({to_string(strategy), color});
            }
            draw_legend(svg, legend);
            std::filesystem::path f = out_dir / (prefix + "_wall_vs_n.svg");
            write_file(f, svg.render());
            files.push_back(f);
            std::filesystem::path s = out_dir / (prefix + "_wall_vs_n.csv");
            write_file(s, side.str());
            files.push_back(s);
        }

        // (b) accelerator wall time, colored by utilization
        if (auto it = by_n.find(Strategy::AccelOnly); it != by_n.end() && !it->second.empty()) {
            const std::vector<Agg>& aggs = it->second;
            double hi = 0.0;
            for (const Agg& a : aggs) hi = std::max(hi, a.wall.ci95_high);
            AxisY ay{0.0, hi > 0 ? hi * 1.08 : 1.0};

            Svg svg;
            draw_frame(svg, ax, ay, xticks,
                       prefix + ": accelerator wall time, colored by utilization",
                       "variants (log scale)", "wall time [s]");
            std::vector<Pt> mid;
            std::ostringstream side;
            side << kSidecarHeader << ",util_mean_percent\n";
            for (const Agg& a : aggs) {
                double x = ax.px(svg, static_cast<double>(a.x));
                mid.push_back({x, ay.py(svg, a.wall.mean)});
                side << sidecar_row(model, "accel", a.x, steps_max, a.wall) << ','
                     << fmt9(a.util_mean) << '\n';
            }
            svg.polyline(mid, "#bbbbbb", 1.2);
            for (std::size_t i = 0; i < aggs.size(); ++i)
                svg.circle(mid[i].first, mid[i].second, 4.0, util_color(aggs[i].util_mean));
            svg.text(svg.ml + svg.plot_w() - 150, svg.mt + 16,
                     "color: utilization 0%", 11, "start", util_color(0.0));
            svg.text(svg.ml + svg.plot_w() - 150, svg.mt + 32, "to 100%", 11, "start",
                     util_color(100.0));
            std::filesystem::path f = out_dir / (prefix + "_accel_wall_util.svg");
            write_file(f, svg.render());
            files.push_back(f);
            std::filesystem::path s = out_dir / (prefix + "_accel_wall_util.csv");
            write_file(s, side.str());
            files.push_back(s);
        }

        // (c) sequential / naive-sum / combined overlay with accel-fraction bars
        bool have_hybrid = by_n.contains(Strategy::Hybrid) && !by_n[Strategy::Hybrid].empty();
        bool have_both =
            by_n.contains(Strategy::CpuOnly) && by_n.contains(Strategy::AccelOnly);
        if (have_hybrid && have_both) {
            // Naive sum pairs CPU and accelerator walls rep-by-rep, then the
            // sums go through the same summarize as everything else.
            std::map<std::uint64_t, Stats> naive;
            const auto& cpu_cells = cells[Strategy::CpuOnly];
            const auto& acc_cells = cells[Strategy::AccelOnly];
            for (const auto& [key, ccell] : cpu_cells) {
                if (key.second != steps_max) continue;
                auto ait = acc_cells.find(key);
                if (ait == acc_cells.end()) continue;
                std::vector<double> sums;
                for (const auto& [rep, w] : ccell.walls) {
                    auto rit = ait->second.walls.find(rep);
                    if (rit != ait->second.walls.end()) sums.push_back(w + rit->second);
                }
                if (!sums.empty()) naive[key.first] = summarize(sums);
            }

            double hi = 0.0;
            for (const auto& [strategy, aggs] : by_n)
                for (const Agg& a : aggs) hi = std::max(hi, a.wall.ci95_high);
            for (const auto& [n, st] : naive) hi = std::max(hi, st.ci95_high);
            AxisY ay{0.0, hi > 0 ? hi * 1.08 : 1.0};
            AxisY ay_frac{0.0, 1.0};

            Svg svg;
            // fraction bars first so the lines draw on top
            const std::vector<Agg>& hybrid_aggs = by_n[Strategy::Hybrid];
            double bar_w = std::max(6.0, svg.plot_w() / (2.5 * xticks.size()));
            for (const Agg& a : hybrid_aggs) {
                if (!a.has_frac) continue;
                double x = ax.px(svg, static_cast<double>(a.x));
                double y = ay_frac.py(svg, a.frac.mean);
                svg.rect(x - bar_w / 2, y, bar_w, svg.mt + svg.plot_h() - y, "#2ca02c", 0.18);
            }
            draw_frame(svg, ax, ay, xticks,
                       prefix + ": sequential vs combined (steps=" +
                           std::to_string(steps_max) + ")",
                       "variants (log scale)", "wall time [s]");
            for (int i = 0; i <= 2; ++i) {
                double v = i / 2.0;
                double y = ay_frac.py(svg, v);
                double x1 = svg.ml + svg.plot_w();
                svg.line(x1, y, x1 + 5, y, "#2ca02c");
                char lab[8];
                std::snprintf(lab, sizeof(lab), "%.1f", v);
                svg.text(x1 + 8, y + 4, lab, 10, "start", "#2ca02c");
            }

            std::ostringstream side;
            side << kSidecarHeader << '\n';
            std::vector<std::pair<std::string, std::string>> legend;
            for (Strategy strategy :
                 {Strategy::CpuOnly, Strategy::AccelOnly, Strategy::Hybrid}) {
                const std::vector<Agg>& aggs = by_n[strategy];
                std::string color = strategy_color(strategy);
                std::vector<Pt> mid;
                for (const Agg& a : aggs) {
                    mid.push_back({ax.px(svg, static_cast<double>(a.x)),
                                   ay.py(svg, a.wall.mean)});
                    side << sidecar_row(model, to_string(strategy), a.x, steps_max, a.wall)
                         << '\n';
                }
                svg.polyline(mid, color);
                for (const Pt& p : mid) svg.circle(p.first, p.second, 2.5, color);
                legend.push_back(
                    {strategy == Strategy::Hybrid ? "combined" : to_string(strategy), color});
            }
            {
                std::vector<Pt> mid;
                for (const auto& [n, st] : naive) {
                    mid.push_back({ax.px(svg, static_cast<double>(n)), ay.py(svg, st.mean)});
                    side << sidecar_row(model, "naive_sum", n, steps_max, st) << '\n';
                }
                svg.polyline(mid, kNaiveColor);
                for (const Pt& p : mid) svg.circle(p.first, p.second, 2.5, kNaiveColor);
                legend.push_back({"naive sum", kNaiveColor});
            }
            for (const Agg& a : hybrid_aggs)
                if (a.has_frac)
                    side << sidecar_row(model, "accel_fraction", a.x, steps_max, a.frac)
                         << '\n';
            legend.push_back({"accel share (bars)", "#2ca02c"});
            draw_legend(svg, legend);

            std::filesystem::path f = out_dir / (prefix + "_combined_overlay.svg");
            write_file(f, svg.render());
            files.push_back(f);
            std::filesystem::path s = out_dir / (prefix + "_combined_overlay.csv");
            write_file(s, side.str());
            files.push_back(s);
        } else if (!have_hybrid) {
            notice("combined overlay omitted for " + prefix + ": no hybrid rows");
        } else {
            notice("combined overlay omitted for " + prefix +
                   ": needs both cpu and accel rows");
        }

        // (d) wall time vs steps at the largest variant count
        if (steps_seen.size() >= 2) {
            std::map<Strategy, std::vector<Agg>> by_steps;
            std::set<std::uint64_t> all_steps;
            for (const auto& [strategy, cmap] : cells)
                for (const auto& [key, cell] : cmap)
                    if (key.first == n_max) {
                        by_steps[strategy].push_back(make_agg(key.second, cell));
                        all_steps.insert(key.second);
                    }
            for (auto& [strategy, aggs] : by_steps)
                std::sort(aggs.begin(), aggs.end(),
                          [](const Agg& a, const Agg& b) { return a.x < b.x; });

            std::vector<std::uint64_t> sticks(all_steps.begin(), all_steps.end());
            AxisX sax{std::log2(static_cast<double>(sticks.front())),
                      std::log2(static_cast<double>(sticks.back()))};
            double hi = 0.0;
            for (const auto& [strategy, aggs] : by_steps)
                for (const Agg& a : aggs) hi = std::max(hi, a.wall.ci95_high);
            AxisY ay{0.0, hi > 0 ? hi * 1.08 : 1.0};

            Svg svg;
            draw_frame(svg, sax, ay, sticks,
                       prefix + ": wall time vs steps (variants=" + std::to_string(n_max) +
                           ")",
                       "simulation steps (log scale)", "wall time [s]");
            std::vector<std::pair<std::string, std::string>> legend;
            std::ostringstream side;
            side << kSidecarHeader << '\n';
            for (const auto& [strategy, aggs] : by_steps) {
                std::string color = strategy_color(strategy);
                std::vector<Pt> mid, up, lo;
                for (const Agg& a : aggs) {
                    double x = sax.px(svg, static_cast<double>(a.x));
                    mid.push_back({x, ay.py(svg, a.wall.mean)});
                    up.push_back({x, ay.py(svg, a.wall.ci95_high)});
                    lo.push_back({x, ay.py(svg, a.wall.ci95_low)});
                    side << sidecar_row(model, to_string(strategy), n_max, a.x, a.wall)
                         << '\n';
                }
                svg.band(up, lo, color);
                svg.polyline(mid, color);
                for (const Pt& p : mid) svg.circle(p.first, p.second, 2.5, color);
                legend.push_back({to_string(strategy), color});
            }
            draw_legend(svg, legend);
            std::filesystem::path f = out_dir / (prefix + "_wall_vs_steps.svg");
            write_file(f, svg.render());
            files.push_back(f);
            std::filesystem::path s = out_dir / (prefix + "_wall_vs_steps.csv");
            write_file(s, side.str());
            files.push_back(s);
        }
    }
    return files;
}

} // namespace hetbench
