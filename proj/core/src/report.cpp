#include "gapbench/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "gapbench/campaign.hpp"
#include "gapbench/serialization.hpp"

namespace gapbench {

namespace fs = std::filesystem;

namespace svg {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) { return fmt::format("{:.2f}", v); }

std::string tick_label(double v) {
    if (v == 0.0) return "0";
    const double a = std::abs(v);
    if (a >= 1e4 || a < 1e-2) return fmt::format("{:.2e}", v);
    return fmt::format("{:.3g}", v);
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) {
            const double pad = std::max(std::abs(lo) * 0.1, 0.5);
            lo -= pad;
            hi += pad;
        }
    }
};

std::string open(const std::string& title) {
    return fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n",
        num(kWidth), num(kHeight), num(kWidth / 2.0), escape(title));
}

std::string axes(const Range& x, const Range& y, const std::string& x_label, const std::string& y_label, bool x_ticks) {
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    std::string out = fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                                  num(kLeft), num(kTop), num(pw), num(ph));
    for (int i = 0; i <= 4; ++i) {
        const double v = y.lo + (y.hi - y.lo) * i / 4.0;
        const double py = kTop + ph - ph * i / 4.0;
        out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#ddd\"/>\n", num(kLeft), num(py),
                           num(kLeft + pw));
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(kLeft - 6), num(py + 4),
                           tick_label(v));
        if (x_ticks) {
            const double xv = x.lo + (x.hi - x.lo) * i / 4.0;
            const double px = kLeft + pw * i / 4.0;
            out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(px), num(kTop + ph + 16),
                               tick_label(xv));
        }
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(kLeft + pw / 2.0),
                       num(kHeight - 12), escape(x_label));
    out += fmt::format("<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
                       num(kTop + ph / 2.0), escape(y_label));
    return out;
}

std::string legend(const std::vector<Series>& series) {
    std::string out;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double y = kTop + 10.0 + 18.0 * static_cast<double>(i);
        const double x = kWidth - kRight + 12.0;
        out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n", num(x), num(y - 10),
                           kPalette[i % kPalette.size()]);
        out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", num(x + 18), num(y), escape(series[i].name));
    }
    return out;
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series, bool markers_only) {
    Range xr, yr;
    for (const auto& s : series) {
        for (double x : s.x) xr.add(x);
        for (const auto& y : s.y)
            if (y) yr.add(*y);
    }
    xr.finish();
    yr.finish();
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + pw * (x - xr.lo) / (xr.hi - xr.lo); };
    auto py = [&](double y) { return kTop + ph - ph * (y - yr.lo) / (yr.hi - yr.lo); };

    std::string out = open(title) + axes(xr, yr, x_label, y_label, true);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = kPalette[i % kPalette.size()];
        if (!markers_only) {
            std::string path;
            bool pen_down = false;
            for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
                if (!s.y[k] || !std::isfinite(*s.y[k])) {
                    pen_down = false;
                    continue;
                }
                path += fmt::format("{}{},{} ", pen_down ? "L" : "M", num(px(s.x[k])), num(py(*s.y[k])));
                pen_down = true;
            }
            if (!path.empty())
                out += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", path, color);
        }
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!s.y[k] || !std::isfinite(*s.y[k])) continue;
            out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>\n", num(px(s.x[k])), num(py(*s.y[k])),
                               color);
        }
    }
    return out + legend(series) + "</svg>\n";
}

std::string bar_chart(const std::string& title, const std::string& y_label, const std::vector<std::string>& categories,
                      const std::vector<Series>& series) {
    Range yr;
    yr.add(0.0);
    for (const auto& s : series)
        for (const auto& y : s.y)
            if (y) yr.add(*y);
    yr.finish();
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto py = [&](double y) { return kTop + ph - ph * (y - yr.lo) / (yr.hi - yr.lo); };

    std::string out = open(title) + axes(Range{0.0, 1.0}, yr, "", y_label, false);
    const double group = pw / static_cast<double>(std::max<std::size_t>(1, categories.size()));
    const double bar = 0.8 * group / static_cast<double>(std::max<std::size_t>(1, series.size()));
    for (std::size_t c = 0; c < categories.size(); ++c) {
        const double gx = kLeft + group * static_cast<double>(c);
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(gx + group / 2.0),
                           num(kTop + ph + 16), escape(categories[c]));
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (c >= series[i].y.size() || !series[i].y[c]) continue;
            const double v = *series[i].y[c];
            const double top = py(std::max(v, 0.0));
            const double base = py(std::min(v, 0.0));
            out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                               num(gx + 0.1 * group + bar * static_cast<double>(i)), num(top), num(bar),
                               num(base - top), kPalette[i % kPalette.size()]);
        }
    }
    return out + legend(series) + "</svg>\n";
}

std::string heatmap(const std::string& title, const std::vector<std::string>& labels,
                    const std::vector<std::vector<std::optional<double>>>& values) {
    const std::size_t n = labels.size();
    const double cell = std::min(60.0, 300.0 / static_cast<double>(std::max<std::size_t>(1, n)));
    const double x0 = 160.0;
    const double y0 = 60.0;
    std::string out = open(title);
    for (std::size_t r = 0; r < n; ++r) {
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(x0 - 6),
                           num(y0 + cell * (static_cast<double>(r) + 0.5) + 4), escape(labels[r]));
        out += fmt::format("<text x=\"{0}\" y=\"{1}\" text-anchor=\"start\" transform=\"rotate(-35 {0} {1})\">{2}</text>\n",
                           num(x0 + cell * (static_cast<double>(r) + 0.5)), num(y0 + cell * static_cast<double>(n) + 14),
                           escape(labels[r]));
        for (std::size_t c = 0; c < n; ++c) {
            const std::optional<double> v = r < values.size() && c < values[r].size() ? values[r][c] : std::nullopt;
            std::string fill = "#eeeeee";
            if (v && std::isfinite(*v) && *v > 0.0) {
                // log scale: blue below 1, red above 1
                const double t = std::clamp(std::log2(*v) / 2.0, -1.0, 1.0);
                const int shade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(t))));
                fill = t >= 0.0 ? fmt::format("#ff{:02x}{:02x}", shade, shade) : fmt::format("#{:02x}{:02x}ff", shade, shade);
            }
            const double x = x0 + cell * static_cast<double>(c);
            const double y = y0 + cell * static_cast<double>(r);
            out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"white\"/>\n", num(x),
                               num(y), num(cell), num(cell), fill);
            out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"10\">{}</text>\n",
                               num(x + cell / 2.0), num(y + cell / 2.0 + 4), v ? fmt::format("{:.3g}", *v) : "absent");
        }
    }
    return out + "</svg>\n";
}

}  // namespace svg

namespace {

std::optional<double> opt(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

std::string cell(const std::optional<double>& v) { return v ? format_sig9(*v) : std::string("absent"); }

}  // namespace

std::vector<fs::path> emit_report(const fs::path& results_dir) {
    const CampaignData data = load_campaign(results_dir);
    const nlohmann::json summary = summarize(data);
    const auto& c = data.config;
    const fs::path out = results_dir / "report";
    fs::create_directories(out);
    std::vector<fs::path> written;
    auto write = [&](const std::string& name, const std::string& contents) {
        write_file_atomic(out / name, contents);
        written.push_back(out / name);
    };

    std::vector<std::string> names;
    for (const auto& a : c.algorithms) names.push_back(a.name);

    // (a) success rate per traversability bin
    {
        std::string csv = "bin,trav_lo,trav_hi,maps";
        for (const auto& n : names) csv += fmt::format(",{0}_trials,{0}_sr", n);
        csv += "\n";
        std::vector<std::string> categories;
        std::vector<svg::Series> series;
        for (const auto& n : names) series.push_back({n, {}, {}});
        for (const auto& bin : summary.at("bins").at("bins")) {
            const double lo = bin.at("lo").get<double>();
            const double hi = bin.at("hi").get<double>();
            csv += fmt::format("{},{},{},{}", bin.at("index").get<int>(), format_sig9(lo), format_sig9(hi), bin.at("maps").size());
            categories.push_back(fmt::format("{:.3g}-{:.3g}", lo, hi));
            for (std::size_t a = 0; a < names.size(); ++a) {
                const auto& entry = bin.at("algorithms").at(names[a]);
                const auto sr = opt(entry.at("sr"));
                csv += fmt::format(",{},{}", entry.at("sr_denominator").get<std::size_t>(), cell(sr));
                series[a].x.push_back(static_cast<double>(categories.size() - 1));
                series[a].y.push_back(sr);
            }
            csv += "\n";
        }
        write("sr_by_bin.csv", csv);
        write("sr_by_bin.svg", svg::bar_chart("Success rate by traversability bin", "success rate", categories, series));
    }

    // (b) per-mission metrics, missions sorted by traversability
    {
        struct Mission {
            std::size_t map;
            int trial;
            double trav;
        };
        std::vector<Mission> missions;
        for (std::size_t m = 0; m < data.maps.size(); ++m)
            for (int j = 0; j < c.trials_per_map; ++j) missions.push_back({m, j, data.maps[m].env.trav});
        std::stable_sort(missions.begin(), missions.end(),
                         [](const Mission& a, const Mission& b) { return a.trav < b.trav; });

        std::string csv = "mission,map,trial,trav,algorithm,outcome,po,eo,agv,mp\n";
        struct Metric {
            const char* key;
            const char* label;
        };
        constexpr std::array<Metric, 4> metrics{Metric{"po", "path optimality (%)"}, Metric{"eo", "energy optimality (m/s^2)"},
                                                Metric{"agv", "average goal velocity (m/s)"},
                                                Metric{"mp", "mission progress (%)"}};
        std::vector<std::vector<svg::Series>> plots(metrics.size());
        for (auto& p : plots)
            for (const auto& n : names) p.push_back({n, {}, {}});
        for (std::size_t rank = 0; rank < missions.size(); ++rank) {
            const auto& mission = missions[rank];
            for (std::size_t a = 0; a < names.size(); ++a) {
                const auto& r = data.results[a][mission.map * static_cast<std::size_t>(c.trials_per_map) +
                                                static_cast<std::size_t>(mission.trial)];
                const TrialMetrics& tm = r.metrics;
                csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", rank, mission.map, mission.trial,
                                   format_sig9(mission.trav), names[a], to_string(tm.outcome), cell(tm.po), cell(tm.eo),
                                   cell(tm.agv), format_sig9(tm.mp));
                const std::array<std::optional<double>, 4> values{tm.po, tm.eo, tm.agv, tm.mp};
                for (std::size_t k = 0; k < metrics.size(); ++k) {
                    plots[k][a].x.push_back(static_cast<double>(rank));
                    plots[k][a].y.push_back(values[k]);
                }
            }
        }
        write("missions.csv", csv);
        for (std::size_t k = 0; k < metrics.size(); ++k) {
            write(fmt::format("{}_by_mission.svg", metrics[k].key),
                  svg::line_chart(fmt::format("{} by mission (sorted by traversability)", metrics[k].label),
                                  "mission number", metrics[k].label, plots[k], true));
        }
    }

    // (c) contrast factor matrix, row algorithm A against column algorithm B
    {
        std::string csv = "algorithm";
        for (const auto& n : names) csv += "," + n;
        csv += "\n";
        std::vector<std::vector<std::optional<double>>> matrix;
        const auto& rows = summary.at("contrast_factor").at("matrix");
        for (std::size_t a = 0; a < names.size(); ++a) {
            csv += names[a];
            matrix.emplace_back();
            for (std::size_t b = 0; b < names.size(); ++b) {
                const auto v = opt(rows.at(a).at(b));
                csv += "," + cell(v);
                matrix.back().push_back(v);
            }
            csv += "\n";
        }
        write("cf_matrix.csv", csv);
        write("cf_matrix.svg", svg::heatmap("Contrast factor CF(row, column)", names, matrix));
    }

    // (d) environment: TRAV against RGS per map
    {
        std::string csv = "map,r_poisson,rgs,trav,p_tau,mean_obstacle_width\n";
        svg::Series s{"maps", {}, {}};
        std::vector<std::size_t> order(data.maps.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return data.maps[a].env.rgs < data.maps[b].env.rgs; });
        for (std::size_t m : order) {
            const auto& map = data.maps[m];
            csv += fmt::format("{},{},{},{},{},{}\n", map.index, format_sig9(map.r_poisson), format_sig9(map.env.rgs),
                               format_sig9(map.env.trav), format_sig9(map.env.p_tau),
                               format_sig9(map.env.mean_obstacle_width));
            s.x.push_back(map.env.rgs);
            s.y.push_back(map.env.trav);
        }
        write("trav_vs_rgs.csv", csv);
        write("trav_vs_rgs.svg", svg::line_chart("Traversability against relative gap size", "relative gap size",
                                                 "traversability", {s}, true));
    }
    return written;
}

}  // namespace gapbench
