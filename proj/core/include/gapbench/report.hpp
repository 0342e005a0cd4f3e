#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gapbench {

/// Writes report/ under a complete results directory: SR per traversability
/// bin, per-mission PO/EO/AGV/MP sorted by TRAV, the CF matrix and TRAV
/// against RGS, each as a CSV table and an SVG plot. Absent values appear as
/// "absent". Returns the files written, in a fixed order.
std::vector<std::filesystem::path> emit_report(const std::filesystem::path& results_dir);

namespace svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<std::optional<double>> y;  // gaps break the line
};

[[nodiscard]] std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                                     const std::vector<Series>& series, bool markers_only = false);
/// One group of bars per category, one bar per series.
[[nodiscard]] std::string bar_chart(const std::string& title, const std::string& y_label,
                                    const std::vector<std::string>& categories, const std::vector<Series>& series);
[[nodiscard]] std::string heatmap(const std::string& title, const std::vector<std::string>& labels,
                                  const std::vector<std::vector<std::optional<double>>>& values);

}  // namespace svg
}  // namespace gapbench
