#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "plqr/sim_engine.hpp"

// Static SVG line charts for trajectory review. Deterministic output:
// identical input produces identical bytes.
namespace plqr {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<PlotSeries>& series);

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series);

// rates.svg, wheels.svg, attitude.svg under out_dir. Requires at least one
// sample row.
void write_trajectory_charts(const Trajectory& trajectory,
                             const std::filesystem::path& out_dir);

}  // namespace plqr
