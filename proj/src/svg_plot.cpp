#include "plqr/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace plqr {

namespace {

constexpr int kWidth = 860;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 78;
constexpr int kMarginRight = 24;
constexpr int kMarginTop = 42;
constexpr int kMarginBottom = 56;

const char* kSeriesColors[] = {"#1f6fb2", "#d2482d", "#3d8c40", "#8453a8", "#b08a00"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range data_range(const std::vector<PlotSeries>& series, bool use_x) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : series) {
        for (double v : use_x ? s.x : s.y) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(lo <= hi)) return {0.0, 1.0};
    if (lo == hi) {
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
        return {lo - pad, hi + pad};
    }
    const double pad = 0.04 * (hi - lo);
    return {lo - pad, hi + pad};
}

// 1-2-5 ladder tick spacing for roughly `target` intervals.
std::vector<double> ticks(const Range& range, int target) {
    const double span = range.hi - range.lo;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * mult >= raw) {
            step = mag * mult;
            break;
        }
    }
    std::vector<double> out;
    const double first = std::ceil(range.lo / step) * step;
    for (double v = first; v <= range.hi + 1e-12 * span; v += step) {
        out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    }
    return out;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<PlotSeries>& series) {
    const Range xr = data_range(series, true);
    const Range yr = data_range(series, false);
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto to_px_x = [&](double v) {
        return kMarginLeft + plot_w * (v - xr.lo) / (xr.hi - xr.lo);
    };
    auto to_px_y = [&](double v) {
        return kMarginTop + plot_h * (1.0 - (v - yr.lo) / (yr.hi - yr.lo));
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
           "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
           std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt(kWidth / 2.0) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           title + "</text>\n";

    // Grid and ticks.
    for (double tx : ticks(xr, 8)) {
        const double px = to_px_x(tx);
        svg += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(kMarginTop) + "\" x2=\"" + fmt(px) +
               "\" y2=\"" + fmt(kMarginTop + plot_h) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(kMarginTop + plot_h + 18.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt(tx) + "</text>\n";
    }
    for (double ty : ticks(yr, 6)) {
        const double py = to_px_y(ty);
        svg += "<line x1=\"" + fmt(kMarginLeft) + "\" y1=\"" + fmt(py) + "\" x2=\"" +
               fmt(kMarginLeft + plot_w) + "\" y2=\"" + fmt(py) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt(kMarginLeft - 6.0) + "\" y=\"" + fmt(py + 4.0) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(ty) +
               "</text>\n";
    }
    svg += "<rect x=\"" + fmt(kMarginLeft) + "\" y=\"" + fmt(kMarginTop) + "\" width=\"" +
           fmt(plot_w) + "\" height=\"" + fmt(plot_h) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";

    // Axis labels.
    svg += "<text x=\"" + fmt(kMarginLeft + plot_w / 2.0) + "\" y=\"" +
           fmt(kHeight - 14.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + x_label +
           "</text>\n";
    svg += "<text x=\"18\" y=\"" + fmt(kMarginTop + plot_h / 2.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\""
           "rotate(-90 18 " +
           fmt(kMarginTop + plot_h / 2.0) + ")\">" + y_label + "</text>\n";

    // Series.
    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kSeriesColors[si % 5];
        if (s.x.size() == 1) {
            svg += "<circle cx=\"" + fmt(to_px_x(s.x[0])) + "\" cy=\"" + fmt(to_px_y(s.y[0])) +
                   "\" r=\"3\" fill=\"" + std::string(color) + "\"/>\n";
        } else if (!s.x.empty()) {
            svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                   "\" stroke-width=\"1.4\" points=\"";
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (i > 0) svg += ' ';
                svg += fmt(to_px_x(s.x[i])) + "," + fmt(to_px_y(s.y[i]));
            }
            svg += "\"/>\n";
        }
        // Legend entry.
        const double ly = kMarginTop + 14.0 + 18.0 * static_cast<double>(si);
        const double lx = kMarginLeft + plot_w - 110.0;
        svg += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly - 4.0) + "\" x2=\"" +
               fmt(lx + 24.0) + "\" y2=\"" + fmt(ly - 4.0) + "\" stroke=\"" +
               std::string(color) + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt(lx + 30.0) + "\" y=\"" + fmt(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + s.name + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series) {
    std::ofstream stream(path);
    if (!stream) throw IoError("cannot open '" + path.string() + "' for writing");
    stream << render_line_chart(title, x_label, y_label, series);
    if (!stream) throw IoError("failed writing '" + path.string() + "'");
}

void write_trajectory_charts(const Trajectory& trajectory,
                             const std::filesystem::path& out_dir) {
    if (trajectory.samples.empty()) {
        throw IoError("plot: trajectory has no sample rows");
    }
    std::vector<double> t;
    t.reserve(trajectory.samples.size());
    for (const auto& row : trajectory.samples) t.push_back(row.t);

    auto component = [&](Vector3d TrajectorySample::* field, int idx) {
        std::vector<double> out;
        out.reserve(trajectory.samples.size());
        for (const auto& row : trajectory.samples) out.push_back((row.*field)(idx));
        return out;
    };
    auto chart = [&](const std::string& file, const std::string& title,
                     const std::string& y_label, Vector3d TrajectorySample::* field,
                     const char* n1, const char* n2, const char* n3) {
        std::vector<PlotSeries> series(3);
        series[0] = {n1, t, component(field, 0)};
        series[1] = {n2, t, component(field, 1)};
        series[2] = {n3, t, component(field, 2)};
        write_line_chart(out_dir / file, title, "time [s]", y_label, series);
    };

    chart("rates.svg", "Body rates", "rad/s", &TrajectorySample::omega, "w1", "w2", "w3");
    chart("wheels.svg", "Reaction wheel speeds", "rad/s", &TrajectorySample::wheel_speed, "Om1",
          "Om2", "Om3");
    chart("attitude.svg", "Attitude quaternion components", "-", &TrajectorySample::q, "q1",
          "q2", "q3");
}

}  // namespace plqr
