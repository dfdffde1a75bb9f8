#include "csifoc/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csifoc/angles.hpp"
#include "csifoc/controller.hpp"

namespace csifoc {

namespace {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> y;
};

struct Panel {
    std::string y_label;
    std::vector<Series> series;
};

constexpr int kWidth = 900;
constexpr int kPanelHeight = 240;
constexpr int kMarginLeft = 62;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 34;
constexpr int kMarginBottom = 40;
constexpr std::size_t kMaxPoints = 2000;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

/// A tick spacing of the 1/2/5 decade family covering the range.
double nice_step(double span, int target_ticks) {
    if (span <= 0.0) return 1.0;
    const double raw = span / std::max(target_ticks, 1);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

void render_panel(std::ostringstream& svg, const Panel& panel, const std::vector<double>& x,
                  double x_min, double x_max, int y_offset,
                  const std::vector<double>& marker_times, bool draw_x_labels) {
    const int plot_w = kWidth - kMarginLeft - kMarginRight;
    const int plot_h = kPanelHeight - kMarginTop - kMarginBottom;
    const int top = y_offset + kMarginTop;

    double y_min = 0.0, y_max = 1.0;
    bool first = true;
    for (const auto& s : panel.series)
        for (double v : s.y) {
            if (first) {
                y_min = y_max = v;
                first = false;
            } else {
                y_min = std::min(y_min, v);
                y_max = std::max(y_max, v);
            }
        }
    if (y_max - y_min < 1e-12) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double pad = 0.06 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    const double x_span = std::max(x_max - x_min, 1e-12);
    auto px = [&](double v) { return kMarginLeft + (v - x_min) / x_span * plot_w; };
    auto py = [&](double v) { return top + plot_h - (v - y_min) / (y_max - y_min) * plot_h; };

    svg << "<rect x='" << kMarginLeft << "' y='" << top << "' width='" << plot_w
        << "' height='" << plot_h << "' fill='white' stroke='#444'/>\n";

    const double ystep = nice_step(y_max - y_min, 5);
    for (double v = std::ceil(y_min / ystep) * ystep; v <= y_max + 1e-12; v += ystep) {
        svg << "<line x1='" << kMarginLeft << "' y1='" << fmt(py(v)) << "' x2='"
            << kMarginLeft + plot_w << "' y2='" << fmt(py(v))
            << "' stroke='#ddd' stroke-width='0.6'/>\n";
        svg << "<text x='" << kMarginLeft - 6 << "' y='" << fmt(py(v) + 3.5)
            << "' font-size='10' text-anchor='end' fill='#333'>" << fmt(v) << "</text>\n";
    }
    const double xstep = nice_step(x_span, 8);
    for (double v = std::ceil(x_min / xstep) * xstep; v <= x_max + 1e-12; v += xstep) {
        svg << "<line x1='" << fmt(px(v)) << "' y1='" << top << "' x2='" << fmt(px(v)) << "' y2='"
            << top + plot_h << "' stroke='#eee' stroke-width='0.6'/>\n";
        if (draw_x_labels)
            svg << "<text x='" << fmt(px(v)) << "' y='" << top + plot_h + 14
                << "' font-size='10' text-anchor='middle' fill='#333'>" << fmt(v) << "</text>\n";
    }

    for (double tm : marker_times) {
        if (tm < x_min || tm > x_max) continue;
        svg << "<line x1='" << fmt(px(tm)) << "' y1='" << top << "' x2='" << fmt(px(tm))
            << "' y2='" << top + plot_h
            << "' stroke='#999' stroke-width='1' stroke-dasharray='4,3' class='terminal-marker'"
            << " data-t='" << fmt(tm) << "'/>\n";
    }

    int li = 0;
    for (const auto& s : panel.series) {
        svg << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.2' points='";
        for (std::size_t i = 0; i < s.y.size(); ++i)
            svg << fmt(px(x[i])) << "," << fmt(py(s.y[i])) << " ";
        svg << "'/>\n";
        svg << "<text x='" << kMarginLeft + plot_w - 8 - 110 * li << "' y='" << top - 6
            << "' font-size='11' text-anchor='end' fill='" << s.color << "'>" << s.label
            << "</text>\n";
        ++li;
    }

    svg << "<text x='14' y='" << top + plot_h / 2
        << "' font-size='11' fill='#222' text-anchor='middle' transform='rotate(-90 14 "
        << top + plot_h / 2 << ")'>" << panel.y_label << "</text>\n";
    if (draw_x_labels)
        svg << "<text x='" << kMarginLeft + plot_w / 2 << "' y='" << top + plot_h + 30
            << "' font-size='11' fill='#222' text-anchor='middle'>t [s]</text>\n";
}

void write_figure(const std::string& path, const std::string& title,
                  const std::vector<Panel>& panels, const std::vector<double>& x,
                  const std::vector<double>& marker_times) {
    const int height = kPanelHeight * static_cast<int>(panels.size()) + 8;
    std::ostringstream svg;
    svg << "<?xml version='1.0' encoding='UTF-8'?>\n";
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << height
        << "' viewBox='0 0 " << kWidth << " " << height << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << kWidth / 2 << "' y='18' font-size='13' text-anchor='middle' "
        << "font-weight='bold' fill='#111'>" << title << "</text>\n";

    const double x_min = x.front();
    const double x_max = x.back() > x.front() ? x.back() : x.front() + 1.0;
    for (std::size_t p = 0; p < panels.size(); ++p)
        render_panel(svg, panels[p], x, x_min, x_max, static_cast<int>(p) * kPanelHeight,
                     marker_times, p + 1 == panels.size());
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plot: " + path);
    out << svg.str();
}

std::vector<std::size_t> sample_indices(std::size_t n) {
    std::vector<std::size_t> idx;
    const std::size_t stride = std::max<std::size_t>(1, n / kMaxPoints);
    for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
    if (idx.back() != n - 1) idx.push_back(n - 1);
    return idx;
}

}  // namespace

std::vector<std::string> emit_plots(const Trace& trace, const std::string& out_dir) {
    if (trace.empty()) throw std::invalid_argument("emit_plots: empty trace");
    std::filesystem::create_directories(out_dir);

    const auto idx = sample_indices(trace.size());
    std::vector<double> x;
    x.reserve(idx.size());
    for (auto i : idx) x.push_back(trace[i].t);

    std::vector<double> markers;
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i].terminal != trace[i - 1].terminal) markers.push_back(trace[i].t);

    auto col = [&](auto getter) {
        std::vector<double> v;
        v.reserve(idx.size());
        for (auto i : idx) v.push_back(getter(trace[i]));
        return v;
    };
    auto wrapped_deg = [](double rad) { return deg_from_rad(wrap_2pi(rad)); };

    std::vector<std::string> files;
    auto emit = [&](const std::string& name, const std::string& title,
                    std::vector<Panel> panels) {
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        write_figure(path, title, panels, x, markers);
        files.push_back(path);
    };

    emit("speed.svg", "Motor speed through startup and transition",
         {Panel{"speed [rpm]",
                {{"measured", "#c0392b", col([](const TraceRecord& r) { return r.omega_m_rpm; })},
                 {"estimated", "#2471a3",
                  col([](const TraceRecord& r) { return r.omega_hat_rpm; })}}}});

    emit("position_est_vs_virtual.svg", "Estimated vs virtual reference position",
         {Panel{"angle [deg]",
                {{"virtual", "#2471a3",
                  col([&](const TraceRecord& r) { return wrapped_deg(r.theta_star); })},
                 {"estimated+comp", "#c0392b",
                  col([&](const TraceRecord& r) { return wrapped_deg(r.theta_hat + r.theta_c); })}}},
          Panel{"error [deg]",
                {{"virtual - est", "#117a65", col([](const TraceRecord& r) {
                      return r.delta_star_deg - r.delta_hat_deg;
                  })}}}});

    emit("position_real_vs_est.svg", "Real vs estimated position",
         {Panel{"angle [deg]",
                {{"real", "#2471a3",
                  col([&](const TraceRecord& r) { return wrapped_deg(r.theta_e); })},
                 {"estimated+comp", "#c0392b",
                  col([&](const TraceRecord& r) { return wrapped_deg(r.theta_hat + r.theta_c); })}}},
          Panel{"error [deg]",
                {{"real - est", "#117a65",
                  col([](const TraceRecord& r) { return r.delta_hat_deg; })}}}});

    emit("currents_abc_dq.svg", "Phase and rotor-frame currents",
         {Panel{"i_abc [A]",
                {{"i_a", "#c0392b", col([](const TraceRecord& r) { return r.i_a; })},
                 {"i_b", "#2471a3", col([](const TraceRecord& r) { return r.i_b; })},
                 {"i_c", "#117a65", col([](const TraceRecord& r) { return r.i_c; })}}},
          Panel{"i_dq [A]",
                {{"i_d", "#8e44ad", col([](const TraceRecord& r) { return r.i_d_true; })},
                 {"i_q", "#d68910", col([](const TraceRecord& r) { return r.i_q_true; })}}}});

    emit("currents_est_frame.svg", "Active estimated-frame currents",
         {Panel{"i_dq (active frame) [A]",
                {{"i_d", "#8e44ad", col([](const TraceRecord& r) { return r.i_d_hat; })},
                 {"i_q", "#d68910", col([](const TraceRecord& r) { return r.i_q_hat; })}}}});

    return files;
}

}  // namespace csifoc
