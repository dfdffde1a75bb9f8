#include "csifoc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "csifoc/controller.hpp"

namespace csifoc {

namespace {

int first_with_terminal(const Trace& trace, Terminal term) {
    for (std::size_t i = 0; i < trace.size(); ++i)
        if (trace[i].terminal == static_cast<int>(term)) return static_cast<int>(i);
    return -1;
}

/// Earliest index i >= from such that pred holds for every record from i to
/// the end; -1 when even the last record violates it.
template <typename Pred>
int settle_index(const Trace& trace, int from, Pred pred) {
    int last_violation = from - 1;
    for (std::size_t i = static_cast<std::size_t>(from); i < trace.size(); ++i)
        if (!pred(trace[i])) last_violation = static_cast<int>(i);
    if (last_violation + 1 >= static_cast<int>(trace.size())) return -1;
    return last_violation + 1;
}

}  // namespace

Metrics compute_metrics(const Trace& trace, const MetricsConfig& cfg) {
    Metrics m;
    if (trace.empty()) return m;

    for (const auto& r : trace) {
        const bool startup = r.terminal == static_cast<int>(Terminal::T1If) ||
                             r.terminal == static_cast<int>(Terminal::Align);
        if (startup && r.delta_star_deg < 0.0) m.stall_detected = true;
        if (r.terminal == static_cast<int>(Terminal::Fault) && !m.fault)
            m.fault = "estimator lock lost in sensorless operation";
    }

    const int i2 = first_with_terminal(trace, Terminal::T2Est);
    if (i2 >= 0) {
        m.t2_time = trace[i2].t;
        const double base = trace[i2].omega_m_rpm;
        const double t_stop = trace[i2].t + cfg.t2_jump_window;
        double peak = 0.0;
        for (std::size_t i = static_cast<std::size_t>(i2); i < trace.size(); ++i) {
            if (trace[i].t > t_stop) break;
            peak = std::max(peak, std::abs(trace[i].omega_m_rpm - base));
        }
        m.t2_speed_jump = peak;
    }

    const int i3 = first_with_terminal(trace, Terminal::T3Sensorless);
    if (i3 < 0) return m;
    m.t3_time = trace[i3].t;
    const double t3 = trace[i3].t;

    double sp_min = trace[i3].omega_m_rpm, sp_max = sp_min;
    double iq_min = trace[i3].i_q_true, iq_max = iq_min;
    for (std::size_t i = static_cast<std::size_t>(i3); i < trace.size(); ++i) {
        if (trace[i].t > t3 + cfg.t3_window) break;
        sp_min = std::min(sp_min, trace[i].omega_m_rpm);
        sp_max = std::max(sp_max, trace[i].omega_m_rpm);
        iq_min = std::min(iq_min, trace[i].i_q_true);
        iq_max = std::max(iq_max, trace[i].i_q_true);
    }
    m.speed_osc_pp_t3 = sp_max - sp_min;
    m.current_osc_pp_t3 = iq_max - iq_min;

    const int conv = settle_index(trace, i3, [&](const TraceRecord& r) {
        return std::max(std::abs(r.i_d_true - r.i_d_hat), std::abs(r.i_q_true - r.i_q_hat)) <
               cfg.dq_threshold;
    });
    if (conv >= 0) m.dq_convergence_time = trace[conv].t - t3;

    const int settle = settle_index(trace, i3, [&](const TraceRecord& r) {
        return std::abs(r.delta_hat_deg) < cfg.settle_band_deg;
    });
    if (settle >= 0) m.delta_hat_settle_time = trace[settle].t - t3;

    return m;
}

}  // namespace csifoc
