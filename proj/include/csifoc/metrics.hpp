#pragma once

#include <optional>
#include <string>

#include "csifoc/scenario.hpp"
#include "csifoc/sim.hpp"

namespace csifoc {

/// Transition-quality numbers derived from a trace. Times are durations
/// measured from the respective switch instant; absent events leave the
/// optionals empty ("not achieved").
struct Metrics {
    std::optional<double> speed_osc_pp_t3;     // [rpm] peak-to-peak in the post-T3 window
    std::optional<double> current_osc_pp_t3;   // [A] peak-to-peak of rotor-frame i_q, same window
    std::optional<double> dq_convergence_time; // [s] after T3 until |i_dq true - active frame| stays < threshold
    std::optional<double> delta_hat_settle_time;  // [s] after T3 until |delta_hat| stays < band
    std::optional<double> t2_speed_jump;       // [rpm] peak deviation just after the T1->T2 switch
    std::optional<double> t2_time;             // [s] absolute switch instants, for reference
    std::optional<double> t3_time;
    bool stall_detected = false;
    std::optional<std::string> fault;
};

/// Pure function of the trace; recomputing from a written CSV reproduces
/// the emitted metrics exactly.
Metrics compute_metrics(const Trace& trace, const MetricsConfig& cfg);

}  // namespace csifoc
