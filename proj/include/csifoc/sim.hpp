#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "csifoc/angles.hpp"
#include "csifoc/plant.hpp"
#include "csifoc/scenario.hpp"

namespace csifoc {

/// One telemetry row per control cycle.
struct TraceRecord {
    double t = 0.0;              // [s]
    double theta_e = 0.0;        // true electrical angle [rad], unwrapped
    double theta_star = 0.0;     // virtual frame angle [rad], unwrapped
    double theta_hat = 0.0;      // raw PLL estimate [rad], unwrapped
    double theta_used = 0.0;     // transform angle actually applied [rad]
    double theta_c = 0.0;        // compensation added to theta_hat [rad]
    double omega_m_rpm = 0.0;    // mechanical speed [rpm]
    double omega_hat_rpm = 0.0;  // estimated speed, mechanical [rpm]
    double i_a = 0.0, i_b = 0.0, i_c = 0.0;       // phase currents [A]
    double i_d_true = 0.0, i_q_true = 0.0;        // motor currents, rotor frame [A]
    double i_d_hat = 0.0, i_q_hat = 0.0;          // motor currents, active frame [A]
    double u_d_cmd = 0.0, u_q_cmd = 0.0;          // voltage command, active frame [V]
    int terminal = 0;
    double delta_star_deg = 0.0;  // wrap(theta_e - theta_star) [deg]
    double delta_hat_deg = 0.0;   // wrap(theta_e - theta_hat - theta_c) [deg]
    bool locked = false;
};

using Trace = std::vector<TraceRecord>;

struct RunWarnings {
    bool stall_detected = false;
    bool align_hold = false;
    bool fault = false;
    std::string fault_reason;
};

struct RunResult {
    Trace trace;
    RunWarnings warnings;
};

/// Thrown when the state leaves the finite domain; carries the simulation
/// time at which it happened.
class NumericBlowup : public std::runtime_error {
  public:
    NumericBlowup(double t, const std::string& what)
        : std::runtime_error("numeric blowup at t=" + std::to_string(t) + " s: " + what),
          time(t) {}
    double time;
};

/// FIFO measurement delay of a fixed number of control cycles; zero delay
/// is the identity.
template <typename T>
class DelayLine {
  public:
    explicit DelayLine(int delay_cycles) : delay_(delay_cycles) {}

    T push(const T& sample) {
        if (delay_ == 0) return sample;
        buf_.push_back(sample);
        if (static_cast<int>(buf_.size()) <= delay_) return T{};
        T out = buf_.front();
        buf_.pop_front();
        return out;
    }

  private:
    int delay_;
    std::deque<T> buf_;
};

/// Deterministic fixed-step execution of one scenario: per control cycle
/// the measurements are sampled (delayed/noised), the estimator and
/// controller step once, and the plant integrates dt_ctrl/dt_plant
/// substeps. Throws NumericBlowup if the state diverges.
RunResult run_scenario(const Scenario& sc);

}  // namespace csifoc
