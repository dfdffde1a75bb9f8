#pragma once

#include <array>
#include <cstdint>

#include "csifoc/angles.hpp"
#include "csifoc/estimator.hpp"

namespace csifoc {

/// I-f open-loop startup: constant current reference rotating at a ramped
/// commanded frequency.
struct IfStartupParams {
    double k_omega = 125.66370614359172;       // ramp slope [rad/s^2 electrical]
    double i_q_star = 4.0;                     // startup q-axis current [A]
    double i_d_star = 0.0;                     // d-axis current [A]
    double omega_target = 188.49555921538757;  // [rad/s electrical] (300 rpm at P=6)
    double initial_lag = M_PI / 2.0;           // virtual frame seeded this far behind the rotor
};

struct PiGains {
    double kp = 0.0;
    double ki = 0.0;
    double out_min = 0.0;
    double out_max = 0.0;
};

struct PiState {
    double integ = 0.0;
};

/// PI with clamping anti-windup; feedforward enters before the clamp.
double pi_step(double error, double feedforward, PiState& st, const PiGains& g, double dt);

enum class TransitionMode : std::uint8_t { Scheduled, ConditionBased };

struct TransitionConfig {
    TransitionMode mode = TransitionMode::Scheduled;
    double t_align = 2.5;     // [s]
    double t_to_t2 = 3.0;     // [s]
    double t_to_t3 = 3.5;     // [s]
    double align_ramp_rate = 4.0;  // [rad/s]
    double align_tol = 0.01;       // [rad]
    double align_dwell = 0.05;     // [s]
    double t2_dwell = 0.5;         // ConditionBased: time spent in terminal 2 [s]
    double hc_dtheta = 0.005;      // hill-climb step [rad]
    int hc_h = 12;                 // control cycles per hill-climb decision
    double hc_stop_band = 0.015;   // recent theta_c span treated as converged [rad]
    double lock_fault_dwell = 0.02;  // lock must stay lost this long to fault [s]
};

enum class Terminal : std::uint8_t {
    T1If = 0,
    Align = 1,
    T2Est = 2,
    T3Sensorless = 3,
    Fault = 4,
};

/// Controller-side machine model: drive-terminal equivalent impedance plus
/// the effective flux constant for EMF feedforward.
struct ControllerModel {
    double r_eq = 13.92;     // [ohm]
    double l_eq = 14.26e-3;  // [H]
    double psi_eff = 0.21650635094610965;  // [V s/rad electrical]
};

/// Number of recent hill-climb decisions inspected by the convergence rule.
constexpr int kHcHistory = 6;
/// Flips within the history window that, together with a theta_c span
/// inside hc_stop_band, latch the hold.
constexpr int kHcFlipsToConverge = 3;
/// Flip density that latches regardless of the span; sustained dense
/// flipping only happens when the maximum is bracketed.
constexpr int kHcDenseFlips = 4;

struct ControllerState {
    Terminal terminal = Terminal::T1If;

    double theta_star = 0.0;   // virtual frame angle [rad], unwrapped
    double omega_star = 0.0;   // [rad/s electrical]

    double align_offset = 0.0;     // [rad]
    double align_target = 0.0;     // [rad]
    bool aligned = false;
    double aligned_since = -1.0;   // [s]; < 0 means not inside tolerance
    bool align_hold_flagged = false;

    double theta_c = 0.0;   // hill-climb compensation angle [rad]
    int hc_sign = 1;
    bool hc_has_prev = false;
    double hc_prev_obj = 0.0;
    double hc_accum = 0.0;
    int hc_count = 0;
    bool hc_converged = false;  // the stop-band hold has latched; theta_c is held
    int hc_hist_len = 0;
    std::array<bool, kHcHistory> hc_hist_flip{};
    std::array<double, kHcHistory> hc_hist_theta{};

    PiState pi_d, pi_q, pi_speed;
    double omega_hat_filt = 0.0;  // filtered speed estimate for the speed loop [rad/s]
    double lock_lost_since = -1.0;

    Vec2 u_dq_cmd;   // last voltage command in the active frame [V]
    Vec2 u_cmd_ab;   // last voltage command, stationary frame [V]

    double t2_entry_time = -1.0;
    bool fault = false;
};

struct IfReference {
    double theta_star;
    double omega_star;
    Vec2 i_dq_ref;
};

/// Ramp-and-hold speed command integrated into the virtual frame angle.
IfReference if_reference(double t, const IfStartupParams& p, double theta_star_prev, double dt);

/// dq current PI with cross-coupling decoupling and EMF feedforward.
Vec2 current_loop_step(const Vec2& i_dq_ref, const Vec2& i_dq_meas, double omega_elec,
                       PiState& pi_d, PiState& pi_q, const PiGains& gains,
                       const ControllerModel& model, double dt);

/// Speed PI producing the q-axis current reference (terminal 3 only).
double speed_loop_step(double omega_ref, double omega_hat, PiState& st, const PiGains& gains,
                       double dt);

/// Slews align_offset toward wrap(theta_star - theta_hat) and tracks the
/// completion dwell. Completion is refused while the estimator is not
/// locked.
double align_compensator_step(double theta_hat, double theta_star, ControllerState& st,
                              const TransitionConfig& cfg, double dt, double t, bool locked);

/// Fixed-step extremum seeker on the supplied objective sample. Steps
/// theta_c every hc_h cycles, flipping direction when the window mean
/// decreased; holds theta_c once the recent decisions oscillate in place.
double hillclimb_step(double objective_now, ControllerState& st, const TransitionConfig& cfg);

/// Terminal sequencing. Scheduled mode switches at the configured times
/// (holding ALIGN->T2 until aligned and locked); ConditionBased switches on
/// the same conditions as soon as they are met. Lock lost in T2/T3 faults
/// the controller.
Terminal transition_supervisor(ControllerState& st, double t, const LockReport& lock,
                               const TransitionConfig& cfg, const IfStartupParams& ifp,
                               double dt);

/// Angle used for all frame transforms in the current terminal.
double select_transform_angle(const ControllerState& st, double theta_hat);

}  // namespace csifoc
