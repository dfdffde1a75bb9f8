#pragma once

#include <cstddef>
#include <vector>

#include "csifoc/angles.hpp"

namespace csifoc {

/// Gains of the current observer with a rotating EMF disturbance model.
struct ObserverParams {
    double g_obs = 2000.0;             // current correction gain [1/s]
    double emf_filter_cutoff = 1500.0; // EMF estimator bandwidth factor [rad/s]
};

/// Machine model the estimator works against. With the default
/// command-voltage feedback this is the drive-side equivalent impedance
/// (motor plus cable); with plant-voltage feedback it is the motor alone.
struct ObserverModel {
    double r = 2.16;    // [ohm]
    double l = 4.56e-3; // [H]
};

struct PllParams {
    double kp = 200.0;               // [rad/s per unit phase error]
    double ki = 10000.0;             // [rad/s^2 per unit]
    double omega_hat_limit = 754.0;  // speed estimate clamp [rad/s]
    double emf_floor = 2.0;          // |e_hat| below this is untrusted [V]
};

struct EstimatorState {
    Vec2 i_hat;                 // observer current estimate [A]
    Vec2 e_hat;                 // estimated back EMF [V]
    double theta_hat = 0.0;     // estimated electrical angle [rad], unwrapped
    double omega_hat = 0.0;     // estimated electrical speed [rad/s]
    double pll_integrator = 0.0;
};

/// One Euler step of the observer:
///   l di_hat/dt = u - r i_hat - e_hat + l g (i - i_hat)
///   de_hat/dt   = omega_hat J e_hat - cutoff l g (i - i_hat)
/// The rotation term is the internal model of a spinning EMF phasor; its
/// speed is the PLL's current estimate. Throws std::domain_error on
/// non-finite inputs.
EstimatorState observer_step(const Vec2& i_meas, const Vec2& u_cmd, const EstimatorState& st,
                             const ObserverModel& model, const ObserverParams& op, double dt);

struct PllStepResult {
    EstimatorState st;
    double eps = 0.0;       // normalized phase error, sin(theta_e - theta_hat) when e_hat exact
    bool emf_trusted = false;
};

/// Quadrature phase detector + PI + integrator. theta_hat is first
/// predicted with the previous speed estimate so the post-step angle
/// refers to the same instant as the measurement; below the EMF floor the
/// detector output is ignored and theta_hat coasts.
PllStepResult pll_step(const EstimatorState& st, const PllParams& pp, double dt);

struct LockReport {
    bool locked = false;
    double emf_mag = 0.0;  // [V]
    double eps_rms = 0.0;
};

struct LockParams {
    double emf_min = 4.0;       // [V]
    double eps_rms_max = 0.05;
    std::size_t window = 250;   // control cycles
};

/// Rolling window over phase-detector samples deciding whether the
/// estimate is trustworthy.
class LockMonitor {
  public:
    explicit LockMonitor(const LockParams& p) : params_(p) {}

    void push(double eps, double emf_mag);
    LockReport report() const;
    void reset();

  private:
    LockParams params_;
    std::vector<double> eps_window_;
    std::size_t pos_ = 0;
    bool full_ = false;
    double sum_sq_ = 0.0;
    double emf_mag_ = 0.0;
};

/// Lock predicate over an externally collected window of eps samples.
LockReport lock_quality(const std::vector<double>& eps_window, double emf_mag,
                        const LockParams& p);

}  // namespace csifoc
