#include "csifoc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csifoc {

EstimatorState observer_step(const Vec2& i_meas, const Vec2& u_cmd, const EstimatorState& st,
                             const ObserverModel& model, const ObserverParams& op, double dt) {
    if (!std::isfinite(i_meas.x) || !std::isfinite(i_meas.y) || !std::isfinite(u_cmd.x) ||
        !std::isfinite(u_cmd.y))
        throw std::domain_error("observer_step: non-finite measurement or voltage input");

    const Vec2 delta = i_meas - st.i_hat;
    const Vec2 di =
        (u_cmd - model.r * st.i_hat - st.e_hat) * (1.0 / model.l) + op.g_obs * delta;
    // Rotating disturbance model for the EMF phasor: the phasor is advanced
    // by an exact rotation at the PLL speed, then corrected. The correction
    // gain is sized so the EMF loop closes at sqrt(cutoff * g_obs).
    const double k_corr = op.emf_filter_cutoff * model.l * op.g_obs;

    EstimatorState out = st;
    out.i_hat += dt * di;
    out.e_hat = inverse_park(st.e_hat, st.omega_hat * dt) - (k_corr * dt) * delta;
    return out;
}

PllStepResult pll_step(const EstimatorState& st, const PllParams& pp, double dt) {
    PllStepResult r;
    r.st = st;
    // Predict first so the corrected angle refers to the measurement instant.
    r.st.theta_hat += st.omega_hat * dt;

    const double mag = st.e_hat.norm();
    if (mag >= pp.emf_floor) {
        r.emf_trusted = true;
        r.eps = (-st.e_hat.x * std::cos(r.st.theta_hat) - st.e_hat.y * std::sin(r.st.theta_hat)) /
                mag;
        r.st.omega_hat = std::clamp(st.pll_integrator + pp.kp * r.eps, -pp.omega_hat_limit,
                                    pp.omega_hat_limit);
        r.st.pll_integrator += pp.ki * r.eps * dt;
    }
    return r;
}

void LockMonitor::push(double eps, double emf_mag) {
    emf_mag_ = emf_mag;
    if (params_.window == 0) return;
    if (eps_window_.size() < params_.window) {
        eps_window_.push_back(eps);
        sum_sq_ += eps * eps;
        full_ = eps_window_.size() == params_.window;
    } else {
        sum_sq_ += eps * eps - eps_window_[pos_] * eps_window_[pos_];
        eps_window_[pos_] = eps;
        pos_ = (pos_ + 1) % params_.window;
    }
}

LockReport LockMonitor::report() const {
    LockReport rep;
    rep.emf_mag = emf_mag_;
    if (!full_ || eps_window_.empty()) return rep;
    rep.eps_rms = std::sqrt(std::max(sum_sq_, 0.0) / static_cast<double>(eps_window_.size()));
    rep.locked = emf_mag_ > params_.emf_min && rep.eps_rms < params_.eps_rms_max;
    return rep;
}

void LockMonitor::reset() {
    eps_window_.clear();
    pos_ = 0;
    full_ = false;
    sum_sq_ = 0.0;
    emf_mag_ = 0.0;
}

LockReport lock_quality(const std::vector<double>& eps_window, double emf_mag,
                        const LockParams& p) {
    LockReport rep;
    rep.emf_mag = emf_mag;
    if (eps_window.empty()) return rep;
    double sum_sq = 0.0;
    for (double e : eps_window) sum_sq += e * e;
    rep.eps_rms = std::sqrt(sum_sq / static_cast<double>(eps_window.size()));
    rep.locked = emf_mag > p.emf_min && rep.eps_rms < p.eps_rms_max;
    return rep;
}

}  // namespace csifoc
