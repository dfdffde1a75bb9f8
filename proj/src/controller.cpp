#include "csifoc/controller.hpp"

#include <algorithm>
#include <cmath>

namespace csifoc {

double pi_step(double error, double feedforward, PiState& st, const PiGains& g, double dt) {
    const double unsat = g.kp * error + st.integ + feedforward;
    const double out = std::clamp(unsat, g.out_min, g.out_max);
    // Clamping anti-windup: stop accumulating while pushing further into
    // the active limit.
    const bool saturated = out != unsat;
    if (!saturated || (error > 0.0) != (unsat > 0.0)) st.integ += g.ki * error * dt;
    return out;
}

IfReference if_reference(double t, const IfStartupParams& p, double theta_star_prev, double dt) {
    IfReference r;
    r.omega_star = std::min(p.k_omega * std::max(t, 0.0), p.omega_target);
    r.theta_star = theta_star_prev + r.omega_star * dt;
    r.i_dq_ref = {p.i_d_star, p.i_q_star};
    return r;
}

Vec2 current_loop_step(const Vec2& i_dq_ref, const Vec2& i_dq_meas, double omega_elec,
                       PiState& pi_d, PiState& pi_q, const PiGains& gains,
                       const ControllerModel& model, double dt) {
    const double e_d = i_dq_ref.x - i_dq_meas.x;
    const double e_q = i_dq_ref.y - i_dq_meas.y;
    const double ff_d = -omega_elec * model.l_eq * i_dq_meas.y;
    const double ff_q = omega_elec * model.l_eq * i_dq_meas.x + omega_elec * model.psi_eff;
    return {pi_step(e_d, ff_d, pi_d, gains, dt), pi_step(e_q, ff_q, pi_q, gains, dt)};
}

double speed_loop_step(double omega_ref, double omega_hat, PiState& st, const PiGains& gains,
                       double dt) {
    return pi_step(omega_ref - omega_hat, 0.0, st, gains, dt);
}

double align_compensator_step(double theta_hat, double theta_star, ControllerState& st,
                              const TransitionConfig& cfg, double dt, double t, bool locked) {
    st.align_target = wrap_pi(theta_star - theta_hat);
    const double max_step = cfg.align_ramp_rate * dt;
    st.align_offset += std::clamp(st.align_target - st.align_offset, -max_step, max_step);

    if (locked && std::abs(st.align_offset - st.align_target) < cfg.align_tol) {
        if (st.aligned_since < 0.0) st.aligned_since = t;
        st.aligned = (t - st.aligned_since) >= cfg.align_dwell;
    } else {
        st.aligned_since = -1.0;
        st.aligned = false;
    }
    return st.align_offset;
}

double hillclimb_step(double objective_now, ControllerState& st, const TransitionConfig& cfg) {
    if (st.hc_converged) return st.theta_c;

    st.hc_count += 1;
    // Let the loops settle for the first half of each decision window and
    // average the remainder.
    const int settle = cfg.hc_h / 2;
    if (st.hc_count > settle) st.hc_accum += objective_now;

    if (st.hc_count < cfg.hc_h) return st.theta_c;

    const double mean = st.hc_accum / static_cast<double>(cfg.hc_h - settle);
    if (st.hc_has_prev) {
        const bool flipped = mean < st.hc_prev_obj;
        if (flipped) st.hc_sign = -st.hc_sign;
        st.theta_c += st.hc_sign * cfg.hc_dtheta;

        if (st.hc_hist_len < kHcHistory) {
            st.hc_hist_flip[st.hc_hist_len] = flipped;
            st.hc_hist_theta[st.hc_hist_len] = st.theta_c;
            st.hc_hist_len += 1;
        } else {
            for (int i = 1; i < kHcHistory; ++i) {
                st.hc_hist_flip[i - 1] = st.hc_hist_flip[i];
                st.hc_hist_theta[i - 1] = st.hc_hist_theta[i];
            }
            st.hc_hist_flip[kHcHistory - 1] = flipped;
            st.hc_hist_theta[kHcHistory - 1] = st.theta_c;
        }

        if (st.hc_hist_len == kHcHistory) {
            int flips = 0;
            double lo = st.hc_hist_theta[0], hi = st.hc_hist_theta[0];
            for (int i = 0; i < kHcHistory; ++i) {
                flips += st.hc_hist_flip[i] ? 1 : 0;
                lo = std::min(lo, st.hc_hist_theta[i]);
                hi = std::max(hi, st.hc_hist_theta[i]);
            }
            // Oscillating in place: the maximum is bracketed; hold here.
            if (flips >= kHcFlipsToConverge &&
                ((hi - lo) <= cfg.hc_stop_band || flips >= kHcDenseFlips))
                st.hc_converged = true;
        }
    }
    st.hc_prev_obj = mean;
    st.hc_has_prev = true;
    st.hc_accum = 0.0;
    st.hc_count = 0;
    return st.theta_c;
}

namespace {

void enter_t3(ControllerState& st, const IfStartupParams& ifp) {
    st.terminal = Terminal::T3Sensorless;
    // The compensation angle takes over the frozen alignment offset so the
    // transform angle is continuous across the switch.
    st.theta_c = st.align_offset;
    st.hc_sign = 1;
    st.hc_has_prev = false;
    st.hc_accum = 0.0;
    st.hc_count = 0;
    st.hc_converged = false;
    st.hc_hist_len = 0;
    // Bumpless transfer: first speed-loop output equals i_q_star.
    st.pi_speed.integ = ifp.i_q_star;
}

}  // namespace

Terminal transition_supervisor(ControllerState& st, double t, const LockReport& lock,
                               const TransitionConfig& cfg, const IfStartupParams& ifp,
                               double dt) {
    switch (st.terminal) {
        case Terminal::T1If: {
            const bool ramp_done = ifp.k_omega * t >= ifp.omega_target;
            const bool go = cfg.mode == TransitionMode::Scheduled ? t >= cfg.t_align
                                                                  : (ramp_done && lock.locked);
            if (go) {
                st.terminal = Terminal::Align;
                st.align_offset = 0.0;
                st.aligned = false;
                st.aligned_since = -1.0;
            }
            break;
        }
        case Terminal::Align: {
            const bool due = cfg.mode == TransitionMode::Scheduled ? t >= cfg.t_to_t2 : true;
            if (due && st.aligned && lock.locked) {
                st.terminal = Terminal::T2Est;
                st.t2_entry_time = t;
            } else if (due && cfg.mode == TransitionMode::Scheduled) {
                st.align_hold_flagged = true;
            }
            break;
        }
        case Terminal::T2Est: {
            const bool due = cfg.mode == TransitionMode::Scheduled
                                 ? t >= cfg.t_to_t3
                                 : (t - st.t2_entry_time) >= cfg.t2_dwell;
            if (due) enter_t3(st, ifp);
            break;
        }
        case Terminal::T3Sensorless:
        case Terminal::Fault:
            break;
    }

    // Losing the estimate while it is the frame source is unrecoverable.
    if (st.terminal == Terminal::T2Est || st.terminal == Terminal::T3Sensorless) {
        if (!lock.locked) {
            if (st.lock_lost_since < 0.0) st.lock_lost_since = t;
            if (t - st.lock_lost_since >= cfg.lock_fault_dwell) {
                st.terminal = Terminal::Fault;
                st.fault = true;
            }
        } else {
            st.lock_lost_since = -1.0;
        }
    }
    (void)dt;
    return st.terminal;
}

double select_transform_angle(const ControllerState& st, double theta_hat) {
    switch (st.terminal) {
        case Terminal::T1If:
        case Terminal::Align:
            return st.theta_star;
        case Terminal::T2Est:
            return theta_hat + st.align_offset;
        case Terminal::T3Sensorless:
        case Terminal::Fault:
            return theta_hat + st.theta_c;
    }
    return st.theta_star;
}

}  // namespace csifoc
