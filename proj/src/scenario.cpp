#include "csifoc/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace csifoc {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void Scenario::resolve() {
    require(motor.r_s > 0.0, "motor.R_s_ohm must be > 0 (ohms)");
    require(motor.l_s > 0.0, "motor.L_s_H must be > 0 (henries)");
    require(motor.psi_f > 0.0, "motor.psi_f_Wb must be > 0 (webers)");
    require(motor.pole_pairs >= 1, "motor.pole_pairs must be an integer >= 1");
    require(motor.inertia > 0.0, "motor.J_kgm2 must be > 0 (kg m^2)");
    require(motor.b_visc >= 0.0, "motor.B_visc_Nms must be >= 0 (N m s/rad)");

    require(cable.r_c >= 0.0, "cable.R_c_ohm must be >= 0 (ohms)");
    require(cable.l_c >= 0.0, "cable.L_c_H must be >= 0 (henries)");
    require(cable.c_c >= 0.0, "cable.C_c_F must be >= 0 (farads)");
    if (cable.topology == CableTopology::SeriesRlShuntC) {
        require(cable.l_c > 0.0, "cable.L_c_H must be > 0 (henries) for series_rl_shunt_c");
        require(cable.c_c > 0.0, "cable.C_c_F must be > 0 (farads) for series_rl_shunt_c");
    }

    require(front_end.c_o > 0.0, "front_end.C_o_F must be > 0 (farads)");
    require(front_end.i_dc_rated > 0.0, "front_end.i_dc_rated_A must be > 0 (amperes)");
    require(front_end.tau_dc > 0.0, "front_end.tau_dc_s must be > 0 (seconds)");
    require(front_end.tau_inj > 0.0, "front_end.tau_inj_s must be > 0 (seconds)");

    require(load.t_0 >= 0.0, "load.T_0_Nm must be >= 0 (newton-meters)");
    require(load.k_pump >= 0.0, "load.k_pump_Nms2 must be >= 0 (N m s^2/rad^2)");

    require(if_startup.k_omega > 0.0, "if_startup.K_omega_rad_s2 must be > 0 (rad/s^2)");
    require(if_startup.i_q_star > 0.0, "if_startup.i_q_star_A must be > 0 (amperes)");
    require(if_startup.initial_lag > 0.0 && if_startup.initial_lag <= M_PI,
            "if_startup.initial_lag_rad must be in (0, pi] (radians)");

    require(transition.t_align < transition.t_to_t2 && transition.t_to_t2 < transition.t_to_t3,
            "transition times must satisfy t_align_s < t_to_T2_s < t_to_T3_s (seconds)");
    require(transition.hc_dtheta > 0.0, "transition.hc_dtheta_rad must be > 0 (radians)");
    require(transition.hc_h >= 1, "transition.hc_h_cycles must be an integer >= 1");
    require(transition.align_ramp_rate > 0.0,
            "transition.align_ramp_rate_rad_s must be > 0 (rad/s)");
    require(transition.align_tol > 0.0, "transition.align_tol_rad must be > 0 (radians)");

    require(sim.dt_plant > 0.0, "sim.dt_plant_s must be > 0 (seconds)");
    require(sim.dt_ctrl > 0.0, "sim.dt_ctrl_s must be > 0 (seconds)");
    require(sim.t_end > 0.0, "sim.t_end_s must be > 0 (seconds)");
    require(sim.delay_cycles >= 0, "sim.delay_cycles must be an integer >= 0");
    const double ratio = sim.dt_ctrl / sim.dt_plant;
    require(std::abs(ratio - std::round(ratio)) < 1e-9 * ratio && ratio >= 1.0,
            "sim.dt_ctrl_s must be an integer multiple of sim.dt_plant_s (seconds)");

    require(observer.params.g_obs > 0.0, "observer.g_obs_1_s must be > 0 (1/s)");
    require(observer.params.emf_filter_cutoff > 0.0,
            "observer.emf_filter_cutoff_rad_s must be > 0 (rad/s)");
    require(pll.params.kp > 0.0, "pll.kp_rad_s must be > 0 (rad/s)");
    require(pll.params.ki > 0.0, "pll.ki_rad_s2 must be > 0 (rad/s^2)");
    require(current_loop.u_min < current_loop.u_max,
            "current_loop.u_min_V must be < current_loop.u_max_V (volts)");
    require(speed_loop.i_min < speed_loop.i_max,
            "speed_loop.i_min_A must be < speed_loop.i_max_A (amperes)");
    require(metrics.t3_window > 0.0, "metrics.t3_window_s must be > 0 (seconds)");
    require(metrics.dq_threshold > 0.0, "metrics.dq_threshold_A must be > 0 (amperes)");

    // The controller and estimator work against the impedance seen from
    // the drive terminals: motor plus series cable when the cable is
    // modeled, the motor alone otherwise or when the plant voltage is
    // measured directly.
    const bool lumped = cable.topology == CableTopology::SeriesRlShuntC;
    controller_model.r_eq = motor.r_s + (lumped ? cable.r_c : 0.0);
    controller_model.l_eq = motor.l_s + (lumped ? cable.l_c : 0.0);
    controller_model.psi_eff = motor.psi_eff();

    current_gains.kp = current_loop.kp.value_or(controller_model.l_eq * current_loop.omega_cc);
    current_gains.ki = current_loop.ki.value_or(controller_model.r_eq * current_loop.omega_cc);
    current_gains.out_min = current_loop.u_min;
    current_gains.out_max = current_loop.u_max;
    current_loop.kp = current_gains.kp;
    current_loop.ki = current_gains.ki;

    speed_gains.kp = speed_loop.kp;
    speed_gains.ki = speed_loop.ki;
    speed_gains.out_min = speed_loop.i_min;
    speed_gains.out_max = speed_loop.i_max;

    const bool use_lumped_obs =
        sim.feedback_mode == FeedbackMode::CommandVoltage && lumped;
    observer_model.r = observer.r_override.value_or(use_lumped_obs ? motor.r_s + cable.r_c
                                                                   : motor.r_s);
    observer_model.l = observer.l_override.value_or(use_lumped_obs ? motor.l_s + cable.l_c
                                                                   : motor.l_s);
    observer.r_override = observer_model.r;
    observer.l_override = observer_model.l;
}

Scenario default_scenario() {
    Scenario sc;
    sc.resolve();
    return sc;
}

}  // namespace csifoc
