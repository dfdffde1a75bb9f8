#include "csifoc/sim.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "csifoc/controller.hpp"
#include "csifoc/estimator.hpp"
#include "csifoc/integrator.hpp"

namespace csifoc {

namespace {

struct PlantStepper {
    const Scenario& sc;

    PlantState step(const PlantState& s, const Vec2& u_cmd_ab, double dt) const {
        auto f = [&](const std::array<double, PlantState::kSize>& a) {
            const PlantState x = PlantState::from_array(a);
            const Vec2 inj = inverter_injection(x, u_cmd_ab, sc.cable, sc.front_end);
            return plant_derivatives(x, inj, sc.load, sc.motor, sc.cable, sc.front_end,
                                     sc.front_end.i_dc_rated)
                .to_array();
        };
        return PlantState::from_array(
            integrate_step(s.to_array(), f, dt, sc.sim.integrator));
    }
};

}  // namespace

RunResult run_scenario(const Scenario& sc) {
    const double dt = sc.sim.dt_ctrl;
    const int substeps = sc.sim.substeps();
    const int n_cycles = static_cast<int>(std::llround(sc.sim.t_end / dt));

    std::mt19937_64 rng(sc.sim.rng_seed);
    std::normal_distribution<double> noise(0.0, sc.sim.noise.current_noise_std);
    std::uniform_real_distribution<double> angle_dist(-M_PI, M_PI);

    PlantState plant;
    plant.theta_e = sc.initial.rotor_angle;
    if (sc.initial.randomize_rotor_angle) plant.theta_e = angle_dist(rng);

    EstimatorState est;
    ControllerState ctrl;
    // The virtual frame starts the configured lag behind the rotor seed
    // the scenario hands to the controller (not the true rotor angle when
    // it has been randomized).
    ctrl.theta_star = sc.initial.rotor_angle - sc.if_startup.initial_lag;

    LockMonitor lockmon(sc.pll.lock);
    DelayLine<Vec2> i_delay(sc.sim.delay_cycles);
    DelayLine<Vec2> u_delay(sc.sim.delay_cycles);
    DelayLine<Vec2> v_delay(sc.sim.delay_cycles);

    PlantStepper stepper{sc};
    RunResult result;
    result.trace.reserve(static_cast<std::size_t>(n_cycles) + 1);

    for (int k = 0; k <= n_cycles; ++k) {
        const double t = k * dt;

        // --- measurements -------------------------------------------------
        Vec2 i_raw = plant.i_motor;
        if (sc.sim.noise.enabled) {
            i_raw.x += noise(rng);
            i_raw.y += noise(rng);
        }
        const Vec2 i_meas = i_delay.push(i_raw);
        // The observer consumes the drive's own delayed command by default;
        // the known control delay is applied to both signals so they stay
        // paired. Plant-voltage mode taps the motor terminals instead.
        const Vec2 u_for_obs =
            sc.sim.feedback_mode == FeedbackMode::CommandVoltage
                ? u_delay.push(ctrl.u_cmd_ab)
                : v_delay.push(motor_terminal_voltage(plant, sc.cable));

        // --- estimator -----------------------------------------------------
        try {
            est = observer_step(i_meas, u_for_obs, est, sc.observer_model, sc.observer.params,
                                dt);
        } catch (const std::domain_error& e) {
            throw NumericBlowup(t, e.what());
        }
        const PllStepResult pll = pll_step(est, sc.pll.params, dt);
        est = pll.st;
        lockmon.push(pll.eps, est.e_hat.norm());
        const LockReport lock = lockmon.report();

        // --- controller ----------------------------------------------------
        transition_supervisor(ctrl, t, lock, sc.transition, sc.if_startup, dt);

        ctrl.omega_hat_filt +=
            dt * sc.speed_loop.omega_filter_cutoff * (est.omega_hat - ctrl.omega_hat_filt);

        const IfReference ref = if_reference(t, sc.if_startup, ctrl.theta_star, dt);
        ctrl.theta_star = ref.theta_star;
        ctrl.omega_star = ref.omega_star;

        if (ctrl.terminal == Terminal::Align)
            align_compensator_step(est.theta_hat, ctrl.theta_star, ctrl, sc.transition, dt, t,
                                   lock.locked);

        const double theta_used = select_transform_angle(ctrl, est.theta_hat);
        const Vec2 i_dq_meas = park(i_meas, theta_used);

        Vec2 i_dq_ref = ref.i_dq_ref;
        double omega_elec = ctrl.omega_star;
        if (ctrl.terminal == Terminal::T2Est) {
            omega_elec = est.omega_hat;
        } else if (ctrl.terminal == Terminal::T3Sensorless) {
            omega_elec = est.omega_hat;
            i_dq_ref = {0.0, speed_loop_step(sc.if_startup.omega_target, ctrl.omega_hat_filt,
                                             ctrl.pi_speed, sc.speed_gains, dt)};
        }

        Vec2 u_dq;
        if (ctrl.terminal == Terminal::Fault) {
            ctrl.pi_d.integ = 0.0;
            ctrl.pi_q.integ = 0.0;
        } else {
            u_dq = current_loop_step(i_dq_ref, i_dq_meas, omega_elec, ctrl.pi_d, ctrl.pi_q,
                                     sc.current_gains, sc.controller_model, dt);
        }

        // The command written this cycle is realized half a control period
        // plus the modulation lag later; de-rotating by that known lead
        // gives the voltage actually applied.
        const double phi_lead = omega_elec * (0.5 * dt + sc.front_end.tau_inj);

        if (ctrl.terminal == Terminal::T3Sensorless) {
            // Hill-climb objective: q-axis voltage with the series drops
            // removed, normalized by speed, so its quasi-static value is
            // the flux-scaled cosine of the residual angle error. Built
            // from the PI integrators and the current references rather
            // than the raw sampled command, which keeps per-sample
            // measurement noise out of the window comparison.
            const ControllerModel& cm = sc.controller_model;
            const Vec2 u_quiet{
                ctrl.pi_d.integ - omega_elec * cm.l_eq * i_dq_ref.y,
                ctrl.pi_q.integ + omega_elec * (cm.l_eq * i_dq_ref.x + cm.psi_eff)};
            const Vec2 u_quiet_real = inverse_park(u_quiet, -phi_lead);
            const double w = std::abs(omega_elec) > 1.0 ? omega_elec : 1.0;
            const double obj = (u_quiet_real.y - cm.r_eq * i_dq_ref.y -
                                omega_elec * cm.l_eq * i_dq_ref.x) /
                               w;
            hillclimb_step(obj, ctrl, sc.transition);
        }

        ctrl.u_dq_cmd = u_dq;
        ctrl.u_cmd_ab = inverse_park(u_dq, theta_used);

        // --- monitors & telemetry -------------------------------------------
        const double delta_star = wrap_pi(plant.theta_e - ctrl.theta_star);
        const double trace_theta_c =
            ctrl.terminal == Terminal::T1If
                ? 0.0
                : (ctrl.terminal == Terminal::Align || ctrl.terminal == Terminal::T2Est
                       ? ctrl.align_offset
                       : ctrl.theta_c);
        const double delta_hat = wrap_pi(plant.theta_e - est.theta_hat - trace_theta_c);

        if ((ctrl.terminal == Terminal::T1If || ctrl.terminal == Terminal::Align) &&
            delta_star < 0.0)
            result.warnings.stall_detected = true;

        TraceRecord rec;
        rec.t = t;
        rec.theta_e = plant.theta_e;
        rec.theta_star = ctrl.theta_star;
        rec.theta_hat = est.theta_hat;
        rec.theta_used = theta_used;
        rec.theta_c = trace_theta_c;
        rec.omega_m_rpm = rad_s_to_rpm(plant.omega_m);
        rec.omega_hat_rpm = rad_s_to_rpm(est.omega_hat / sc.motor.pole_pairs);
        const Abc abc = inverse_clarke(plant.i_motor);
        rec.i_a = abc.a;
        rec.i_b = abc.b;
        rec.i_c = abc.c;
        const Vec2 i_dq_true = park(plant.i_motor, plant.theta_e);
        rec.i_d_true = i_dq_true.x;
        rec.i_q_true = i_dq_true.y;
        // Active-frame currents as the controller sees them (post delay
        // and noise), mirroring the sampled feedback a drive would log.
        rec.i_d_hat = i_dq_meas.x;
        rec.i_q_hat = i_dq_meas.y;
        rec.u_d_cmd = u_dq.x;
        rec.u_q_cmd = u_dq.y;
        rec.terminal = static_cast<int>(ctrl.terminal);
        rec.delta_star_deg = deg_from_rad(delta_star);
        rec.delta_hat_deg = deg_from_rad(delta_hat);
        rec.locked = lock.locked;
        result.trace.push_back(rec);

        // --- plant ----------------------------------------------------------
        if (k < n_cycles) {
            try {
                for (int i = 0; i < substeps; ++i)
                    plant = stepper.step(plant, ctrl.u_cmd_ab, sc.sim.dt_plant);
            } catch (const std::domain_error& e) {
                throw NumericBlowup(t, e.what());
            }
        }
    }

    result.warnings.align_hold = ctrl.align_hold_flagged;
    if (ctrl.fault) {
        result.warnings.fault = true;
        result.warnings.fault_reason = "estimator lock lost in sensorless operation";
    }
    return result;
}

}  // namespace csifoc
