#include "csifoc/scenario_io.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace csifoc {

using json = nlohmann::ordered_json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

/// One scenario section; tracks consumed keys so leftovers are rejected.
class Group {
  public:
    Group(const json& root, const std::string& name) : name_(name) {
        if (root.contains(name)) {
            if (!root.at(name).is_object())
                fail("scenario." + name + " must be a JSON object");
            obj_ = root.at(name);
        }
    }

    double num(const char* key, double fallback) {
        return fetch<double>(key, fallback, "a number");
    }
    int integer(const char* key, int fallback) {
        return fetch<int>(key, fallback, "an integer");
    }
    bool boolean(const char* key, bool fallback) {
        return fetch<bool>(key, fallback, "a boolean");
    }
    std::string str(const char* key, const std::string& fallback) {
        return fetch<std::string>(key, fallback, "a string");
    }
    std::optional<double> opt_num(const char* key, std::optional<double> fallback) {
        if (!obj_.contains(key)) return fallback;
        seen_.insert(key);
        const auto& v = obj_.at(key);
        if (v.is_null()) return std::nullopt;
        if (!v.is_number()) fail("scenario." + name_ + "." + key + " must be a number or null");
        return v.get<double>();
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key()))
                fail("scenario." + name_ + " has unknown key '" + it.key() + "'");
        }
    }

  private:
    template <typename T>
    T fetch(const char* key, T fallback, const char* kind) {
        if (!obj_.contains(key)) return fallback;
        seen_.insert(key);
        try {
            return obj_.at(key).get<T>();
        } catch (const json::exception&) {
            fail("scenario." + name_ + "." + key + " must be " + kind);
        }
    }

    std::string name_;
    json obj_ = json::object();
    std::set<std::string> seen_;
};

}  // namespace

Scenario scenario_from_json(const ordered_json& j) {
    if (!j.is_object() && !j.is_null()) fail("scenario document must be a JSON object");
    const json root = j.is_null() ? json::object() : j;

    static const std::set<std::string> known_groups = {
        "motor",      "cable",     "front_end", "load",    "if_startup", "current_loop",
        "speed_loop", "observer",  "pll",       "transition", "sim",     "initial",
        "metrics"};
    for (auto it = root.begin(); it != root.end(); ++it)
        if (!known_groups.count(it.key()))
            fail("scenario has unknown section '" + it.key() + "'");

    Scenario sc;

    {
        Group g(root, "motor");
        sc.motor.r_s = g.num("R_s_ohm", sc.motor.r_s);
        sc.motor.l_s = g.num("L_s_H", sc.motor.l_s);
        sc.motor.psi_f = g.num("psi_f_Wb", sc.motor.psi_f);
        sc.motor.pole_pairs = g.integer("pole_pairs", sc.motor.pole_pairs);
        sc.motor.inertia = g.num("J_kgm2", sc.motor.inertia);
        sc.motor.b_visc = g.num("B_visc_Nms", sc.motor.b_visc);
        g.finish();
    }
    {
        Group g(root, "cable");
        const std::string topo = g.str("topology", sc.cable.topology == CableTopology::Direct
                                                       ? "direct"
                                                       : "series_rl_shunt_c");
        if (topo == "direct")
            sc.cable.topology = CableTopology::Direct;
        else if (topo == "series_rl_shunt_c")
            sc.cable.topology = CableTopology::SeriesRlShuntC;
        else
            fail("scenario.cable.topology must be 'direct' or 'series_rl_shunt_c'");
        sc.cable.r_c = g.num("R_c_ohm", sc.cable.r_c);
        sc.cable.l_c = g.num("L_c_H", sc.cable.l_c);
        sc.cable.c_c = g.num("C_c_F", sc.cable.c_c);
        g.finish();
    }
    {
        Group g(root, "front_end");
        sc.front_end.c_o = g.num("C_o_F", sc.front_end.c_o);
        sc.front_end.i_dc_rated = g.num("i_dc_rated_A", sc.front_end.i_dc_rated);
        sc.front_end.tau_dc = g.num("tau_dc_s", sc.front_end.tau_dc);
        sc.front_end.tau_inj = g.num("tau_inj_s", sc.front_end.tau_inj);
        sc.front_end.l_dc = g.num("L_dc_H", sc.front_end.l_dc);
        sc.front_end.v_g = g.num("V_g_V", sc.front_end.v_g);
        sc.front_end.f_g = g.num("f_g_Hz", sc.front_end.f_g);
        g.finish();
    }
    {
        Group g(root, "load");
        sc.load.t_0 = g.num("T_0_Nm", sc.load.t_0);
        sc.load.k_pump = g.num("k_pump_Nms2", sc.load.k_pump);
        g.finish();
    }
    {
        Group g(root, "if_startup");
        sc.if_startup.k_omega = g.num("K_omega_rad_s2", sc.if_startup.k_omega);
        sc.if_startup.i_q_star = g.num("i_q_star_A", sc.if_startup.i_q_star);
        sc.if_startup.i_d_star = g.num("i_d_star_A", sc.if_startup.i_d_star);
        sc.if_startup.omega_target = g.num("omega_target_rad_s", sc.if_startup.omega_target);
        sc.if_startup.initial_lag = g.num("initial_lag_rad", sc.if_startup.initial_lag);
        g.finish();
    }
    {
        Group g(root, "current_loop");
        sc.current_loop.omega_cc = g.num("omega_cc_rad_s", sc.current_loop.omega_cc);
        sc.current_loop.kp = g.opt_num("kp_V_A", sc.current_loop.kp);
        sc.current_loop.ki = g.opt_num("ki_V_As", sc.current_loop.ki);
        sc.current_loop.u_min = g.num("u_min_V", sc.current_loop.u_min);
        sc.current_loop.u_max = g.num("u_max_V", sc.current_loop.u_max);
        g.finish();
    }
    {
        Group g(root, "speed_loop");
        sc.speed_loop.kp = g.num("kp_A_s_rad", sc.speed_loop.kp);
        sc.speed_loop.ki = g.num("ki_A_rad", sc.speed_loop.ki);
        sc.speed_loop.i_min = g.num("i_min_A", sc.speed_loop.i_min);
        sc.speed_loop.i_max = g.num("i_max_A", sc.speed_loop.i_max);
        sc.speed_loop.omega_filter_cutoff =
            g.num("omega_filter_cutoff_rad_s", sc.speed_loop.omega_filter_cutoff);
        g.finish();
    }
    {
        Group g(root, "observer");
        sc.observer.params.g_obs = g.num("g_obs_1_s", sc.observer.params.g_obs);
        sc.observer.params.emf_filter_cutoff =
            g.num("emf_filter_cutoff_rad_s", sc.observer.params.emf_filter_cutoff);
        sc.observer.r_override = g.opt_num("R_ohm", sc.observer.r_override);
        sc.observer.l_override = g.opt_num("L_H", sc.observer.l_override);
        g.finish();
    }
    {
        Group g(root, "pll");
        sc.pll.params.kp = g.num("kp_rad_s", sc.pll.params.kp);
        sc.pll.params.ki = g.num("ki_rad_s2", sc.pll.params.ki);
        sc.pll.params.omega_hat_limit =
            g.num("omega_hat_limit_rad_s", sc.pll.params.omega_hat_limit);
        sc.pll.params.emf_floor = g.num("emf_floor_V", sc.pll.params.emf_floor);
        sc.pll.lock.emf_min = g.num("lock_emf_min_V", sc.pll.lock.emf_min);
        sc.pll.lock.eps_rms_max = g.num("lock_eps_rms_max", sc.pll.lock.eps_rms_max);
        const int win = g.integer("lock_window_cycles", static_cast<int>(sc.pll.lock.window));
        if (win < 1) fail("scenario.pll.lock_window_cycles must be an integer >= 1");
        sc.pll.lock.window = static_cast<std::size_t>(win);
        g.finish();
    }
    {
        Group g(root, "transition");
        const std::string mode =
            g.str("mode", sc.transition.mode == TransitionMode::Scheduled ? "scheduled"
                                                                          : "condition_based");
        if (mode == "scheduled")
            sc.transition.mode = TransitionMode::Scheduled;
        else if (mode == "condition_based")
            sc.transition.mode = TransitionMode::ConditionBased;
        else
            fail("scenario.transition.mode must be 'scheduled' or 'condition_based'");
        sc.transition.t_align = g.num("t_align_s", sc.transition.t_align);
        sc.transition.t_to_t2 = g.num("t_to_T2_s", sc.transition.t_to_t2);
        sc.transition.t_to_t3 = g.num("t_to_T3_s", sc.transition.t_to_t3);
        sc.transition.align_ramp_rate =
            g.num("align_ramp_rate_rad_s", sc.transition.align_ramp_rate);
        sc.transition.align_tol = g.num("align_tol_rad", sc.transition.align_tol);
        sc.transition.align_dwell = g.num("align_dwell_s", sc.transition.align_dwell);
        sc.transition.t2_dwell = g.num("t2_dwell_s", sc.transition.t2_dwell);
        sc.transition.hc_dtheta = g.num("hc_dtheta_rad", sc.transition.hc_dtheta);
        sc.transition.hc_h = g.integer("hc_h_cycles", sc.transition.hc_h);
        // The hold detector needs room for the +/-2-step oscillation around
        // the optimum, so the default band scales with the step size.
        sc.transition.hc_stop_band = g.num("hc_stop_band_rad", 3.0 * sc.transition.hc_dtheta);
        sc.transition.lock_fault_dwell =
            g.num("lock_fault_dwell_s", sc.transition.lock_fault_dwell);
        g.finish();
    }
    {
        Group g(root, "sim");
        sc.sim.dt_plant = g.num("dt_plant_s", sc.sim.dt_plant);
        sc.sim.dt_ctrl = g.num("dt_ctrl_s", sc.sim.dt_ctrl);
        sc.sim.t_end = g.num("t_end_s", sc.sim.t_end);
        const std::string integ =
            g.str("integrator", sc.sim.integrator == IntegratorKind::Rk4 ? "rk4" : "euler");
        if (integ == "rk4")
            sc.sim.integrator = IntegratorKind::Rk4;
        else if (integ == "euler")
            sc.sim.integrator = IntegratorKind::Euler;
        else
            fail("scenario.sim.integrator must be 'rk4' or 'euler'");
        sc.sim.delay_cycles = g.integer("delay_cycles", sc.sim.delay_cycles);
        sc.sim.noise.current_noise_std =
            g.num("current_noise_std_A", sc.sim.noise.current_noise_std);
        sc.sim.noise.enabled = g.boolean("noise_enabled", sc.sim.noise.enabled);
        const double seed = g.num("rng_seed", static_cast<double>(sc.sim.rng_seed));
        if (seed < 0) fail("scenario.sim.rng_seed must be a non-negative integer");
        sc.sim.rng_seed = static_cast<std::uint64_t>(seed);
        const std::string fb = g.str(
            "feedback_mode", sc.sim.feedback_mode == FeedbackMode::CommandVoltage
                                 ? "command_voltage"
                                 : "plant_voltage");
        if (fb == "command_voltage")
            sc.sim.feedback_mode = FeedbackMode::CommandVoltage;
        else if (fb == "plant_voltage")
            sc.sim.feedback_mode = FeedbackMode::PlantVoltage;
        else
            fail("scenario.sim.feedback_mode must be 'command_voltage' or 'plant_voltage'");
        g.finish();
    }
    {
        Group g(root, "initial");
        sc.initial.rotor_angle = g.num("rotor_angle_rad", sc.initial.rotor_angle);
        sc.initial.randomize_rotor_angle =
            g.boolean("randomize_rotor_angle", sc.initial.randomize_rotor_angle);
        g.finish();
    }
    {
        Group g(root, "metrics");
        sc.metrics.t3_window = g.num("t3_window_s", sc.metrics.t3_window);
        sc.metrics.dq_threshold = g.num("dq_threshold_A", sc.metrics.dq_threshold);
        sc.metrics.settle_band_deg = g.num("settle_band_deg", sc.metrics.settle_band_deg);
        sc.metrics.t2_jump_window = g.num("t2_jump_window_s", sc.metrics.t2_jump_window);
        g.finish();
    }

    sc.resolve();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open scenario file: " + path);
    json j;
    // An empty file is a valid scenario: all defaults.
    in >> std::ws;
    if (in.eof()) return scenario_from_json(json::object());
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail("scenario file " + path + " is not valid JSON: " + e.what());
    }
    return scenario_from_json(j);
}

ordered_json scenario_to_json(const Scenario& sc) {
    ordered_json j;
    j["motor"] = {{"R_s_ohm", sc.motor.r_s},
                  {"L_s_H", sc.motor.l_s},
                  {"psi_f_Wb", sc.motor.psi_f},
                  {"pole_pairs", sc.motor.pole_pairs},
                  {"J_kgm2", sc.motor.inertia},
                  {"B_visc_Nms", sc.motor.b_visc}};
    j["cable"] = {{"topology", sc.cable.topology == CableTopology::Direct ? "direct"
                                                                          : "series_rl_shunt_c"},
                  {"R_c_ohm", sc.cable.r_c},
                  {"L_c_H", sc.cable.l_c},
                  {"C_c_F", sc.cable.c_c}};
    j["front_end"] = {{"C_o_F", sc.front_end.c_o},
                      {"i_dc_rated_A", sc.front_end.i_dc_rated},
                      {"tau_dc_s", sc.front_end.tau_dc},
                      {"tau_inj_s", sc.front_end.tau_inj},
                      {"L_dc_H", sc.front_end.l_dc},
                      {"V_g_V", sc.front_end.v_g},
                      {"f_g_Hz", sc.front_end.f_g}};
    j["load"] = {{"T_0_Nm", sc.load.t_0}, {"k_pump_Nms2", sc.load.k_pump}};
    j["if_startup"] = {{"K_omega_rad_s2", sc.if_startup.k_omega},
                       {"i_q_star_A", sc.if_startup.i_q_star},
                       {"i_d_star_A", sc.if_startup.i_d_star},
                       {"omega_target_rad_s", sc.if_startup.omega_target},
                       {"initial_lag_rad", sc.if_startup.initial_lag}};
    j["current_loop"] = {{"omega_cc_rad_s", sc.current_loop.omega_cc},
                         {"kp_V_A", sc.current_loop.kp.value()},
                         {"ki_V_As", sc.current_loop.ki.value()},
                         {"u_min_V", sc.current_loop.u_min},
                         {"u_max_V", sc.current_loop.u_max}};
    j["speed_loop"] = {{"kp_A_s_rad", sc.speed_loop.kp},
                       {"ki_A_rad", sc.speed_loop.ki},
                       {"i_min_A", sc.speed_loop.i_min},
                       {"i_max_A", sc.speed_loop.i_max},
                       {"omega_filter_cutoff_rad_s", sc.speed_loop.omega_filter_cutoff}};
    j["observer"] = {{"g_obs_1_s", sc.observer.params.g_obs},
                     {"emf_filter_cutoff_rad_s", sc.observer.params.emf_filter_cutoff},
                     {"R_ohm", sc.observer.r_override.value()},
                     {"L_H", sc.observer.l_override.value()}};
    j["pll"] = {{"kp_rad_s", sc.pll.params.kp},
                {"ki_rad_s2", sc.pll.params.ki},
                {"omega_hat_limit_rad_s", sc.pll.params.omega_hat_limit},
                {"emf_floor_V", sc.pll.params.emf_floor},
                {"lock_emf_min_V", sc.pll.lock.emf_min},
                {"lock_eps_rms_max", sc.pll.lock.eps_rms_max},
                {"lock_window_cycles", static_cast<int>(sc.pll.lock.window)}};
    j["transition"] = {
        {"mode", sc.transition.mode == TransitionMode::Scheduled ? "scheduled" : "condition_based"},
        {"t_align_s", sc.transition.t_align},
        {"t_to_T2_s", sc.transition.t_to_t2},
        {"t_to_T3_s", sc.transition.t_to_t3},
        {"align_ramp_rate_rad_s", sc.transition.align_ramp_rate},
        {"align_tol_rad", sc.transition.align_tol},
        {"align_dwell_s", sc.transition.align_dwell},
        {"t2_dwell_s", sc.transition.t2_dwell},
        {"hc_dtheta_rad", sc.transition.hc_dtheta},
        {"hc_h_cycles", sc.transition.hc_h},
        {"hc_stop_band_rad", sc.transition.hc_stop_band},
        {"lock_fault_dwell_s", sc.transition.lock_fault_dwell}};
    j["sim"] = {{"dt_plant_s", sc.sim.dt_plant},
                {"dt_ctrl_s", sc.sim.dt_ctrl},
                {"t_end_s", sc.sim.t_end},
                {"integrator", sc.sim.integrator == IntegratorKind::Rk4 ? "rk4" : "euler"},
                {"delay_cycles", sc.sim.delay_cycles},
                {"current_noise_std_A", sc.sim.noise.current_noise_std},
                {"noise_enabled", sc.sim.noise.enabled},
                {"rng_seed", sc.sim.rng_seed},
                {"feedback_mode", sc.sim.feedback_mode == FeedbackMode::CommandVoltage
                                      ? "command_voltage"
                                      : "plant_voltage"}};
    j["initial"] = {{"rotor_angle_rad", sc.initial.rotor_angle},
                    {"randomize_rotor_angle", sc.initial.randomize_rotor_angle}};
    j["metrics"] = {{"t3_window_s", sc.metrics.t3_window},
                    {"dq_threshold_A", sc.metrics.dq_threshold},
                    {"settle_band_deg", sc.metrics.settle_band_deg},
                    {"t2_jump_window_s", sc.metrics.t2_jump_window}};
    return j;
}

void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write scenario file: " + path);
    out << scenario_to_json(sc).dump(2) << "\n";
}

}  // namespace csifoc
