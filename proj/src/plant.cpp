#include "csifoc/plant.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace csifoc {

namespace {
// Below this the rotor counts as at rest for the stiction clamp.
constexpr double kOmegaRest = 1e-4;
}  // namespace

std::array<double, PlantState::kSize> PlantState::to_array() const {
    return {theta_e, omega_m, i_motor.x, i_motor.y, v_co.x, v_co.y,
            i_cable.x, i_cable.y, v_cc.x, v_cc.y, i_dc};
}

PlantState PlantState::from_array(const std::array<double, kSize>& a) {
    PlantState s;
    s.theta_e = a[0];
    s.omega_m = a[1];
    s.i_motor = {a[2], a[3]};
    s.v_co = {a[4], a[5]};
    s.i_cable = {a[6], a[7]};
    s.v_cc = {a[8], a[9]};
    s.i_dc = a[10];
    return s;
}

const char* plant_component_name(std::size_t index) {
    static const char* names[PlantState::kSize] = {
        "theta_e",   "omega_m",   "i_motor_alpha", "i_motor_beta", "v_Co_alpha", "v_Co_beta",
        "i_cable_alpha", "i_cable_beta", "v_Cc_alpha", "v_Cc_beta", "i_dc"};
    return index < PlantState::kSize ? names[index] : "?";
}

Vec2 back_emf(double theta_e, double omega_m, const MotorParams& p) {
    const double a = p.k_e() * omega_m;
    return {-a * std::sin(theta_e), a * std::cos(theta_e)};
}

double electromagnetic_torque(const PlantState& s, const MotorParams& p) {
    return p.k_e() * (-s.i_motor.x * std::sin(s.theta_e) + s.i_motor.y * std::cos(s.theta_e));
}

double load_torque(double omega_m, double t_applied, const LoadModel& load) {
    if (std::abs(omega_m) < kOmegaRest) {
        // Breakaway: the constant term opposes the applied torque up to t_0.
        const double held = std::clamp(t_applied, -load.t_0, load.t_0);
        return held;
    }
    return std::copysign(load.t_0, omega_m) + load.k_pump * omega_m * std::abs(omega_m);
}

Vec2 inverter_injection(const PlantState& s, const Vec2& u_cmd_ab, const CableParams& cable,
                        const DriveFrontEnd& fe) {
    // Feedforward the downstream branch current and correct the filter
    // voltage toward the command; this is the averaged stand-in for the
    // CSI modulator realizing the commanded inverter-terminal voltage.
    const Vec2 branch =
        cable.topology == CableTopology::Direct ? s.i_motor : s.i_cable;
    Vec2 inj = branch + (fe.c_o / fe.tau_inj) * (u_cmd_ab - s.v_co);
    const double mag = inj.norm();
    const double limit = std::max(s.i_dc, 0.0);
    if (mag > limit) inj = inj * (mag > 0.0 ? limit / mag : 0.0);
    return inj;
}

PlantState plant_derivatives(const PlantState& s, const Vec2& i_inv_ab, const LoadModel& load,
                             const MotorParams& p, const CableParams& cable,
                             const DriveFrontEnd& fe, double i_dc_ref) {
    const auto arr = s.to_array();
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!std::isfinite(arr[i]))
            throw std::domain_error(std::string("plant state component ") +
                                    plant_component_name(i) + " is not finite");
    }

    const Vec2 e = back_emf(s.theta_e, s.omega_m, p);
    const Vec2 u_motor = motor_terminal_voltage(s, cable);

    PlantState d;
    d.theta_e = p.pole_pairs * s.omega_m;
    d.i_motor = (u_motor - e - p.r_s * s.i_motor) * (1.0 / p.l_s);

    if (cable.topology == CableTopology::Direct) {
        d.v_co = (i_inv_ab - s.i_motor) * (1.0 / fe.c_o);
        d.i_cable = {0.0, 0.0};
        d.v_cc = {0.0, 0.0};
    } else {
        d.v_co = (i_inv_ab - s.i_cable) * (1.0 / fe.c_o);
        d.i_cable = (s.v_co - cable.r_c * s.i_cable - s.v_cc) * (1.0 / cable.l_c);
        d.v_cc = (s.i_cable - s.i_motor) * (1.0 / cable.c_c);
    }

    const double t_e = electromagnetic_torque(s, p);
    const double t_l = load_torque(s.omega_m, t_e, load);
    d.omega_m = (t_e - t_l - p.b_visc * s.omega_m) / p.inertia;

    d.i_dc = (i_dc_ref - s.i_dc) / fe.tau_dc;
    return d;
}

double stored_energy(const PlantState& s, const MotorParams& p, const CableParams& cable,
                     const DriveFrontEnd& fe) {
    double e = 0.5 * p.l_s * s.i_motor.dot(s.i_motor) + 0.5 * fe.c_o * s.v_co.dot(s.v_co) +
               0.5 * p.inertia * s.omega_m * s.omega_m;
    if (cable.topology == CableTopology::SeriesRlShuntC) {
        e += 0.5 * cable.l_c * s.i_cable.dot(s.i_cable) + 0.5 * cable.c_c * s.v_cc.dot(s.v_cc);
    }
    return e;
}

double injected_power(const PlantState& s, const Vec2& i_inv_ab) {
    return s.v_co.dot(i_inv_ab);
}

double dissipated_power(const PlantState& s, const LoadModel& load, const MotorParams& p,
                        const CableParams& cable) {
    double pw = p.r_s * s.i_motor.dot(s.i_motor) + p.b_visc * s.omega_m * s.omega_m;
    if (cable.topology == CableTopology::SeriesRlShuntC)
        pw += cable.r_c * s.i_cable.dot(s.i_cable);
    const double t_e = electromagnetic_torque(s, p);
    pw += load_torque(s.omega_m, t_e, load) * s.omega_m;
    return pw;
}

Vec2 motor_terminal_voltage(const PlantState& s, const CableParams& cable) {
    return cable.topology == CableTopology::Direct ? s.v_co : s.v_cc;
}

}  // namespace csifoc
