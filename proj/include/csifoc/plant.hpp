#pragma once

#include <array>
#include <cstddef>

#include "csifoc/angles.hpp"
#include "csifoc/params.hpp"

namespace csifoc {

/// Continuous-time state of the motor + filter + cable + DC-link network.
/// theta_e is kept unwrapped; wrapping happens only at presentation
/// boundaries.
struct PlantState {
    double theta_e = 0.0;   // electrical rotor angle [rad], unwrapped
    double omega_m = 0.0;   // mechanical speed [rad/s]
    Vec2 i_motor;           // motor alpha/beta currents [A]
    Vec2 v_co;              // output filter capacitor voltages [V]
    Vec2 i_cable;           // cable series-branch currents [A]
    Vec2 v_cc;              // cable shunt capacitor voltages [V]
    double i_dc = 0.0;      // DC-link current [A]

    static constexpr std::size_t kSize = 11;

    std::array<double, kSize> to_array() const;
    static PlantState from_array(const std::array<double, kSize>& a);
};

/// Names for blowup diagnostics, index-aligned with to_array().
const char* plant_component_name(std::size_t index);

/// Stationary-frame back EMF for a rotor at theta_e spinning at omega_m.
Vec2 back_emf(double theta_e, double omega_m, const MotorParams& p);

/// Electromagnetic torque from the stationary-frame currents.
double electromagnetic_torque(const PlantState& s, const MotorParams& p);

/// Signed load torque; at standstill t_0 acts as a breakaway threshold
/// opposing the applied torque.
double load_torque(double omega_m, double t_applied, const LoadModel& load);

/// Injected inverter current realizing the commanded inverter-terminal
/// voltage through the output filter admittance, saturated to the
/// instantaneous DC-link current.
Vec2 inverter_injection(const PlantState& s, const Vec2& u_cmd_ab, const CableParams& cable,
                        const DriveFrontEnd& fe);

/// Time derivative of the plant state for a given injected current.
/// Throws std::domain_error naming the first non-finite state component.
PlantState plant_derivatives(const PlantState& s, const Vec2& i_inv_ab, const LoadModel& load,
                             const MotorParams& p, const CableParams& cable,
                             const DriveFrontEnd& fe, double i_dc_ref);

/// Total stored energy (magnetic + electrostatic + kinetic). DC-link
/// inductor energy is excluded: the averaged front end regulates i_dc
/// independently of the AC-side balance.
double stored_energy(const PlantState& s, const MotorParams& p, const CableParams& cable,
                     const DriveFrontEnd& fe);

/// Electrical power delivered by the inverter into the filter node.
double injected_power(const PlantState& s, const Vec2& i_inv_ab);

/// Power dissipated in the series resistances plus friction and load.
double dissipated_power(const PlantState& s, const LoadModel& load, const MotorParams& p,
                        const CableParams& cable);

/// Motor-terminal voltage as seen by the machine (v_cc behind the cable,
/// v_co with Direct topology).
Vec2 motor_terminal_voltage(const PlantState& s, const CableParams& cable);

}  // namespace csifoc
