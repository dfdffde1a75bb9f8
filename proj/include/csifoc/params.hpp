#pragma once

#include <cmath>
#include <cstdint>

namespace csifoc {

/// Surface-mounted PMSM electrical and mechanical constants.
struct MotorParams {
    double r_s = 2.16;      // stator resistance [ohm]
    double l_s = 4.56e-3;   // synchronous inductance [H]
    double psi_f = 0.25;    // PM flux linkage [Wb]
    int pole_pairs = 6;
    double inertia = 0.01;  // rotor + load inertia [kg m^2]
    double b_visc = 1e-4;   // viscous friction [N m s/rad]

    /// Back-EMF constant per mechanical rad/s; the sqrt(3)/2 amplitude
    /// factor is folded in here so the stationary-frame EMF expressions
    /// stay in the form they are used everywhere else.
    double k_e() const { return 0.5 * std::sqrt(3.0) * psi_f * pole_pairs; }

    /// Flux constant per electrical rad/s (k_e / P), used by the
    /// controller-side EMF feedforward.
    double psi_eff() const { return 0.5 * std::sqrt(3.0) * psi_f; }
};

enum class CableTopology : std::uint8_t { Direct, SeriesRlShuntC };

/// Lumped equivalent of the downhole cable: series R-L with a single shunt
/// capacitor at the motor end. Direct bypasses the cable entirely.
struct CableParams {
    CableTopology topology = CableTopology::SeriesRlShuntC;
    double r_c = 11.76;   // series resistance [ohm]
    double l_c = 9.7e-3;  // series inductance [H]
    double c_c = 111e-9;  // shunt capacitance [F]
};

/// DC link and inverter output filter. The rectifier/H-bridge front end is
/// abstracted as a first-order regulated DC current source; the CSI itself
/// injects the current demanded by the voltage-realization law, limited to
/// the instantaneous DC-link current.
struct DriveFrontEnd {
    double c_o = 50e-6;        // output filter capacitance [F]
    double i_dc_rated = 10.0;  // DC-link current ceiling [A]
    double tau_dc = 0.01;      // DC-current regulation time constant [s]
    double tau_inj = 2e-4;     // injection/modulation realization lag [s]
    double l_dc = 10e-3;       // DC inductance [H]; recorded, unused by averaged model
    double v_g = 480.0;        // grid voltage [V]; recorded, unused
    double f_g = 60.0;         // grid frequency [Hz]; recorded, unused
};

/// Pump-type load: T_L = sign(w)*T_0 + k_pump*w*|w|, with T_0 acting as a
/// breakaway threshold at standstill.
struct LoadModel {
    double t_0 = 0.2;        // constant torque term [N m]
    double k_pump = 1.9e-3;  // quadratic coefficient [N m s^2/rad^2]
};

}  // namespace csifoc
