#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "csifoc/controller.hpp"
#include "csifoc/estimator.hpp"
#include "csifoc/integrator.hpp"
#include "csifoc/params.hpp"

namespace csifoc {

enum class FeedbackMode : std::uint8_t { CommandVoltage, PlantVoltage };

struct NoiseConfig {
    double current_noise_std = 0.02;  // [A]
    bool enabled = false;
};

struct SimConfig {
    double dt_plant = 1e-5;  // [s]
    double dt_ctrl = 2e-4;   // [s]; must be an integer multiple of dt_plant
    double t_end = 5.0;      // [s]
    IntegratorKind integrator = IntegratorKind::Rk4;
    int delay_cycles = 0;    // control-delay T_d in control cycles
    NoiseConfig noise;
    std::uint64_t rng_seed = 1;
    FeedbackMode feedback_mode = FeedbackMode::CommandVoltage;

    int substeps() const { return static_cast<int>(dt_ctrl / dt_plant + 0.5); }
};

struct MetricsConfig {
    double t3_window = 1.0;       // [s]
    double dq_threshold = 0.1;    // [A]
    double settle_band_deg = 2.0; // [deg]
    double t2_jump_window = 0.05; // [s]
};

/// Raw PI gain specification; absent gains are derived from the
/// controller-side equivalent impedance at resolve time.
struct CurrentLoopSpec {
    double omega_cc = 2.0 * M_PI * 150.0;  // target crossover [rad/s]
    std::optional<double> kp;              // [V/A]
    std::optional<double> ki;              // [V/(A s)]
    double u_min = -250.0;                 // [V]
    double u_max = 250.0;                  // [V]
};

struct SpeedLoopSpec {
    double kp = 0.19245008972987526;  // [A s/rad]
    double ki = 5.7735026918962573;   // [A/rad]
    double i_min = -10.0;             // [A]
    double i_max = 10.0;              // [A]
    double omega_filter_cutoff = 300.0;  // speed feedback filter [rad/s]
};

struct ObserverSpec {
    ObserverParams params;
    std::optional<double> r_override;  // [ohm]
    std::optional<double> l_override;  // [H]
};

struct PllSpec {
    PllParams params;
    LockParams lock;
};

struct InitialConditions {
    double rotor_angle = 0.0;  // electrical [rad]
    bool randomize_rotor_angle = false;
};

/// Fully specified simulation scenario. Call resolve() after construction
/// or mutation; it derives dependent gains and validates invariants,
/// throwing std::invalid_argument with a unit-bearing message on failure.
struct Scenario {
    MotorParams motor;
    CableParams cable;
    DriveFrontEnd front_end;
    LoadModel load;
    IfStartupParams if_startup;
    CurrentLoopSpec current_loop;
    SpeedLoopSpec speed_loop;
    ObserverSpec observer;
    PllSpec pll;
    TransitionConfig transition;
    SimConfig sim;
    InitialConditions initial;
    MetricsConfig metrics;

    // Derived at resolve():
    ControllerModel controller_model;
    PiGains current_gains;
    PiGains speed_gains;
    ObserverModel observer_model;

    void resolve();
};

/// Shipped defaults (Table-style parameter set), already resolved.
Scenario default_scenario();

}  // namespace csifoc
