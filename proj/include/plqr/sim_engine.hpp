#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "plqr/attitude_dynamics.hpp"
#include "plqr/linear_plant.hpp"
#include "plqr/lqr_core.hpp"

// Closed-loop simulation: the periodic gain schedule applied with zero-order
// hold to either the discrete linear plant or the continuous nonlinear model,
// with disturbances, actuator saturation, seeded initial-condition boxes, and
// the measurement duty-cycle gain scaling.
namespace plqr {

enum class SimMode { linear, nonlinear };

struct DisturbanceSpec {
    enum class Kind { none, constant, sinusoidal } kind = Kind::none;
    Vector3d amplitude = Vector3d::Zero();  // [N m]
    double phase = 0.0;                     // sinusoidal phase at t = 0 [rad]

    Vector3d torque_at(double t, double omega0) const;
};

struct FieldModelSpec {
    // design_dipole: the same tilted dipole the gains were designed against.
    // offset_dipole: inclination/phase offsets emulate design-vs-truth field
    // mismatch.
    enum class Kind { design_dipole, offset_dipole } kind = Kind::design_dipole;
    double inclination_offset = 0.0;  // [rad]
    double phase_offset = 0.0;        // [s]

    FieldModel build(const OrbitEnvironment& env) const;
};

// Componentwise half-widths of the uniform box around the nominal initial
// state.
struct IcRandomBox {
    Vector3d omega = Vector3d::Zero();
    Vector3d wheel_speed = Vector3d::Zero();
    Vector3d q = Vector3d::Zero();
};

struct SimConfig {
    SimMode mode = SimMode::linear;
    double duration_orbits = 10.0;
    SystemState initial;
    std::optional<IcRandomBox> ic_box;
    DisturbanceSpec disturbance;
    FieldModelSpec field_model;
    double duty_fraction = 1.0;  // control fraction of each sample period
    bool saturation = false;
    std::uint64_t seed = 0;
    int log_stride = 1;            // samples between logged rows
    int substeps_per_sample = 64;  // RK4 substeps per sample period
    double runaway_norm = 1e6;
    double chart_exit_qnorm = 0.999;

    void validate() const;
};

struct TrajectorySample {
    double t = 0.0;
    Vector3d omega = Vector3d::Zero();
    Vector3d wheel_speed = Vector3d::Zero();
    Vector3d q = Vector3d::Zero();
    Vector3d wheel_torque = Vector3d::Zero();
    Vector3d dipole_moment = Vector3d::Zero();
    Vector3d field = Vector3d::Zero();
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
};

// K / duty_fraction: compensates coil-off time during the measurement
// sub-interval.
Eigen::MatrixXd duty_scale_gain(const Eigen::MatrixXd& gain, double duty_fraction);

// Initial state, randomized uniformly inside config.ic_box when present.
SystemState draw_initial_state(const SimConfig& config);

// Discrete closed loop x_{k+1} = A x_k + B_k u_k with u_k = -K_k (x_k - x_bar).
// The duty cycle does not apply to the discrete model; params enables
// actuator saturation when provided and configured.
Trajectory run_linear(const PeriodicPlant& plant, const GainSchedule& schedule,
                      const SimConfig& config, const OrbitEnvironment& env,
                      const SpacecraftParams* params = nullptr);

// Continuous nonlinear closed loop with ZOH sampling: wheel torques act over
// the whole sample period; the coil moment is scaled by 1/duty and active
// only during the trailing control sub-interval.
Trajectory run_nonlinear(const GainSchedule& schedule, const SimConfig& config,
                         const SpacecraftParams& params, const OrbitEnvironment& env);

// Wheel-speed bias regulation: requires x_bar support only in the wheel
// slots, then dispatches on config.mode.
Trajectory momentum_bias_run(const PeriodicPlant& plant, const GainSchedule& schedule,
                             const SimConfig& config, const SpacecraftParams& params,
                             const OrbitEnvironment& env);

}  // namespace plqr
