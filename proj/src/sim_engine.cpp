#include "plqr/sim_engine.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <random>
#include <string>

namespace plqr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_compatible(const GainSchedule& schedule, double ts, int p) {
    schedule.validate();
    if (schedule.ts > 0.0 && std::abs(schedule.ts - ts) > 1e-9 * ts) {
        throw ValidationError("simulation: schedule sample period " +
                              std::to_string(schedule.ts) + " s does not match " +
                              std::to_string(ts) + " s");
    }
    // A single-entry schedule (constant-field design) broadcasts to any p.
    if (schedule.p != p && schedule.p != 1) {
        throw ValidationError("simulation: schedule period " + std::to_string(schedule.p) +
                              " does not match plant period " + std::to_string(p));
    }
}

void check_runaway(const Eigen::Matrix<double, 9, 1>& x, double bound, double t) {
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > bound) {
        throw RunawayStateError("simulation: state norm exceeded " + std::to_string(bound) +
                                " at t = " + std::to_string(t) + " s");
    }
}

}  // namespace

Vector3d DisturbanceSpec::torque_at(double t, double omega0) const {
    switch (kind) {
        case Kind::none:
            return Vector3d::Zero();
        case Kind::constant:
            return amplitude;
        case Kind::sinusoidal:
            return std::sin(omega0 * t + phase) * amplitude;
    }
    return Vector3d::Zero();
}

FieldModel FieldModelSpec::build(const OrbitEnvironment& env) const {
    if (kind == Kind::design_dipole) {
        OrbitEnvironment copy = env;
        return [copy](double t) { return dipole_field(t, copy); };
    }
    OrbitEnvironment truth = env;
    truth.magnetic_inclination += inclination_offset;
    truth.epoch_offset += phase_offset;
    return [truth](double t) { return dipole_field(t, truth); };
}

void SimConfig::validate() const {
    if (!(duration_orbits >= 0.0)) throw ValidationError("sim: duration must be >= 0 orbits");
    if (!(duty_fraction > 0.0) || duty_fraction > 1.0) {
        throw ValidationError("sim: duty_fraction must lie in (0, 1]");
    }
    if (log_stride < 1) throw ValidationError("sim: log_stride must be >= 1");
    if (substeps_per_sample < 1) throw ValidationError("sim: substeps_per_sample must be >= 1");
    if (!(runaway_norm > 0.0)) throw ValidationError("sim: runaway_norm must be positive");
    if (!(chart_exit_qnorm > 0.0) || chart_exit_qnorm > 1.0) {
        throw ValidationError("sim: chart_exit_qnorm must lie in (0, 1]");
    }
    if (initial.q.norm() > 1.0) throw ValidationError("sim: initial |q| exceeds 1");
}

Eigen::MatrixXd duty_scale_gain(const Eigen::MatrixXd& gain, double duty_fraction) {
    if (!(duty_fraction > 0.0) || duty_fraction > 1.0) {
        throw ValidationError("duty_scale_gain: duty_fraction must lie in (0, 1]");
    }
    return gain / duty_fraction;
}

SystemState draw_initial_state(const SimConfig& config) {
    SystemState state = config.initial;
    if (!config.ic_box) return state;

    std::mt19937_64 rng(config.seed);
    auto draw = [&rng](Vector3d center, const Vector3d& halfwidth) {
        for (int i = 0; i < 3; ++i) {
            std::uniform_real_distribution<double> dist(-halfwidth(i), halfwidth(i));
            center(i) += halfwidth(i) > 0.0 ? dist(rng) : 0.0;
        }
        return center;
    };
    state.omega = draw(state.omega, config.ic_box->omega);
    state.wheel_speed = draw(state.wheel_speed, config.ic_box->wheel_speed);
    state.q = draw(state.q, config.ic_box->q);
    if (state.q.norm() > 1.0) {
        throw ValidationError("draw_initial_state: randomized |q| exceeds 1");
    }
    return state;
}

Trajectory run_linear(const PeriodicPlant& plant, const GainSchedule& schedule,
                      const SimConfig& config, const OrbitEnvironment& env,
                      const SpacecraftParams* params) {
    config.validate();
    plant.validate();
    check_compatible(schedule, plant.ts, plant.p);

    const SystemState init = draw_initial_state(config);
    Eigen::Matrix<double, 9, 1> x = init.as_vector();
    const VectorXd& x_bar = schedule.x_bar;

    const long steps = std::lround(config.duration_orbits * plant.p);
    Trajectory traj;
    traj.samples.reserve(static_cast<size_t>(steps / config.log_stride + 2));

    for (long k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * plant.ts;
        check_runaway(x, config.runaway_norm, t);

        VectorXd u = -schedule.gain_at(static_cast<int>(k % plant.p)) * (x - x_bar);
        if (config.saturation && params != nullptr) {
            ControlInput raw;
            raw.wheel_torque = u.head<3>();
            raw.dipole_moment = u.tail<3>();
            u = raw.saturated(*params).as_vector();
        }

        if (k % config.log_stride == 0 || k == steps) {
            TrajectorySample row;
            row.t = t;
            row.omega = x.segment<3>(0);
            row.wheel_speed = x.segment<3>(3);
            row.q = x.segment<3>(6);
            row.wheel_torque = u.head<3>();
            row.dipole_moment = u.tail<3>();
            row.field = dipole_field(t, env);
            traj.samples.push_back(row);
        }
        if (k == steps) break;
        x = plant.a * x + plant.b_at(static_cast<int>(k % plant.p)) * u;
    }
    return traj;
}

Trajectory run_nonlinear(const GainSchedule& schedule, const SimConfig& config,
                         const SpacecraftParams& params, const OrbitEnvironment& env) {
    config.validate();
    params.validate();
    schedule.validate();
    if (!(schedule.ts > 0.0)) {
        throw ValidationError("run_nonlinear: schedule carries no sample period");
    }
    const double ts = schedule.ts;
    const FieldModel truth_field = config.field_model.build(env);

    SystemState state = draw_initial_state(config);
    state.t = 0.0;
    const VectorXd& x_bar = schedule.x_bar;

    const long steps = std::lround(config.duration_orbits * env.period / ts);
    // Measurement sub-interval first, control sub-interval second; RK4
    // substeps are split proportionally.
    const double ctrl_len = config.duty_fraction * ts;
    const double meas_len = ts - ctrl_len;
    int meas_steps = 0;
    if (meas_len > 0.0) {
        meas_steps = std::max(
            1, static_cast<int>(std::lround(config.substeps_per_sample * (1.0 - config.duty_fraction))));
    }
    const int ctrl_steps = std::max(1, config.substeps_per_sample - meas_steps);

    Trajectory traj;
    traj.samples.reserve(static_cast<size_t>(steps / config.log_stride + 2));

    for (long k = 0; k <= steps; ++k) {
        check_runaway(state.as_vector(), config.runaway_norm, state.t);
        if (state.q.norm() >= config.chart_exit_qnorm) {
            throw ChartExitError("run_nonlinear: |q| = " + std::to_string(state.q.norm()) +
                                 " reached the chart-exit threshold at t = " +
                                 std::to_string(state.t) + " s");
        }

        const VectorXd u_nominal =
            -schedule.gain_at(static_cast<int>(k % schedule.p)) * (state.as_vector() - x_bar);
        ControlInput held;
        held.wheel_torque = u_nominal.head<3>();
        // Coils are off while the magnetometer measures; the scaled moment
        // restores the designed impulse over the remaining duty fraction.
        held.dipole_moment = u_nominal.tail<3>() / config.duty_fraction;
        if (config.saturation) held = held.saturated(params);

        if (k % config.log_stride == 0 || k == steps) {
            TrajectorySample row;
            row.t = state.t;
            row.omega = state.omega;
            row.wheel_speed = state.wheel_speed;
            row.q = state.q;
            row.wheel_torque = held.wheel_torque;
            row.dipole_moment = held.dipole_moment;
            row.field = truth_field(state.t);
            traj.samples.push_back(row);
        }
        if (k == steps) break;

        if (meas_steps > 0) {
            ControlInput coils_off = held;
            coils_off.dipole_moment.setZero();
            const double dt = meas_len / meas_steps;
            for (int i = 0; i < meas_steps; ++i) {
                state = rk4_step(state, coils_off,
                                 config.disturbance.torque_at(state.t, env.orbital_rate), dt, env,
                                 params, truth_field);
            }
        }
        const double dt = ctrl_len / ctrl_steps;
        for (int i = 0; i < ctrl_steps; ++i) {
            state = rk4_step(state, held,
                             config.disturbance.torque_at(state.t, env.orbital_rate), dt, env,
                             params, truth_field);
        }
        // Keep the sample clock exact despite substep rounding.
        state.t = static_cast<double>(k + 1) * ts;
    }
    return traj;
}

Trajectory momentum_bias_run(const PeriodicPlant& plant, const GainSchedule& schedule,
                             const SimConfig& config, const SpacecraftParams& params,
                             const OrbitEnvironment& env) {
    for (int i = 0; i < schedule.x_bar.size(); ++i) {
        if ((i < 3 || i > 5) && schedule.x_bar(i) != 0.0) {
            throw ValidationError(
                "momentum_bias_run: x_bar may only bias the wheel-speed slots");
        }
    }
    if (config.mode == SimMode::linear) {
        return run_linear(plant, schedule, config, env, &params);
    }
    return run_nonlinear(schedule, config, params, env);
}

}  // namespace plqr
