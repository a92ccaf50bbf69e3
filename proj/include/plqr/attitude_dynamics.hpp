#pragma once

#include <Eigen/Core>

#include <functional>

#include "plqr/orbit_env.hpp"

// Full nonlinear spacecraft model: body-rate dynamics with wheel momentum,
// magnetic torque, gravity gradient, reduced quaternion kinematics, and a
// fixed-step RK4 propagator. Pure value-type functions.
namespace plqr {

// Body-frame magnetic field as a function of time. [T]
using FieldModel = std::function<Vector3d(double)>;

// State of the combined attitude / wheel system.
struct SystemState {
    Vector3d omega = Vector3d::Zero();        // body rate wrt LVLH [rad/s]
    Vector3d wheel_speed = Vector3d::Zero();  // wheel rates Omega [rad/s]
    Vector3d q = Vector3d::Zero();            // reduced quaternion (q1, q2, q3)
    double t = 0.0;                           // [s]

    Eigen::Matrix<double, 9, 1> as_vector() const;
    static SystemState from_vector(const Eigen::Matrix<double, 9, 1>& x, double t);
};

struct ControlInput {
    Vector3d wheel_torque = Vector3d::Zero();   // t_w [N m]
    Vector3d dipole_moment = Vector3d::Zero();  // coil moment m [A m^2]

    Eigen::Matrix<double, 6, 1> as_vector() const;
    // Componentwise clamp to the configured actuator limits.
    ControlInput saturated(const SpacecraftParams& params) const;
};

// Gyroscopic coupling torque f = J w x w_l - (w + w_l) x [J (w + w_l) + Jw W],
// with w_l the LVLH rate seen in the body frame. [N m]
Vector3d coupling_torque_f(const Vector3d& omega, const Vector3d& wheel_speed, const Vector3d& q,
                           const SpacecraftParams& params, const OrbitEnvironment& env);

// Reduced quaternion kinematics dq/dt = 0.5 M(q) w.
Vector3d quaternion_kinematics_g(const Vector3d& q, const Vector3d& omega);

// Time derivative of the full state under wheel torques, coil moment, and a
// disturbance torque, with the magnetic field supplied by `field`.
SystemState state_derivative(const SystemState& x, const ControlInput& u,
                             const Vector3d& disturbance_torque, const OrbitEnvironment& env,
                             const SpacecraftParams& params, const FieldModel& field);

// One classical RK4 step with the control held constant over [x.t, x.t + dt].
// The quaternion is re-clamped onto the chart when roundoff pushes |q|
// just above one; a step that leaves the chart is an error.
SystemState rk4_step(const SystemState& x, const ControlInput& u,
                     const Vector3d& disturbance_torque, double dt, const OrbitEnvironment& env,
                     const SpacecraftParams& params, const FieldModel& field);

}  // namespace plqr
