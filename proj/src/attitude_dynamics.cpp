#include "plqr/attitude_dynamics.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <string>

namespace plqr {

Eigen::Matrix<double, 9, 1> SystemState::as_vector() const {
    Eigen::Matrix<double, 9, 1> x;
    x << omega, wheel_speed, q;
    return x;
}

SystemState SystemState::from_vector(const Eigen::Matrix<double, 9, 1>& x, double t) {
    SystemState s;
    s.omega = x.segment<3>(0);
    s.wheel_speed = x.segment<3>(3);
    s.q = x.segment<3>(6);
    s.t = t;
    return s;
}

Eigen::Matrix<double, 6, 1> ControlInput::as_vector() const {
    Eigen::Matrix<double, 6, 1> u;
    u << wheel_torque, dipole_moment;
    return u;
}

ControlInput ControlInput::saturated(const SpacecraftParams& params) const {
    ControlInput out = *this;
    if (params.max_wheel_torque) {
        const double lim = *params.max_wheel_torque;
        out.wheel_torque = out.wheel_torque.cwiseMax(-lim).cwiseMin(lim);
    }
    if (params.max_dipole) {
        const double lim = *params.max_dipole;
        out.dipole_moment = out.dipole_moment.cwiseMax(-lim).cwiseMin(lim);
    }
    return out;
}

Vector3d coupling_torque_f(const Vector3d& omega, const Vector3d& wheel_speed, const Vector3d& q,
                           const SpacecraftParams& params, const OrbitEnvironment& env) {
    const Vector3d w_lvlh = lvlh_rate_in_body(q, env.orbital_rate);
    const Vector3d w_total = omega + w_lvlh;
    const Vector3d momentum =
        params.inertia.cwiseProduct(w_total) + params.wheel_inertia.cwiseProduct(wheel_speed);
    // First term is J (w x w_l): the inertia multiplies the frame-rate cross
    // product that converts the inertial rate derivative to the LVLH-relative
    // one.
    return params.inertia.cwiseProduct(omega.cross(w_lvlh)) - w_total.cross(momentum);
}

Vector3d quaternion_kinematics_g(const Vector3d& q, const Vector3d& omega) {
    const double q0 = reduced_quaternion_scalar(q);
    Matrix3d m;
    m << q0, -q(2), q(1),
         q(2), q0, -q(0),
         -q(1), q(0), q0;
    return 0.5 * m * omega;
}

SystemState state_derivative(const SystemState& x, const ControlInput& u,
                             const Vector3d& disturbance_torque, const OrbitEnvironment& env,
                             const SpacecraftParams& params, const FieldModel& field) {
    const Vector3d torque_sum = coupling_torque_f(x.omega, x.wheel_speed, x.q, params, env) +
                                gravity_gradient_torque(x.q, params.inertia, env.orbital_rate) -
                                u.wheel_torque - field(x.t).cross(u.dipole_moment) +
                                disturbance_torque;
    SystemState dx;
    dx.omega = torque_sum.cwiseQuotient(params.inertia);
    dx.wheel_speed = u.wheel_torque.cwiseQuotient(params.wheel_inertia);
    dx.q = quaternion_kinematics_g(x.q, x.omega);
    dx.t = 1.0;
    return dx;
}

SystemState rk4_step(const SystemState& x, const ControlInput& u,
                     const Vector3d& disturbance_torque, double dt, const OrbitEnvironment& env,
                     const SpacecraftParams& params, const FieldModel& field) {
    if (!(dt > 0.0)) throw ValidationError("rk4_step: dt must be positive");

    auto deriv = [&](const SystemState& s) {
        return state_derivative(s, u, disturbance_torque, env, params, field);
    };
    // Intermediate stages may overshoot the chart by roundoff; project them
    // back. A genuine excursion fails the step.
    auto chart_clamp = [](Vector3d q) {
        const double qn = q.norm();
        if (qn > 1.0) {
            if (qn > 1.0 + 1e-9) {
                throw ChartExitError("rk4_step: |q| = " + std::to_string(qn) +
                                     " left the reduced-quaternion chart");
            }
            q /= qn;
        }
        return q;
    };
    auto advance = [&](const SystemState& s, const SystemState& ds, double h) {
        SystemState out;
        out.omega = s.omega + h * ds.omega;
        out.wheel_speed = s.wheel_speed + h * ds.wheel_speed;
        out.q = chart_clamp(s.q + h * ds.q);
        out.t = s.t + h;
        return out;
    };

    const SystemState k1 = deriv(x);
    const SystemState k2 = deriv(advance(x, k1, 0.5 * dt));
    const SystemState k3 = deriv(advance(x, k2, 0.5 * dt));
    const SystemState k4 = deriv(advance(x, k3, dt));

    SystemState next;
    next.omega = x.omega + (dt / 6.0) * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega);
    next.wheel_speed = x.wheel_speed + (dt / 6.0) * (k1.wheel_speed + 2.0 * k2.wheel_speed +
                                                     2.0 * k3.wheel_speed + k4.wheel_speed);
    next.q = chart_clamp(x.q + (dt / 6.0) * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q));
    next.t = x.t + dt;
    return next;
}

}  // namespace plqr
