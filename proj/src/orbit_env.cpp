#include "plqr/orbit_env.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <string>

namespace plqr {

void SpacecraftParams::validate() const {
    for (int i = 0; i < 3; ++i) {
        if (!(inertia(i) > 0.0)) {
            throw ValidationError("spacecraft inertia must be strictly positive (axis " +
                                  std::to_string(i + 1) + ")");
        }
        if (!(wheel_inertia(i) > 0.0)) {
            throw ValidationError("wheel inertia must be strictly positive (axis " +
                                  std::to_string(i + 1) + ")");
        }
    }
    if (max_dipole && !(*max_dipole > 0.0)) {
        throw ValidationError("max_dipole must be positive when set");
    }
    if (max_wheel_torque && !(*max_wheel_torque > 0.0)) {
        throw ValidationError("max_wheel_torque must be positive when set");
    }
}

OrbitalRate orbital_rate(double altitude, double gm) {
    if (!(altitude > 0.0)) throw ValidationError("orbital_rate: altitude must be positive");
    const double a = altitude + kEarthRadius;
    OrbitalRate rate;
    rate.omega0 = std::sqrt(gm / (a * a * a));
    rate.period = 2.0 * std::numbers::pi / rate.omega0;
    return rate;
}

OrbitEnvironment OrbitEnvironment::circular(double altitude, double magnetic_inclination,
                                            double dipole_strength, double gm,
                                            double epoch_offset) {
    const OrbitalRate rate = plqr::orbital_rate(altitude, gm);
    OrbitEnvironment env;
    env.altitude = altitude;
    env.orbital_radius = altitude + kEarthRadius;
    env.orbital_rate = rate.omega0;
    env.period = rate.period;
    env.magnetic_inclination = magnetic_inclination;
    env.dipole_strength = dipole_strength;
    env.gm = gm;
    env.epoch_offset = epoch_offset;
    return env;
}

Vector3d dipole_field(double t, const OrbitEnvironment& env) {
    const double a3 = std::pow(env.orbital_radius, 3);
    const double phase = env.orbital_rate * (t - env.epoch_offset);
    const double si = std::sin(env.magnetic_inclination);
    const double ci = std::cos(env.magnetic_inclination);
    return (env.dipole_strength / a3) *
           Vector3d(std::cos(phase) * si, -ci, 2.0 * std::sin(phase) * si);
}

Matrix3d skew(const Vector3d& v) {
    Matrix3d m;
    m << 0.0, -v(2), v(1), v(2), 0.0, -v(0), -v(1), v(0), 0.0;
    return m;
}

double reduced_quaternion_scalar(const Vector3d& q) {
    const double n2 = q.squaredNorm();
    if (n2 > 1.0) {
        if (n2 > 1.0 + 1e-12) {
            throw ValidationError("reduced quaternion has |q| > 1 (|q|^2 = " +
                                  std::to_string(n2) + ")");
        }
        return 0.0;
    }
    return std::sqrt(1.0 - n2);
}

Matrix3d lvlh_to_body(const Vector3d& q) {
    const double q0 = reduced_quaternion_scalar(q);
    const double q1 = q(0), q2 = q(1), q3 = q(2);
    Matrix3d a;
    a << 2 * q0 * q0 - 1 + 2 * q1 * q1, 2 * q1 * q2 + 2 * q0 * q3, 2 * q1 * q3 - 2 * q0 * q2,
         2 * q1 * q2 - 2 * q0 * q3, 2 * q0 * q0 - 1 + 2 * q2 * q2, 2 * q2 * q3 + 2 * q0 * q1,
         2 * q1 * q3 + 2 * q0 * q2, 2 * q2 * q3 - 2 * q0 * q1, 2 * q0 * q0 - 1 + 2 * q3 * q3;
    return a;
}

Vector3d lvlh_rate_in_body(const Vector3d& q, double omega0) {
    const double q0 = reduced_quaternion_scalar(q);
    const double q1 = q(0), q2 = q(1), q3 = q(2);
    return omega0 * Vector3d(2 * q1 * q2 + 2 * q0 * q3, 2 * q0 * q0 - 1 + 2 * q2 * q2,
                             2 * q2 * q3 - 2 * q0 * q1);
}

Vector3d gravity_gradient_torque(const Vector3d& q, const Vector3d& inertia, double omega0) {
    const Vector3d c3 = lvlh_to_body(q).col(2);
    return 3.0 * omega0 * omega0 * c3.cross(inertia.cwiseProduct(c3));
}

}  // namespace plqr
