#pragma once

#include <Eigen/Core>

#include <optional>

#include "plqr/errors.hpp"

// Orbital geometry and environmental models: orbital rate, tilted-dipole
// geomagnetic field, LVLH rotation seen in the body frame, gravity-gradient
// torque. Pure functions; safe for concurrent use.
namespace plqr {

using Eigen::Matrix3d;
using Eigen::Vector3d;

inline constexpr double kEarthRadius = 6.371e6;       // [m]
inline constexpr double kDefaultGm = 3.986005e14;     // [m^3/s^2]
inline constexpr double kDefaultDipole = 7.9e15;      // [Wb m]

// Principal inertias and actuator limits of the spacecraft.
struct SpacecraftParams {
    Vector3d inertia = Vector3d::Zero();        // J1, J2, J3 [kg m^2], diagonal by assumption
    Vector3d wheel_inertia = Vector3d::Zero();  // Jw1, Jw2, Jw3 [kg m^2]
    std::optional<double> max_dipole;           // per-axis coil limit [A m^2]
    std::optional<double> max_wheel_torque;     // per-axis wheel limit [N m]

    void validate() const;
};

// Circular-orbit geometry plus the tilted-dipole field parameters.
struct OrbitEnvironment {
    double altitude = 0.0;             // [m]
    double orbital_radius = 0.0;       // a = altitude + Earth radius [m]
    double orbital_rate = 0.0;         // omega0 = sqrt(GM / a^3) [rad/s]
    double period = 0.0;               // P = 2 pi / omega0 [s]
    double magnetic_inclination = 0.0; // i_m, orbit plane vs magnetic equator [rad]
    double dipole_strength = kDefaultDipole;  // mu_f [Wb m]
    double gm = kDefaultGm;            // [m^3/s^2]
    double epoch_offset = 0.0;         // ascending-node crossing time of the magnetic equator [s]

    static OrbitEnvironment circular(double altitude, double magnetic_inclination,
                                     double dipole_strength = kDefaultDipole,
                                     double gm = kDefaultGm, double epoch_offset = 0.0);
};

struct OrbitalRate {
    double omega0 = 0.0;  // [rad/s]
    double period = 0.0;  // [s]
};

// omega0 and period of a circular orbit at the given altitude.
OrbitalRate orbital_rate(double altitude, double gm = kDefaultGm);

// Tilted-dipole geomagnetic field along the orbit, with t measured from the
// ascending-node crossing of the magnetic equator. [T]
Vector3d dipole_field(double t, const OrbitEnvironment& env);

// Cross-product matrix: skew(v) * w == v x w.
Matrix3d skew(const Vector3d& v);

// Scalar part q0 = sqrt(1 - |q|^2) of a reduced quaternion; |q| slightly above
// one (within 1e-12) is clamped, anything further out is a domain error.
double reduced_quaternion_scalar(const Vector3d& q);

// Rotation from the LVLH frame to the body frame for a reduced quaternion.
Matrix3d lvlh_to_body(const Vector3d& q);

// LVLH frame rate seen in the body frame: A_l^b * [0, omega0, 0]. [rad/s]
Vector3d lvlh_rate_in_body(const Vector3d& q, double omega0);

// Gravity-gradient torque 3 omega0^2 c3 x (J c3), c3 the nadir column of
// the LVLH-to-body rotation. [N m]
Vector3d gravity_gradient_torque(const Vector3d& q, const Vector3d& inertia, double omega0);

}  // namespace plqr
