#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "plqr/orbit_env.hpp"

using plqr::OrbitEnvironment;
using plqr::Vector3d;

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

TEST_CASE("orbital_rate: 657 km orbit gives a 5863 s period") {
    const auto rate = plqr::orbital_rate(657e3);
    CHECK(rate.period == doctest::Approx(5863.0).epsilon(2e-4));
    CHECK(rate.omega0 == doctest::Approx(0.0011).epsilon(0.03));
}

TEST_CASE("orbital_rate: quadrupling GM doubles the rate") {
    const auto base = plqr::orbital_rate(657e3);
    const auto scaled = plqr::orbital_rate(657e3, 4.0 * plqr::kDefaultGm);
    CHECK(scaled.omega0 == doctest::Approx(2.0 * base.omega0).epsilon(1e-12));
}

TEST_CASE("orbital radius: 657 km altitude gives a = 7.028e6 m") {
    const auto env = OrbitEnvironment::circular(657e3, 57.0 * kDeg);
    CHECK(env.orbital_radius == doctest::Approx(7.028e6).epsilon(1e-12));
    CHECK(env.period == doctest::Approx(2.0 * std::numbers::pi / env.orbital_rate).epsilon(1e-14));
}

TEST_CASE("dipole_field: equatorial magnetic orbit gives a constant field") {
    const auto env = OrbitEnvironment::circular(657e3, 0.0);
    const double a3 = std::pow(env.orbital_radius, 3);
    for (double t : {0.0, 123.0, env.period / 3.0, 5.0 * env.period}) {
        const Vector3d b = plqr::dipole_field(t, env);
        CHECK(b(0) == 0.0);
        CHECK(b(1) == doctest::Approx(-env.dipole_strength / a3).epsilon(1e-14));
        CHECK(b(2) == 0.0);
    }
}

TEST_CASE("dipole_field: direct evaluation at the ascending node") {
    const auto env = OrbitEnvironment::circular(657e3, 57.0 * kDeg);
    const Vector3d b = plqr::dipole_field(0.0, env);
    const double scale = env.dipole_strength / std::pow(env.orbital_radius, 3);
    CHECK(scale == doctest::Approx(2.2755e-5).epsilon(1e-3));
    CHECK(b(0) == doctest::Approx(scale * std::sin(57.0 * kDeg)).epsilon(1e-14));
    CHECK(b(1) == doctest::Approx(-scale * std::cos(57.0 * kDeg)).epsilon(1e-14));
    CHECK(b(2) == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("dipole_field: exactly periodic in the orbital period") {
    const auto env = OrbitEnvironment::circular(657e3, 57.0 * kDeg);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 3.0 * env.period);
    for (int trial = 0; trial < 50; ++trial) {
        const double t = dist(rng);
        const Vector3d b0 = plqr::dipole_field(t, env);
        const Vector3d b1 = plqr::dipole_field(t + env.period, env);
        // sin/cos of phases differing by an exact multiple of 2 pi agree to
        // roundoff in the phase argument.
        CHECK((b1 - b0).norm() <= 1e-12 * b0.norm());
    }
}

TEST_CASE("dipole_field: magnitude bounded by the dipole geometry") {
    const auto env = OrbitEnvironment::circular(657e3, 57.0 * kDeg);
    const double scale = env.dipole_strength / std::pow(env.orbital_radius, 3);
    const double si = std::sin(env.magnetic_inclination);
    const double upper = scale * std::sqrt(1.0 + 3.0 * si * si);
    for (int i = 0; i <= 100; ++i) {
        const double t = env.period * i / 100.0;
        const double mag = plqr::dipole_field(t, env).norm();
        CHECK(mag >= scale * std::cos(env.magnetic_inclination) * 0.999999);
        CHECK(mag <= upper * 1.000001);
    }
}

TEST_CASE("dipole_field: epoch offset shifts the phase") {
    auto env = OrbitEnvironment::circular(657e3, 57.0 * kDeg);
    env.epoch_offset = 250.0;
    const Vector3d shifted = plqr::dipole_field(250.0, env);
    env.epoch_offset = 0.0;
    const Vector3d base = plqr::dipole_field(0.0, env);
    CHECK((shifted - base).norm() == 0.0);
}

TEST_CASE("skew: zero vector gives the zero matrix") {
    CHECK(plqr::skew(Vector3d::Zero()).norm() == 0.0);
}

TEST_CASE("skew: unit x case") {
    const auto m = plqr::skew(Vector3d(1.0, 0.0, 0.0));
    Eigen::Matrix3d expect;
    expect << 0, 0, 0, 0, 0, -1, 0, 1, 0;
    CHECK((m - expect).norm() == 0.0);
}

TEST_CASE("skew: matches the componentwise cross product") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector3d v(dist(rng), dist(rng), dist(rng));
        const Vector3d w(dist(rng), dist(rng), dist(rng));
        const Vector3d direct(v(1) * w(2) - v(2) * w(1), v(2) * w(0) - v(0) * w(2),
                              v(0) * w(1) - v(1) * w(0));
        CHECK((plqr::skew(v) * w - direct).norm() <= 1e-15 * direct.norm() + 1e-300);
        CHECK((plqr::skew(v) + plqr::skew(v).transpose()).norm() == 0.0);
    }
}

TEST_CASE("lvlh_rate_in_body: identity attitude") {
    const double w0 = 1.0715e-3;
    const Vector3d rate = plqr::lvlh_rate_in_body(Vector3d::Zero(), w0);
    CHECK(rate(0) == 0.0);
    CHECK(rate(1) == doctest::Approx(w0).epsilon(1e-15));
    CHECK(rate(2) == 0.0);
}

TEST_CASE("lvlh_rate_in_body: small-q linearization") {
    const double w0 = 1.0715e-3;
    const Vector3d q(2e-4, -1e-4, 3e-4);
    const Vector3d rate = plqr::lvlh_rate_in_body(q, w0);
    const Vector3d linear = w0 * Vector3d(2.0 * q(2), 1.0, -2.0 * q(0));
    CHECK((rate - linear).norm() <= 4.0 * w0 * q.squaredNorm());
}

TEST_CASE("lvlh_rate_in_body: full rotation-matrix oracle") {
    const double w0 = 1.0715e-3;
    const Vector3d q(0.1, 0.05, -0.02);
    const Vector3d rate = plqr::lvlh_rate_in_body(q, w0);
    const Vector3d oracle = plqr::lvlh_to_body(q) * Vector3d(0.0, w0, 0.0);
    CHECK((rate - oracle).norm() <= 1e-15);
}

TEST_CASE("lvlh_rate_in_body: preserves the rate magnitude") {
    const double w0 = 1.0715e-3;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-0.4, 0.4);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector3d q(dist(rng), dist(rng), dist(rng));
        CHECK(plqr::lvlh_rate_in_body(q, w0).norm() == doctest::Approx(w0).epsilon(1e-12));
    }
}

TEST_CASE("lvlh_rate_in_body: |q| > 1 is a domain error") {
    CHECK_THROWS_AS(plqr::lvlh_rate_in_body(Vector3d(0.8, 0.6, 0.1), 1e-3),
                    plqr::ValidationError);
}

TEST_CASE("gravity_gradient_torque: zero at the identity attitude") {
    const Vector3d inertia(250.0, 150.0, 100.0);
    CHECK(plqr::gravity_gradient_torque(Vector3d::Zero(), inertia, 1.0715e-3).norm() == 0.0);
    // Any diagonal inertia: c3 = e3 is parallel to J e3.
    CHECK(plqr::gravity_gradient_torque(Vector3d::Zero(), Vector3d(1.0, 5.0, 9.0), 0.1).norm() ==
          0.0);
}

TEST_CASE("gravity_gradient_torque: small-q linear coefficient matrix") {
    const double w0 = 1.0715e-3;
    const Vector3d inertia(250.0, 150.0, 100.0);
    Eigen::Matrix3d t_lin = Eigen::Matrix3d::Zero();
    t_lin(0, 0) = 6.0 * w0 * w0 * (inertia(2) - inertia(1));
    t_lin(1, 1) = 6.0 * w0 * w0 * (inertia(2) - inertia(0));

    const Vector3d q(3e-4, -2e-4, 4e-4);
    const Vector3d torque = plqr::gravity_gradient_torque(q, inertia, w0);
    const Vector3d linear = t_lin * q;
    CHECK((torque - linear).norm() <=
          50.0 * w0 * w0 * inertia.maxCoeff() * q.squaredNorm());
}

TEST_CASE("gravity_gradient_torque: quadratic remainder as q shrinks") {
    const double w0 = 1.0715e-3;
    const Vector3d inertia(250.0, 150.0, 100.0);
    Eigen::Matrix3d t_lin = Eigen::Matrix3d::Zero();
    t_lin(0, 0) = 6.0 * w0 * w0 * (inertia(2) - inertia(1));
    t_lin(1, 1) = 6.0 * w0 * w0 * (inertia(2) - inertia(0));

    double prev_ratio = -1.0;
    for (int k = 0; k < 8; ++k) {
        const double scale = 0.05 / std::pow(2.0, k);
        const Vector3d q = scale * Vector3d(1.0, 0.0, 0.0);
        const double remainder =
            (plqr::gravity_gradient_torque(q, inertia, w0) - t_lin * q).norm();
        const double ratio = remainder / q.squaredNorm();
        if (prev_ratio >= 0.0) {
            // Bounded ratio means the remainder is O(|q|^2).
            CHECK(ratio <= prev_ratio * 1.5 + 1e-12);
        }
        prev_ratio = ratio;
    }
}

TEST_CASE("spacecraft params: validation rejects nonpositive inertia") {
    plqr::SpacecraftParams params;
    params.inertia = Vector3d(250.0, 150.0, 100.0);
    params.wheel_inertia = Vector3d(0.05, 0.05, 0.05);
    CHECK_NOTHROW(params.validate());
    params.inertia(1) = 0.0;
    CHECK_THROWS_AS(params.validate(), plqr::ValidationError);
    params.inertia(1) = 150.0;
    params.wheel_inertia(2) = -0.05;
    CHECK_THROWS_AS(params.validate(), plqr::ValidationError);
}
