#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "plqr/linear_plant.hpp"
#include "plqr/sim_engine.hpp"

// Unified run configuration: spacecraft, orbit, weights, discretization, and
// simulation options. All quantities are SI; angles enter the file in
// degrees where the field name says so.
namespace plqr {

struct RunConfig {
    SpacecraftParams spacecraft;
    OrbitEnvironment orbit;
    Eigen::MatrixXd q_weight;  // 9x9
    Eigen::MatrixXd r_weight;  // 6x6
    DiscretizationMethod method = DiscretizationMethod::exact;
    int samples_per_period = 100;
    double sample_period = 0.0;  // 0: derived as orbit period / p
    int quad_steps = 16;
    SimConfig sim;
    Vector3d wheel_bias = Vector3d::Zero();  // momentum-wheel setpoint [rad/s]

    static RunConfig from_json(const nlohmann::json& doc);
    static RunConfig load(const std::filesystem::path& path);

    double effective_sample_period() const;
    // Samples the plant; equatorial-field configurations collapse to a
    // single-sample time-invariant plant.
    PeriodicPlant build_plant() const;
    bool constant_field() const { return orbit.magnetic_inclination == 0.0; }
    Eigen::VectorXd x_bar() const;
};

}  // namespace plqr
