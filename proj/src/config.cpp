#include "plqr/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace plqr {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

[[noreturn]] void missing(const std::string& field) {
    throw ValidationError("config: missing required field '" + field + "'");
}

const json& require(const json& doc, const std::string& key, const std::string& scope) {
    auto it = doc.find(key);
    if (it == doc.end()) missing(scope + key);
    return *it;
}

Vector3d vec3(const json& node, const std::string& scope) {
    if (!node.is_array() || node.size() != 3) {
        throw ValidationError("config: '" + scope + "' must be an array of 3 numbers");
    }
    return Vector3d(node[0].get<double>(), node[1].get<double>(), node[2].get<double>());
}

Eigen::MatrixXd diagonal_or_full(const json& scope_node, const std::string& scope,
                                 const std::string& diag_key, const std::string& full_key,
                                 int dim) {
    if (scope_node.contains(diag_key)) {
        const json& node = scope_node.at(diag_key);
        if (!node.is_array() || static_cast<int>(node.size()) != dim) {
            throw ValidationError("config: '" + scope + diag_key + "' must list " +
                                  std::to_string(dim) + " diagonal entries");
        }
        Eigen::VectorXd d(dim);
        for (int i = 0; i < dim; ++i) d(i) = node[i].get<double>();
        return d.asDiagonal();
    }
    if (scope_node.contains(full_key)) {
        const json& node = scope_node.at(full_key);
        if (!node.is_array() || static_cast<int>(node.size()) != dim * dim) {
            throw ValidationError("config: '" + scope + full_key + "' must hold " +
                                  std::to_string(dim * dim) + " row-major entries");
        }
        Eigen::MatrixXd m(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m(i, j) = node[i * dim + j].get<double>();
        return m;
    }
    return Eigen::MatrixXd::Zero(0, 0);
}

}  // namespace

RunConfig RunConfig::from_json(const json& doc) {
    RunConfig cfg;

    const json& sc = require(doc, "spacecraft", "");
    cfg.spacecraft.inertia = vec3(require(sc, "inertia", "spacecraft."), "spacecraft.inertia");
    cfg.spacecraft.wheel_inertia =
        vec3(require(sc, "wheel_inertia", "spacecraft."), "spacecraft.wheel_inertia");
    if (sc.contains("max_dipole")) cfg.spacecraft.max_dipole = sc.at("max_dipole").get<double>();
    if (sc.contains("max_wheel_torque")) {
        cfg.spacecraft.max_wheel_torque = sc.at("max_wheel_torque").get<double>();
    }
    cfg.spacecraft.validate();

    const json& orbit = require(doc, "orbit", "");
    const double altitude = require(orbit, "altitude_m", "orbit.").get<double>();
    const double incl_deg = require(orbit, "magnetic_inclination_deg", "orbit.").get<double>();
    const double mu_f = orbit.value("dipole_strength_wbm", kDefaultDipole);
    const double gm = orbit.value("gm_m3s2", kDefaultGm);
    const double epoch = orbit.value("epoch_offset_s", 0.0);
    cfg.orbit = OrbitEnvironment::circular(altitude, incl_deg * kDegToRad, mu_f, gm, epoch);

    // Reference-case weights unless the config overrides them.
    Eigen::VectorXd q_default(9);
    q_default << 0.001, 0.001, 0.001, 0.001, 0.001, 0.001, 0.02, 0.02, 0.02;
    Eigen::VectorXd r_default(6);
    r_default << 1e3, 1e3, 1e3, 1e2, 1e2, 1e2;
    cfg.q_weight = q_default.asDiagonal();
    cfg.r_weight = r_default.asDiagonal();
    if (doc.contains("weights")) {
        const json& weights = doc.at("weights");
        Eigen::MatrixXd q = diagonal_or_full(weights, "weights.", "q_diag", "q", 9);
        Eigen::MatrixXd r = diagonal_or_full(weights, "weights.", "r_diag", "r", 6);
        if (q.size() > 0) cfg.q_weight = q;
        if (r.size() > 0) cfg.r_weight = r;
    }

    if (doc.contains("discretization")) {
        const json& disc = doc.at("discretization");
        const std::string method = disc.value("method", std::string("exact"));
        if (method == "exact") {
            cfg.method = DiscretizationMethod::exact;
        } else if (method == "euler") {
            cfg.method = DiscretizationMethod::euler;
        } else {
            throw ValidationError("config: discretization.method must be 'exact' or 'euler'");
        }
        cfg.samples_per_period = disc.value("samples_per_period", 100);
        cfg.sample_period = disc.value("sample_period_s", 0.0);
        cfg.quad_steps = disc.value("quad_steps", 16);
    }
    if (cfg.samples_per_period < 1) {
        throw ValidationError("config: discretization.samples_per_period must be >= 1");
    }
    if (cfg.quad_steps < 2) throw ValidationError("config: discretization.quad_steps must be >= 2");
    if (cfg.sample_period < 0.0) {
        throw ValidationError("config: discretization.sample_period_s must be positive");
    }

    if (doc.contains("sim")) {
        const json& sim = doc.at("sim");
        const std::string mode = sim.value("mode", std::string("linear"));
        if (mode == "linear") {
            cfg.sim.mode = SimMode::linear;
        } else if (mode == "nonlinear") {
            cfg.sim.mode = SimMode::nonlinear;
        } else {
            throw ValidationError("config: sim.mode must be 'linear' or 'nonlinear'");
        }
        cfg.sim.duration_orbits = sim.value("duration_orbits", 10.0);
        if (sim.contains("initial")) {
            const json& init = sim.at("initial");
            if (init.contains("omega")) cfg.sim.initial.omega = vec3(init.at("omega"), "sim.initial.omega");
            if (init.contains("wheel_speed")) {
                cfg.sim.initial.wheel_speed = vec3(init.at("wheel_speed"), "sim.initial.wheel_speed");
            }
            if (init.contains("q")) cfg.sim.initial.q = vec3(init.at("q"), "sim.initial.q");
        }
        if (sim.contains("ic_random_halfwidth")) {
            const json& box = sim.at("ic_random_halfwidth");
            IcRandomBox ic;
            if (box.contains("omega")) ic.omega = vec3(box.at("omega"), "sim.ic_random_halfwidth.omega");
            if (box.contains("wheel_speed")) {
                ic.wheel_speed = vec3(box.at("wheel_speed"), "sim.ic_random_halfwidth.wheel_speed");
            }
            if (box.contains("q")) ic.q = vec3(box.at("q"), "sim.ic_random_halfwidth.q");
            cfg.sim.ic_box = ic;
        }
        cfg.sim.seed = sim.value("seed", 0ULL);
        cfg.sim.duty_fraction = sim.value("duty_fraction", 1.0);
        cfg.sim.saturation = sim.value("saturation", false);
        cfg.sim.log_stride = sim.value("log_stride", 1);
        cfg.sim.substeps_per_sample = sim.value("substeps_per_sample", 64);
        if (sim.contains("disturbance")) {
            const json& dist = sim.at("disturbance");
            const std::string kind = dist.value("type", std::string("none"));
            if (kind == "none") {
                cfg.sim.disturbance.kind = DisturbanceSpec::Kind::none;
            } else if (kind == "constant") {
                cfg.sim.disturbance.kind = DisturbanceSpec::Kind::constant;
            } else if (kind == "sinusoidal") {
                cfg.sim.disturbance.kind = DisturbanceSpec::Kind::sinusoidal;
            } else {
                throw ValidationError(
                    "config: sim.disturbance.type must be none, constant, or sinusoidal");
            }
            if (dist.contains("amplitude")) {
                cfg.sim.disturbance.amplitude = vec3(dist.at("amplitude"), "sim.disturbance.amplitude");
            }
            cfg.sim.disturbance.phase = dist.value("phase_rad", 0.0);
        }
        if (sim.contains("field_model")) {
            const json& field = sim.at("field_model");
            const std::string kind = field.value("type", std::string("design"));
            if (kind == "design") {
                cfg.sim.field_model.kind = FieldModelSpec::Kind::design_dipole;
            } else if (kind == "offset") {
                cfg.sim.field_model.kind = FieldModelSpec::Kind::offset_dipole;
            } else {
                throw ValidationError("config: sim.field_model.type must be design or offset");
            }
            cfg.sim.field_model.inclination_offset =
                field.value("inclination_offset_deg", 0.0) * kDegToRad;
            cfg.sim.field_model.phase_offset = field.value("phase_offset_s", 0.0);
        }
        cfg.sim.validate();
    }

    if (doc.contains("design")) {
        const json& design = doc.at("design");
        if (design.contains("wheel_bias_rad_s")) {
            cfg.wheel_bias = vec3(design.at("wheel_bias_rad_s"), "design.wheel_bias_rad_s");
        }
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream stream(path);
    if (!stream) throw IoError("config: cannot open '" + path.string() + "'");
    json doc;
    try {
        stream >> doc;
    } catch (const json::parse_error& err) {
        throw ValidationError("config: '" + path.string() + "' is not valid JSON: " + err.what());
    }
    return from_json(doc);
}

double RunConfig::effective_sample_period() const {
    return sample_period > 0.0 ? sample_period : orbit.period / samples_per_period;
}

PeriodicPlant RunConfig::build_plant() const {
    SamplePlantOptions opts;
    opts.method = method;
    opts.quad_steps = quad_steps;
    if (constant_field()) {
        // Time-invariant: one sample represents every step.
        opts.time_invariant = true;
        return sample_plant(spacecraft, orbit, effective_sample_period(), 1, q_weight, r_weight,
                            opts);
    }
    return sample_plant(spacecraft, orbit, effective_sample_period(), samples_per_period, q_weight,
                        r_weight, opts);
}

Eigen::VectorXd RunConfig::x_bar() const {
    Eigen::VectorXd bar = Eigen::VectorXd::Zero(kNumStates);
    bar.segment<3>(3) = wheel_bias;
    return bar;
}

}  // namespace plqr
