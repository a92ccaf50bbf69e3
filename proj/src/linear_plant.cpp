#include "plqr/linear_plant.hpp"

#include <cmath>
#include <string>

#include "plqr/log.hpp"

namespace plqr {

const Eigen::MatrixXd& PeriodicPlant::b_at(int k) const {
    const int idx = ((k % p) + p) % p;
    return b[static_cast<size_t>(idx)];
}

void PeriodicPlant::validate() const {
    if (p < 1) throw ValidationError("plant: p must be >= 1");
    if (!(ts > 0.0)) throw ValidationError("plant: ts must be positive");
    if (static_cast<int>(b.size()) != p) {
        throw ValidationError("plant: expected " + std::to_string(p) + " input matrices, got " +
                              std::to_string(b.size()));
    }
    if (a.rows() != kNumStates || a.cols() != kNumStates) {
        throw ValidationError("plant: A must be 9x9");
    }
    for (const auto& bk : b) {
        if (bk.rows() != kNumStates || bk.cols() != kNumInputs) {
            throw ValidationError("plant: every B_k must be 9x6");
        }
    }
    if (q.rows() != kNumStates || q.cols() != kNumStates ||
        (q - q.transpose()).norm() > 1e-9 * std::max(1.0, q.norm())) {
        throw ValidationError("plant: Q must be symmetric 9x9");
    }
    if (r.rows() != kNumInputs || r.cols() != kNumInputs ||
        (r - r.transpose()).norm() > 1e-9 * std::max(1.0, r.norm())) {
        throw ValidationError("plant: R must be symmetric 6x6");
    }
    for (double lambda : matkit::symmetric_eigenvalues(q)) {
        if (lambda < -1e-12 * std::max(1.0, q.norm())) {
            throw ValidationError("plant: Q must be positive semi-definite");
        }
    }
    for (double lambda : matkit::symmetric_eigenvalues(r)) {
        if (lambda <= 0.0) throw ValidationError("plant: R must be positive definite");
    }
}

Eigen::MatrixXd build_A_continuous(const SpacecraftParams& params, double omega0) {
    params.validate();
    const double j1 = params.inertia(0), j2 = params.inertia(1), j3 = params.inertia(2);
    const double jw1 = params.wheel_inertia(0), jw3 = params.wheel_inertia(2);
    const double w2 = omega0 * omega0;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(kNumStates, kNumStates);
    // Body-rate rows: gyroscopic coupling, wheel momentum coupling, and the
    // combined gravity-gradient / kinematic q terms.
    a(0, 2) = omega0 * (j1 - j2 + j3) / (-j1);
    a(2, 0) = omega0 * (j1 - j2 + j3) / j3;
    a(0, 5) = -omega0 * jw3 / j1;
    a(2, 3) = omega0 * jw1 / j3;
    a(0, 6) = 8.0 * w2 * (j3 - j2) / j1;
    a(1, 7) = 6.0 * w2 * (j3 - j1) / j2;
    a(2, 8) = 2.0 * w2 * (j1 - j2) / j3;
    // Kinematics rows: dq/dt = w / 2.
    a(6, 0) = 0.5;
    a(7, 1) = 0.5;
    a(8, 2) = 0.5;
    return a;
}

Eigen::MatrixXd build_B_continuous(double t, const SpacecraftParams& params,
                                   const OrbitEnvironment& env) {
    params.validate();
    const Vector3d inv_j = params.inertia.cwiseInverse();
    const Vector3d inv_jw = params.wheel_inertia.cwiseInverse();

    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(kNumStates, kNumInputs);
    b.block<3, 3>(0, 0) = Matrix3d((-inv_j).asDiagonal());
    b.block<3, 3>(3, 0) = Matrix3d(inv_jw.asDiagonal());
    b.block<3, 3>(0, 3) = Matrix3d((-inv_j).asDiagonal()) * skew(dipole_field(t, env));
    return b;
}

DiscretePair discretize_euler(const Eigen::MatrixXd& a_cont,
                              const std::function<Eigen::MatrixXd(double)>& b_cont, double ts,
                              int k) {
    if (!(ts > 0.0)) throw ValidationError("discretize_euler: ts must be positive");
    DiscretePair pair;
    pair.a = Eigen::MatrixXd::Identity(a_cont.rows(), a_cont.cols()) + ts * a_cont;
    pair.b = ts * b_cont(k * ts);
    return pair;
}

DiscretePair discretize_exact(const Eigen::MatrixXd& a_cont,
                              const std::function<Eigen::MatrixXd(double)>& b_cont, double ts,
                              int k, int quad_steps) {
    if (!(ts > 0.0)) throw ValidationError("discretize_exact: ts must be positive");
    DiscretePair pair;
    pair.a = matkit::mat_exp(a_cont, ts);
    pair.b = matkit::zoh_input_integral(a_cont, b_cont, k * ts, ts, quad_steps);
    return pair;
}

PeriodicPlant sample_plant(const SpacecraftParams& params, const OrbitEnvironment& env, double ts,
                           int p, const Eigen::MatrixXd& q_weight, const Eigen::MatrixXd& r_weight,
                           const SamplePlantOptions& opts) {
    if (p < 1) throw ValidationError("sample_plant: p must be >= 1");
    if (!(ts > 0.0)) throw ValidationError("sample_plant: ts must be positive");

    if (!opts.time_invariant) {
        const double mismatch = std::abs(p * ts - env.period) / env.period;
        if (mismatch > opts.period_match_tol) {
            const std::string msg = "sample_plant: p*ts = " + std::to_string(p * ts) +
                                    " s deviates from the field period " +
                                    std::to_string(env.period) + " s by " +
                                    std::to_string(100.0 * mismatch) + "%";
            if (opts.strict_period_check) throw ValidationError(msg);
            log::info(msg);
        }
    }

    const Eigen::MatrixXd a_cont = build_A_continuous(params, env.orbital_rate);
    auto b_cont = [&](double t) { return build_B_continuous(t, params, env); };

    PeriodicPlant plant;
    plant.ts = ts;
    plant.p = p;
    plant.q = q_weight;
    plant.r = r_weight;
    plant.b.reserve(static_cast<size_t>(p));
    for (int k = 0; k < p; ++k) {
        const DiscretePair pair = (opts.method == DiscretizationMethod::euler)
                                      ? discretize_euler(a_cont, b_cont, ts, k)
                                      : discretize_exact(a_cont, b_cont, ts, k, opts.quad_steps);
        if (k == 0) plant.a = pair.a;
        plant.b.push_back(pair.b);
    }
    plant.validate();
    return plant;
}

}  // namespace plqr
