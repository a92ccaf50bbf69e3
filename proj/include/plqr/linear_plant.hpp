#pragma once

#include <Eigen/Core>

#include <vector>

#include "plqr/matkit.hpp"
#include "plqr/orbit_env.hpp"

// Linearized 9-state model about the nadir-pointing equilibrium and its
// discretizations. State ordering [w1 w2 w3 W1 W2 W3 q1 q2 q3]; input
// ordering [tw1 tw2 tw3 m1 m2 m3].
namespace plqr {

inline constexpr int kNumStates = 9;
inline constexpr int kNumInputs = 6;

enum class DiscretizationMethod {
    euler,  // A_k = I + ts A, B_k = ts B(k ts)
    exact,  // A_k = e^{A ts}, B_k = integral of e^{A tau} B(k ts + tau)
};

// Sampled discrete-time periodic plant with the LQR weights attached.
// A_k is constant across k; B_k cycles with period p.
struct PeriodicPlant {
    Eigen::MatrixXd a;               // 9x9 discrete state matrix
    std::vector<Eigen::MatrixXd> b;  // p entries, 9x6 each
    double ts = 0.0;                 // sample period [s]
    int p = 0;                       // samples per field period
    Eigen::MatrixXd q;               // 9x9 state weight, symmetric PSD
    Eigen::MatrixXd r;               // 6x6 control weight, symmetric PD

    const Eigen::MatrixXd& b_at(int k) const;  // B_{k mod p}
    void validate() const;
};

// Continuous-time system matrix of the linearized model.
Eigen::MatrixXd build_A_continuous(const SpacecraftParams& params, double omega0);

// Continuous-time input matrix at time t; the magnetic block tracks the
// dipole field.
Eigen::MatrixXd build_B_continuous(double t, const SpacecraftParams& params,
                                   const OrbitEnvironment& env);

struct DiscretePair {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
};

// Forward-Euler discretization of sample k.
DiscretePair discretize_euler(const Eigen::MatrixXd& a_cont,
                              const std::function<Eigen::MatrixXd(double)>& b_cont, double ts,
                              int k);

// Zero-order-hold discretization of sample k with Simpson quadrature for the
// input integral.
DiscretePair discretize_exact(const Eigen::MatrixXd& a_cont,
                              const std::function<Eigen::MatrixXd(double)>& b_cont, double ts,
                              int k, int quad_steps = 16);

struct SamplePlantOptions {
    DiscretizationMethod method = DiscretizationMethod::exact;
    int quad_steps = 16;
    // p * ts must match the field period within this fraction; violations warn
    // by default and throw when strict.
    double period_match_tol = 1e-3;
    bool strict_period_check = false;
    // Skip the period check entirely (time-invariant plants, i_m = 0).
    bool time_invariant = false;
};

// Samples the full periodic plant, B_k at k = 0 .. p-1.
PeriodicPlant sample_plant(const SpacecraftParams& params, const OrbitEnvironment& env, double ts,
                           int p, const Eigen::MatrixXd& q_weight, const Eigen::MatrixXd& r_weight,
                           const SamplePlantOptions& opts = {});

}  // namespace plqr
