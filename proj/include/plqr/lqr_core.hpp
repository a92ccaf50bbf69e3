#pragma once

#include <Eigen/Core>

#include <vector>

#include "plqr/linear_plant.hpp"
#include "plqr/matkit.hpp"

// Periodic discrete-time LQR design. The periodic Riccati equation is solved
// by cyclic symplectic-pencil products and ordered real Schur decomposition;
// the constant-coefficient case reuses the same machinery with p = 1.
namespace plqr {

// Periodic Riccati solutions and feedback gains. u_k = -K_{k mod p} (x - x_bar).
struct GainSchedule {
    std::vector<Eigen::MatrixXd> riccati;  // P_k, symmetric PSD, p entries
    std::vector<Eigen::MatrixXd> gains;    // K_k, p entries
    int p = 0;
    double ts = 0.0;                       // sample period the gains were designed for [s]
    Eigen::VectorXd x_bar;                 // regulation reference (wheel bias), size n

    const Eigen::MatrixXd& riccati_at(int k) const;
    const Eigen::MatrixXd& gain_at(int k) const;
    void validate() const;
};

struct RiccatiOptions {
    double residual_tol = 1e-6;     // relative periodic-recursion residual gate
    double psd_tol = 1e-9;          // min eig >= -psd_tol * ||P_k||
    double w11_condition_guard = 1e12;  // recover P_k from a neighbor beyond this
    matkit::SchurOptions schur{};
    int value_iteration_cap = 200000;  // singular-A fallback in solve_dare
    // Long pencil products lose the weakly dominant directions to roundoff;
    // the subspace estimates are polished by cyclic backward recursion sweeps
    // until the orbit settles (the recursion is self-correcting and contracts
    // at the squared monodromy radius per sweep).
    double refine_settle_tol = 1e-12;
    int refine_max_sweeps = 20000;
};

struct RiccatiDiagnostics {
    double max_residual = 0.0;               // worst relative recursion residual
    double monodromy_spectral_radius = 0.0;  // closed-loop period map
    int fallback_count = 0;                  // P_k recovered via a backward step
    double subspace_residual = 0.0;          // residual before refinement
    int refine_sweeps = 0;                   // recursive polishing sweeps used
};

struct PencilPair {
    Eigen::MatrixXd e;  // [[I, B R^-1 B'], [0, A']]
    Eigen::MatrixXd f;  // [[A, 0], [-Q, I]], constant across k
};

// One-step symplectic pencil for sample k.
PencilPair build_pencil_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             const Eigen::MatrixXd& q, const Eigen::MatrixXd& r);

// Stabilizing solution of the constant DARE
// P = Q + A'PA - A'PB (R + B'PB)^{-1} B'PA. Falls back to value iteration
// when A is singular (the pencil product requires A invertible).
Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                           const RiccatiOptions& opts = {});

// Periodic Riccati solver on raw matrices: A constant, B cycling with period
// b_list.size(). Returns the schedule with ts = 0 (caller fills it in).
GainSchedule periodic_riccati_cycle(const Eigen::MatrixXd& a,
                                    const std::vector<Eigen::MatrixXd>& b_list,
                                    const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                                    const RiccatiOptions& opts = {},
                                    RiccatiDiagnostics* diag = nullptr);

// Periodic Riccati solver for a sampled plant.
GainSchedule periodic_riccati(const PeriodicPlant& plant, const RiccatiOptions& opts = {},
                              RiccatiDiagnostics* diag = nullptr);

// Product (A - B_{p-1} K_{p-1}) ... (A - B_0 K_0) over one period.
Eigen::MatrixXd closed_loop_monodromy(const PeriodicPlant& plant, const GainSchedule& schedule);

// Worst relative residual of the periodic Riccati recursion over one period.
double riccati_residual(const PeriodicPlant& plant, const GainSchedule& schedule);

struct GramianInfo {
    int rank = 0;
    // lambda_max / lambda_min over the eigenvalues counted into the rank;
    // zero when the Gramian vanishes.
    double condition = 0.0;
};

// Rank of the p-step reachability Gramian sum Phi B_k B_k' Phi' over one
// period. Eigenvalues below rel_tol * lambda_max do not count toward the rank.
GramianInfo controllability_gramian_rank(const PeriodicPlant& plant, double rel_tol = 1e-10);

}  // namespace plqr
