#include "plqr/lqr_core.hpp"

#include <cmath>
#include <string>

#include "plqr/log.hpp"

namespace plqr {

namespace {

using Eigen::MatrixXd;

// P <- Q + A'PA - A'PB (R + B'PB)^{-1} B'PA, symmetrized.
MatrixXd riccati_backward_step(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                               const MatrixXd& r, const MatrixXd& p_next) {
    const MatrixXd btp = b.transpose() * p_next;
    const MatrixXd gain = matkit::solve_linear(r + btp * b, btp * a);
    const MatrixXd p = q + a.transpose() * p_next * a - (btp * a).transpose() * gain;
    return 0.5 * (p + p.transpose());
}

MatrixXd feedback_gain(const MatrixXd& a, const MatrixXd& b, const MatrixXd& r,
                       const MatrixXd& p_next) {
    const MatrixXd btp = b.transpose() * p_next;
    return matkit::solve_linear(r + btp * b, btp * a);
}

double one_norm(const MatrixXd& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

void check_psd(const MatrixXd& p, double psd_tol, int k) {
    const auto eigs = matkit::symmetric_eigenvalues(p);
    if (!eigs.empty() && eigs.front() < -psd_tol * std::max(1.0, p.norm())) {
        throw NoStabilizingSolutionError("periodic_riccati: P_" + std::to_string(k) +
                                         " is not positive semi-definite (min eig " +
                                         std::to_string(eigs.front()) + ")");
    }
}

// Extract P = W21 W11^{-1} from the leading invariant subspace basis;
// returns the 1-norm condition estimate of W11 through `cond`.
MatrixXd subspace_to_riccati(const matkit::SchurDecomposition& dec, int n, double* cond) {
    if (dec.leading_dim != n) {
        throw SubspaceExtractionError(
            "periodic_riccati: invariant subspace has dimension " +
            std::to_string(dec.leading_dim) + ", expected " + std::to_string(n));
    }
    const MatrixXd w11 = dec.w.topLeftCorner(n, n);
    const MatrixXd w21 = dec.w.bottomLeftCorner(n, n);
    MatrixXd w11_inv;
    try {
        w11_inv = matkit::solve_linear(w11, MatrixXd::Identity(n, n));
    } catch (const SingularMatrixError&) {
        throw SubspaceExtractionError("periodic_riccati: W11 is singular");
    }
    if (cond != nullptr) *cond = one_norm(w11) * one_norm(w11_inv);
    const MatrixXd p = w21 * w11_inv;
    return 0.5 * (p + p.transpose());
}

// Nearest-PSD projection: negative eigenvalues are clipped. Keeps the
// recursive refinement inside the convergence basin of the stabilizing
// solution.
MatrixXd project_psd(const MatrixXd& p, const matkit::SchurOptions& opts) {
    const auto dec = matkit::real_schur(0.5 * (p + p.transpose()), opts);
    MatrixXd clipped = dec.s;
    for (int i = 0; i < clipped.rows(); ++i) {
        for (int j = 0; j < clipped.cols(); ++j) {
            if (i == j) {
                clipped(i, j) = std::max(clipped(i, j), 0.0);
            } else {
                clipped(i, j) = 0.0;
            }
        }
    }
    const MatrixXd out = dec.w * clipped * dec.w.transpose();
    return 0.5 * (out + out.transpose());
}

double relative_residual(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                         const MatrixXd& r, const MatrixXd& p_k, const MatrixXd& p_next) {
    const MatrixXd recomputed = riccati_backward_step(a, b, q, r, p_next);
    return (p_k - recomputed).norm() / (1.0 + p_k.norm());
}

GainSchedule assemble_schedule(const MatrixXd& a, const std::vector<MatrixXd>& b_list,
                               const MatrixXd& q, const MatrixXd& r,
                               std::vector<MatrixXd> riccati, const RiccatiOptions& opts,
                               RiccatiDiagnostics* diag, int fallback_count) {
    const int p = static_cast<int>(b_list.size());
    const int n = static_cast<int>(a.rows());

    GainSchedule schedule;
    schedule.p = p;
    schedule.riccati = std::move(riccati);
    schedule.x_bar = Eigen::VectorXd::Zero(n);
    schedule.gains.reserve(static_cast<size_t>(p));

    double max_residual = 0.0;
    for (int k = 0; k < p; ++k) {
        const MatrixXd& p_next = schedule.riccati[static_cast<size_t>((k + 1) % p)];
        const MatrixXd& p_k = schedule.riccati[static_cast<size_t>(k)];
        check_psd(p_k, opts.psd_tol, k);
        max_residual =
            std::max(max_residual, relative_residual(a, b_list[static_cast<size_t>(k)], q, r,
                                                     p_k, p_next));
        schedule.gains.push_back(feedback_gain(a, b_list[static_cast<size_t>(k)], r, p_next));
    }
    if (max_residual > opts.residual_tol) {
        throw ResidualExceededError("periodic_riccati: worst recursion residual " +
                                    std::to_string(max_residual) + " exceeds " +
                                    std::to_string(opts.residual_tol));
    }

    MatrixXd monodromy = MatrixXd::Identity(n, n);
    for (int k = 0; k < p; ++k) {
        monodromy = (a - b_list[static_cast<size_t>(k)] * schedule.gains[static_cast<size_t>(k)]) *
                    monodromy;
    }
    const double rho = matkit::spectral_radius(monodromy, opts.schur);
    if (rho >= 1.0) {
        throw NoStabilizingSolutionError(
            "periodic_riccati: closed-loop monodromy spectral radius " + std::to_string(rho) +
            " is not inside the unit circle");
    }

    if (diag != nullptr) {
        diag->max_residual = max_residual;
        diag->monodromy_spectral_radius = rho;
        diag->fallback_count = fallback_count;
    }
    return schedule;
}

}  // namespace

const MatrixXd& GainSchedule::riccati_at(int k) const {
    return riccati[static_cast<size_t>(((k % p) + p) % p)];
}

const MatrixXd& GainSchedule::gain_at(int k) const {
    return gains[static_cast<size_t>(((k % p) + p) % p)];
}

void GainSchedule::validate() const {
    if (p < 1) throw ValidationError("schedule: p must be >= 1");
    if (static_cast<int>(riccati.size()) != p || static_cast<int>(gains.size()) != p) {
        throw ValidationError("schedule: expected " + std::to_string(p) +
                              " Riccati solutions and gains");
    }
    const auto n = riccati.front().rows();
    const auto m = gains.front().rows();
    for (const auto& pk : riccati) {
        if (pk.rows() != n || pk.cols() != n) {
            throw ValidationError("schedule: inconsistent P_k dimensions");
        }
    }
    for (const auto& kk : gains) {
        if (kk.rows() != m || kk.cols() != n) {
            throw ValidationError("schedule: inconsistent K_k dimensions");
        }
    }
    if (x_bar.size() != n) throw ValidationError("schedule: x_bar size mismatch");
}

PencilPair build_pencil_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             const Eigen::MatrixXd& q, const Eigen::MatrixXd& r) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n) throw ValidationError("build_pencil_pair: A must be square");
    if (b.rows() != n) throw ValidationError("build_pencil_pair: B row count mismatch");
    if (q.rows() != n || q.cols() != n) throw ValidationError("build_pencil_pair: Q must be nxn");
    if (r.rows() != b.cols() || r.cols() != b.cols()) {
        throw ValidationError("build_pencil_pair: R must match the input count");
    }

    MatrixXd r_inv_bt;
    try {
        r_inv_bt = matkit::solve_linear(r, b.transpose());
    } catch (const SingularMatrixError&) {
        throw SingularMatrixError("build_pencil_pair: R is singular");
    }

    PencilPair pair;
    pair.e = MatrixXd::Zero(2 * n, 2 * n);
    pair.e.topLeftCorner(n, n).setIdentity();
    pair.e.topRightCorner(n, n) = b * r_inv_bt;
    pair.e.bottomRightCorner(n, n) = a.transpose();

    pair.f = MatrixXd::Zero(2 * n, 2 * n);
    pair.f.topLeftCorner(n, n) = a;
    pair.f.bottomLeftCorner(n, n) = -q;
    pair.f.bottomRightCorner(n, n).setIdentity();
    return pair;
}

GainSchedule periodic_riccati_cycle(const Eigen::MatrixXd& a,
                                    const std::vector<Eigen::MatrixXd>& b_list,
                                    const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                                    const RiccatiOptions& opts, RiccatiDiagnostics* diag) {
    const int p = static_cast<int>(b_list.size());
    if (p < 1) throw ValidationError("periodic_riccati: need at least one input matrix");
    const int n = static_cast<int>(a.rows());

    // One F^{-1} serves every factor of every product: F is constant because
    // A is.
    std::vector<MatrixXd> fe(b_list.size());
    MatrixXd f_inv;
    for (int k = 0; k < p; ++k) {
        const PencilPair pair = build_pencil_pair(a, b_list[static_cast<size_t>(k)], q, r);
        if (k == 0) {
            f_inv = matkit::solve_linear(pair.f, MatrixXd::Identity(2 * n, 2 * n));
        }
        fe[static_cast<size_t>(k)] = f_inv * pair.e;
    }

    // The cyclic product maps z_{k+p} back to z_k, so the stabilizing
    // subspace carries the n dominant eigenvalues (reciprocals of the
    // closed-loop monodromy spectrum). Selection is by modulus count: for
    // long products the contracting half of the spectrum sits below the
    // roundoff floor of the formed matrix and a circle predicate would
    // misclassify its noise.
    std::vector<MatrixXd> riccati(static_cast<size_t>(p));
    std::vector<bool> needs_fallback(static_cast<size_t>(p), false);
    int fallback_count = 0;
    for (int k = 0; k < p; ++k) {
        MatrixXd gamma = fe[static_cast<size_t>(k)];
        for (int j = 1; j < p; ++j) gamma = gamma * fe[static_cast<size_t>((k + j) % p)];

        const auto dec = matkit::ordered_real_schur_top(gamma, n, opts.schur);
        double cond = 0.0;
        riccati[static_cast<size_t>(k)] =
            project_psd(subspace_to_riccati(dec, n, &cond), opts.schur);
        if (cond > opts.w11_condition_guard) {
            needs_fallback[static_cast<size_t>(k)] = true;
            ++fallback_count;
        }
    }

    // Recover badly conditioned slots by one backward recursion step from a
    // trusted neighbor; the recursion is self-correcting.
    if (fallback_count > 0 && fallback_count < p) {
        log::debug("periodic_riccati: recovering " + std::to_string(fallback_count) +
                   " solution(s) through the backward recursion");
        bool progress = true;
        while (progress) {
            progress = false;
            for (int k = p - 1; k >= 0; --k) {
                const int next = (k + 1) % p;
                if (needs_fallback[static_cast<size_t>(k)] &&
                    !needs_fallback[static_cast<size_t>(next)]) {
                    riccati[static_cast<size_t>(k)] =
                        riccati_backward_step(a, b_list[static_cast<size_t>(k)], q, r,
                                              riccati[static_cast<size_t>(next)]);
                    needs_fallback[static_cast<size_t>(k)] = false;
                    progress = true;
                }
            }
        }
    }

    double subspace_residual = 0.0;
    for (int k = 0; k < p; ++k) {
        subspace_residual = std::max(
            subspace_residual,
            relative_residual(a, b_list[static_cast<size_t>(k)], q, r,
                              riccati[static_cast<size_t>(k)],
                              riccati[static_cast<size_t>((k + 1) % p)]));
    }

    // Polish the orbit with backward sweeps until it settles. Benign
    // problems exit immediately; ill-conditioned long products converge at
    // the squared monodromy radius per sweep.
    int sweeps = 0;
    if (subspace_residual > opts.refine_settle_tol) {
        for (; sweeps < opts.refine_max_sweeps; ++sweeps) {
            double change = 0.0;
            MatrixXd pm = riccati[0];
            for (int k = p - 1; k >= 0; --k) {
                pm = riccati_backward_step(a, b_list[static_cast<size_t>(k)], q, r, pm);
                change = std::max(change, (pm - riccati[static_cast<size_t>(k)]).norm() /
                                              (1.0 + pm.norm()));
                riccati[static_cast<size_t>(k)] = pm;
            }
            if (change < opts.refine_settle_tol) break;
        }
    }

    GainSchedule schedule =
        assemble_schedule(a, b_list, q, r, std::move(riccati), opts, diag, fallback_count);
    if (diag != nullptr) {
        diag->subspace_residual = subspace_residual;
        diag->refine_sweeps = sweeps;
    }
    return schedule;
}

Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                           const RiccatiOptions& opts) {
    try {
        return periodic_riccati_cycle(a, {b}, q, r, opts).riccati.front();
    } catch (const SingularMatrixError&) {
        // The pencil product needs an invertible A; iterate the recursion
        // instead when it is not.
        MatrixXd p = q;
        for (int it = 0; it < opts.value_iteration_cap; ++it) {
            const MatrixXd next = riccati_backward_step(a, b, q, r, p);
            const double change = (next - p).norm() / (1.0 + next.norm());
            p = next;
            if (change < 1e-14) break;
        }
        const double resid = relative_residual(a, b, q, r, p, p);
        if (resid > opts.residual_tol) {
            throw NoStabilizingSolutionError("solve_dare: value-iteration residual " +
                                             std::to_string(resid));
        }
        const MatrixXd k_gain = feedback_gain(a, b, r, p);
        if (matkit::spectral_radius(a - b * k_gain, opts.schur) >= 1.0) {
            throw NoStabilizingSolutionError("solve_dare: value iteration did not stabilize");
        }
        check_psd(p, opts.psd_tol, 0);
        return p;
    }
}

GainSchedule periodic_riccati(const PeriodicPlant& plant, const RiccatiOptions& opts,
                              RiccatiDiagnostics* diag) {
    plant.validate();
    GainSchedule schedule = periodic_riccati_cycle(plant.a, plant.b, plant.q, plant.r, opts, diag);
    schedule.ts = plant.ts;
    return schedule;
}

Eigen::MatrixXd closed_loop_monodromy(const PeriodicPlant& plant, const GainSchedule& schedule) {
    if (schedule.p != plant.p && schedule.p != 1) {
        throw ValidationError("closed_loop_monodromy: schedule period " +
                              std::to_string(schedule.p) + " does not match plant period " +
                              std::to_string(plant.p));
    }
    MatrixXd monodromy = MatrixXd::Identity(plant.a.rows(), plant.a.cols());
    for (int k = 0; k < plant.p; ++k) {
        monodromy = (plant.a - plant.b_at(k) * schedule.gain_at(k)) * monodromy;
    }
    return monodromy;
}

double riccati_residual(const PeriodicPlant& plant, const GainSchedule& schedule) {
    if (schedule.p != plant.p && schedule.p != 1) {
        throw ValidationError("riccati_residual: schedule/plant period mismatch");
    }
    double worst = 0.0;
    for (int k = 0; k < plant.p; ++k) {
        worst = std::max(worst, relative_residual(plant.a, plant.b_at(k), plant.q, plant.r,
                                                  schedule.riccati_at(k),
                                                  schedule.riccati_at(k + 1)));
    }
    return worst;
}

GramianInfo controllability_gramian_rank(const PeriodicPlant& plant, double rel_tol) {
    plant.validate();
    const int n = static_cast<int>(plant.a.rows());
    MatrixXd gram = MatrixXd::Zero(n, n);
    for (int k = 0; k < plant.p; ++k) {
        gram = plant.a * gram * plant.a.transpose() +
               plant.b_at(k) * plant.b_at(k).transpose();
    }
    const auto eigs = matkit::symmetric_eigenvalues(gram);
    const double lambda_max = eigs.empty() ? 0.0 : eigs.back();

    GramianInfo info;
    if (lambda_max <= 0.0) return info;
    double smallest_counted = lambda_max;
    for (double lambda : eigs) {
        if (lambda > rel_tol * lambda_max) {
            ++info.rank;
            smallest_counted = std::min(smallest_counted, lambda);
        }
    }
    info.condition = lambda_max / smallest_counted;
    return info;
}

}  // namespace plqr
