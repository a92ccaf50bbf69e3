#pragma once

#include <Eigen/Core>

#include <complex>
#include <functional>
#include <vector>

#include "plqr/errors.hpp"

// Dense small-matrix kernel: linear solves, matrix exponential, ZOH input
// quadrature, and real Schur decomposition with eigenvalue reordering for
// invariant-subspace extraction. Everything operates on Eigen::MatrixXd and
// validates finiteness at the API boundary. All functions are pure and safe
// for concurrent invocation.
namespace plqr::matkit {

using Matrix = Eigen::MatrixXd;

// Splits the spectrum at a circle |lambda| = boundary. The selected set goes
// into the leading diagonal blocks of the reordered Schur form.
struct SpectralSplit {
    double boundary = 1.0;
    bool select_inside = true;   // true: |lambda| < boundary selected
    double boundary_tol = 1e-9;  // PredicateSplitError inside this band

    bool selects(const std::complex<double>& lambda) const {
        const double mag = std::abs(lambda);
        return select_inside ? (mag < boundary) : (mag > boundary);
    }
};

struct SchurOptions {
    int max_sweeps_per_size = 30;  // iteration cap is max_sweeps_per_size * n
    double residual_tol = 1e-9;    // accept only if ||W^T M W - S|| <= tol * ||M||
};

// W orthogonal, S real quasi-upper-triangular, W^T M W = S.
struct SchurDecomposition {
    Matrix w;
    Matrix s;

    // Eigenvalues read off the diagonal blocks of s, in block order.
    std::vector<std::complex<double>> eigenvalues() const;
    // Dimension of the leading invariant subspace after reordering.
    int leading_dim = 0;
};

// Solves A X = B by LU with partial pivoting. Throws SingularMatrixError when
// a pivot falls below pivot_rel_tol * max|A|.
Matrix solve_linear(const Matrix& a, const Matrix& b, double pivot_rel_tol = 1e-12);

// e^{A t} by scaling-and-squaring with a Pade core. Throws OverflowError if an
// intermediate leaves the representable range.
Matrix mat_exp(const Matrix& a, double t = 1.0);

// Integral of e^{A tau} B(t0 + tau) over tau in [0, ts] by composite Simpson
// quadrature with quad_steps panels; error O(quad_steps^-4) for smooth B.
Matrix zoh_input_integral(const Matrix& a, const std::function<Matrix(double)>& b_of_t,
                          double t0, double ts, int quad_steps);

// Real Schur form without reordering.
SchurDecomposition real_schur(const Matrix& m, const SchurOptions& opts = {});

// Real Schur form with the eigenvalues selected by `split` reordered into the
// leading diagonal blocks. leading_dim reports their total dimension.
SchurDecomposition ordered_real_schur(const Matrix& m, const SpectralSplit& split = {},
                                      const SchurOptions& opts = {});

// Real Schur form with the `count` largest-modulus eigenvalues ordered into
// the leading blocks (dominant invariant subspace). Unlike the predicate
// variant there is no boundary check; callers own separation validation.
// A conjugate pair that cannot be split may leave leading_dim != count, in
// which case the next candidate block is substituted; failure to reach
// `count` exactly raises PredicateSplitError.
SchurDecomposition ordered_real_schur_top(const Matrix& m, int count,
                                          const SchurOptions& opts = {});

// Eigenvalues via real_schur.
std::vector<std::complex<double>> eigenvalues(const Matrix& m, const SchurOptions& opts = {});

// max |lambda_i|.
double spectral_radius(const Matrix& m, const SchurOptions& opts = {});

// Eigenvalues of a symmetric matrix, ascending. Input is symmetrized first.
std::vector<double> symmetric_eigenvalues(const Matrix& m, const SchurOptions& opts = {});

}  // namespace plqr::matkit
