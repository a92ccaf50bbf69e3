#include "plqr/matkit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace plqr::matkit {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw ValidationError(std::string(what) + ": non-finite entries");
    }
}

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw ValidationError(std::string(what) + ": matrix must be square, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

// Eigenvalues of a real 2x2 block.
std::pair<std::complex<double>, std::complex<double>> eig2x2(double a, double b, double c,
                                                             double d) {
    const double tr = a + d;
    const double disc = (a - d) * (a - d) + 4.0 * b * c;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        return {std::complex<double>(0.5 * (tr + root), 0.0),
                std::complex<double>(0.5 * (tr - root), 0.0)};
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(0.5 * tr, im), std::complex<double>(0.5 * tr, -im)};
}

// Householder vector u (unit norm) that maps x onto a multiple of e1.
// Returns false when x is already (numerically) a multiple of e1.
bool householder_unit(Eigen::VectorXd& x) {
    const double scale = x.cwiseAbs().maxCoeff();
    if (scale == 0.0) return false;
    Eigen::VectorXd v = x / scale;
    const double tail = v.tail(v.size() - 1).norm();
    if (tail == 0.0) return false;
    const double alpha = -std::copysign(v.norm(), v(0));
    v(0) -= alpha;
    x = v / v.norm();
    return true;
}

// Applies P = I - 2 u u^T from the left to rows [r0, r0+len) of m.
void apply_householder_left(Matrix& m, const Eigen::VectorXd& u, int r0) {
    const int len = static_cast<int>(u.size());
    m.middleRows(r0, len) -= 2.0 * u * (u.transpose() * m.middleRows(r0, len));
}

// Applies P from the right to columns [c0, c0+len) of m.
void apply_householder_right(Matrix& m, const Eigen::VectorXd& u, int c0) {
    const int len = static_cast<int>(u.size());
    m.middleCols(c0, len) -= 2.0 * (m.middleCols(c0, len) * u) * u.transpose();
}

// Reduces h to upper Hessenberg form, accumulating the similarity into w.
void hessenberg(Matrix& h, Matrix& w) {
    const int n = static_cast<int>(h.rows());
    for (int k = 0; k + 2 < n; ++k) {
        Eigen::VectorXd u = h.col(k).segment(k + 1, n - k - 1);
        if (!householder_unit(u)) continue;
        apply_householder_left(h, u, k + 1);
        apply_householder_right(h, u, k + 1);
        apply_householder_right(w, u, k + 1);
        h.col(k).segment(k + 2, n - k - 2).setZero();
    }
}

// Francis double-shift QR on the Hessenberg matrix h, accumulating into w.
// Leaves h quasi-upper-triangular with explicit zeros on negligible
// subdiagonal entries.
void francis_qr(Matrix& h, Matrix& w, const SchurOptions& opts) {
    const int n = static_cast<int>(h.rows());
    if (n < 3) {
        return;  // 1x1 and 2x2 handled by the canonicalization pass
    }
    const double hnorm = h.norm();
    const int max_sweeps = opts.max_sweeps_per_size * n;
    int sweeps = 0;

    int m = n - 1;
    int iter_this_block = 0;
    while (m > 0) {
        // Deflation scan: find the top l of the trailing unreduced block.
        int l = m;
        while (l > 0) {
            double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (s == 0.0) s = hnorm;
            if (std::abs(h(l, l - 1)) <= kEps * s) {
                h(l, l - 1) = 0.0;
                break;
            }
            --l;
        }
        if (l == m) {
            --m;
            iter_this_block = 0;
            continue;
        }
        if (l == m - 1) {
            m -= 2;
            iter_this_block = 0;
            continue;
        }

        if (++sweeps > max_sweeps) {
            throw SchurConvergenceError("real_schur: no convergence after " +
                                        std::to_string(max_sweeps) + " QR sweeps");
        }

        // Double shift from the trailing 2x2, with an ad-hoc exceptional shift
        // every 10 stalled iterations.
        double shift_tr, shift_det;
        if (++iter_this_block % 11 == 10) {
            const double s = std::abs(h(m, m - 1)) + std::abs(h(m - 1, m - 2));
            shift_tr = 1.5 * s;
            shift_det = -0.4375 * s * s;
        } else {
            shift_tr = h(m - 1, m - 1) + h(m, m);
            shift_det = h(m - 1, m - 1) * h(m, m) - h(m - 1, m) * h(m, m - 1);
        }

        // First column of (H - aI)(H - bI) restricted to the window.
        double x = h(l, l) * h(l, l) + h(l, l + 1) * h(l + 1, l) - shift_tr * h(l, l) + shift_det;
        double y = h(l + 1, l) * (h(l, l) + h(l + 1, l + 1) - shift_tr);
        double z = h(l + 2, l + 1) * h(l + 1, l);

        // Bulge chase.
        for (int k = l; k <= m - 2; ++k) {
            Eigen::VectorXd u(3);
            u << x, y, z;
            if (householder_unit(u)) {
                apply_householder_left(h, u, k);
                apply_householder_right(h, u, k);
                apply_householder_right(w, u, k);
            }
            x = h(k + 1, k);
            y = h(k + 2, k);
            z = (k + 3 <= m) ? h(k + 3, k) : 0.0;
        }
        {
            Eigen::VectorXd u(2);
            u << x, y;
            if (householder_unit(u)) {
                apply_householder_left(h, u, m - 1);
                apply_householder_right(h, u, m - 1);
                apply_householder_right(w, u, m - 1);
            }
        }
        // Clear the roundoff bulge remnants below the subdiagonal.
        for (int j = l; j <= m - 2; ++j) {
            for (int i = j + 2; i <= m; ++i) h(i, j) = 0.0;
        }
    }
}

// Splits 2x2 diagonal blocks whose eigenvalues are real, so that every
// remaining 2x2 block carries a complex-conjugate pair.
void canonicalize_blocks(Matrix& s, Matrix& w) {
    const int n = static_cast<int>(s.rows());
    int i = 0;
    while (i + 1 < n) {
        if (s(i + 1, i) == 0.0) {
            ++i;
            continue;
        }
        const double a = s(i, i), b = s(i, i + 1), c = s(i + 1, i), d = s(i + 1, i + 1);
        const double disc = (a - d) * (a - d) + 4.0 * b * c;
        if (disc < 0.0) {
            i += 2;
            continue;
        }
        // Real pair: rotate the eigenvector for one eigenvalue onto e1.
        const double root = std::sqrt(disc);
        const double lambda = 0.5 * (a + d) + (a + d >= 0.0 ? 0.5 : -0.5) * root;
        double v1, v2;
        if (std::abs(b) + std::abs(lambda - a) >= std::abs(c) + std::abs(lambda - d)) {
            v1 = b;
            v2 = lambda - a;
        } else {
            v1 = lambda - d;
            v2 = c;
        }
        const double vn = std::hypot(v1, v2);
        if (vn == 0.0) {
            v1 = 1.0;
            v2 = 0.0;
        } else {
            v1 /= vn;
            v2 /= vn;
        }
        Eigen::Matrix2d g;
        g << v1, -v2, v2, v1;
        s.middleRows(i, 2) = g.transpose() * s.middleRows(i, 2);
        s.middleCols(i, 2) = s.middleCols(i, 2) * g;
        w.middleCols(i, 2) = w.middleCols(i, 2) * g;
        s(i + 1, i) = 0.0;
        ++i;
    }
}

void verify_schur(const Matrix& m, const SchurDecomposition& dec, const SchurOptions& opts,
                  const char* what) {
    const int n = static_cast<int>(m.rows());
    const double scale = std::max(m.norm(), 1.0);
    const double orth = (dec.w.transpose() * dec.w - Matrix::Identity(n, n)).norm();
    if (orth > 1e-10 * std::sqrt(static_cast<double>(std::max(n, 1)))) {
        throw ResidualExceededError(std::string(what) + ": basis lost orthogonality (" +
                                    std::to_string(orth) + ")");
    }
    const double resid = (dec.w.transpose() * m * dec.w - dec.s).norm();
    if (resid > opts.residual_tol * scale) {
        throw ResidualExceededError(std::string(what) + ": decomposition residual " +
                                    std::to_string(resid) + " exceeds " +
                                    std::to_string(opts.residual_tol * scale));
    }
}

struct Block {
    int start = 0;
    int size = 1;
    bool selected = false;
    double modulus = 0.0;
};

std::vector<Block> identify_blocks(const Matrix& s, const SpectralSplit& split,
                                   bool check_boundary) {
    const int n = static_cast<int>(s.rows());
    std::vector<Block> blocks;
    int i = 0;
    while (i < n) {
        Block blk;
        blk.start = i;
        blk.size = (i + 1 < n && s(i + 1, i) != 0.0) ? 2 : 1;
        std::complex<double> lambda;
        if (blk.size == 2) {
            lambda = eig2x2(s(i, i), s(i, i + 1), s(i + 1, i), s(i + 1, i + 1)).first;
        } else {
            lambda = std::complex<double>(s(i, i), 0.0);
        }
        if (check_boundary && std::abs(std::abs(lambda) - split.boundary) < split.boundary_tol) {
            throw PredicateSplitError(
                "ordered_real_schur: eigenvalue with |lambda| = " + std::to_string(std::abs(lambda)) +
                " lies within " + std::to_string(split.boundary_tol) + " of the selection boundary");
        }
        blk.modulus = std::abs(lambda);
        blk.selected = split.selects(lambda);
        blocks.push_back(blk);
        i += blk.size;
    }
    return blocks;
}

// Swaps the adjacent diagonal blocks [i, i+p) and [i+p, i+p+q) of s.
void swap_adjacent_blocks(Matrix& s, Matrix& w, int i, int p, int q) {
    const int n = static_cast<int>(s.rows());
    const Matrix a11 = s.block(i, i, p, p);
    const Matrix a22 = s.block(i + p, i + p, q, q);
    const Matrix a12 = s.block(i, i + p, p, q);

    // Solve the small Sylvester equation a11 X - X a22 = -a12 (Kronecker
    // form, column-major vec), so that the columns of [X; I] span the
    // invariant subspace belonging to a22. Failure means the blocks share an
    // eigenvalue.
    const int pq = p * q;
    Matrix kron = Matrix::Zero(pq, pq);
    Matrix rhs(pq, 1);
    for (int c = 0; c < q; ++c) {
        for (int r = 0; r < p; ++r) {
            const int row = c * p + r;
            rhs(row, 0) = -a12(r, c);
            for (int rr = 0; rr < p; ++rr) kron(row, c * p + rr) += a11(r, rr);
            for (int cc = 0; cc < q; ++cc) kron(row, cc * p + r) -= a22(cc, c);
        }
    }
    Matrix xv;
    try {
        xv = solve_linear(kron, rhs);
    } catch (const SingularMatrixError&) {
        throw PredicateSplitError(
            "ordered_real_schur: adjacent blocks share an eigenvalue; cannot reorder");
    }
    Matrix x(p, q);
    for (int c = 0; c < q; ++c)
        for (int r = 0; r < p; ++r) x(r, c) = xv(c * p + r, 0);

    // An orthonormal basis of span([X; I]) puts the a22 subspace first.
    Matrix tall(p + q, q);
    tall.topRows(p) = x;
    tall.bottomRows(q) = Matrix::Identity(q, q);
    Eigen::HouseholderQR<Matrix> qr(tall);
    const Matrix qfull = qr.householderQ() * Matrix::Identity(p + q, p + q);

    s.block(i, 0, p + q, n) = qfull.transpose() * s.block(i, 0, p + q, n);
    s.block(0, i, n, p + q) = s.block(0, i, n, p + q) * qfull;
    w.block(0, i, n, p + q) = w.block(0, i, n, p + q) * qfull;

    // The (2,1) block must vanish up to roundoff; anything larger means the
    // swap lost the invariant subspace.
    const double spill = s.block(i + q, i, p, q).norm();
    if (spill > std::sqrt(kEps) * std::max(s.norm(), 1.0)) {
        throw ResidualExceededError("ordered_real_schur: block swap residual " +
                                    std::to_string(spill));
    }
    s.block(i + q, i, p, q).setZero();
    // A swapped 1x1 pair leaves an exact scalar; for 2x2 blocks the complex
    // pair structure survives, so no further normalization is required.
}

// Bubbles the selected blocks into the leading position, preserving their
// relative order. Returns the selected dimension.
int reorder_blocks(Matrix& s, Matrix& w, std::vector<Block> blocks) {
    int leading_dim = 0;
    std::vector<int> selected_idx;
    for (int bi = 0; bi < static_cast<int>(blocks.size()); ++bi) {
        if (blocks[bi].selected) {
            selected_idx.push_back(bi);
            leading_dim += blocks[bi].size;
        }
    }

    int top = 0;
    for (int cur : selected_idx) {
        for (int j = cur; j > top; --j) {
            Block& lhs = blocks[j - 1];
            Block& rhs = blocks[j];
            swap_adjacent_blocks(s, w, lhs.start, lhs.size, rhs.size);
            const int lhs_size = lhs.size;
            lhs.size = rhs.size;
            rhs.start = lhs.start + lhs.size;
            rhs.size = lhs_size;
            std::swap(lhs.selected, rhs.selected);
        }
        ++top;
    }
    return leading_dim;
}

int reorder_selected_leading(Matrix& s, Matrix& w, const SpectralSplit& split) {
    return reorder_blocks(s, w, identify_blocks(s, split, /*check_boundary=*/true));
}

// ---- Pade tables for the scaling-and-squaring matrix exponential ----------

const double kPadeTheta3 = 1.495585217958292e-2;
const double kPadeTheta5 = 2.539398330063230e-1;
const double kPadeTheta7 = 9.504178996162932e-1;
const double kPadeTheta9 = 2.097847961257068;
const double kPadeTheta13 = 5.371920351148152;

Matrix pade_eval(const Matrix& a, int m) {
    static const std::vector<std::vector<double>> coeffs = {
        {120, 60, 12, 1},                                   // m = 3
        {30240, 15120, 3360, 420, 30, 1},                   // m = 5
        {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1},
        {17643225600, 8821612800, 2075673600, 302702400, 30270240, 2162160, 110880, 3960, 90, 1},
    };
    const int n = static_cast<int>(a.rows());
    const Matrix id = Matrix::Identity(n, n);

    if (m == 13) {
        static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
        const Matrix a2 = a * a;
        const Matrix a4 = a2 * a2;
        const Matrix a6 = a4 * a2;
        const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                              b[3] * a2 + b[1] * id);
        const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                         b[2] * a2 + b[0] * id;
        return solve_linear(v - u, v + u);
    }

    const std::vector<double>& b = coeffs[(m - 3) / 2];
    const Matrix a2 = a * a;
    Matrix even = b[0] * id;  // b0 I + b2 A^2 + ...
    Matrix odd = b[1] * id;   // b1 I + b3 A^2 + ... (times A afterwards)
    Matrix power = id;
    for (int k = 2; k <= m; k += 2) {
        power = power * a2;
        even += b[k] * power;
        if (k + 1 <= m) odd += b[k + 1] * power;
    }
    const Matrix u = a * odd;
    return solve_linear(even - u, even + u);
}

}  // namespace

Matrix solve_linear(const Matrix& a, const Matrix& b, double pivot_rel_tol) {
    require_square(a, "solve_linear");
    require_finite(a, "solve_linear(A)");
    require_finite(b, "solve_linear(B)");
    if (b.rows() != a.rows()) {
        throw ValidationError("solve_linear: B has " + std::to_string(b.rows()) +
                              " rows, expected " + std::to_string(a.rows()));
    }
    const int n = static_cast<int>(a.rows());
    const double tol = pivot_rel_tol * a.cwiseAbs().maxCoeff();

    Matrix lu = a;
    Matrix x = b;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double piv_val = std::abs(lu(k, k));
        for (int i = k + 1; i < n; ++i) {
            if (std::abs(lu(i, k)) > piv_val) {
                piv = i;
                piv_val = std::abs(lu(i, k));
            }
        }
        if (piv_val <= tol) {
            throw SingularMatrixError("solve_linear: pivot " + std::to_string(piv_val) +
                                      " at column " + std::to_string(k) + " below tolerance " +
                                      std::to_string(tol));
        }
        if (piv != k) {
            lu.row(k).swap(lu.row(piv));
            x.row(k).swap(x.row(piv));
        }
        for (int i = k + 1; i < n; ++i) {
            const double factor = lu(i, k) / lu(k, k);
            lu(i, k) = factor;
            lu.row(i).tail(n - k - 1) -= factor * lu.row(k).tail(n - k - 1);
            x.row(i) -= factor * x.row(k);
        }
    }
    // Back substitution.
    for (int k = n - 1; k >= 0; --k) {
        x.row(k) /= lu(k, k);
        for (int i = 0; i < k; ++i) x.row(i) -= lu(i, k) * x.row(k);
    }
    return x;
}

Matrix mat_exp(const Matrix& a, double t) {
    require_square(a, "mat_exp");
    require_finite(a, "mat_exp");
    if (!std::isfinite(t)) throw ValidationError("mat_exp: non-finite time");
    const int n = static_cast<int>(a.rows());
    if (n == 0) return Matrix(0, 0);

    const Matrix at = a * t;
    const double norm1 = at.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(norm1)) throw OverflowError("mat_exp: ||A t|| overflowed");

    Matrix result;
    if (norm1 <= kPadeTheta3) {
        result = pade_eval(at, 3);
    } else if (norm1 <= kPadeTheta5) {
        result = pade_eval(at, 5);
    } else if (norm1 <= kPadeTheta7) {
        result = pade_eval(at, 7);
    } else if (norm1 <= kPadeTheta9) {
        result = pade_eval(at, 9);
    } else {
        const int squarings =
            std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kPadeTheta13))));
        result = pade_eval(at / std::exp2(squarings), 13);
        for (int i = 0; i < squarings; ++i) {
            result = result * result;
            if (!result.allFinite()) {
                throw OverflowError("mat_exp: overflow during repeated squaring");
            }
        }
    }
    if (!result.allFinite()) throw OverflowError("mat_exp: non-finite result");
    return result;
}

Matrix zoh_input_integral(const Matrix& a, const std::function<Matrix(double)>& b_of_t, double t0,
                          double ts, int quad_steps) {
    require_square(a, "zoh_input_integral");
    require_finite(a, "zoh_input_integral");
    if (ts <= 0.0) throw ValidationError("zoh_input_integral: ts must be positive");
    if (quad_steps < 2) throw ValidationError("zoh_input_integral: quad_steps must be >= 2");

    const double h = ts / quad_steps;
    auto integrand = [&](double tau) -> Matrix {
        Matrix bt = b_of_t(t0 + tau);
        if (bt.rows() != a.rows()) {
            throw ValidationError("zoh_input_integral: B(t) row count does not match A");
        }
        require_finite(bt, "zoh_input_integral(B)");
        return mat_exp(a, tau) * bt;
    };

    Matrix acc = integrand(0.0) + integrand(ts);
    for (int j = 1; j < quad_steps; ++j) acc += 2.0 * integrand(j * h);
    for (int j = 0; j < quad_steps; ++j) acc += 4.0 * integrand((j + 0.5) * h);
    return (h / 6.0) * acc;
}

std::vector<std::complex<double>> SchurDecomposition::eigenvalues() const {
    const int n = static_cast<int>(s.rows());
    std::vector<std::complex<double>> out;
    out.reserve(n);
    int i = 0;
    while (i < n) {
        if (i + 1 < n && s(i + 1, i) != 0.0) {
            const auto [l1, l2] = eig2x2(s(i, i), s(i, i + 1), s(i + 1, i), s(i + 1, i + 1));
            out.push_back(l1);
            out.push_back(l2);
            i += 2;
        } else {
            out.emplace_back(s(i, i), 0.0);
            ++i;
        }
    }
    return out;
}

SchurDecomposition real_schur(const Matrix& m, const SchurOptions& opts) {
    require_square(m, "real_schur");
    require_finite(m, "real_schur");
    const int n = static_cast<int>(m.rows());

    SchurDecomposition dec;
    dec.s = m;
    dec.w = Matrix::Identity(n, n);
    if (n > 1) {
        hessenberg(dec.s, dec.w);
        francis_qr(dec.s, dec.w, opts);
        canonicalize_blocks(dec.s, dec.w);
        // Everything below the first subdiagonal is structural zero.
        for (int j = 0; j + 2 < n; ++j) {
            for (int i = j + 2; i < n; ++i) dec.s(i, j) = 0.0;
        }
    }
    verify_schur(m, dec, opts, "real_schur");
    return dec;
}

SchurDecomposition ordered_real_schur(const Matrix& m, const SpectralSplit& split,
                                      const SchurOptions& opts) {
    SchurDecomposition dec = real_schur(m, opts);
    dec.leading_dim = reorder_selected_leading(dec.s, dec.w, split);
    verify_schur(m, dec, opts, "ordered_real_schur");
    return dec;
}

SchurDecomposition ordered_real_schur_top(const Matrix& m, int count, const SchurOptions& opts) {
    if (count < 0 || count > m.rows()) {
        throw ValidationError("ordered_real_schur_top: count out of range");
    }
    SchurDecomposition dec = real_schur(m, opts);
    std::vector<Block> blocks = identify_blocks(dec.s, SpectralSplit{}, /*check_boundary=*/false);
    for (Block& blk : blocks) blk.selected = false;

    // Greedy selection by block modulus; a 2x2 pair that would overshoot the
    // target dimension is skipped in favour of the next scalar block.
    std::vector<int> order(blocks.size());
    for (size_t i = 0; i < blocks.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int lhs, int rhs) { return blocks[lhs].modulus > blocks[rhs].modulus; });
    int selected_dim = 0;
    for (int bi : order) {
        if (selected_dim + blocks[bi].size <= count) {
            blocks[bi].selected = true;
            selected_dim += blocks[bi].size;
        }
        if (selected_dim == count) break;
    }
    if (selected_dim != count) {
        throw PredicateSplitError("ordered_real_schur_top: cannot split a conjugate pair to "
                                  "reach dimension " +
                                  std::to_string(count));
    }

    dec.leading_dim = reorder_blocks(dec.s, dec.w, std::move(blocks));
    verify_schur(m, dec, opts, "ordered_real_schur_top");
    return dec;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& m, const SchurOptions& opts) {
    return real_schur(m, opts).eigenvalues();
}

double spectral_radius(const Matrix& m, const SchurOptions& opts) {
    double rho = 0.0;
    for (const auto& lambda : eigenvalues(m, opts)) rho = std::max(rho, std::abs(lambda));
    return rho;
}

std::vector<double> symmetric_eigenvalues(const Matrix& m, const SchurOptions& opts) {
    require_square(m, "symmetric_eigenvalues");
    const Matrix sym = 0.5 * (m + m.transpose());
    std::vector<double> out;
    for (const auto& lambda : eigenvalues(sym, opts)) out.push_back(lambda.real());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace plqr::matkit
