#pragma once

// Symmetric eigenvalue machinery shared by the 1d models, the
// Birman-Schwinger matrices and the FEM backend: Sturm bisection for
// tridiagonal problems, Eigen's dense solvers for small matrices, and a
// block Lanczos iteration (full reorthogonalization, fixed seed) for the
// extreme eigenpairs of large self-adjoint operators, optionally in a
// B-weighted inner product for generalized problems.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "deltaspec/common.hpp"

namespace deltaspec {

// Number of eigenvalues of the symmetric tridiagonal (diag, off) strictly
// below lam, by the classic LDL^T sign count.
inline int tridiag_count_below(const std::vector<double>& diag,
                               const std::vector<double>& off, double lam) {
    const std::size_t n = diag.size();
    int count = 0;
    double d = diag[0] - lam;
    if (d < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        const double denom = (d == 0.0) ? 1e-300 : d;
        d = diag[i] - lam - off[i - 1] * off[i - 1] / denom;
        if (d < 0.0) ++count;
    }
    return count;
}

// Lowest k eigenvalues of a symmetric tridiagonal matrix via bisection on
// the Sturm count. O(n) per probe, so it scales to the 1e5-point grids the
// finite-difference oracles use.
inline std::vector<double> tridiag_lowest(const std::vector<double>& diag,
                                          const std::vector<double>& off,
                                          int k, double tol = 1e-13) {
    const std::size_t n = diag.size();
    if (k <= 0 || n == 0) return {};
    k = std::min<int>(k, static_cast<int>(n));
    double lo = diag[0], hi = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) +
                         (i + 1 < n ? std::abs(off[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    const double span = hi - lo;
    std::vector<double> out(k);
    for (int j = 1; j <= k; ++j) {
        double a = lo, b = hi;
        while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b)) &&
               b - a > span * 1e-16) {
            const double mid = 0.5 * (a + b);
            if (tridiag_count_below(diag, off, mid) >= j)
                b = mid;
            else
                a = mid;
        }
        out[j - 1] = 0.5 * (a + b);
    }
    return out;
}

// All eigenvalues (ascending) of the dense generalized symmetric problem
// A x = lambda B x with B positive definite.
inline Eigen::VectorXd dense_generalized_eigs(const Eigen::MatrixXd& A,
                                              const Eigen::MatrixXd& B) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        A, B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NoConvergence("dense generalized eigensolve failed");
    return es.eigenvalues();
}

struct LanczosOptions {
    int block = 4;
    int max_basis = 0;     // 0: derived from k
    int max_restarts = 60; // thick-restart cycles after the basis fills
    double tol = 1e-11;    // relative Ritz residual
    // Ritz values below loose_floor only need loose_tol: callers that merely
    // certify "these eigenvalues lie beyond a cutoff" opt in; the default
    // floor disables the relaxation.
    double loose_floor = -std::numeric_limits<double>::infinity();
    double loose_tol = 2e-4;
    unsigned seed = 0x5e3d1u;
};

struct LanczosResult {
    std::vector<double> values;  // largest first
    Eigen::MatrixXd vectors;     // columns match values
    int basis_size = 0;
};

// Largest k eigenvalues of a self-adjoint operator. apply(X) evaluates
// Op*X for a block of columns; bapply(X) evaluates B*X, with Op
// self-adjoint w.r.t. the B inner product (pass identity for standard
// problems). The projected matrix is filled column-block by column-block
// against the whole basis, so a random restart after hitting an invariant
// subspace stays exact; blocks let degenerate clusters (mirror-symmetric
// geometries produce exact doublets) converge together.
template <class Apply, class BApply>
LanczosResult lanczos_largest(Eigen::Index n, int k, Apply&& apply,
                              BApply&& bapply, LanczosOptions opt = {}) {
    using Eigen::MatrixXd;
    if (k <= 0) return {};
    const int b = std::max(1, std::min<int>(opt.block, static_cast<int>(n)));
    int max_basis =
        opt.max_basis > 0 ? opt.max_basis : std::max(20 * b, 12 * k + 40);
    max_basis = std::min<int>(max_basis, static_cast<int>(n));
    if (k > max_basis)
        throw ValidationError("lanczos: k exceeds reachable basis size");

    std::mt19937 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto randomize = [&](Eigen::Ref<MatrixXd> W) {
        for (Eigen::Index j = 0; j < W.cols(); ++j)
            for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = gauss(rng);
    };

    MatrixXd V(n, max_basis);   // B-orthonormal basis
    MatrixXd BV(n, max_basis);  // B * basis, cached
    MatrixXd T = MatrixXd::Zero(max_basis, max_basis);

    // Two-pass block Gram-Schmidt against basis[0..m), then internal B-QR.
    // Deficient columns are replaced by random data (counts as a restart).
    auto orthonormalize = [&](MatrixXd& W, int m, MatrixXd& R) {
        for (int attempt = 0; attempt < 4; ++attempt) {
            for (int pass = 0; pass < 2; ++pass) {
                if (m > 0) {
                    MatrixXd coef = BV.leftCols(m).transpose() * W;
                    W.noalias() -= V.leftCols(m) * coef;
                }
            }
            MatrixXd BW = bapply(W);
            MatrixXd G = W.transpose() * BW;
            G = 0.5 * (G + G.transpose().eval());
            Eigen::LLT<MatrixXd> llt(G);
            if (llt.info() == Eigen::Success &&
                G.diagonal().minCoeff() >
                    1e-26 * (G.diagonal().maxCoeff() + 1e-300)) {
                MatrixXd L = llt.matrixL();
                W = L.template triangularView<Eigen::Lower>()
                        .solve(W.transpose())
                        .transpose();
                R = L.transpose();
                return true;
            }
            randomize(W);
        }
        return false;
    };

    MatrixXd W(n, b), R(b, b);
    randomize(W);
    if (!orthonormalize(W, 0, R))
        throw NoConvergence("lanczos: could not build a starting block");
    V.leftCols(b) = W;
    BV.leftCols(b) = bapply(W);

    int m = b;
    int restarts = 0;
    MatrixXd scratch;
    Eigen::SelfAdjointEigenSolver<MatrixXd> small;
    while (true) {
        const int lo = m - b;
        MatrixXd AW = apply(V.middleCols(lo, b));
        T.block(0, lo, m, b).noalias() = BV.leftCols(m).transpose() * AW;
        // the two blocks overlap on the diagonal square: evaluate first
        T.block(lo, 0, b, m) = T.block(0, lo, m, b).transpose().eval();
        {
            MatrixXd window = T.topLeftCorner(m, m);
            T.topLeftCorner(m, m) = 0.5 * (window + window.transpose());
        }
        small.compute(T.topLeftCorner(m, m));
        if (small.info() != Eigen::Success)
            throw NoConvergence("lanczos: projected eigensolve failed");

        W = AW;
        W.noalias() -= V.leftCols(m) * T.block(0, lo, m, b);
        if (!orthonormalize(W, m, R))
            throw NoConvergence("lanczos: breakdown before convergence");

        if (m >= k) {
            const double scale = std::max(std::abs(small.eigenvalues()(m - 1)),
                                          std::abs(small.eigenvalues()(0))) +
                                 1e-300;
            bool converged = true;
            for (int j = 0; j < k && converged; ++j) {
                const double v = small.eigenvalues()(m - 1 - j);
                const double need =
                    (v < opt.loose_floor ? opt.loose_tol : opt.tol) * scale;
                Eigen::VectorXd bottom =
                    R * small.eigenvectors().col(m - 1 - j).tail(b);
                if (bottom.norm() > need) converged = false;
            }
            if (converged) {
                LanczosResult res;
                res.values.resize(k);
                res.vectors.resize(n, k);
                for (int j = 0; j < k; ++j) {
                    res.values[j] = small.eigenvalues()(m - 1 - j);
                    res.vectors.col(j).noalias() =
                        V.leftCols(m) * small.eigenvectors().col(m - 1 - j);
                }
                res.basis_size = m;
                return res;
            }
        }
        if (m + b > max_basis) {
            // Thick restart: lock the leading Ritz vectors, install the
            // fresh orthonormal block after them, and continue in place.
            // The locked part of T is diagonal; the coupling to the new
            // block need not be stored because the next column-block pass
            // recomputes it exactly: for a locked pair (theta, V y) the
            // residual relation A V y = theta V y + W (R y_tail) makes the
            // freshly projected entries equal that coupling.
            if (++restarts > opt.max_restarts)
                throw NoConvergence("lanczos: restart limit reached (" +
                                    std::to_string(opt.max_restarts) + ")");
            const int r = std::max(
                1, std::min({std::max(k + b, max_basis / 2), m - b}));
            scratch.resize(n, r);
            scratch.noalias() =
                V.leftCols(m) * small.eigenvectors().rightCols(r);
            V.leftCols(r) = scratch;
            scratch.noalias() =
                BV.leftCols(m) * small.eigenvectors().rightCols(r);
            BV.leftCols(r) = scratch;
            T.setZero();
            for (int i = 0; i < r; ++i)
                T(i, i) = small.eigenvalues()(m - r + i);
            V.middleCols(r, b) = W;
            BV.middleCols(r, b) = bapply(W);
            m = r + b;
            continue;
        }
        V.middleCols(m, b) = W;
        BV.middleCols(m, b) = bapply(W);
        m += b;
    }
}

}  // namespace deltaspec
