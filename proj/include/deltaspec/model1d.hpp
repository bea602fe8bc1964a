#pragma once

// One-dimensional model operators.
//
//  * PointInteractionSpec / secular_eigs: the Laplacian on (-L, L) with an
//    attractive delta well of strength alpha at the origin and Dirichlet /
//    Neumann / mixed / Robin endpoint conditions.  Negative eigenvalues
//    E = -k^2 and positive eigenvalues E = lambda^2 are roots of closed-form
//    secular equations obtained by even/odd symmetry reduction (the mixed
//    case has no symmetry and yields a single equation).
//  * EffectiveOperatorSpec / effective_eigs: direct sums of Dirichlet
//    operators -d^2/ds^2 - k_j(s)^2/4 on intervals (0, l_j), discretized by
//    second-order finite differences with Richardson extrapolation.
//  * smooth_loop_eigs: the periodic counterpart -d^2/ds^2 - k(s)^2/4 on a
//    closed loop, used as a cross-check oracle for smooth curves.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "deltaspec/common.hpp"
#include "deltaspec/eigs.hpp"
#include "deltaspec/roots.hpp"

namespace deltaspec {

enum class IntervalBc { dirichlet, neumann, neumann_dirichlet, robin };

// Interval (-L, L) with a delta well of strength alpha at x = 0.  For
// bc == neumann_dirichlet the Neumann end is -L and the Dirichlet end is +L.
// robin_beta >= 0 is the attractive Robin coefficient u'(+-L) = -+ beta u
// (read only when bc == robin; beta = 0 reproduces the Neumann case).
struct PointInteractionSpec {
    double half_length = 1.0;
    double alpha = 0.0;
    IntervalBc bc = IntervalBc::neumann;
    double robin_beta = 0.0;
};

namespace detail {

inline double coth(double x) { return 1.0 / std::tanh(x); }

// Collect every root of f on (klo, khi) by a fine scan plus bisection.
template <class F>
inline std::vector<double> scanned_roots(F&& f, double klo, double khi,
                                         int cells) {
    std::vector<double> roots;
    for (const Bracket& br : scan_brackets(f, klo, khi, cells))
        roots.push_back(bisect(f, br.lo, br.hi, br.flo, br.fhi, 0.0));
    return roots;
}

// Collect the lowest `needed` positive roots of f, scanning cells of width
// `step` starting just above zero (lambda = 0 is excluded: it never carries
// a nontrivial eigenfunction for these secular functions).
template <class F>
inline std::vector<double> positive_roots(F&& f, double step, int needed,
                                          const char* what) {
    std::vector<double> roots;
    const double start = step * 1e-9;
    double a = start;
    double fa = f(a);
    const long max_cells = 64L * (needed + 8);
    for (long cell = 1; cell <= max_cells && static_cast<int>(roots.size()) < needed;
         ++cell) {
        const double b = start + step * cell;
        const double fb = f(b);
        if (fa == 0.0)
            roots.push_back(a);
        else if ((fa > 0.0) != (fb > 0.0) && fb != 0.0)
            roots.push_back(bisect(f, a, b, fa, fb, 0.0));
        a = b;
        fa = fb;
    }
    if (static_cast<int>(roots.size()) < needed)
        throw NoRoot(std::string("positive secular roots exhausted for ") + what);
    return roots;
}

}  // namespace detail

// Eigenvalues of the point-interaction interval operator, ascending.
// Throws NoRoot if the analytically guaranteed root counts are not found
// (that always signals a numerical bug, never a legitimate spectrum).
inline std::vector<double> secular_eigs(const PointInteractionSpec& spec,
                                        int count) {
    const double L = spec.half_length;
    const double a = spec.alpha;
    const double b = (spec.bc == IntervalBc::robin) ? spec.robin_beta : 0.0;
    if (!(L > 0.0)) throw ValidationError("interval half-length must be positive");
    if (!(a >= 0.0)) throw ValidationError("interaction strength must be nonnegative");
    if (spec.bc == IntervalBc::robin && !(b >= 0.0))
        throw ValidationError("Robin coefficient must be nonnegative");
    if (count < 1) throw ValidationError("eigenvalue count must be at least 1");

    std::vector<double> ev;

    // ---- negative eigenvalues, E = -k^2 ----------------------------------
    // Search window: roots sit near alpha/2 (delta-dominated) or below
    // beta (Robin-boundary-dominated).
    const double khi = 0.5 * a + 10.0 + a + 2.0 * b;
    const double klo = std::max(0.5 * a * 1e-6, khi * 1e-12);
    const int cells = 8192;

    struct NegSector {
        std::function<double(double)> f;
        int guaranteed;
        const char* name;
    };
    std::vector<NegSector> neg;
    switch (spec.bc) {
        case IntervalBc::neumann:
            neg.push_back({[=](double k) { return k * std::tanh(k * L) - 0.5 * a; },
                           a > 0.0 ? 1 : 0, "even Neumann"});
            break;
        case IntervalBc::dirichlet:
            neg.push_back({[=](double k) { return k * detail::coth(k * L) - 0.5 * a; },
                           a * L > 2.0 * (1.0 + 1e-9) ? 1 : 0, "even Dirichlet"});
            break;
        case IntervalBc::neumann_dirichlet:
            neg.push_back({[=](double k) { return k * detail::coth(2.0 * k * L) - 0.5 * a; },
                           a * L > 1.0 + 1e-9 ? 1 : 0, "mixed"});
            break;
        case IntervalBc::robin:
            neg.push_back({[=](double k) {
                               return (2.0 * k * k + a * b) * std::tanh(k * L) -
                                      k * (a + 2.0 * b);
                           },
                           (a + b > 0.0 && a * b * L < (a + 2.0 * b) * (1.0 - 1e-9))
                               ? 1
                               : 0,
                           "even Robin"});
            neg.push_back({[=](double k) { return k * detail::coth(k * L) - b; },
                           b * L > 1.0 + 1e-9 ? 1 : 0, "odd Robin"});
            break;
    }
    for (const NegSector& s : neg) {
        const std::vector<double> ks = detail::scanned_roots(s.f, klo, khi, cells);
        if (static_cast<int>(ks.size()) < s.guaranteed)
            throw NoRoot(std::string("negative secular root missing in the ") +
                         s.name + " sector");
        for (double k : ks) ev.push_back(-k * k);
    }

    // ---- zero mode --------------------------------------------------------
    // Only the pure Neumann operator without a well keeps the constant
    // eigenfunction at E = 0.
    if (a == 0.0 && (spec.bc == IntervalBc::neumann ||
                     (spec.bc == IntervalBc::robin && b == 0.0)))
        ev.push_back(0.0);

    // ---- positive eigenvalues, E = lambda^2 -------------------------------
    // Pole-free forms: tan-type conditions are multiplied through by the
    // cosine so every root is a plain sign change.
    const double step = pi / (8.0 * L);
    std::vector<std::function<double(double)>> pos;
    switch (spec.bc) {
        case IntervalBc::neumann:
            pos.push_back([=](double l) {
                return 2.0 * l * std::sin(l * L) + a * std::cos(l * L);
            });
            for (int m = 1; m <= count; ++m)
                ev.push_back(sqr((2.0 * m - 1.0) * pi / (2.0 * L)));
            break;
        case IntervalBc::dirichlet:
            pos.push_back([=](double l) {
                return a * std::sin(l * L) - 2.0 * l * std::cos(l * L);
            });
            for (int m = 1; m <= count; ++m) ev.push_back(sqr(m * pi / L));
            break;
        case IntervalBc::neumann_dirichlet:
            pos.push_back([=](double l) {
                return a * std::sin(2.0 * l * L) - 2.0 * l * std::cos(2.0 * l * L);
            });
            break;
        case IntervalBc::robin:
            pos.push_back([=](double l) {
                return (a * b - 2.0 * l * l) * std::sin(l * L) -
                       l * (a + 2.0 * b) * std::cos(l * L);
            });
            pos.push_back([=](double l) {
                return b * std::sin(l * L) - l * std::cos(l * L);
            });
            break;
    }
    for (const auto& f : pos)
        for (double l : detail::positive_roots(f, step, count, "interval operator"))
            ev.push_back(l * l);

    std::sort(ev.begin(), ev.end());
    if (static_cast<int>(ev.size()) < count)
        throw NoRoot("secular eigenvalue enumeration came up short");
    ev.resize(count);
    return ev;
}

// Direct sum of Dirichlet operators -d^2/ds^2 - k_j(s)^2/4 on (0, l_j).
// An empty curvature function means k_j = 0.
struct EffectiveOperatorSpec {
    std::vector<double> lengths;
    std::vector<std::function<double(double)>> curvatures;
    int grid_n = 2000;
};

struct EdgeEigenvalue {
    double value = 0.0;
    int edge = 0;
};

namespace detail {

// Lowest eigenvalues of -u'' - k(s)^2/4 on (0, l) with Dirichlet ends,
// plain second-order finite differences on n subintervals (no
// extrapolation).
inline std::vector<double> dirichlet_curvature_eigs_raw(
    double l, const std::function<double(double)>& k, int n, int count) {
    const double h = l / n;
    std::vector<double> diag(n - 1);
    const std::vector<double> off(n - 2, -1.0 / (h * h));
    for (int i = 1; i < n; ++i) {
        const double ks = k ? k(i * h) : 0.0;
        diag[i - 1] = 2.0 / (h * h) - 0.25 * ks * ks;
    }
    return tridiag_lowest(diag, off, count);
}

}  // namespace detail

// Lowest `count` eigenvalues of the direct sum, each tagged with its edge
// index; ties are broken by edge index so identical edges list
// deterministically.
inline std::vector<EdgeEigenvalue> effective_eigs(
    const EffectiveOperatorSpec& spec, int count) {
    if (spec.lengths.empty())
        throw ValidationError("effective operator needs at least one edge");
    if (spec.lengths.size() != spec.curvatures.size())
        throw ValidationError("edge lengths and curvature functions must pair up");
    for (double l : spec.lengths)
        if (!(l > 0.0)) throw ValidationError("edge lengths must be positive");
    if (spec.grid_n < 16) throw ValidationError("grid size must be at least 16");
    if (count < 1) throw ValidationError("eigenvalue count must be at least 1");

    std::vector<EdgeEigenvalue> all;
    for (std::size_t j = 0; j < spec.lengths.size(); ++j) {
        const int per_edge = std::min(count, spec.grid_n - 1);
        const std::vector<double> coarse = detail::dirichlet_curvature_eigs_raw(
            spec.lengths[j], spec.curvatures[j], spec.grid_n, per_edge);
        const std::vector<double> fine = detail::dirichlet_curvature_eigs_raw(
            spec.lengths[j], spec.curvatures[j], 2 * spec.grid_n, per_edge);
        for (int i = 0; i < per_edge; ++i)
            all.push_back({(4.0 * fine[i] - coarse[i]) / 3.0, static_cast<int>(j)});
    }
    std::sort(all.begin(), all.end(), [](const EdgeEigenvalue& x, const EdgeEigenvalue& y) {
        return x.value != y.value ? x.value < y.value : x.edge < y.edge;
    });
    if (static_cast<int>(all.size()) < count)
        throw ValidationError("requested more eigenvalues than the grids resolve");
    all.resize(count);
    return all;
}

// Lowest `count` eigenvalues of the periodic operator -d^2/ds^2 - k(s)^2/4
// on a loop of length ell (second-order differences, Richardson
// extrapolated, shift-inverted block Lanczos).
inline std::vector<double> smooth_loop_eigs(
    const std::function<double(double)>& k, double ell, int count,
    int grid_n = 4096) {
    if (!(ell > 0.0)) throw ValidationError("loop length must be positive");
    if (count < 1) throw ValidationError("eigenvalue count must be at least 1");
    if (grid_n < 32 || count > grid_n / 8)
        throw ValidationError("loop grid too coarse for the requested count");

    const auto solve_n = [&](int n) {
        const double h = ell / n;
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(3 * n + 2);
        double pot_min = 0.0;
        for (int i = 0; i < n; ++i) {
            const double ks = k ? k(i * h) : 0.0;
            const double pot = -0.25 * ks * ks;
            pot_min = std::min(pot_min, pot);
            trip.emplace_back(i, i, 2.0 / (h * h) + pot);
            const int j = (i + 1) % n;
            trip.emplace_back(i, j, -1.0 / (h * h));
            trip.emplace_back(j, i, -1.0 / (h * h));
        }
        Eigen::SparseMatrix<double> A(n, n);
        A.setFromTriplets(trip.begin(), trip.end());

        const double sigma = pot_min - 1.0;
        Eigen::SparseMatrix<double> shifted = A;
        for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
        if (ldlt.info() != Eigen::Success)
            throw FactorizationFailure("periodic loop factorization failed");

        const LanczosResult res = lanczos_largest(
            n, count, [&](const Eigen::MatrixXd& X) { return ldlt.solve(X); },
            [](const Eigen::MatrixXd& X) { return X; });
        std::vector<double> ev(count);
        for (int i = 0; i < count; ++i) ev[i] = sigma + 1.0 / res.values[i];
        std::sort(ev.begin(), ev.end());
        return ev;
    };

    const std::vector<double> coarse = solve_n(grid_n);
    const std::vector<double> fine = solve_n(2 * grid_n);
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace deltaspec
