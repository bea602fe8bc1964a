#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "deltaspec/common.hpp"

namespace deltaspec {

struct QuadRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre nodes/weights by Newton iteration on P_n. Nodes are
// accurate to machine precision for the moderate n used here.
inline QuadRule gauss_legendre(int n) {
    QuadRule q;
    q.x.resize(n);
    q.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess for the i-th positive root.
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        q.x[i] = -z;
        q.x[n - 1 - i] = z;
        q.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        q.w[n - 1 - i] = q.w[i];
    }
    return q;
}

template <class F>
double gauss_on(const QuadRule& q, F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * f(c + h * q.x[i]);
    return s * h;
}

namespace detail {

template <class F>
double adapt_simpson_rec(F&& f, double a, double b, double fa, double fm,
                         double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol,
                        int max_depth = 40) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adapt_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace deltaspec
