#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "deltaspec/common.hpp"

namespace deltaspec {

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    double flo = 0.0;
    double fhi = 0.0;
};

// Bisection on a bracketing interval. Stops when the interval is shorter
// than xtol or |f| at the midpoint drops below ftol (ftol = 0 disables the
// early exit). The bracket must have a sign change.
template <class F>
double bisect(F&& f, double lo, double hi, double flo, double fhi,
              double xtol, double ftol = 0.0) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NoRoot("bisect: no sign change on [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "]");
    while (hi - lo > xtol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at rounding floor
        const double fmid = f(mid);
        if (fmid == 0.0 || (ftol > 0.0 && std::abs(fmid) <= ftol))
            return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    return 0.5 * (lo + hi);
}

template <class F>
double bisect(F&& f, double lo, double hi, double xtol, double ftol = 0.0) {
    const double flo = f(lo);
    const double fhi = f(hi);
    return bisect(std::forward<F>(f), lo, hi, flo, fhi, xtol, ftol);
}

// Scan [lo, hi] with n equal steps and collect every sign-change bracket.
// Roots that fall exactly on a grid point are returned as zero-width
// brackets. Used ahead of bisection for secular equations whose root count
// per branch interval is not known a priori.
template <class F>
std::vector<Bracket> scan_brackets(F&& f, double lo, double hi, int n) {
    std::vector<Bracket> out;
    double xprev = lo;
    double fprev = f(lo);
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double fx = f(x);
        if (fprev == 0.0)
            out.push_back({xprev, xprev, 0.0, 0.0});
        else if ((fprev > 0.0) != (fx > 0.0) && fx != 0.0)
            out.push_back({xprev, x, fprev, fx});
        xprev = x;
        fprev = fx;
    }
    if (fprev == 0.0) out.push_back({xprev, xprev, 0.0, 0.0});
    return out;
}

}  // namespace deltaspec
