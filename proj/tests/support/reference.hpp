#pragma once

// Independent reference implementations used as oracles by the test suite.
// They deliberately avoid the code paths of the library: K_m comes from
// trapezoid quadrature of its integral representation (doubly exponential
// integrand, accurate to near machine precision) and I_m from the Lentz
// continued fraction for the neighbor ratio plus the Wronskian, rather than
// from the power series and asymptotic expansions the library uses.

#include <cmath>
#include <vector>

namespace reference {

// e^{x} K_m(x) = int_0^inf e^{-x(cosh t - 1)} cosh(m t) dt, x > 0.
// The integrand decays doubly exponentially, so the trapezoid rule with a
// modest step is accurate to near machine precision.
inline double bessel_k_scaled(int m, double x) {
    const double h = 1.0 / 64.0;
    // log(cosh u) without overflowing cosh for large u.
    auto logcosh = [](double u) {
        u = std::abs(u);
        return u + std::log1p(std::exp(-2.0 * u)) - std::log(2.0);
    };
    // Truncate where x(cosh t - 1) alone kills the integrand, with margin
    // for the cosh(mt) growth.
    const double T = std::acosh((760.0 + 40.0 * m) / x + 1.0);
    const long n = static_cast<long>(T / h) + 2;
    double sum = 0.5;  // t = 0 term: e^0 cosh(0) = 1, half weight
    for (long i = 1; i <= n; ++i) {
        const double t = h * i;
        const double v =
            std::exp(-x * (std::cosh(t) - 1.0) + logcosh(m * t));
        sum += v;
        if (v < 1e-22 * sum) break;
    }
    return sum * h;
}

inline double bessel_k(int m, double x) {
    return std::exp(-x) * bessel_k_scaled(m, x);
}

// Ratio I_{m+1}(x)/I_m(x) from the continued fraction implied by the
// three-term recurrence, evaluated with the modified Lentz algorithm. All
// partial denominators are positive, so there is no cancellation at any
// argument (unlike the oscillatory integral representation of I_m, which
// cannot resolve I_m << e^x).
inline double bessel_i_ratio(int m, double x) {
    const double tiny = 1e-300;
    double f = tiny, C = tiny, D = 0.0;
    for (int k = 1; k <= 100000; ++k) {
        const double b = 2.0 * (m + k) / x;
        D = b + D;
        if (D == 0.0) D = tiny;
        C = b + 1.0 / C;
        if (C == 0.0) C = tiny;
        D = 1.0 / D;
        const double delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return f;
}

// e^{-x} I_m(x) recovered from the ratio above and the Wronskian
// I_m K_{m+1} + I_{m+1} K_m = 1/x, with the K values from the trapezoid
// oracle: e^{-x} I_m = 1 / (x (Ks_{m+1} + r Ks_m)) where Ks = e^x K.
inline double bessel_i_scaled(int m, double x) {
    const double r = bessel_i_ratio(m, x);
    return 1.0 /
           (x * (bessel_k_scaled(m + 1, x) + r * bessel_k_scaled(m, x)));
}

inline double bessel_i(int m, double x) {
    return std::exp(x) * bessel_i_scaled(m, x);
}

}  // namespace reference
