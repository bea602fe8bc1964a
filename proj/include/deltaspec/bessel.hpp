#pragma once

// Modified Bessel functions I_m, K_m on (0, inf), double precision.
// Small arguments use the defining power series (K_0, K_1 with the log
// terms written out); K on x >= 2 uses the Thompson-Barnett continued
// fraction, which plays the role of the large-x asymptotic series with its
// rational correction and stays accurate through the mid range where the
// raw asymptotic series bottoms out too early. Integer orders above 1 come
// from upward recurrence (stable for K) and the all-positive-term series
// (stable for I). Everything here is validated against quadrature of the
// integral representation in the test suite.

#include <cmath>
#include <vector>

#include "deltaspec/common.hpp"

namespace deltaspec {

namespace detail {

// I_0 and I_1 by power series; safe (all terms positive) up to overflow.
inline double bessel_i0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return sum;
}

inline double bessel_i1_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1.0));
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return 0.5 * x * sum;
}

// Asymptotic series for e^{-x} I_nu(x), nu = 0 or 1, x >= 18: optimal
// truncation error is below 4e-15 there.
inline double bessel_i_asym_scaled(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    double prev = std::abs(term);
    for (int k = 1; k < 40; ++k) {
        term *= -(mu - sqr(2.0 * k - 1.0)) / (8.0 * k * x);
        if (std::abs(term) > prev) break;  // series started diverging
        prev = std::abs(term);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * pi * x);
}

// Thompson-Barnett CF2 for e^{x} K_0(x) and e^{x} K_1(x), valid x >= 2.
inline void bessel_k01_cf2_scaled(double x, double& k0s, double& k1s) {
    constexpr double nu = 0.0;
    const double a1 = 0.25 - nu * nu;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    double q = a1, c = a1;
    double aa = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i < 10000; ++i) {
        aa -= 2.0 * (i - 1);
        c = -aa * c / i;
        const double qnew = (q1 - b * q2) / aa;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + aa * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < 1e-17) break;
    }
    h = a1 * h;
    k0s = std::sqrt(pi / (2.0 * x)) / s;
    k1s = k0s * (nu + x + 0.5 - h) / x;
}

// Small-x series for K_0 and K_1 (with the log terms), x <= 2.
inline void bessel_k01_series(double x, double& k0, double& k1) {
    const double lh = std::log(0.5 * x);
    const double q = 0.25 * x * x;
    // K_0 = -(log(x/2)+gamma) I_0 + sum_{k>=1} H_k q^k/(k!)^2
    double term = 1.0, sum0 = 0.0, hk = 0.0;
    for (int k = 1; k < 60; ++k) {
        term *= q / (static_cast<double>(k) * k);
        hk += 1.0 / k;
        sum0 += term * hk;
        if (term * hk < 1e-18 * (std::abs(sum0) + 1.0)) break;
    }
    k0 = -(lh + euler_gamma) * bessel_i0_series(x) + sum0;
    // K_1 = 1/x + log(x/2) I_1 - (x/4) sum_k (psi(k+1)+psi(k+2)) q^k/(k!(k+1)!)
    double t = 1.0, sum1 = 0.0;
    double psi_k1 = -euler_gamma;        // psi(1)
    double psi_k2 = 1.0 - euler_gamma;   // psi(2)
    for (int k = 0; k < 60; ++k) {
        sum1 += t * (psi_k1 + psi_k2);
        t *= q / ((k + 1.0) * (k + 2.0));
        psi_k1 += 1.0 / (k + 1.0);
        psi_k2 += 1.0 / (k + 2.0);
        if (t * (psi_k1 + psi_k2) < 1e-18 && k > 3) break;
    }
    k1 = 1.0 / x + lh * bessel_i1_series(x) - 0.25 * x * sum1;
}

// e^{-x} I_m(x) via the series summed outward from its peak term in
// relative arithmetic, so neither overflow nor underflow can strike even
// for huge x where the first term alone would vanish.
inline double bessel_im_series_scaled(int m, double x) {
    const double q = 0.25 * x * x;
    // Term ratio q/(k(m+k)) crosses 1 near the peak index.
    const long k0 = std::max<long>(
        0, static_cast<long>(0.5 * (-m + std::sqrt(double(m) * m + x * x))));
    const double lpeak = (m + 2.0 * k0) * std::log(0.5 * x) -
                         std::lgamma(k0 + 1.0) - std::lgamma(m + k0 + 1.0) -
                         x;
    double sum = 1.0, t = 1.0;
    for (long k = k0 + 1; k < k0 + 100000; ++k) {
        t *= q / (static_cast<double>(k) * (m + k));
        sum += t;
        if (t < sum * 1e-18) break;
    }
    t = 1.0;
    for (long k = k0; k > 0; --k) {
        t *= (static_cast<double>(k) * (m + k)) / q;
        sum += t;
        if (t < sum * 1e-18) break;
    }
    return std::exp(lpeak) * sum;
}

}  // namespace detail

inline double bessel_i0(double x) {
    x = std::abs(x);
    if (x < 18.0) return detail::bessel_i0_series(x);
    return std::exp(x) * detail::bessel_i_asym_scaled(0, x);
}

inline double bessel_i1(double x) {
    const double ax = std::abs(x);
    const double v = ax < 18.0 ? detail::bessel_i1_series(ax)
                               : std::exp(ax) * detail::bessel_i_asym_scaled(1, ax);
    return x < 0.0 ? -v : v;
}

inline double bessel_k0(double x) {
    if (!(x > 0.0)) throw ValidationError("bessel_k0: x must be positive");
    if (x <= 2.0) {
        double k0, k1;
        detail::bessel_k01_series(x, k0, k1);
        return k0;
    }
    double k0s, k1s;
    detail::bessel_k01_cf2_scaled(x, k0s, k1s);
    return std::exp(-x) * k0s;
}

inline double bessel_k1(double x) {
    if (!(x > 0.0)) throw ValidationError("bessel_k1: x must be positive");
    if (x <= 2.0) {
        double k0, k1;
        detail::bessel_k01_series(x, k0, k1);
        return k1;
    }
    double k0s, k1s;
    detail::bessel_k01_cf2_scaled(x, k0s, k1s);
    return std::exp(-x) * k1s;
}

// K_0..K_mmax by upward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m.
inline std::vector<double> bessel_k(int m_max, double x) {
    if (!(x > 0.0)) throw ValidationError("bessel_k: x must be positive");
    if (m_max < 0) throw ValidationError("bessel_k: m_max must be >= 0");
    std::vector<double> ks(m_max + 1);
    ks[0] = bessel_k0(x);
    if (m_max >= 1) ks[1] = bessel_k1(x);
    for (int m = 1; m < m_max; ++m)
        ks[m + 1] = ks[m - 1] + (2.0 * m / x) * ks[m];
    return ks;
}

inline double bessel_in(int m, double x) {
    if (m < 0) throw ValidationError("bessel_in: m must be >= 0");
    if (x == 0.0) return m == 0 ? 1.0 : 0.0;
    const double ax = std::abs(x);
    if (m == 0) return bessel_i0(x);
    const double v = std::exp(ax) * detail::bessel_im_series_scaled(m, ax);
    return (x < 0.0 && (m & 1)) ? -v : v;
}

// I_m(x) K_m(x) with internal scaling so the product survives arguments
// where the factors would overflow/underflow on their own.
inline double bessel_ik_product(int m, double x) {
    if (!(x > 0.0)) throw ValidationError("bessel_ik_product: x must be positive");
    if (m < 0) throw ValidationError("bessel_ik_product: m must be >= 0");
    const double is = detail::bessel_im_series_scaled(m, x);  // e^{-x} I_m
    double k0s, k1s;
    if (x <= 2.0) {
        double k0, k1;
        detail::bessel_k01_series(x, k0, k1);
        k0s = k0 * std::exp(x);
        k1s = k1 * std::exp(x);
    } else {
        detail::bessel_k01_cf2_scaled(x, k0s, k1s);
    }
    double km1 = k0s, km = k1s;  // e^{x} K_{m}
    if (m == 0) return is * k0s;
    for (int j = 1; j < m; ++j) {
        const double next = km1 + (2.0 * j / x) * km;
        km1 = km;
        km = next;
    }
    return is * km;
}

}  // namespace deltaspec
