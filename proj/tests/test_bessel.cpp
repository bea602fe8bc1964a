#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "deltaspec/bessel.hpp"
#include "support/reference.hpp"

using namespace deltaspec;

namespace {
double relerr(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}
}  // namespace

TEST_CASE("oracle self-check: published values and the K recurrence") {
    // Confidence in the oracles themselves before using them as truth. The
    // I oracle leans on the Wronskian by construction, so it is checked
    // against handbook values rather than against that identity.
    REQUIRE(relerr(reference::bessel_k(0, 1.0), 0.42102443824070834) < 1e-13);
    REQUIRE(relerr(reference::bessel_k(1, 1.0), 0.6019072301972346) < 1e-13);
    for (double x : {0.5, 2.0, 9.0, 120.0}) {
        const double lhs = reference::bessel_k_scaled(2, x);
        const double rhs = reference::bessel_k_scaled(0, x) +
                           2.0 / x * reference::bessel_k_scaled(1, x);
        REQUIRE(relerr(lhs, rhs) < 1e-13);
    }
    REQUIRE(relerr(reference::bessel_i(0, 1.0), 1.2660658777520083356) <
            1e-13);
    REQUIRE(relerr(reference::bessel_i(1, 1.0), 0.5651591039924850272) <
            1e-13);
    REQUIRE(relerr(reference::bessel_i(0, 2.0), 2.2795853023360672674) <
            1e-13);
}

TEST_CASE("frozen values of K0 and K1 at x = 1") {
    const auto ks = bessel_k(1, 1.0);
    REQUIRE(ks.size() == 2);
    CHECK(relerr(ks[0], 0.42102443824070834) < 1e-14);
    CHECK(relerr(ks[1], 0.6019072301972346) < 1e-14);
}

TEST_CASE("K_m matches integral representation to 1e-12") {
    const std::vector<double> xs = {1e-3, 1e-2, 0.1,  0.5, 1.0, 1.9,  2.0,
                                    2.01, 3.0,  5.0,  8.0, 12., 20.0, 50.0,
                                    1e2,  3e2,  6e2};
    const std::vector<int> ms = {0, 1, 2, 5, 10, 20, 40};
    for (double x : xs) {
        const auto got = bessel_k(40, x);
        for (int m : ms) {
            const double want = reference::bessel_k(m, x);
            INFO("m=" << m << " x=" << x);
            if (want > 0.0 && std::isfinite(want))
                CHECK(relerr(got[m], want) < 1e-12);
        }
    }
}

TEST_CASE("I_m matches integral representation to 1e-12") {
    const std::vector<double> xs = {1e-3, 0.1, 1.0, 2.0, 5.0,
                                    17.9, 18., 18.1, 50., 200.,
                                    600.};
    for (double x : xs) {
        for (int m : {0, 1, 2, 5, 10, 20}) {
            const double want = reference::bessel_i(m, x);
            const double got = bessel_in(m, x);
            INFO("m=" << m << " x=" << x);
            if (want > 0.0 && std::isfinite(want))
                CHECK(relerr(got, want) < 1e-12);
        }
    }
}

TEST_CASE("Wronskian identity at x = 2 holds to 1e-13") {
    const double w = bessel_i0(2.0) * bessel_k1(2.0) +
                     bessel_i1(2.0) * bessel_k0(2.0);
    CHECK(std::abs(w - 0.5) < 1e-13);
}

TEST_CASE("scaled product I_m K_m survives large arguments") {
    for (double x : {1.0, 10.0, 100.0, 650.0, 2000.0}) {
        for (int m : {0, 1, 3, 10}) {
            const double want = reference::bessel_i_scaled(m, x) *
                                reference::bessel_k_scaled(m, x);
            const double got = bessel_ik_product(m, x);
            INFO("m=" << m << " x=" << x);
            CHECK(relerr(got, want) < 1e-11);
        }
    }
    // Large-argument limit I_m K_m -> 1/(2x).
    CHECK(relerr(bessel_ik_product(0, 2000.0), 1.0 / 4000.0) < 1e-3);
}

TEST_CASE("K0 is strictly decreasing") {
    double prev = bessel_k0(1e-3);
    for (double x = 0.05; x < 30.0; x += 0.37) {
        const double cur = bessel_k0(x);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("domain errors on nonpositive arguments") {
    CHECK_THROWS_AS(bessel_k0(0.0), ValidationError);
    CHECK_THROWS_AS(bessel_k0(-1.0), ValidationError);
    CHECK_THROWS_AS(bessel_k(3, -2.0), ValidationError);
    CHECK_THROWS_AS(bessel_ik_product(2, 0.0), ValidationError);
}
