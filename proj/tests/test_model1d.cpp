#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "deltaspec/model1d.hpp"
#include "support/interval_fd.hpp"

using Catch::Approx;
using namespace deltaspec;

namespace {

// Local bisection helper, independent of the library root finder's
// scanning logic (plain interval halving on a caller-supplied bracket).
template <class F>
double solve_on(F&& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

PointInteractionSpec make(double L, double alpha, IntervalBc bc, double beta = 0.0) {
    PointInteractionSpec s;
    s.half_length = L;
    s.alpha = alpha;
    s.bc = bc;
    s.robin_beta = beta;
    return s;
}

}  // namespace

TEST_CASE("mixed-end interval without a well starts at pi^2/(16 L^2)") {
    for (double L : {1.0, 0.5, 2.5}) {
        const auto ev = secular_eigs(make(L, 0.0, IntervalBc::neumann_dirichlet), 3);
        for (int m = 1; m <= 3; ++m)
            REQUIRE(ev[m - 1] ==
                    Approx(sqr((2.0 * m - 1.0) * pi / (4.0 * L))).epsilon(1e-11));
    }
}

TEST_CASE("neumann well ground state matches an independent bisection") {
    const double alpha = 4.0, L = 1.0;
    const double kstar =
        solve_on([&](double k) { return k * std::tanh(k * L) - 0.5 * alpha; }, 1.0, 4.0);
    const auto ev = secular_eigs(make(L, alpha, IntervalBc::neumann), 1);
    REQUIRE(ev[0] == Approx(-kstar * kstar).epsilon(1e-12));
    CHECK(std::abs(ev[0] - (-4.2656)) < 1e-3);
    CHECK(ev[0] > -0.25 * alpha * alpha - 4.0 * alpha * alpha * std::exp(-0.5 * L * alpha));
    CHECK(ev[0] < -0.25 * alpha * alpha);
}

TEST_CASE("dirichlet well ground state obeys the exponential bracketing") {
    const double alpha = 4.0, L = 1.0;
    const double kstar = solve_on(
        [&](double k) { return k / std::tanh(k * L) - 0.5 * alpha; }, 0.5, 4.0);
    const auto ev = secular_eigs(make(L, alpha, IntervalBc::dirichlet), 1);
    REQUIRE(ev[0] == Approx(-kstar * kstar).epsilon(1e-12));
    CHECK(ev[0] > -0.25 * alpha * alpha);
    CHECK(ev[0] < -0.25 * alpha * alpha +
                      4.0 * alpha * alpha * std::exp(-0.5 * L * alpha));
}

TEST_CASE("mixed interval gains its bound state only past the threshold") {
    // Below the threshold alpha*L = 1 the ground state is positive and sits
    // on the first branch; above it, it is the negative secular root.
    const auto low = secular_eigs(make(1.0, 0.5, IntervalBc::neumann_dirichlet), 1);
    CHECK(low[0] > 0.0);
    CHECK(low[0] < sqr(pi / 4.0));

    const double kstar = solve_on(
        [](double k) { return k / std::tanh(2.0 * k) - 1.0; }, 0.1, 3.0);
    const auto high = secular_eigs(make(1.0, 2.0, IntervalBc::neumann_dirichlet), 1);
    REQUIRE(high[0] == Approx(-kstar * kstar).epsilon(1e-12));
    CHECK(high[0] < 0.0);
}

TEST_CASE("secular spectra match a dense finite-difference discretization") {
    struct Case {
        IntervalBc bc;
        double beta;
    };
    const Case cases[] = {{IntervalBc::neumann, 0.0},
                          {IntervalBc::dirichlet, 0.0},
                          {IntervalBc::neumann_dirichlet, 0.0},
                          {IntervalBc::robin, 1.5}};
    for (const Case& c : cases)
        for (double L : {1.0, 2.0})
            for (double alpha : {4.0, 20.0}) {
                const auto spec = make(L, alpha, c.bc, c.beta);
                const auto exact = secular_eigs(spec, 2);
                const auto fd = oracle::interval_fd_eigs(spec, 100000, 2);
                for (int i = 0; i < 2; ++i) {
                    INFO("bc=" << static_cast<int>(c.bc) << " L=" << L
                               << " alpha=" << alpha << " i=" << i);
                    REQUIRE(std::abs(fd[i] - exact[i]) <=
                            1e-4 * std::abs(exact[i]));
                }
            }
}

TEST_CASE("endpoint conditions order the spectra") {
    for (auto [L, alpha] : {std::pair{1.0, 4.0}, std::pair{0.7, 9.0}}) {
        const auto en = secular_eigs(make(L, alpha, IntervalBc::neumann), 5);
        const auto end_ = secular_eigs(make(L, alpha, IntervalBc::dirichlet), 5);
        const auto emix = secular_eigs(make(L, alpha, IntervalBc::neumann_dirichlet), 5);
        for (int n = 0; n < 5; ++n) {
            CHECK(en[n] <= emix[n] + 1e-11 * std::abs(emix[n]));
            CHECK(emix[n] <= end_[n] + 1e-11 * std::abs(end_[n]));
        }
    }
}

TEST_CASE("neumann ground state bracketing holds with constant four") {
    for (auto [L, alpha] : {std::pair{1.0, 8.0}, std::pair{1.0, 16.0},
                            std::pair{1.0, 32.0}, std::pair{2.0, 8.0},
                            std::pair{2.0, 16.0}, std::pair{0.5, 32.0}}) {
        const double e1 = secular_eigs(make(L, alpha, IntervalBc::neumann), 1)[0];
        CHECK(e1 < -0.25 * alpha * alpha);
        CHECK(e1 > -0.25 * alpha * alpha -
                       4.0 * alpha * alpha * std::exp(-0.5 * L * alpha));
    }
}

TEST_CASE("second neumann eigenvalue sits exactly on the odd lattice") {
    // The first odd eigenfunction vanishes at the well, so E_2 equals
    // (pi/2L)^2 exactly; the even-sector second root lies strictly above.
    for (auto [L, alpha] : {std::pair{1.0, 6.0}, std::pair{0.5, 24.0},
                            std::pair{2.0, 10.0}}) {
        const auto ev = secular_eigs(make(L, alpha, IntervalBc::neumann), 3);
        REQUIRE(ev[1] == Approx(sqr(pi / (2.0 * L))));
        CHECK(ev[1] >= sqr(pi / (2.0 * L)) * (1.0 - 1e-12));
        CHECK(ev[2] > ev[1]);
    }
}

TEST_CASE("second robin eigenvalue scales like one over L squared") {
    const double alpha = 4.0, beta = 0.5;
    std::vector<double> scaled;
    for (double L : {1.0, 0.5, 0.25}) {
        const auto ev = secular_eigs(make(L, alpha, IntervalBc::robin, beta), 2);
        CHECK(ev[0] < 0.0);
        REQUIRE(ev[1] > 0.0);
        scaled.push_back(ev[1] * L * L);
    }
    const double cmin = *std::min_element(scaled.begin(), scaled.end());
    const double cmax = *std::max_element(scaled.begin(), scaled.end());
    CHECK(cmin > 0.1);
    CHECK(cmax / cmin < 10.0);
}

TEST_CASE("robin interval gains the odd boundary state past beta L = 1") {
    const double L = 1.0, alpha = 4.0, beta = 1.5;
    const auto ev = secular_eigs(make(L, alpha, IntervalBc::robin, beta), 2);
    REQUIRE(ev[1] < 0.0);
    const double kstar =
        solve_on([&](double k) { return k / std::tanh(k * L) - beta; }, 0.5, 3.0);
    REQUIRE(ev[1] == Approx(-kstar * kstar).epsilon(1e-12));
}

TEST_CASE("robin with zero coefficient reproduces the neumann spectrum") {
    const auto en = secular_eigs(make(1.0, 4.0, IntervalBc::neumann), 4);
    const auto er = secular_eigs(make(1.0, 4.0, IntervalBc::robin, 0.0), 4);
    for (int i = 0; i < 4; ++i) REQUIRE(er[i] == Approx(en[i]).epsilon(1e-12));
}

TEST_CASE("free neumann interval recovers the classical lattice") {
    const auto ev = secular_eigs(make(1.0, 0.0, IntervalBc::neumann), 4);
    for (int m = 0; m < 4; ++m)
        REQUIRE(ev[m] == Approx(sqr(m * pi / 2.0)).margin(1e-12));
}

TEST_CASE("effective operator on identical square edges") {
    EffectiveOperatorSpec spec;
    spec.lengths = {1.0, 1.0, 1.0, 1.0};
    spec.curvatures.resize(4);  // empty functions: zero curvature
    const auto ev = effective_eigs(spec, 5);
    for (int i = 0; i < 4; ++i) {
        REQUIRE(ev[i].value == Approx(pi * pi).epsilon(1e-8));
        REQUIRE(ev[i].edge == i);
    }
    REQUIRE(ev[4].value == Approx(4.0 * pi * pi).epsilon(1e-8));
    REQUIRE(ev[4].edge == 0);
}

TEST_CASE("constant curvature shifts edge eigenvalues by a quarter square") {
    EffectiveOperatorSpec spec;
    spec.lengths = {pi};
    spec.curvatures = {[](double) { return 1.0; }};
    const auto ev = effective_eigs(spec, 2);
    REQUIRE(ev[0].value == Approx(0.75).epsilon(1e-8));
    REQUIRE(ev[1].value == Approx(3.75).epsilon(1e-8));
}

TEST_CASE("linear curvature lowers the dirichlet ground state") {
    EffectiveOperatorSpec spec;
    spec.lengths = {1.0};
    spec.curvatures = {[](double s) { return s; }};
    const auto ev = effective_eigs(spec, 1);
    CHECK(ev[0].value > pi * pi - 0.25);
    CHECK(ev[0].value < pi * pi);

    const auto coarse =
        detail::dirichlet_curvature_eigs_raw(1.0, spec.curvatures[0], 10000, 1);
    const auto fine =
        detail::dirichlet_curvature_eigs_raw(1.0, spec.curvatures[0], 20000, 1);
    const double oracle = (4.0 * fine[0] - coarse[0]) / 3.0;
    REQUIRE(ev[0].value == Approx(oracle).epsilon(1e-7));
}

TEST_CASE("edge discretization converges at second order") {
    const auto kfun = [](double) { return 1.0; };
    const double exact = 1.0 - 0.25;
    const double e100 =
        std::abs(detail::dirichlet_curvature_eigs_raw(pi, kfun, 100, 1)[0] - exact);
    const double e200 =
        std::abs(detail::dirichlet_curvature_eigs_raw(pi, kfun, 200, 1)[0] - exact);
    const double ratio = e100 / e200;
    CHECK(ratio > 3.7);
    CHECK(ratio < 4.3);
}

TEST_CASE("periodic loop spectra match the fourier values") {
    const auto unit = smooth_loop_eigs([](double) { return 1.0; }, 2.0 * pi, 3);
    CHECK(unit[0] == Approx(-0.25).margin(1e-6));
    CHECK(unit[1] == Approx(0.75).margin(1e-6));
    CHECK(unit[2] == Approx(0.75).margin(1e-6));

    const auto flat = smooth_loop_eigs([](double) { return 0.0; }, 2.0 * pi, 3);
    CHECK(flat[0] == Approx(0.0).margin(1e-6));
    CHECK(flat[1] == Approx(1.0).margin(1e-6));
    CHECK(flat[2] == Approx(1.0).margin(1e-6));

    const auto wide = smooth_loop_eigs([](double) { return 0.5; }, 4.0 * pi, 3);
    CHECK(wide[0] == Approx(-1.0 / 16.0).margin(1e-6));
    CHECK(wide[1] == Approx(3.0 / 16.0).margin(1e-6));
    CHECK(wide[2] == Approx(3.0 / 16.0).margin(1e-6));
}

TEST_CASE("model operator input validation") {
    CHECK_THROWS_AS(secular_eigs(make(0.0, 1.0, IntervalBc::neumann), 1),
                    ValidationError);
    CHECK_THROWS_AS(secular_eigs(make(1.0, -1.0, IntervalBc::neumann), 1),
                    ValidationError);
    CHECK_THROWS_AS(secular_eigs(make(1.0, 1.0, IntervalBc::robin, -0.5), 1),
                    ValidationError);
    CHECK_THROWS_AS(secular_eigs(make(1.0, 1.0, IntervalBc::neumann), 0),
                    ValidationError);

    EffectiveOperatorSpec bad;
    bad.lengths = {1.0, 1.0};
    bad.curvatures.resize(1);
    CHECK_THROWS_AS(effective_eigs(bad, 1), ValidationError);
    bad.curvatures.resize(2);
    bad.lengths[1] = -1.0;
    CHECK_THROWS_AS(effective_eigs(bad, 1), ValidationError);

    CHECK_THROWS_AS(smooth_loop_eigs({}, -1.0, 1), ValidationError);
    CHECK_THROWS_AS(smooth_loop_eigs({}, 1.0, 0), ValidationError);
}
