#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "deltaspec/eigs.hpp"
#include "deltaspec/quadrature.hpp"
#include "deltaspec/roots.hpp"

using namespace deltaspec;

TEST_CASE("bisection finds cos root to requested width") {
    const double r = bisect([](double x) { return std::cos(x); }, 1.0, 2.0,
                            1e-14);
    CHECK(std::abs(r - pi / 2.0) < 1e-13);
    CHECK_THROWS_AS(bisect([](double x) { return 1.0 + x * x; }, 0.0, 1.0,
                           1e-12),
                    NoRoot);
}

TEST_CASE("bracket scan collects every sign change") {
    // sin(pi x) has roots at integers; scan [0.5, 4.5] -> 4 brackets.
    auto f = [](double x) { return std::sin(pi * x); };
    const auto brackets = scan_brackets(f, 0.5, 4.5, 64);
    REQUIRE(brackets.size() == 4);
    for (std::size_t i = 0; i < brackets.size(); ++i) {
        const double root =
            bisect(f, brackets[i].lo, brackets[i].hi, brackets[i].flo,
                   brackets[i].fhi, 1e-14);
        CHECK(std::abs(root - static_cast<double>(i + 1)) < 1e-12);
    }
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
    for (int n : {2, 4, 8, 16}) {
        const auto q = gauss_legendre(n);
        // x^(2n-1) over [0,1] = 1/(2n); x^(2n-2) = 1/(2n-1).
        const double got1 = gauss_on(q, [&](double x) {
            return std::pow(x, 2 * n - 1);
        }, 0.0, 1.0);
        const double got2 = gauss_on(q, [&](double x) {
            return std::pow(x, 2 * n - 2);
        }, 0.0, 1.0);
        CHECK(std::abs(got1 - 1.0 / (2 * n)) < 1e-14);
        CHECK(std::abs(got2 - 1.0 / (2 * n - 1)) < 1e-14);
    }
}

TEST_CASE("adaptive Simpson reaches requested tolerance on a peaked integrand") {
    // int_0^1 1/sqrt(x + 1e-4) dx = 2(sqrt(1 + 1e-4) - 1e-2)
    const double want = 2.0 * (std::sqrt(1.0 + 1e-4) - 1e-2);
    const double got = adaptive_simpson(
        [](double x) { return 1.0 / std::sqrt(x + 1e-4); }, 0.0, 1.0, 1e-12);
    CHECK(std::abs(got - want) < 1e-10);
}

TEST_CASE("Sturm bisection matches the known FD Laplacian spectrum") {
    // -u'' on (0,1), Dirichlet, n interior points: lambda_k = (2/h^2)(1 - cos(k pi h)).
    const int n = 2001;
    const double h = 1.0 / (n + 1);
    std::vector<double> diag(n, 2.0 / (h * h));
    std::vector<double> off(n - 1, -1.0 / (h * h));
    const auto lows = tridiag_lowest(diag, off, 5);
    for (int k = 1; k <= 5; ++k) {
        const double want = 2.0 / (h * h) * (1.0 - std::cos(k * pi * h));
        CHECK(std::abs(lows[k - 1] - want) < 1e-8 * want);
    }
}

TEST_CASE("block Lanczos agrees with dense solver, degenerate cluster included") {
    const int n = 400;
    // Diagonal spectrum with a fourfold degenerate top, rotated by a fixed
    // orthogonal transform so the test is not trivially diagonal.
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = -1.0 + 1.9 * i / n;
    d(n - 1) = d(n - 2) = d(n - 3) = d(n - 4) = 2.5;
    d(n - 5) = 2.1;
    d(n - 6) = 1.7;
    Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(n, n);
    std::mt19937 rng(1234);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd noise(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) noise(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(noise);
    rot = qr.householderQ();
    Eigen::MatrixXd A = rot * d.asDiagonal() * rot.transpose();
    A = 0.5 * (A + A.transpose().eval());

    auto apply = [&](const Eigen::Ref<const Eigen::MatrixXd>& X) -> Eigen::MatrixXd {
        return A * X;
    };
    auto ident = [](const Eigen::Ref<const Eigen::MatrixXd>& X) -> Eigen::MatrixXd {
        return X;
    };
    const auto res = lanczos_largest(n, 6, apply, ident);
    REQUIRE(res.values.size() == 6);
    CHECK(std::abs(res.values[0] - 2.5) < 1e-10);
    CHECK(std::abs(res.values[1] - 2.5) < 1e-10);
    CHECK(std::abs(res.values[2] - 2.5) < 1e-10);
    CHECK(std::abs(res.values[3] - 2.5) < 1e-10);
    CHECK(std::abs(res.values[4] - 2.1) < 1e-10);
    CHECK(std::abs(res.values[5] - 1.7) < 1e-10);
    // Residual check: ||A x - theta x|| small for each returned pair.
    for (int j = 0; j < 6; ++j) {
        Eigen::VectorXd x = res.vectors.col(j);
        CHECK((A * x - res.values[j] * x).norm() < 1e-9);
    }
}

TEST_CASE("block Lanczos shift-invert with a B inner product") {
    const int n = 300;
    Eigen::VectorXd bdiag(n);
    for (int i = 0; i < n; ++i) bdiag(i) = 0.5 + (i % 7) * 0.25;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        A(i, i) = 2.0;
        if (i + 1 < n) A(i, i + 1) = A(i + 1, i) = -1.0;
    }
    const Eigen::MatrixXd B = bdiag.asDiagonal();
    // Smallest eigenvalues of A x = lambda B x through the shift-invert
    // operator Op = (A - sigma B)^{-1} B, self-adjoint in the B inner
    // product; its largest eigenvalues are 1/(lambda_j - sigma). The shift
    // sits near the targets, as in real use.
    const double sigma = 0.0;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A - sigma * B);
    auto apply = [&](const Eigen::Ref<const Eigen::MatrixXd>& X) -> Eigen::MatrixXd {
        return ldlt.solve(B * X);
    };
    auto bapply = [&](const Eigen::Ref<const Eigen::MatrixXd>& X) -> Eigen::MatrixXd {
        return B * X;
    };
    const auto res = lanczos_largest(n, 4, apply, bapply);
    const Eigen::VectorXd all = dense_generalized_eigs(A, B);
    for (int j = 0; j < 4; ++j) {
        const double lam = sigma + 1.0 / res.values[j];
        CHECK(std::abs(lam - all(j)) < 1e-9 * std::abs(all(j)));
        Eigen::VectorXd x = res.vectors.col(j);
        CHECK((A * x - lam * (B * x)).norm() < 1e-7 * x.norm());
    }
}
