#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "deltaspec/bs.hpp"
#include "deltaspec/fem.hpp"
#include "deltaspec/geometry.hpp"
#include "deltaspec/mesh.hpp"
#include "deltaspec/model1d.hpp"

using Catch::Approx;
using namespace deltaspec;

namespace {

Polyline open_path(std::vector<Vec2> pts, double h) {
    Polyline pl;
    pl.closed = false;
    pl.nodes = std::move(pts);
    for (std::size_t i = 0; i + 1 < pl.nodes.size(); ++i) {
        pl.midpoints.push_back(0.5 * (pl.nodes[i] + pl.nodes[i + 1]));
        pl.lengths.push_back(norm(pl.nodes[i + 1] - pl.nodes[i]));
    }
    pl.cumlen.assign(1, 0.0);
    for (double l : pl.lengths) pl.cumlen.push_back(pl.cumlen.back() + l);
    pl.total_length = pl.cumlen.back();
    return refine(pl, h);
}

Polyline vee(double half_angle, double arm, double h) {
    const Vec2 up{arm * std::cos(half_angle), arm * std::sin(half_angle)};
    const Vec2 dn{up.x, -up.y};
    return open_path({up, {0.0, 0.0}, dn}, h);
}

double quadratic_form(const Eigen::SparseMatrix<double>& m) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.rows());
    return ones.dot(m * ones);
}

const std::map<int, PieceCondition> all_neumann{
    {0, {PieceBc::neumann, 0.0}},
    {1, {PieceBc::neumann, 0.0}},
    {2, {PieceBc::neumann, 0.0}},
    {3, {PieceBc::neumann, 0.0}}};

const std::map<int, PieceCondition> all_dirichlet{
    {0, {PieceBc::dirichlet, 0.0}},
    {1, {PieceBc::dirichlet, 0.0}},
    {2, {PieceBc::dirichlet, 0.0}},
    {3, {PieceBc::dirichlet, 0.0}}};

AssembledProblem unit_square_problem(double h, const Polyline& gamma = {}) {
    return assemble(triangulate({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, gamma, h));
}

}  // namespace

TEST_CASE("assembled matrices integrate constants exactly") {
    const Kite kite = make_kite(pi / 3.0, 4.0);
    const std::vector<Vec2> poly(kite.vertices.begin(), kite.vertices.end());
    const AssembledProblem ap = assemble(triangulate(poly, kite.interaction(0.2), 0.2));

    // stiffness annihilates constants; masses integrate them exactly
    CHECK(std::abs(quadratic_form(ap.stiffness)) < 1e-9);
    CHECK(quadratic_form(ap.mass) ==
          Approx(4.0 * 16.0 / std::tan(pi / 3.0)).epsilon(1e-12));
    CHECK(quadratic_form(ap.interaction_mass) ==
          Approx(2.0 * 4.0 / std::tan(pi / 3.0)).epsilon(1e-12));

    // per-piece boundary line masses reproduce the side lengths
    const std::map<int, double> side{{0, dist(kite.vertices[0], kite.vertices[1])},
                                     {1, dist(kite.vertices[1], kite.vertices[2])},
                                     {2, dist(kite.vertices[2], kite.vertices[3])},
                                     {3, dist(kite.vertices[3], kite.vertices[0])}};
    REQUIRE(ap.boundary_mass.size() == 4);
    for (const auto& [tag, bm] : ap.boundary_mass) {
        CHECK(quadratic_form(bm) == Approx(side.at(tag)).epsilon(1e-12));
        CHECK(!ap.boundary_nodes.at(tag).empty());
    }
}

TEST_CASE("free laplacian spectra on the unit square") {
    const double pi2 = pi * pi;
    const AssembledProblem ap = unit_square_problem(0.02);

    SECTION("neumann") {
        const auto r = lowest_eigs(ap, 0.0, all_neumann, 4).spectrum;
        REQUIRE(r.eigenvalues.size() == 4);
        CHECK(std::abs(r.eigenvalues[0]) < 1e-6);
        CHECK(r.eigenvalues[1] == Approx(pi2).epsilon(2e-3));
        CHECK(r.eigenvalues[2] == Approx(pi2).epsilon(2e-3));
        CHECK(r.eigenvalues[3] == Approx(2.0 * pi2).epsilon(2e-3));
        CHECK(r.backend == "fem");
        CHECK_FALSE(r.truncated);
    }
    SECTION("dirichlet") {
        const auto r = lowest_eigs(ap, 0.0, all_dirichlet, 2).spectrum;
        CHECK(r.eigenvalues[0] == Approx(2.0 * pi2).epsilon(5e-3));
        CHECK(r.eigenvalues[1] == Approx(5.0 * pi2).epsilon(5e-3));
    }
    SECTION("unknown boundary tag") {
        std::map<int, PieceCondition> bad{{7, {PieceBc::dirichlet, 0.0}}};
        CHECK_THROWS_AS(lowest_eigs(ap, 0.0, bad, 1), IndexOutOfRange);
    }
}

TEST_CASE("dense and shift-invert paths agree") {
    const AssembledProblem ap = unit_square_problem(0.06);
    REQUIRE(ap.mesh.vertex_count() <= 600);  // dense-path eligibility

    EigenSolveOptions dense, iterative;
    iterative.dense_threshold = 0;
    const auto a = lowest_eigs(ap, 0.0, all_neumann, 4, dense).spectrum;
    const auto b = lowest_eigs(ap, 0.0, all_neumann, 4, iterative).spectrum;
    for (int i = 0; i < 4; ++i)
        CHECK(a.eigenvalues[i] == Approx(b.eigenvalues[i]).margin(1e-9));
}

TEST_CASE("a straight delta line separates into the 1d point interaction") {
    // delta line x2 = 1 across the Neumann box (0,2)^2: E = E_1d + (n pi/2)^2
    const double alpha = 4.0, h = 0.02;
    const Polyline line = open_path({{0, 1}, {2, 1}}, h);
    const AssembledProblem ap = assemble(triangulate(
        {{0, 0}, {2, 0}, {2, 2}, {0, 2}}, line, h));

    EigenSolveOptions opts;
    opts.shift = -0.5 * alpha * alpha - 1.0;
    const auto r = lowest_eigs(ap, alpha, all_neumann, 2, opts).spectrum;

    const auto one_d = secular_eigs(
        PointInteractionSpec{1.0, alpha, IntervalBc::neumann, 0.0}, 2);
    REQUIRE(!one_d.empty());
    CHECK(r.eigenvalues[0] == Approx(one_d[0]).margin(1e-3));
    // first excited transverse mode sits (pi/2)^2 above the ground state
    CHECK(r.eigenvalues[1] == Approx(one_d[0] + pi * pi / 4.0).margin(3e-3));
}

TEST_CASE("kite spectra: bracket, symmetry split, scaling, ordering") {
    SECTION("ground state bracket and split consistency") {
        const auto full = kite_eigs(pi / 4.0, 10.0, 1.0, KiteBc::dirichlet, 3, 0.1);
        const auto split = kite_eigs(pi / 4.0, 10.0, 1.0, KiteBc::dirichlet, 3, 0.1, true);
        REQUIRE(full.eigenvalues.size() == 3);
        REQUIRE(split.eigenvalues.size() == 3);
        CHECK(full.eigenvalues[0] > -0.5);
        CHECK(full.eigenvalues[0] < -0.25);
        for (int i = 0; i < 3; ++i)
            CHECK(split.eigenvalues[i] ==
                  Approx(full.eigenvalues[i]).margin(1e-8));
    }
    SECTION("alpha-R scaling collapse") {
        const double big = kite_eigs(pi / 4.0, 8.0, 1.0, KiteBc::dirichlet, 1, 0.1)
                               .eigenvalues[0];
        const double small = kite_eigs(pi / 4.0, 4.0, 2.0, KiteBc::dirichlet, 1, 0.05)
                                 .eigenvalues[0];
        CHECK(small == Approx(4.0 * big).epsilon(2e-2));
    }
    SECTION("neumann below dirichlet on the same mesh") {
        const auto n = kite_eigs(pi / 4.0, 10.0, 1.0, KiteBc::neumann, 3, 0.15);
        const auto d = kite_eigs(pi / 4.0, 10.0, 1.0, KiteBc::dirichlet, 3, 0.15);
        for (int i = 0; i < 3; ++i)
            CHECK(n.eigenvalues[i] <= d.eigenvalues[i] + 1e-12);
    }
    SECTION("precondition") {
        CHECK_THROWS_AS(kite_eigs(pi / 4.0, 3.0, 1.0, KiteBc::dirichlet, 1, 0.1),
                        ValidationError);
    }
}

TEST_CASE("neumann kite second eigenvalue stays above the edge threshold") {
    // R^2 (E_2 + 1/4) bounded below by a positive constant as R grows
    for (double R : {5.0, 10.0, 20.0}) {
        const auto r = kite_eigs(pi / 4.0, R, 1.0, KiteBc::neumann, 2, 0.15);
        const double gap = R * R * (r.eigenvalues[1] + 0.25);
        INFO("R = " << R << " scaled gap = " << gap);
        CHECK(gap > 0.3);
    }
}

TEST_CASE("box truncation against the exact circle spectrum") {
    const CurveWithCorners circle = build_curvilinear(
        {Arc::circular({0, 0}, 1.0, 0.0, pi), Arc::circular({0, 0}, 1.0, pi, 2.0 * pi)});
    const double alpha = 10.0, h = 1.0 / (8.0 * alpha);
    const Polyline pl = sample(circle, h);
    const auto r = box_truncated_spectrum(pl, alpha, 1.0, h, 3);
    const auto oracle = circle_oracle(1.0, alpha, 3);
    REQUIRE(oracle.size() >= 3);
    for (int i = 0; i < 3; ++i)
        CHECK(r.eigenvalues[i] == Approx(oracle[i]).epsilon(2e-2));
}

TEST_CASE("box truncation cross-checks the boundary-integral backend") {
    const CurveWithCorners square =
        build_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const double alpha = 20.0;

    const auto bs = bound_states(sample(square, 4.0 / 256.0), alpha, 4);
    REQUIRE(bs.eigenvalues.size() == 4);

    const double h = 1.0 / (8.0 * alpha);
    const Polyline pl = sample(square, h);
    const auto fem_half = box_truncated_spectrum(pl, alpha, 0.5, h, 4);
    for (int i = 0; i < 4; ++i)
        CHECK(fem_half.eigenvalues[i] == Approx(bs.eigenvalues[i]).epsilon(2e-2));

    // widening the Dirichlet box can only lower the eigenvalues
    const auto fem_one = box_truncated_spectrum(pl, alpha, 1.0, h, 1);
    CHECK(fem_half.eigenvalues[0] >= fem_one.eigenvalues[0] - 1e-9);

    CHECK_THROWS_AS(box_truncated_spectrum(pl, alpha, 0.3, h, 1), ValidationError);
}

TEST_CASE("obtuse corners reduce to their acute mirror image") {
    // a broken line with half-angle theta spans the same set as one with
    // pi - theta; the boxed spectra must agree across the two inputs
    const double alpha = 4.0, arm = 4.0, margin = 2.0, h = 0.1;
    const auto acute = box_truncated_spectrum(vee(pi / 3.0, arm, h), alpha,
                                              margin, h, 1);
    const auto obtuse = box_truncated_spectrum(vee(2.0 * pi / 3.0, arm, h),
                                               alpha, margin, h, 1);
    CHECK(obtuse.eigenvalues[0] ==
          Approx(acute.eigenvalues[0]).epsilon(1e-2));
}

TEST_CASE("dirichlet eigenvalues refine downward at second order") {
    const double exact = 2.0 * pi * pi;
    std::vector<double> err;
    for (double h : {0.08, 0.04, 0.02}) {
        const auto r =
            lowest_eigs(unit_square_problem(h), 0.0, all_dirichlet, 1).spectrum;
        err.push_back(r.eigenvalues[0] - exact);
        CHECK(err.back() > 0.0);  // conforming upper bound
    }
    CHECK(err[0] / err[1] == Approx(4.0).margin(1.8));
    CHECK(err[1] / err[2] == Approx(4.0).margin(1.8));
}

TEST_CASE("eigenvector mass profiles") {
    SECTION("uniform density on the unit square") {
        const AssembledProblem ap = unit_square_problem(0.05);
        const Eigen::VectorXd ones =
            Eigen::VectorXd::Ones(static_cast<Eigen::Index>(ap.mesh.vertex_count()));
        const auto tails =
            eigenvector_mass_profile(ap, ones, {0.0, 0.0}, {0.0, 0.25, 0.5});
        REQUIRE(tails.size() == 3);
        CHECK(tails[0] == 1.0);
        CHECK(tails[1] == Approx(1.0 - pi * 0.25 * 0.25 / 4.0).margin(0.02));
        CHECK(tails[2] == Approx(1.0 - pi * 0.5 * 0.5 / 4.0).margin(0.02));

        // the alpha = 0 Neumann ground state is that constant
        EigenSolveOptions opts;
        opts.want_vectors = true;
        const auto ground = lowest_eigs(ap, 0.0, all_neumann, 1, opts);
        REQUIRE(ground.vectors.cols() == 1);
        const auto gtails = eigenvector_mass_profile(
            ap, ground.vectors.col(0), {0.0, 0.0}, {0.0, 0.25, 0.5});
        CHECK(gtails[1] == Approx(tails[1]).margin(1e-6));
        CHECK(gtails[2] == Approx(tails[2]).margin(1e-6));
    }
    SECTION("kite ground state localizes at the corner") {
        const double theta = pi / 4.0, R = 12.0, alpha = 1.0, h = 0.1;
        KiteProblem kp = kite_problem(theta, R, alpha, KiteBc::neumann, h);
        EigenSolveOptions opts;
        opts.shift = kp.shift;
        opts.want_vectors = true;
        const auto sol = lowest_eigs(kp.problem, alpha, kp.pieces, 1, opts);
        REQUIRE(sol.vectors.cols() == 1);

        const std::vector<double> radii{0.0, 2.0, 4.0, 6.0};
        const auto tails = eigenvector_mass_profile(kp.problem, sol.vectors.col(0),
                                                    {0.0, 0.0}, radii);
        CHECK(tails[0] == 1.0);
        CHECK(tails[1] > tails[2]);
        CHECK(tails[2] > tails[3]);
        CHECK(tails[3] > 0.0);
        // least-squares slope of log tail over r in [2, 6] must show decay
        const double bhat = (std::log(tails[1]) - std::log(tails[3])) / 4.0;
        INFO("fitted decay rate " << bhat);
        CHECK(bhat > 0.0);
    }
}

TEST_CASE("robin kite eigenvalue scales like a stable multiple of alpha^2") {
    std::vector<double> c;
    for (double alpha : {1.0, 2.0, 4.0}) {
        const double R = 8.0, h = std::min(0.1, 0.4 / alpha);
        KiteProblem kp = kite_problem(pi / 4.0, R, alpha, KiteBc::neumann, h);
        std::map<int, PieceCondition> pieces = kp.pieces;
        pieces[1] = {PieceBc::robin, alpha};
        pieces[2] = {PieceBc::robin, alpha};
        EigenSolveOptions opts;
        opts.shift = -2.5 * alpha * alpha - 1.0;  // below the Robin corner state
        const auto r = lowest_eigs(kp.problem, alpha, pieces, 1, opts).spectrum;
        c.push_back(-r.eigenvalues[0] / (alpha * alpha));
    }
    for (double ci : c) {
        INFO("fitted constants " << c[0] << " " << c[1] << " " << c[2]);
        CHECK(ci > 1.0);
        CHECK(ci < 4.0);
    }
    CHECK(std::abs(c[1] - c[0]) / c[0] < 0.15);
    CHECK(std::abs(c[2] - c[0]) / c[0] < 0.15);
}

TEST_CASE("factorization shift above the spectrum is refused") {
    const AssembledProblem ap = unit_square_problem(0.03);
    EigenSolveOptions opts;
    opts.shift = 1.0e4;  // inside/above the discrete spectrum; inertia test
                         // fails every retry
    CHECK_THROWS_AS(lowest_eigs(ap, 0.0, all_neumann, 1, opts),
                    FactorizationFailure);
}
