#pragma once

// P1 finite-element discretization of planar Schrodinger operators with an
// attractive delta interaction supported on an embedded polyline and
// Neumann / Dirichlet / Robin conditions selectable per boundary piece.
// The weak form on the free nodes reads
//     a(u, v) = grad u . grad v  -  alpha (u, v)_Gamma
//               - sum_p beta_p (u, v)_{boundary piece p},
// and eigenvalues are recovered by shift-invert block Lanczos on a sparse
// LDLT factorization (dense solve for small systems).

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "deltaspec/common.hpp"
#include "deltaspec/eigs.hpp"
#include "deltaspec/geometry.hpp"
#include "deltaspec/mesh.hpp"
#include "deltaspec/spectral.hpp"

namespace deltaspec {

enum class PieceBc { neumann, dirichlet, robin };

struct PieceCondition {
    PieceBc bc = PieceBc::neumann;
    double beta = 0.0;  // Robin coefficient (attractive when positive)
};

// Mesh plus every matrix that does not depend on coefficients: stiffness,
// area mass, the line mass on the interaction chain, and one line mass per
// tagged boundary piece.  All matrices live on the full node set; Dirichlet
// elimination happens at solve time.
struct AssembledProblem {
    Mesh mesh;
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> mass;
    Eigen::SparseMatrix<double> interaction_mass;
    std::map<int, Eigen::SparseMatrix<double>> boundary_mass;
    std::map<int, std::vector<int>> boundary_nodes;  // sorted, unique
};

inline AssembledProblem assemble(Mesh mesh) {
    const int n = static_cast<int>(mesh.vertices.size());
    std::vector<Eigen::Triplet<double>> ka, ma;
    ka.reserve(mesh.triangles.size() * 9);
    ma.reserve(mesh.triangles.size() * 9);
    for (const auto& t : mesh.triangles) {
        const Vec2& a = mesh.vertices[t[0]];
        const Vec2& b = mesh.vertices[t[1]];
        const Vec2& c = mesh.vertices[t[2]];
        const double area =
            0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
        if (!(area > 0.0)) throw MeshFailure("degenerate triangle in assembly");
        const Vec2 e[3] = {c - b, a - c, b - a};  // edge opposite each vertex
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                ka.emplace_back(t[i], t[j], dot(e[i], e[j]) / (4.0 * area));
                ma.emplace_back(t[i], t[j],
                                area / 12.0 * (i == j ? 2.0 : 1.0));
            }
    }
    AssembledProblem ap;
    ap.stiffness.resize(n, n);
    ap.stiffness.setFromTriplets(ka.begin(), ka.end());
    ap.mass.resize(n, n);
    ap.mass.setFromTriplets(ma.begin(), ma.end());

    const auto line_mass = [&](const std::vector<std::array<int, 2>>& edges,
                               const std::vector<int>* tags, int want_tag) {
        std::vector<Eigen::Triplet<double>> tr;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            if (tags && (*tags)[k] != want_tag) continue;
            const int u = edges[k][0], v = edges[k][1];
            const double len = dist(mesh.vertices[u], mesh.vertices[v]);
            tr.emplace_back(u, u, len / 3.0);
            tr.emplace_back(v, v, len / 3.0);
            tr.emplace_back(u, v, len / 6.0);
            tr.emplace_back(v, u, len / 6.0);
        }
        Eigen::SparseMatrix<double> B(n, n);
        B.setFromTriplets(tr.begin(), tr.end());
        return B;
    };
    ap.interaction_mass = line_mass(mesh.interaction_edges, nullptr, 0);
    std::set<int> tag_set(mesh.boundary_tags.begin(), mesh.boundary_tags.end());
    for (int tag : tag_set) {
        ap.boundary_mass.emplace(
            tag, line_mass(mesh.boundary_edges, &mesh.boundary_tags, tag));
        std::vector<int> nodes;
        for (std::size_t k = 0; k < mesh.boundary_edges.size(); ++k)
            if (mesh.boundary_tags[k] == tag) {
                nodes.push_back(mesh.boundary_edges[k][0]);
                nodes.push_back(mesh.boundary_edges[k][1]);
            }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        ap.boundary_nodes.emplace(tag, std::move(nodes));
    }
    ap.mesh = std::move(mesh);
    return ap;
}

struct EigenSolveOptions {
    // Spectral shift; must sit strictly below the lowest eigenvalue.  NaN
    // derives a default from the coefficients, and an inertia check on the
    // factorization deepens it automatically if it ever lands inside the
    // spectrum.
    double shift = std::numeric_limits<double>::quiet_NaN();
    int dense_threshold = 600;  // direct dense solve at or below this size
    bool want_vectors = false;
    // when finite, eigenvalues above this energy are only certified to lie
    // above it (reduced precision) instead of being fully converged; spares
    // the iterative solver from resolving dense clusters beyond the range
    // of interest
    double converge_below = std::numeric_limits<double>::quiet_NaN();
    // locate the ground state with a cheap rough pass, then refactorize
    // just below it: shift-invert separations degrade quadratically with
    // the distance from the shift to the band of interest, so a safe deep
    // default can make near-threshold levels unresolvable
    bool auto_shift = false;
    LanczosOptions lanczos{};
};

struct EigenSolve {
    SpectralResult spectrum;  // backend "fem", eigenvalues ascending
    // Full-node eigenvector columns (zero rows on Dirichlet nodes); filled
    // when want_vectors is set or the dense path runs.
    Eigen::MatrixXd vectors;
};

// Lowest `count` eigenvalues of the pencil (K, M) with
//   K = stiffness - alpha * interaction_mass - sum_p beta_p * boundary_mass_p
// after eliminating the Dirichlet pieces.  Pieces default to Neumann; tags
// named in `pieces` must exist in the mesh.
inline EigenSolve lowest_eigs(const AssembledProblem& ap, double alpha,
                              const std::map<int, PieceCondition>& pieces,
                              int count, EigenSolveOptions opts = {}) {
    if (count < 1) throw ValidationError("eigenvalue count must be at least 1");
    const int n = static_cast<int>(ap.mesh.vertices.size());

    double beta_max = 0.0;
    std::vector<char> is_dirichlet(n, 0);
    Eigen::SparseMatrix<double> K = ap.stiffness;
    if (alpha != 0.0) K -= alpha * ap.interaction_mass;
    for (const auto& [tag, cond] : pieces) {
        const auto bn = ap.boundary_nodes.find(tag);
        if (bn == ap.boundary_nodes.end())
            throw IndexOutOfRange("boundary piece tag not present in mesh");
        if (cond.bc == PieceBc::dirichlet) {
            for (int id : bn->second) is_dirichlet[id] = 1;
        } else if (cond.bc == PieceBc::robin && cond.beta != 0.0) {
            K -= cond.beta * ap.boundary_mass.at(tag);
            beta_max = std::max(beta_max, std::abs(cond.beta));
        }
    }

    std::vector<int> free_of(n, -1);
    std::vector<int> free_nodes;
    for (int i = 0; i < n; ++i)
        if (!is_dirichlet[i]) {
            free_of[i] = static_cast<int>(free_nodes.size());
            free_nodes.push_back(i);
        }
    const int nf = static_cast<int>(free_nodes.size());
    if (nf == 0) throw ValidationError("no free nodes left after Dirichlet");
    const int count_eff = std::min(count, nf);

    const auto compress = [&](const Eigen::SparseMatrix<double>& S) {
        std::vector<Eigen::Triplet<double>> tr;
        tr.reserve(static_cast<std::size_t>(S.nonZeros()));
        for (int col = 0; col < S.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(S, col); it;
                 ++it) {
                const int r = free_of[it.row()], c = free_of[it.col()];
                if (r >= 0 && c >= 0) tr.emplace_back(r, c, it.value());
            }
        Eigen::SparseMatrix<double> out(nf, nf);
        out.setFromTriplets(tr.begin(), tr.end());
        return out;
    };
    const Eigen::SparseMatrix<double> Kf = compress(K);
    const Eigen::SparseMatrix<double> Mf = compress(ap.mass);

    std::vector<double> values;
    Eigen::MatrixXd free_vectors;

    if (nf <= opts.dense_threshold) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
            Eigen::MatrixXd(Kf), Eigen::MatrixXd(Mf),
            Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
        if (es.info() != Eigen::Success)
            throw NoConvergence("dense generalized eigensolve failed");
        values.assign(es.eigenvalues().data(),
                      es.eigenvalues().data() + count_eff);
        free_vectors = es.eigenvectors().leftCols(count_eff);
    } else {
        double sigma = opts.shift;
        if (!std::isfinite(sigma))
            sigma = -0.5 * (alpha * alpha + beta_max * beta_max) - 1.0;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
        const auto factorize = [&](double& sig) {
            for (int attempt = 0; attempt < 4; ++attempt) {
                ldlt.compute(Kf - sig * Mf);
                if (ldlt.info() == Eigen::Success &&
                    ldlt.vectorD().minCoeff() > 0.0)
                    return;
                // factorization trouble or eigenvalues at/below the shift:
                // deepen and retry
                sig = 1.5 * sig - 1.0;
            }
            throw FactorizationFailure(
                "shifted stiffness factorization failed");
        };
        factorize(sigma);
        const auto apply = [&](const Eigen::MatrixXd& X) -> Eigen::MatrixXd {
            return ldlt.solve(Mf * X);
        };
        const auto bapply = [&](const Eigen::MatrixXd& X) -> Eigen::MatrixXd {
            return Mf * X;
        };
        if (opts.auto_shift) {
            LanczosOptions rop;
            rop.tol = 2e-4;
            rop.max_basis = 80;
            const LanczosResult rough =
                lanczos_largest(nf, 1, apply, bapply, rop);
            const double ground = sigma + 1.0 / rough.values[0];
            const double hugged = ground - 0.05 * (1.0 + std::abs(ground));
            if (hugged > sigma) {
                sigma = hugged;
                factorize(sigma);
            }
        }

        const int k = std::min(nf, count_eff + 2);
        LanczosOptions lopt = opts.lanczos;
        if (std::isfinite(opts.converge_below) && opts.converge_below > sigma)
            lopt.loose_floor = 1.0 / (opts.converge_below - sigma);
        if (lopt.max_basis == 0) {
            // dense spectra just above the bound states (box-mode thickets)
            // need more room than the generic default; cap the basis so the
            // two cached basis blocks stay within a ~1 GB budget
            const long mem_cap = 70000000L / std::max(1, nf);
            lopt.max_basis = static_cast<int>(std::clamp<long>(
                std::max<long>(12L * k + 40L, 220L), 12L * k + 40L,
                std::max<long>(mem_cap, 12L * k + 40L)));
        }
        const LanczosResult lr = lanczos_largest(nf, k, apply, bapply, lopt);
        for (int i = 0; i < count_eff; ++i)
            values.push_back(sigma + 1.0 / lr.values[static_cast<std::size_t>(i)]);
        if (opts.want_vectors)
            free_vectors = lr.vectors.leftCols(count_eff);
    }

    EigenSolve out;
    out.spectrum.eigenvalues = std::move(values);
    out.spectrum.backend = "fem";
    out.spectrum.discretization = {ap.mesh.target_h,
                                   static_cast<int>(ap.mesh.triangles.size()),
                                   0.0};
    out.spectrum.truncated = count_eff < count;
    if (free_vectors.size() > 0) {
        out.vectors = Eigen::MatrixXd::Zero(n, count_eff);
        for (int j = 0; j < count_eff; ++j)
            for (int i = 0; i < nf; ++i)
                out.vectors(free_nodes[static_cast<std::size_t>(i)], j) =
                    free_vectors(i, j);
    }
    return out;
}

// Fraction of the discrete L2 mass of `full_vec` carried by triangles whose
// centroid lies at distance >= r from `center`, one entry per radius.  The
// zero radius always reports 1.
inline std::vector<double> eigenvector_mass_profile(
    const AssembledProblem& ap, const Eigen::VectorXd& full_vec,
    const Vec2& center, const std::vector<double>& radii) {
    if (full_vec.size() != static_cast<Eigen::Index>(ap.mesh.vertices.size()))
        throw ValidationError("eigenvector length does not match the mesh");
    std::vector<double> tri_mass(ap.mesh.triangles.size(), 0.0);
    std::vector<double> tri_dist(ap.mesh.triangles.size(), 0.0);
    double total = 0.0;
    for (std::size_t ti = 0; ti < ap.mesh.triangles.size(); ++ti) {
        const auto& t = ap.mesh.triangles[ti];
        const Vec2& a = ap.mesh.vertices[t[0]];
        const Vec2& b = ap.mesh.vertices[t[1]];
        const Vec2& c = ap.mesh.vertices[t[2]];
        const double area =
            0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
        const double v0 = full_vec[t[0]], v1 = full_vec[t[1]],
                     v2 = full_vec[t[2]];
        tri_mass[ti] = area / 6.0 *
                       (v0 * v0 + v1 * v1 + v2 * v2 + v0 * v1 + v0 * v2 +
                        v1 * v2);
        tri_dist[ti] = dist((1.0 / 3.0) * (a + b + c), center);
        total += tri_mass[ti];
    }
    if (!(total > 0.0))
        throw ValidationError("eigenvector carries no mass on the mesh");
    std::vector<double> tails;
    tails.reserve(radii.size());
    for (double r : radii) {
        double outside = 0.0;
        for (std::size_t ti = 0; ti < tri_mass.size(); ++ti)
            if (tri_dist[ti] >= r) outside += tri_mass[ti];
        tails.push_back(outside / total);
    }
    return tails;
}

// ---------------------------------------------------------------------------
// Kite spectra
// ---------------------------------------------------------------------------

enum class KiteBc { neumann, dirichlet };

namespace femdetail {

// Open polyline for the upper interaction arm, origin -> arm end.
inline Polyline upper_arm(double theta, double R, double h) {
    const double len = R / std::tan(theta);
    const Vec2 up = len * Vec2{std::cos(theta), std::sin(theta)};
    Polyline pl;
    pl.closed = false;
    pl.nodes = {Vec2{0.0, 0.0}, up};
    pl.midpoints = {0.5 * up};
    pl.lengths = {len};
    pl.cumlen = {0.0, len};
    pl.total_length = len;
    return refine(pl, h);
}

// Upper half of the kite: polygon (A, B, C) with tags 0 = side AB,
// 1 = starred half-edge through the arm endpoint, 2 = symmetry axis CA.
inline Mesh half_kite_mesh(double theta, double R, double h) {
    const Kite kite = make_kite(theta, R);
    const std::vector<Vec2> half{kite.vertices[0], kite.vertices[1],
                                 kite.vertices[2]};
    return triangulate(half, upper_arm(theta, R, h), h);
}

// Mirror the upper-half mesh across the x-axis into the full kite mesh.
// Building the full mesh this way makes the discrete operator commute with
// the reflection exactly, so the split solve and the full solve agree to
// solver precision.  Tags map as 0 -> 0 (AB), 1 -> 1 (BC), mirrored 1 -> 2
// (CD), mirrored 0 -> 3 (DA); the axis edges become interior.
inline Mesh mirror_union(const Mesh& half, double R) {
    Mesh full;
    full.target_h = half.target_h;
    const double axis_tol = 1e-9 * R;
    const int n = static_cast<int>(half.vertices.size());
    std::vector<int> mirrored(n, -1);
    full.vertices = half.vertices;
    full.constrained = half.constrained;
    for (int i = 0; i < n; ++i) {
        if (std::abs(half.vertices[i].y) <= axis_tol) {
            mirrored[i] = i;  // axis vertices are shared
        } else {
            mirrored[i] = static_cast<int>(full.vertices.size());
            full.vertices.push_back({half.vertices[i].x, -half.vertices[i].y});
            full.constrained.push_back(half.constrained[i]);
        }
    }
    full.triangles = half.triangles;
    for (const auto& t : half.triangles)
        full.triangles.push_back(
            {mirrored[t[0]], mirrored[t[2]], mirrored[t[1]]});
    for (std::size_t k = 0; k < half.boundary_edges.size(); ++k) {
        const auto& e = half.boundary_edges[k];
        const int tag = half.boundary_tags[k];
        if (tag == 2) continue;  // axis: interior after the union
        full.boundary_edges.push_back(e);
        full.boundary_tags.push_back(tag);
        full.boundary_edges.push_back({mirrored[e[1]], mirrored[e[0]]});
        full.boundary_tags.push_back(tag == 0 ? 3 : 2);
    }
    for (const auto& e : half.interaction_edges) {
        full.interaction_edges.push_back(e);
        full.interaction_edges.push_back({mirrored[e[0]], mirrored[e[1]]});
    }
    return full;
}

}  // namespace femdetail

// Assembled full-kite problem (mirror-symmetric mesh) plus the boundary
// conditions and shift that kite_eigs would use; exposed so callers can
// reach eigenvectors and mass profiles.
struct KiteProblem {
    AssembledProblem problem;
    std::map<int, PieceCondition> pieces;
    double shift = 0.0;
};

inline KiteProblem kite_problem(double theta, double R, double alpha,
                                KiteBc bc, double h) {
    if (!(alpha * R >= 4.0))
        throw ValidationError("kite spectra need alpha * R >= 4");
    if (!(h > 0.0)) throw ValidationError("mesh size must be positive");
    KiteProblem kp;
    kp.problem = assemble(femdetail::mirror_union(
        femdetail::half_kite_mesh(theta, R, h), R));
    const PieceBc outer =
        bc == KiteBc::dirichlet ? PieceBc::dirichlet : PieceBc::neumann;
    for (int tag = 0; tag < 4; ++tag) kp.pieces[tag] = {outer, 0.0};
    const double sn = std::sin(theta);
    kp.shift = -alpha * alpha / (4.0 * sn * sn) - 1.0;
    return kp;
}

// Lowest eigenvalues of the kite operator: delta interaction of strength
// alpha on the two arms, Neumann or Dirichlet outer boundary.  With
// `split` the even and odd reflection sectors are solved separately on the
// half kite and merged; the result agrees with the full solve to solver
// precision because the full mesh is the mirror union of the half mesh.
inline SpectralResult kite_eigs(double theta, double R, double alpha,
                                KiteBc bc, int count, double h,
                                bool split = false,
                                double converge_below =
                                    std::numeric_limits<double>::quiet_NaN()) {
    if (!(alpha * R >= 4.0))
        throw ValidationError("kite spectra need alpha * R >= 4");
    if (count < 1) throw ValidationError("eigenvalue count must be at least 1");
    const double sn = std::sin(theta);
    const double shift = -alpha * alpha / (4.0 * sn * sn) - 1.0;
    EigenSolveOptions opts;
    opts.shift = shift;
    opts.converge_below = converge_below;
    // deep half-angles put the safe shift far below the near-threshold
    // levels; hug the per-sector ground state instead
    opts.auto_shift = true;

    if (!split) {
        KiteProblem kp = kite_problem(theta, R, alpha, bc, h);
        return lowest_eigs(kp.problem, alpha, kp.pieces, count, opts)
            .spectrum;
    }

    const Mesh half = femdetail::half_kite_mesh(theta, R, h);
    const AssembledProblem ap = assemble(half);
    const PieceBc outer =
        bc == KiteBc::dirichlet ? PieceBc::dirichlet : PieceBc::neumann;
    std::map<int, PieceCondition> even{
        {0, {outer, 0.0}}, {1, {outer, 0.0}}, {2, {PieceBc::neumann, 0.0}}};
    std::map<int, PieceCondition> odd{
        {0, {outer, 0.0}}, {1, {outer, 0.0}}, {2, {PieceBc::dirichlet, 0.0}}};
    const SpectralResult se =
        lowest_eigs(ap, alpha, even, count, opts).spectrum;
    const SpectralResult so = lowest_eigs(ap, alpha, odd, count, opts).spectrum;
    SpectralResult merged;
    merged.backend = "fem";
    merged.discretization = se.discretization;
    merged.eigenvalues = se.eigenvalues;
    merged.eigenvalues.insert(merged.eigenvalues.end(),
                              so.eigenvalues.begin(), so.eigenvalues.end());
    std::sort(merged.eigenvalues.begin(), merged.eigenvalues.end());
    merged.eigenvalues.resize(
        std::min<std::size_t>(merged.eigenvalues.size(),
                              static_cast<std::size_t>(count)));
    merged.truncated = static_cast<int>(merged.eigenvalues.size()) < count;
    return merged;
}

// ---------------------------------------------------------------------------
// Dirichlet-box truncation for closed curves
// ---------------------------------------------------------------------------

struct BoxProblem {
    AssembledProblem problem;
    std::map<int, PieceCondition> pieces;  // all Dirichlet
    double shift = 0.0;
};

// Dirichlet box around `curve` inflated by `margin` on every side.  The
// default shift -alpha^2/2 - 1 covers smooth curves and corner half-angles
// >= pi/4; the factorization inertia check deepens it automatically
// otherwise.
inline BoxProblem box_problem(const Polyline& curve, double alpha,
                              double margin, double h,
                              double shift =
                                  std::numeric_limits<double>::quiet_NaN()) {
    if (curve.element_count() == 0)
        throw ValidationError("interaction curve is empty");
    if (!(margin * alpha >= 8.0 - 1e-12))
        throw ValidationError("box margin must be at least 8 / alpha");
    Vec2 lo = curve.nodes[0], hi = curve.nodes[0];
    const auto grow = [&](const Vec2& p) {
        lo.x = std::min(lo.x, p.x), lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x), hi.y = std::max(hi.y, p.y);
    };
    for (const Vec2& p : curve.nodes) grow(p);
    for (const Vec2& p : curve.midpoints) grow(p);
    const std::vector<Vec2> box{{lo.x - margin, lo.y - margin},
                                {hi.x + margin, lo.y - margin},
                                {hi.x + margin, hi.y + margin},
                                {lo.x - margin, hi.y + margin}};
    BoxProblem bp;
    bp.problem = assemble(triangulate(box, curve, h));
    for (int tag = 0; tag < 4; ++tag)
        bp.pieces[tag] = {PieceBc::dirichlet, 0.0};
    bp.shift = std::isfinite(shift) ? shift : -0.5 * alpha * alpha - 1.0;
    return bp;
}

// Lowest eigenvalues of the Dirichlet-box truncation; upper bounds for the
// free-plane operator that tighten as the margin grows.
inline SpectralResult box_truncated_spectrum(
    const Polyline& curve, double alpha, double margin, double h, int count,
    double shift = std::numeric_limits<double>::quiet_NaN()) {
    BoxProblem bp = box_problem(curve, alpha, margin, h, shift);
    EigenSolveOptions opts;
    opts.shift = bp.shift;
    return lowest_eigs(bp.problem, alpha, bp.pieces, count, opts).spectrum;
}

}  // namespace deltaspec
