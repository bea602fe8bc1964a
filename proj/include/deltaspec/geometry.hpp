#pragma once

// Closed piecewise-C3 planar curves with corners: arc primitives with exact
// arc-length parametrization, corner half-angles, kite and broken-line
// geometries, and the polyline samplings consumed by both solver backends.
//
// Conventions. Curves are traversed anti-clockwise. The junction between
// consecutive arcs carries a half-angle theta in (0, pi) defined by
//   cos(2 theta) = -<t_out, t_in>,   sin(2 theta) = -det(t_out | t_in),
// where t_in is the incoming tangent of the previous arc and t_out the
// outgoing tangent of the next; 2 theta equals the interior angle of the
// domain at the corner. Junctions whose tangents agree to 1e-7 are smooth
// (no corner, half-angle recorded as NaN); near-degenerate corners within
// 1e-3 rad of {0, pi/2, pi} are rejected.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "deltaspec/common.hpp"
#include "deltaspec/quadrature.hpp"

namespace deltaspec {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

inline Vec2 normalized(Vec2 a) {
    const double n = norm(a);
    if (n == 0.0) throw ValidationError("cannot normalize a zero vector");
    return {a.x / n, a.y / n};
}

inline Vec2 rotated(Vec2 a, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

enum class ArcKind { segment, circular, cubic };

// One C3 piece of a curve, parametrized by arc length s in [0, length].
// Cubic Bezier pieces are re-parametrized to arc length at construction
// (composite Gauss table plus Newton inversion, tolerance 1e-12).
struct Arc {
    ArcKind kind = ArcKind::segment;
    double length = 0.0;

    // segment
    Vec2 seg_a{}, seg_dir{};

    // circular
    Vec2 center{};
    double radius = 0.0;
    double phi0 = 0.0;
    double sweep = 0.0;  // signed subtended angle; >0 is anti-clockwise

    // cubic Bezier
    std::array<Vec2, 4> ctrl{};
    std::vector<double> cum;  // arc length at t = i/(cum.size()-1)

    static Arc segment(Vec2 a, Vec2 b) {
        Arc arc;
        arc.kind = ArcKind::segment;
        arc.length = dist(a, b);
        if (arc.length == 0.0)
            throw ValidationError("segment arc with coincident endpoints");
        arc.seg_a = a;
        arc.seg_dir = normalized(b - a);
        return arc;
    }

    // Traversed from angle phi_from to phi_to about `center`; increasing
    // angle is anti-clockwise. |phi_to - phi_from| may be up to 2 pi (full
    // circle, for the smooth-loop oracle).
    static Arc circular(Vec2 center, double radius, double phi_from,
                        double phi_to) {
        if (radius <= 0.0)
            throw ValidationError("circular arc needs a positive radius");
        if (phi_from == phi_to)
            throw ValidationError("circular arc with zero sweep");
        if (std::abs(phi_to - phi_from) > 2.0 * pi + 1e-12)
            throw ValidationError("circular arc sweep exceeds a full turn");
        Arc arc;
        arc.kind = ArcKind::circular;
        arc.center = center;
        arc.radius = radius;
        arc.phi0 = phi_from;
        arc.sweep = phi_to - phi_from;
        arc.length = radius * std::abs(arc.sweep);
        return arc;
    }

    static Arc cubic(const std::array<Vec2, 4>& control) {
        Arc arc;
        arc.kind = ArcKind::cubic;
        arc.ctrl = control;
        const int n_cells = 1024;
        const auto q = gauss_legendre(8);
        arc.cum.resize(n_cells + 1);
        arc.cum[0] = 0.0;
        double speed_min = std::numeric_limits<double>::max();
        for (int i = 0; i < n_cells; ++i) {
            const double ta = static_cast<double>(i) / n_cells;
            const double tb = static_cast<double>(i + 1) / n_cells;
            const double piece = gauss_on(
                q,
                [&](double t) {
                    const double v = norm(arc.deriv(t));
                    speed_min = std::min(speed_min, v);
                    return v;
                },
                ta, tb);
            arc.cum[i + 1] = arc.cum[i] + piece;
        }
        arc.length = arc.cum[n_cells];
        if (arc.length == 0.0)
            throw ValidationError("cubic arc has zero length");
        // The mean speed equals the length (unit parameter interval); a
        // speed collapsing far below it means a cusp or near-cusp, for
        // which the arc-length inversion would be ill-conditioned.
        if (speed_min < 1e-2 * arc.length)
            throw ValidationError(
                "cubic arc is nearly singular (cusps are unsupported)");
        return arc;
    }

    Vec2 bezier(double t) const {
        const double u = 1.0 - t;
        const double b0 = u * u * u, b1 = 3.0 * u * u * t, b2 = 3.0 * u * t * t,
                     b3 = t * t * t;
        return b0 * ctrl[0] + b1 * ctrl[1] + b2 * ctrl[2] + b3 * ctrl[3];
    }

    Vec2 deriv(double t) const {
        const double u = 1.0 - t;
        return 3.0 * u * u * (ctrl[1] - ctrl[0]) +
               6.0 * u * t * (ctrl[2] - ctrl[1]) +
               3.0 * t * t * (ctrl[3] - ctrl[2]);
    }

    Vec2 deriv2(double t) const {
        return 6.0 * (1.0 - t) * (ctrl[2] - 2.0 * ctrl[1] + ctrl[0]) +
               6.0 * t * (ctrl[3] - 2.0 * ctrl[2] + ctrl[1]);
    }

    // Bezier parameter at arc length s: table lookup plus safeguarded Newton.
    double param_of_length(double s) const {
        s = std::clamp(s, 0.0, length);
        const int n_cells = static_cast<int>(cum.size()) - 1;
        const auto it = std::upper_bound(cum.begin(), cum.end(), s);
        int i = static_cast<int>(it - cum.begin()) - 1;
        i = std::clamp(i, 0, n_cells - 1);
        const double ta = static_cast<double>(i) / n_cells;
        const double tb = static_cast<double>(i + 1) / n_cells;
        const auto q = gauss_legendre(8);
        auto len_from_ta = [&](double t) {
            return gauss_on(q, [&](double u) { return norm(deriv(u)); }, ta,
                            t);
        };
        const double target = s - cum[i];
        double lo = ta, hi = tb;
        double t = ta + (tb - ta) * (cum[i + 1] > cum[i]
                                         ? target / (cum[i + 1] - cum[i])
                                         : 0.5);
        for (int iter = 0; iter < 60; ++iter) {
            const double f = len_from_ta(t) - target;
            if (std::abs(f) < 1e-13 * std::max(1.0, length)) break;
            if (f > 0.0)
                hi = t;
            else
                lo = t;
            const double speed = norm(deriv(t));
            double next = t - f / speed;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            t = next;
        }
        return t;
    }

    Vec2 point(double s) const {
        switch (kind) {
            case ArcKind::segment:
                return seg_a + s * seg_dir;
            case ArcKind::circular: {
                const double phi =
                    phi0 + (sweep >= 0.0 ? s : -s) / radius;
                return center + radius * Vec2{std::cos(phi), std::sin(phi)};
            }
            case ArcKind::cubic:
                return bezier(param_of_length(s));
        }
        throw ValidationError("unknown arc kind");
    }

    Vec2 tangent(double s) const {
        switch (kind) {
            case ArcKind::segment:
                return seg_dir;
            case ArcKind::circular: {
                const double sgn = sweep >= 0.0 ? 1.0 : -1.0;
                const double phi = phi0 + sgn * s / radius;
                return sgn * Vec2{-std::sin(phi), std::cos(phi)};
            }
            case ArcKind::cubic:
                return normalized(deriv(param_of_length(s)));
        }
        throw ValidationError("unknown arc kind");
    }

    // Signed curvature; positive when turning anti-clockwise.
    double curvature(double s) const {
        switch (kind) {
            case ArcKind::segment:
                return 0.0;
            case ArcKind::circular:
                return (sweep >= 0.0 ? 1.0 : -1.0) / radius;
            case ArcKind::cubic: {
                const double t = param_of_length(s);
                const Vec2 d1 = deriv(t), d2 = deriv2(t);
                const double v = norm(d1);
                return cross(d1, d2) / (v * v * v);
            }
        }
        throw ValidationError("unknown arc kind");
    }
};

// Arc-length sampling of a curve or an open wire. Element lengths h_i are
// true arc lengths (they partition the source curve, so they sum to its
// exact length); midpoints and nodes lie on the curve.
struct Polyline {
    std::vector<Vec2> nodes;  // element i joins nodes[i] and nodes[i+1]
                              // (cyclically when closed)
    std::vector<Vec2> midpoints;
    std::vector<double> lengths;
    std::vector<double> cumlen;  // arc length at each node
    bool closed = false;
    double total_length = 0.0;

    std::size_t element_count() const { return lengths.size(); }

    Vec2 node_after(std::size_t i) const {
        return nodes[(i + 1) % nodes.size()];
    }
};

struct CurveWithCorners {
    std::vector<Arc> arcs;       // arc j runs vertices[j] -> vertices[j+1]
    std::vector<Vec2> vertices;  // start point of each arc
    // Half-angle at vertices[j], between arcs[j-1] (incoming, cyclically)
    // and arcs[j] (outgoing); NaN marks a smooth junction.
    std::vector<double> half_angles;
    bool anticlockwise = true;
    double total_length = 0.0;

    int corner_count() const {
        int m = 0;
        for (double th : half_angles)
            if (!std::isnan(th)) ++m;
        return m;
    }

    std::vector<double> corner_half_angles() const {
        std::vector<double> out;
        for (double th : half_angles)
            if (!std::isnan(th)) out.push_back(th);
        return out;
    }
};

// A maximal smooth run of arcs between two consecutive corners (an "edge"
// of the curve); when the curve has no corners the single run is the whole
// loop.
struct EdgeRun {
    std::vector<int> arc_ids;  // in traversal order
    double length = 0.0;
};

inline std::vector<EdgeRun> edge_runs(const CurveWithCorners& curve) {
    const int n = static_cast<int>(curve.arcs.size());
    std::vector<int> corner_at;
    for (int j = 0; j < n; ++j)
        if (!std::isnan(curve.half_angles[j])) corner_at.push_back(j);
    std::vector<EdgeRun> runs;
    if (corner_at.empty()) {
        EdgeRun run;
        for (int j = 0; j < n; ++j) {
            run.arc_ids.push_back(j);
            run.length += curve.arcs[j].length;
        }
        runs.push_back(std::move(run));
        return runs;
    }
    for (std::size_t c = 0; c < corner_at.size(); ++c) {
        const int first = corner_at[c];
        const int next_corner =
            corner_at[(c + 1) % corner_at.size()];
        EdgeRun run;
        int j = first;
        do {
            run.arc_ids.push_back(j);
            run.length += curve.arcs[j].length;
            j = (j + 1) % n;
        } while (j != next_corner);
        runs.push_back(std::move(run));
    }
    return runs;
}

// Signed curvature along an edge run at arc length s from its start.
inline double run_curvature(const CurveWithCorners& curve, const EdgeRun& run,
                            double s) {
    for (int id : run.arc_ids) {
        const Arc& arc = curve.arcs[id];
        if (s <= arc.length) return arc.curvature(std::max(s, 0.0));
        s -= arc.length;
    }
    const Arc& last = curve.arcs[run.arc_ids.back()];
    return last.curvature(last.length);
}

namespace detail {

inline constexpr double angle_band = 1e-3;         // rejection around 0, pi/2, pi
inline constexpr double smooth_tangent_tol = 1e-7; // |t_out - t_in| for smooth

// Half-angle at a junction, or NaN for a smooth one. Throws DegenerateAngle
// inside the rejection bands.
inline double junction_half_angle(Vec2 t_in, Vec2 t_out) {
    if (dist(t_out, t_in) <= smooth_tangent_tol)
        return std::numeric_limits<double>::quiet_NaN();
    const double c2 = -dot(t_out, t_in);
    const double s2 = -cross(t_out, t_in);
    double two_theta = std::atan2(s2, c2);
    if (two_theta <= 0.0) two_theta += 2.0 * pi;
    const double theta = 0.5 * two_theta;
    if (theta < angle_band || theta > pi - angle_band ||
        std::abs(theta - 0.5 * pi) < angle_band)
        throw DegenerateAngle("half-angle " + std::to_string(theta) +
                              " is within the rejection band around "
                              "{0, pi/2, pi}");
    // Rotation-sense consistency: the outgoing tangent must be the incoming
    // one rotated clockwise by 2 theta and flipped. Both published angle
    // conventions reduce to this identity; a violation would mean the
    // orientation conventions disagree on this input, which is reported
    // rather than silently resolved.
    if (norm(t_out + rotated(t_in, -two_theta)) > 1e-9)
        throw ValidationError(
            "corner orientation conventions disagree on this input");
    return theta;
}

// Proper or improper intersection of closed segments [a,b] and [c,d].
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
        const double v = cross(q - p, r - p);
        const double scale = norm(q - p) * (norm(r - p) + norm(r - q));
        if (std::abs(v) <= 1e-14 * std::max(1.0, scale)) return 0;
        return v > 0.0 ? 1 : -1;
    };
    auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
        return std::min(p.x, q.x) - 1e-14 <= r.x &&
               r.x <= std::max(p.x, q.x) + 1e-14 &&
               std::min(p.y, q.y) - 1e-14 <= r.y &&
               r.y <= std::max(p.y, q.y) + 1e-14;
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

// True if two non-adjacent elements of the polyline intersect. Adjacency is
// cyclic for closed polylines (consecutive elements legitimately share a
// node).
inline bool polyline_self_intersects(const Polyline& pl) {
    const std::size_t n = pl.element_count();
    if (n < 3) return false;
    std::vector<std::array<double, 4>> boxes(n);
    auto seg = [&](std::size_t i) {
        return std::pair<Vec2, Vec2>{pl.nodes[i], pl.node_after(i)};
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto [p, q] = seg(i);
        boxes[i] = {std::min(p.x, q.x), std::max(p.x, q.x),
                    std::min(p.y, q.y), std::max(p.y, q.y)};
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (pl.closed && i == 0 && j == n - 1) continue;  // cyclic pair
            if (boxes[i][1] < boxes[j][0] || boxes[j][1] < boxes[i][0] ||
                boxes[i][3] < boxes[j][2] || boxes[j][3] < boxes[i][2])
                continue;
            const auto [a, b] = seg(i);
            const auto [c, d] = seg(j);
            if (segments_intersect(a, b, c, d)) return true;
        }
    }
    return false;
}

inline double shoelace_area(const Polyline& pl) {
    double twice = 0.0;
    for (std::size_t i = 0; i < pl.element_count(); ++i)
        twice += cross(pl.nodes[i], pl.node_after(i));
    return 0.5 * twice;
}

}  // namespace detail

// Arc-length sampling: every vertex becomes a node, no element straddles a
// vertex, every element is at most h_target long. Also re-checks simplicity
// of closed curves at resolution h_target/2.
inline Polyline sample(const CurveWithCorners& curve, double h_target) {
    if (h_target <= 0.0)
        throw ValidationError("sampling step must be positive");
    auto build = [&](double h) {
        Polyline pl;
        pl.closed = true;
        pl.cumlen.push_back(0.0);
        double s0 = 0.0;
        for (const Arc& arc : curve.arcs) {
            const int m = std::max(1, static_cast<int>(
                                          std::ceil(arc.length / h - 1e-12)));
            const double he = arc.length / m;
            for (int i = 0; i < m; ++i) {
                pl.nodes.push_back(arc.point(i * he));
                pl.midpoints.push_back(arc.point((i + 0.5) * he));
                pl.lengths.push_back(he);
                pl.cumlen.push_back(s0 + (i + 1) * he);
            }
            s0 += arc.length;
        }
        pl.cumlen.pop_back();
        pl.cumlen.push_back(s0);  // guard against roundoff drift at the seam
        pl.total_length = s0;
        return pl;
    };
    const Polyline fine = build(0.5 * h_target);
    if (detail::polyline_self_intersects(fine))
        throw NotSimple("curve self-intersects at sampling resolution");
    return build(h_target);
}

// Subdivide an existing polyline so every element is at most h long.
// Straight-element polylines only sharpen their sampling (new nodes lie on
// the original elements).
inline Polyline refine(const Polyline& pl, double h) {
    if (h <= 0.0) throw ValidationError("refinement step must be positive");
    Polyline out;
    out.closed = pl.closed;
    out.cumlen.push_back(0.0);
    double s0 = 0.0;
    for (std::size_t i = 0; i < pl.element_count(); ++i) {
        const Vec2 a = pl.nodes[i], b = pl.node_after(i);
        const int m =
            std::max(1, static_cast<int>(std::ceil(pl.lengths[i] / h - 1e-12)));
        const double he = pl.lengths[i] / m;
        for (int k = 0; k < m; ++k) {
            const double ta = static_cast<double>(k) / m;
            const double tm = (k + 0.5) / m;
            out.nodes.push_back(a + ta * (b - a));
            out.midpoints.push_back(a + tm * (b - a));
            out.lengths.push_back(he);
            out.cumlen.push_back(s0 + (k + 1) * he);
        }
        s0 += pl.lengths[i];
    }
    if (!pl.closed) out.nodes.push_back(pl.nodes.back());
    out.total_length = s0;
    return out;
}

namespace detail {

inline CurveWithCorners finish_curve(std::vector<Arc> arcs,
                                     bool allow_smooth_junctions) {
    const std::size_t n = arcs.size();
    CurveWithCorners curve;
    curve.arcs = std::move(arcs);
    double scale = 1.0;
    for (const Arc& arc : curve.arcs) {
        const Vec2 p = arc.point(0.0);
        scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    }
    for (std::size_t j = 0; j < n; ++j) {
        const Arc& prev = curve.arcs[(j + n - 1) % n];
        const Arc& next = curve.arcs[j];
        if (dist(prev.point(prev.length), next.point(0.0)) > 1e-10 * scale)
            throw NotClosed("arc chain does not close at junction " +
                            std::to_string(j));
        curve.vertices.push_back(next.point(0.0));
        const double theta = junction_half_angle(prev.tangent(prev.length),
                                                 next.tangent(0.0));
        if (std::isnan(theta) && !allow_smooth_junctions)
            throw DegenerateAngle(
                "collinear vertex " + std::to_string(j) +
                " (half-angle pi/2 is excluded; drop the vertex instead)");
        curve.half_angles.push_back(theta);
        curve.total_length += next.length;
    }
    const Polyline probe = [&] {
        Polyline pl;
        pl.closed = true;
        const double h = curve.total_length / 1024.0;
        double s0 = 0.0;
        for (const Arc& arc : curve.arcs) {
            const int m = std::max(
                1, static_cast<int>(std::ceil(arc.length / h - 1e-12)));
            for (int i = 0; i < m; ++i) {
                pl.nodes.push_back(arc.point(i * arc.length / m));
                pl.lengths.push_back(arc.length / m);
            }
            s0 += arc.length;
        }
        pl.total_length = s0;
        return pl;
    }();
    if (polyline_self_intersects(probe))
        throw NotSimple("curve self-intersects");
    const double area = shoelace_area(probe);
    if (area <= 0.0)
        throw ValidationError(
            "curve must be oriented anti-clockwise (signed area > 0)");
    curve.anticlockwise = true;
    return curve;
}

}  // namespace detail

inline CurveWithCorners build_polygon(const std::vector<Vec2>& vertices) {
    if (vertices.size() < 3)
        throw ValidationError("polygon needs at least 3 vertices");
    std::vector<Arc> arcs;
    const std::size_t n = vertices.size();
    for (std::size_t j = 0; j < n; ++j)
        arcs.push_back(Arc::segment(vertices[j], vertices[(j + 1) % n]));
    // Every listed polygon vertex must be a genuine corner.
    return detail::finish_curve(std::move(arcs), false);
}

// Smooth junctions (equal tangents) are allowed here: they are artifacts of
// the arc decomposition, not corners, e.g. a full circle split into two
// arcs for the M = 0 oracle curve.
inline CurveWithCorners build_curvilinear(std::vector<Arc> arcs) {
    if (arcs.empty())
        throw ValidationError("curve needs at least one arc");
    return detail::finish_curve(std::move(arcs), true);
}

// The infinite corner truncated to two straight arms: segments from the
// origin along directions (cos theta, +-sin theta), each of length
// R/sin(theta). Returned as an open polyline running upper end -> origin ->
// lower end, one element per arm (use refine() for solver resolutions).
inline Polyline broken_line(double theta, double R) {
    if (!(theta > detail::angle_band &&
          theta < 0.5 * pi - detail::angle_band))
        throw DegenerateAngle("broken line needs theta in (0, pi/2)");
    if (R <= 0.0) throw ValidationError("broken line needs R > 0");
    const double len = R / std::sin(theta);
    const Vec2 up = len * Vec2{std::cos(theta), std::sin(theta)};
    const Vec2 dn = len * Vec2{std::cos(theta), -std::sin(theta)};
    Polyline pl;
    pl.closed = false;
    pl.nodes = {up, {0.0, 0.0}, dn};
    pl.midpoints = {0.5 * up, 0.5 * dn};
    pl.lengths = {len, len};
    pl.cumlen = {0.0, len, 2.0 * len};
    pl.total_length = 2.0 * len;
    return pl;
}

// Straight kite of half-angle theta and size R: vertex A = (-R/sin theta, 0)
// carries the angle 2 theta; the two boundary edges non-adjacent to A have
// length 2R and form the starred boundary. The interaction support is the
// pair of segments from the origin along (cos theta, +-sin theta), each of
// radial length R/tan(theta), ending at the midpoints of the starred edges.
struct Kite {
    double theta = 0.0;
    double R = 0.0;
    // vertices[0] = A (the 2 theta corner on the negative x-axis),
    // vertices[1] upper, vertices[2] right, vertices[3] lower; boundary
    // edges are (v0 v1), (v1 v2), (v2 v3), (v3 v0), of which (v1
    // v2) and (v2 v3) form the starred (non-adjacent) part.
    std::array<Vec2, 4> vertices{};

    static constexpr std::array<int, 2> starred_edges{1, 2};
    static constexpr std::array<int, 2> adjacent_edges{0, 3};

    // Open polyline upper arm end -> origin -> lower arm end.
    Polyline interaction(double h) const {
        const double len = R / std::tan(theta);
        const Vec2 up = len * Vec2{std::cos(theta), std::sin(theta)};
        const Vec2 dn = len * Vec2{std::cos(theta), -std::sin(theta)};
        Polyline pl;
        pl.closed = false;
        pl.nodes = {up, {0.0, 0.0}, dn};
        pl.midpoints = {0.5 * up, 0.5 * dn};
        pl.lengths = {len, len};
        pl.cumlen = {0.0, len, 2.0 * len};
        pl.total_length = 2.0 * len;
        return refine(pl, h);
    }
};

inline Kite make_kite(double theta, double R) {
    if (!(theta > detail::angle_band &&
          theta < 0.5 * pi - detail::angle_band))
        throw DegenerateAngle("kite needs theta in (0, pi/2)");
    if (R <= 0.0) throw ValidationError("kite needs R > 0");
    const double sn = std::sin(theta), cs = std::cos(theta);
    Kite kite;
    kite.theta = theta;
    kite.R = R;
    kite.vertices[0] = {-R / sn, 0.0};
    kite.vertices[1] = {R * std::cos(2.0 * theta) / sn, 2.0 * R * cs};
    kite.vertices[2] = {R / sn, 0.0};
    kite.vertices[3] = {kite.vertices[1].x, -kite.vertices[1].y};
    return kite;
}

}  // namespace deltaspec
