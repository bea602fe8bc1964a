#pragma once

// Conforming triangle meshes for polygonal domains with an embedded
// interaction polyline.  The generator places graded hexagonal-lattice
// points (fine near the interaction support, a factor 2 coarser away),
// excludes points from capsules around constraint segments so every
// constraint edge holds the Gabriel property (its diametral disk stays
// empty, hence appears in a plain Delaunay triangulation), triangulates by
// incremental Bowyer-Watson insertion, repairs any still-missing
// constraint by midpoint splits, and finishes with a fixed-topology
// Laplacian smoothing that cannot break conformity.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "deltaspec/common.hpp"
#include "deltaspec/geometry.hpp"

namespace deltaspec {

struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;       // counterclockwise
    std::vector<std::array<int, 2>> boundary_edges;  // on the domain boundary
    std::vector<int> boundary_tags;  // input polygon edge index per boundary edge
    std::vector<std::array<int, 2>> interaction_edges;
    std::vector<char> constrained;  // per vertex: lies on a constraint chain
    double target_h = 0.0;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }
};

namespace meshdetail {

inline double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return static_cast<double>(
        (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
        (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x));
}

// > 0 when p lies strictly inside the circumcircle of ccw triangle (a,b,c).
inline double in_circle(const Vec2& a, const Vec2& b, const Vec2& c,
                        const Vec2& p) {
    const long double ax = a.x - p.x, ay = a.y - p.y;
    const long double bx = b.x - p.x, by = b.y - p.y;
    const long double cx = c.x - p.x, cy = c.y - p.y;
    const long double a2 = ax * ax + ay * ay;
    const long double b2 = bx * bx + by * by;
    const long double c2 = cx * cx + cy * cy;
    return static_cast<double>(ax * (by * c2 - b2 * cy) -
                               ay * (bx * c2 - b2 * cx) +
                               a2 * (bx * cy - by * cx));
}

inline double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double l2 = dot(d, d);
    if (l2 <= 0.0) return dist(p, a);
    const double t = std::clamp(dot(p - a, d) / l2, 0.0, 1.0);
    return dist(p, a + t * d);
}

inline bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly,
                             double tol) {
    bool inside = false;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % m];
        if (point_segment_dist(p, a, b) <= tol) return true;  // boundary counts
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (x > p.x) inside = !inside;
        }
    }
    return inside;
}

// Incremental Bowyer-Watson Delaunay triangulation with walk location.
class Delaunay {
  public:
    explicit Delaunay(const std::vector<Vec2>& bbox_pts) {
        // Super-triangle comfortably containing everything.
        Vec2 lo = bbox_pts.front(), hi = bbox_pts.front();
        for (const Vec2& p : bbox_pts) {
            lo.x = std::min(lo.x, p.x), lo.y = std::min(lo.y, p.y);
            hi.x = std::max(hi.x, p.x), hi.y = std::max(hi.y, p.y);
        }
        const double dx = hi.x - lo.x, dy = hi.y - lo.y;
        const double d = std::max({dx, dy, 1e-12});
        const Vec2 c{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
        pts_.push_back({c.x - 20.0 * d, c.y - 12.0 * d});
        pts_.push_back({c.x + 20.0 * d, c.y - 12.0 * d});
        pts_.push_back({c.x, c.y + 22.0 * d});
        tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
        scale_ = d;
    }

    int insert(const Vec2& p) {
        const int pid = static_cast<int>(pts_.size());
        pts_.push_back(p);
        const int t0 = locate(p);
        carve_and_fill(pid, t0);
        return pid;
    }

    const std::vector<Vec2>& points() const { return pts_; }

    // Live triangles as vertex index triples (super vertices are 0, 1, 2).
    template <class F>
    void for_each_triangle(F&& f) const {
        for (const Tri& t : tris_)
            if (t.alive) f(t.v);
    }

    // Set of undirected live edges packed as (min << 32) | max.
    std::vector<std::int64_t> edge_keys() const {
        std::vector<std::int64_t> keys;
        keys.reserve(tris_.size() * 3);
        for (const Tri& t : tris_) {
            if (!t.alive) continue;
            for (int e = 0; e < 3; ++e) {
                const int u = t.v[e], v = t.v[(e + 1) % 3];
                keys.push_back(edge_key(u, v));
            }
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        return keys;
    }

    static std::int64_t edge_key(int u, int v) {
        if (u > v) std::swap(u, v);
        return (static_cast<std::int64_t>(u) << 32) |
               static_cast<std::uint32_t>(v);
    }

  private:
    struct Tri {
        std::array<int, 3> v;
        std::array<int, 3> adj;  // adj[e] shares edge (v[e], v[e+1])
        bool alive = true;
    };

    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    int last_ = 0;
    double scale_ = 1.0;

    int locate(const Vec2& p) const {
        int t = last_ >= 0 && last_ < static_cast<int>(tris_.size()) &&
                        tris_[last_].alive
                    ? last_
                    : first_alive();
        const double eps = 1e-14 * scale_ * scale_;
        for (std::size_t step = 0; step < 4 * tris_.size() + 16; ++step) {
            const Tri& tr = tris_[t];
            int move = -1;
            for (int e = 0; e < 3; ++e) {
                if (orient(pts_[tr.v[e]], pts_[tr.v[(e + 1) % 3]], p) < -eps) {
                    if (tr.adj[e] >= 0) {
                        move = tr.adj[e];
                        break;
                    }
                }
            }
            if (move < 0) return t;
            t = move;
        }
        // Walk cycled on a degeneracy: fall back to a linear scan.
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            if (!tris_[i].alive) continue;
            const Tri& tr = tris_[i];
            bool ok = true;
            for (int e = 0; e < 3 && ok; ++e)
                ok = orient(pts_[tr.v[e]], pts_[tr.v[(e + 1) % 3]], p) >= -eps;
            if (ok) return static_cast<int>(i);
        }
        throw MeshFailure("triangulation walk failed to locate a point");
    }

    int first_alive() const {
        for (std::size_t i = 0; i < tris_.size(); ++i)
            if (tris_[i].alive) return static_cast<int>(i);
        throw MeshFailure("triangulation has no live triangles");
    }

    void carve_and_fill(int pid, int t0) {
        const Vec2& p = pts_[pid];
        // Grow the cavity of triangles whose circumdisk contains p.  The
        // containing triangle is always carved, which keeps the cavity
        // nonempty under cocircular ties.
        ++gen_;
        mark_.resize(tris_.size(), 0);
        cavity_.clear();
        stack_.clear();
        cavity_.push_back(t0);
        stack_.push_back(t0);
        mark_[t0] = gen_;
        const double eps = 1e-24 * scale_ * scale_ * scale_ * scale_;
        while (!stack_.empty()) {
            const int t = stack_.back();
            stack_.pop_back();
            for (int e = 0; e < 3; ++e) {
                const int nb = tris_[t].adj[e];
                if (nb < 0 || mark_[nb] == gen_) continue;
                const Tri& ntr = tris_[nb];
                if (in_circle(pts_[ntr.v[0]], pts_[ntr.v[1]], pts_[ntr.v[2]],
                              p) > eps) {
                    mark_[nb] = gen_;
                    cavity_.push_back(nb);
                    stack_.push_back(nb);
                }
            }
        }
        // Boundary edges of the cavity, each with its outside neighbor.
        rim_.clear();
        for (int t : cavity_)
            for (int e = 0; e < 3; ++e) {
                const int nb = tris_[t].adj[e];
                if (nb >= 0 && mark_[nb] == gen_) continue;
                rim_.push_back({tris_[t].v[e], tris_[t].v[(e + 1) % 3], nb});
            }
        for (int t : cavity_) tris_[t].alive = false;

        // Fan: one new triangle per rim edge; link neighbors around p by
        // matching directed spoke edges (small linear scan).
        spoke_.clear();
        int made = -1;
        for (const Rim& r : rim_) {
            int id;
            if (!free_.empty()) {
                id = free_.back();
                free_.pop_back();
                tris_[id] = Tri{{r.a, r.b, pid}, {r.outside, -1, -1}, true};
            } else {
                id = static_cast<int>(tris_.size());
                tris_.push_back(Tri{{r.a, r.b, pid}, {r.outside, -1, -1}, true});
                mark_.push_back(0);
            }
            if (r.outside >= 0) {
                Tri& out = tris_[r.outside];
                for (int e = 0; e < 3; ++e)
                    if ((out.v[e] == r.b && out.v[(e + 1) % 3] == r.a))
                        out.adj[e] = id;
            }
            // Edge 1 of this triangle is (b, pid): it pairs with the fan
            // triangle whose rim edge starts at b (its edge 2 is (pid, b)).
            // Edge 2 is (pid, a): it pairs with the fan triangle whose rim
            // edge ends at a (its edge 1 is (a, pid)).
            for (const auto& s : spoke_) {
                if (s.start == r.b) {
                    tris_[id].adj[1] = s.tri;
                    tris_[s.tri].adj[2] = id;
                }
                if (s.end == r.a) {
                    tris_[id].adj[2] = s.tri;
                    tris_[s.tri].adj[1] = id;
                }
            }
            spoke_.push_back({r.a, r.b, id});
            made = id;
        }
        if (made < 0) throw MeshFailure("empty insertion cavity");
        last_ = made;
        for (int t : cavity_) free_.push_back(t);
    }

    struct Rim {
        int a, b, outside;
    };
    struct Spoke {
        int start;  // rim edge start vertex a
        int end;    // rim edge end vertex b
        int tri;
    };
    std::vector<int> free_;
    std::vector<int> mark_;
    std::vector<int> cavity_;
    std::vector<int> stack_;
    std::vector<Rim> rim_;
    std::vector<Spoke> spoke_;
    int gen_ = 0;
};

// Spatial hash over points for greedy minimum-distance acceptance.
class PointHash {
  public:
    explicit PointHash(double cell) : cell_(cell) {}
    void add(const Vec2& p) {
        grid_[key(p)].push_back(p);
    }
    bool any_within(const Vec2& p, double r) const {
        const int cx = coord(p.x), cy = coord(p.y);
        const int span = static_cast<int>(std::ceil(r / cell_));
        for (int ix = cx - span; ix <= cx + span; ++ix)
            for (int iy = cy - span; iy <= cy + span; ++iy) {
                const auto it = grid_.find(pack(ix, iy));
                if (it == grid_.end()) continue;
                for (const Vec2& q : it->second)
                    if (dist(p, q) < r) return true;
            }
        return false;
    }

  private:
    double cell_;
    std::unordered_map<std::int64_t, std::vector<Vec2>> grid_;
    int coord(double x) const {
        return static_cast<int>(std::floor(x / cell_));
    }
    static std::int64_t pack(int x, int y) {
        return (static_cast<std::int64_t>(x) << 32) ^
               static_cast<std::uint32_t>(y);
    }
    std::int64_t key(const Vec2& p) const { return pack(coord(p.x), coord(p.y)); }
};

struct Chain {
    std::vector<int> ids;  // registry point ids along the chain
    int tag = -1;          // polygon edge index, or -1 for interaction
};

template <class MeshT>
double mesh_min_angle_impl(const MeshT& mesh) {
    double worst = pi;
    for (const auto& t : mesh.triangles) {
        const Vec2& a = mesh.vertices[t[0]];
        const Vec2& b = mesh.vertices[t[1]];
        const Vec2& c = mesh.vertices[t[2]];
        const double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
        const auto ang = [](double x, double y, double z) {
            return std::acos(
                std::clamp((y * y + z * z - x * x) / (2.0 * y * z), -1.0, 1.0));
        };
        worst = std::min({worst, ang(la, lb, lc), ang(lb, lc, la),
                          ang(lc, la, lb)});
    }
    return worst;
}

}  // namespace meshdetail

// Graded conforming triangulation of `polygon` with the `interaction`
// polyline forced onto mesh edges.  Target size h holds near the
// interaction support and relaxes to 2h away from it (uniform h when the
// interaction is empty).  Throws MeshFailure on degenerate input, an
// interaction leaving the domain, unrecoverable constraint edges, or
// resulting min angle below the quality floor (15 degrees, relaxed to half
// the sharpest input corner or interaction bend when that is sharper).
inline Mesh triangulate(const std::vector<Vec2>& polygon,
                        const Polyline& interaction, double h) {
    using namespace meshdetail;
    if (!(h > 0.0)) throw ValidationError("mesh size must be positive");
    if (polygon.size() < 3) throw MeshFailure("polygon needs at least 3 vertices");

    // --- validate and orient the polygon ---
    std::vector<Vec2> poly = polygon;
    double area2 = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        area2 += a.x * b.y - b.x * a.y;
    }
    double diam = 0.0;
    for (const Vec2& p : poly)
        for (const Vec2& q : poly) diam = std::max(diam, dist(p, q));
    if (std::abs(area2) < 1e-14 * diam * diam)
        throw MeshFailure("polygon is degenerate");
    std::vector<int> edge_tag(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i)
        edge_tag[i] = static_cast<int>(i);
    if (area2 < 0.0) {  // reorient counterclockwise, keeping edge tags
        // reversed edge k joins original vertices (m-1-k, m-2-k), i.e. it is
        // original edge m-2-k: reverse then rotate left by one
        std::reverse(poly.begin(), poly.end());
        std::reverse(edge_tag.begin(), edge_tag.end());
        std::rotate(edge_tag.begin(), edge_tag.begin() + 1, edge_tag.end());
    }
    const double tol = 1e-9 * diam;
    for (std::size_t i = 0; i < poly.size(); ++i)  // simplicity
        for (std::size_t j = i + 1; j < poly.size(); ++j) {
            if (j == i + 1 || (i == 0 && j + 1 == poly.size())) continue;
            const Vec2 &a = poly[i], &b = poly[(i + 1) % poly.size()];
            const Vec2 &c = poly[j], &d = poly[(j + 1) % poly.size()];
            const double o1 = orient(a, b, c), o2 = orient(a, b, d);
            const double o3 = orient(c, d, a), o4 = orient(c, d, b);
            if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)))
                throw MeshFailure("polygon is self-intersecting");
        }

    const bool with_gamma = interaction.element_count() > 0;
    for (const Vec2& p : interaction.nodes)
        if (!point_in_polygon(p, poly, tol))
            throw MeshFailure("interaction support leaves the domain");

    // --- quality floor: 15 degrees, relaxed near sharp input features ---
    // A domain corner (or interaction bend) of angle phi forces triangles
    // with angles <= phi at that corner, so the floor drops to phi/2 when
    // the input itself is sharper than 30 degrees.
    const auto corner_angle = [](const Vec2& a, const Vec2& v, const Vec2& b) {
        const Vec2 u{a.x - v.x, a.y - v.y}, w{b.x - v.x, b.y - v.y};
        const double nu = std::sqrt(dot(u, u)), nw = std::sqrt(dot(w, w));
        if (nu == 0.0 || nw == 0.0) return pi;
        return std::acos(std::clamp(dot(u, w) / (nu * nw), -1.0, 1.0));
    };
    double min_feature = 0.5 * pi;
    for (std::size_t i = 0; i < poly.size(); ++i)
        min_feature = std::min(
            min_feature,
            corner_angle(poly[(i + poly.size() - 1) % poly.size()], poly[i],
                         poly[(i + 1) % poly.size()]));
    if (interaction.nodes.size() >= 3) {
        const std::size_t n = interaction.nodes.size();
        for (std::size_t k = interaction.closed ? 0 : 1;
             k < (interaction.closed ? n : n - 1); ++k)
            min_feature = std::min(
                min_feature,
                corner_angle(interaction.nodes[(k + n - 1) % n],
                             interaction.nodes[k],
                             interaction.nodes[(k + 1) % n]));
    }
    const double floor_angle = std::min(15.0 * pi / 180.0, 0.5 * min_feature);

    // --- size field: h near the interaction, 2h away, linear ramp ---
    // A coarse cover grid lists, for each cell within reach of the
    // interaction, the nearby segments; cells off the grid are certified
    // far (distance > 30h) without any segment test.
    std::vector<std::array<Vec2, 2>> gamma_segs;
    for (std::size_t i = 0; i < interaction.element_count(); ++i)
        gamma_segs.push_back({interaction.nodes[i], interaction.node_after(i)});
    const double cover_cell = 5.0 * h;
    const double cover_reach = 30.0 * h + 0.71 * cover_cell;
    std::unordered_map<std::int64_t, std::vector<int>> gamma_cover;
    const auto cover_key = [&](int ix, int iy) {
        return (static_cast<std::int64_t>(ix) << 32) ^
               static_cast<std::uint32_t>(iy);
    };
    const auto cover_coord = [&](double x) {
        return static_cast<int>(std::floor(x / cover_cell));
    };
    for (int si = 0; si < static_cast<int>(gamma_segs.size()); ++si) {
        const Vec2 &a = gamma_segs[si][0], &b = gamma_segs[si][1];
        const int x0 = cover_coord(std::min(a.x, b.x) - cover_reach);
        const int x1 = cover_coord(std::max(a.x, b.x) + cover_reach);
        const int y0 = cover_coord(std::min(a.y, b.y) - cover_reach);
        const int y1 = cover_coord(std::max(a.y, b.y) + cover_reach);
        for (int ix = x0; ix <= x1; ++ix)
            for (int iy = y0; iy <= y1; ++iy) {
                const Vec2 c{(ix + 0.5) * cover_cell, (iy + 0.5) * cover_cell};
                if (point_segment_dist(c, a, b) <= cover_reach)
                    gamma_cover[cover_key(ix, iy)].push_back(si);
            }
    }
    const auto gamma_dist = [&](const Vec2& p) {
        const auto it =
            gamma_cover.find(cover_key(cover_coord(p.x), cover_coord(p.y)));
        if (it == gamma_cover.end())
            return std::numeric_limits<double>::infinity();
        double d = std::numeric_limits<double>::infinity();
        for (int si : it->second)
            d = std::min(d, point_segment_dist(p, gamma_segs[si][0],
                                               gamma_segs[si][1]));
        return d;
    };
    const auto size_at = [&](const Vec2& p) {
        if (!with_gamma) return h;
        const double d = gamma_dist(p);
        if (d <= 20.0 * h) return h;
        if (d >= 30.0 * h) return 2.0 * h;
        return h * (1.0 + (d - 20.0 * h) / (10.0 * h));
    };

    // --- point registry with coordinate dedup ---
    std::vector<Vec2> reg;
    std::unordered_map<std::int64_t, std::vector<int>> reg_map;
    const double q = std::max(tol, 1e-12 * diam);
    const auto reg_key = [&](double x, double y) {
        return (static_cast<std::int64_t>(std::llround(x / q)) << 32) ^
               static_cast<std::int64_t>(std::llround(y / q) & 0xffffffffLL);
    };
    const auto add_point = [&](const Vec2& p) {
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                const auto it = reg_map.find(
                    reg_key(p.x + dx * q, p.y + dy * q));
                if (it == reg_map.end()) continue;
                for (int id : it->second)
                    if (dist(reg[id], p) <= 2.0 * q) return id;
            }
        const int id = static_cast<int>(reg.size());
        reg.push_back(p);
        reg_map[reg_key(p.x, p.y)].push_back(id);
        return id;
    };

    // --- constraint chains: boundary edges with forced interaction points ---
    std::vector<Chain> chains;
    const auto subdivide_into = [&](const Vec2& a, const Vec2& b,
                                    std::vector<Vec2>& out) {
        // recursively split until each piece respects the local size field
        struct Rec {
            Vec2 a, b;
        };
        std::vector<Rec> work{{a, b}};
        std::vector<Vec2> pieces;
        while (!work.empty()) {
            const Rec r = work.back();
            work.pop_back();
            const Vec2 mid = 0.5 * (r.a + r.b);
            if (dist(r.a, r.b) > 1.15 * size_at(mid)) {
                work.push_back({mid, r.b});
                work.push_back({r.a, mid});
            } else {
                pieces.push_back(r.a);  // stack order keeps a->b sequence
            }
        }
        // work stack emits in order a..b because later pieces are pushed last
        for (const Vec2& p : pieces) out.push_back(p);
        out.push_back(b);
    };

    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        // forced points: interaction nodes sitting on this edge
        std::vector<std::pair<double, Vec2>> forced{{0.0, a}, {1.0, b}};
        const Vec2 d = b - a;
        const double l2 = dot(d, d);
        for (const Vec2& p : interaction.nodes)
            if (point_segment_dist(p, a, b) <= tol) {
                const double t = std::clamp(dot(p - a, d) / l2, 0.0, 1.0);
                if (t > 1e-9 && t < 1.0 - 1e-9) forced.push_back({t, p});
            }
        std::sort(forced.begin(), forced.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        Chain ch;
        ch.tag = edge_tag[i];
        std::vector<Vec2> pts;
        for (std::size_t k = 0; k + 1 < forced.size(); ++k) {
            std::vector<Vec2> seg;
            subdivide_into(forced[k].second, forced[k + 1].second, seg);
            if (k > 0) seg.erase(seg.begin());
            for (const Vec2& p : seg) pts.push_back(p);
        }
        for (const Vec2& p : pts) ch.ids.push_back(add_point(p));
        chains.push_back(std::move(ch));
    }
    if (with_gamma) {
        Chain ch;
        ch.tag = -1;
        std::vector<Vec2> pts;
        for (std::size_t i = 0; i < interaction.element_count(); ++i) {
            std::vector<Vec2> seg;
            subdivide_into(interaction.nodes[i], interaction.node_after(i), seg);
            if (i > 0) seg.erase(seg.begin());  // shared with previous element
            for (const Vec2& p : seg) pts.push_back(p);
        }
        // for a closed interaction the final point dedups onto the first id
        for (const Vec2& p : pts) ch.ids.push_back(add_point(p));
        chains.push_back(std::move(ch));
    }
    const int n_constraint = static_cast<int>(reg.size());

    // --- constraint segment capsules (cell-mapped for fast lookup) ---
    // Lattice points are kept clear of every constraint segment's diametral
    // disk, so constraint edges hold the Gabriel property and survive the
    // Delaunay pass.
    std::vector<std::array<int, 2>> csegs;
    for (const Chain& ch : chains)
        for (std::size_t k = 0; k + 1 < ch.ids.size(); ++k)
            if (ch.ids[k] != ch.ids[k + 1])
                csegs.push_back({ch.ids[k], ch.ids[k + 1]});
    const double cap_cell = 4.0 * h;
    const double cap_radius_max = 1.7 * h;  // 0.7 * max piece length 2.3h
    std::unordered_map<std::int64_t, std::vector<int>> cseg_cover;
    const auto cap_coord = [&](double x) {
        return static_cast<int>(std::floor(x / cap_cell));
    };
    for (int si = 0; si < static_cast<int>(csegs.size()); ++si) {
        const Vec2 &a = reg[csegs[si][0]], &b = reg[csegs[si][1]];
        const double reach = cap_radius_max + 0.71 * cap_cell;
        const int x0 = cap_coord(std::min(a.x, b.x) - reach);
        const int x1 = cap_coord(std::max(a.x, b.x) + reach);
        const int y0 = cap_coord(std::min(a.y, b.y) - reach);
        const int y1 = cap_coord(std::max(a.y, b.y) + reach);
        for (int ix = x0; ix <= x1; ++ix)
            for (int iy = y0; iy <= y1; ++iy) {
                const Vec2 c{(ix + 0.5) * cap_cell, (iy + 0.5) * cap_cell};
                if (point_segment_dist(c, a, b) <= reach)
                    cseg_cover[cover_key(ix, iy)].push_back(si);
            }
    }
    const auto near_constraint = [&](const Vec2& p) {
        const auto it =
            cseg_cover.find(cover_key(cap_coord(p.x), cap_coord(p.y)));
        if (it == cseg_cover.end()) return false;
        const double s = size_at(p);
        for (int si : it->second) {
            const Vec2 &a = reg[csegs[si][0]], &b = reg[csegs[si][1]];
            const double len = dist(a, b);
            if (point_segment_dist(p, a, b) <
                std::min(0.7 * std::max(len, 0.8 * s), cap_radius_max))
                return true;
        }
        return false;
    };

    // --- graded hexagonal interior lattice with greedy spacing filter ---
    Vec2 lo = poly[0], hi = poly[0];
    for (const Vec2& p : poly) {
        lo.x = std::min(lo.x, p.x), lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x), hi.y = std::max(hi.y, p.y);
    }
    PointHash accepted(2.2 * h);
    for (int id = 0; id < n_constraint; ++id) accepted.add(reg[id]);
    std::vector<int> lattice;
    const double row = h * std::sqrt(3.0) / 2.0;
    const int nrows = static_cast<int>((hi.y - lo.y) / row) + 1;
    const int ncols = static_cast<int>((hi.x - lo.x) / h) + 2;
    for (int r = 0; r <= nrows; ++r) {
        const double y = lo.y + r * row;
        const double x0 = lo.x + (r % 2 ? 0.5 * h : 0.0);
        for (int c = 0; c <= ncols; ++c) {
            const Vec2 p{x0 + c * h, y};
            if (!point_in_polygon(p, poly, -tol)) continue;
            const double s = size_at(p);
            if (accepted.any_within(p, 0.8 * s)) continue;
            if (near_constraint(p)) continue;
            accepted.add(p);
            lattice.push_back(add_point(p));
        }
    }

    // --- Delaunay of constraints + lattice ---
    Delaunay dt(poly);
    std::vector<int> dt_id(reg.size());
    for (std::size_t i = 0; i < reg.size(); ++i)
        dt_id[i] = dt.insert(reg[i]);

    // --- constraint recovery: midpoint splits for missing edges ---
    for (int round = 0; round < 4; ++round) {
        const std::vector<std::int64_t> keys = dt.edge_keys();
        const auto edge_present = [&](int a, int b) {
            return std::binary_search(keys.begin(), keys.end(),
                                      Delaunay::edge_key(a, b));
        };
        bool all_present = true;
        for (Chain& ch : chains) {
            for (std::size_t k = 0; k + 1 < ch.ids.size();) {
                const int a = ch.ids[k], b = ch.ids[k + 1];
                if (a == b || edge_present(dt_id[a], dt_id[b])) {
                    ++k;
                    continue;
                }
                if (round == 3)
                    throw MeshFailure("constraint edge could not be recovered");
                all_present = false;
                const Vec2 mid = 0.5 * (reg[a] + reg[b]);
                const int m = static_cast<int>(reg.size());
                reg.push_back(mid);
                dt_id.push_back(dt.insert(mid));
                ch.ids.insert(ch.ids.begin() + static_cast<std::ptrdiff_t>(k) + 1,
                              m);
                k += 2;  // both halves get re-checked with next round's edges
            }
        }
        if (all_present) break;
    }

    // --- extract interior triangles, build the mesh ---
    Mesh mesh;
    mesh.target_h = h;
    const auto& dpts = dt.points();
    std::vector<int> back(dpts.size(), -1);
    // Chain members (including repair midpoints) are pinned; lattice points
    // are free to move during smoothing.
    std::vector<char> constrained_flag(dpts.size(), 0);
    for (const Chain& ch : chains)
        for (int id : ch.ids) constrained_flag[dt_id[id]] = 1;

    dt.for_each_triangle([&](const std::array<int, 3>& v) {
        if (v[0] < 3 || v[1] < 3 || v[2] < 3) return;  // super vertex
        const Vec2 cen = (1.0 / 3.0) * (dpts[v[0]] + dpts[v[1]] + dpts[v[2]]);
        if (!point_in_polygon(cen, poly, -0.25 * tol)) return;
        std::array<int, 3> t;
        for (int e = 0; e < 3; ++e) {
            if (back[v[e]] < 0) {
                back[v[e]] = static_cast<int>(mesh.vertices.size());
                mesh.vertices.push_back(dpts[v[e]]);
                mesh.constrained.push_back(constrained_flag[v[e]]);
            }
            t[e] = back[v[e]];
        }
        if (orient(mesh.vertices[t[0]], mesh.vertices[t[1]],
                   mesh.vertices[t[2]]) < 0.0)
            std::swap(t[1], t[2]);
        mesh.triangles.push_back(t);
    });
    if (mesh.triangles.empty()) throw MeshFailure("triangulation is empty");

    for (const Chain& ch : chains)
        for (std::size_t k = 0; k + 1 < ch.ids.size(); ++k) {
            if (ch.ids[k] == ch.ids[k + 1]) continue;  // dedup collapsed it
            const int a = back[dt_id[ch.ids[k]]];
            const int b = back[dt_id[ch.ids[k + 1]]];
            if (a < 0 || b < 0)
                throw MeshFailure("constraint vertex missing from the mesh");
            if (ch.tag >= 0) {
                mesh.boundary_edges.push_back({a, b});
                mesh.boundary_tags.push_back(ch.tag);
            } else {
                mesh.interaction_edges.push_back({a, b});
            }
        }

    // --- fixed-topology Laplacian smoothing of unconstrained vertices ---
    std::vector<std::vector<int>> nbr(mesh.vertices.size());
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            nbr[t[e]].push_back(t[(e + 1) % 3]);
            nbr[t[e]].push_back(t[(e + 2) % 3]);
        }
    std::vector<std::vector<int>> vtris(mesh.vertices.size());
    for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti)
        for (int e = 0; e < 3; ++e)
            vtris[mesh.triangles[ti][e]].push_back(static_cast<int>(ti));
    const auto min_incident_quality = [&](std::size_t vi) {
        double worst = std::numeric_limits<double>::infinity();
        for (int ti : vtris[vi]) {
            const auto& t = mesh.triangles[ti];
            const Vec2 &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]],
                       &c = mesh.vertices[t[2]];
            const double ar = orient(a, b, c);
            const double l2 = std::max({dot(b - a, b - a), dot(c - b, c - b),
                                        dot(a - c, a - c)});
            worst = std::min(worst, ar / l2);
        }
        return worst;
    };
    for (int pass = 0; pass < 10; ++pass) {
        for (std::size_t vi = 0; vi < mesh.vertices.size(); ++vi) {
            if (mesh.constrained[vi] || nbr[vi].empty()) continue;
            Vec2 avg{0.0, 0.0};
            for (int nj : nbr[vi]) avg = avg + mesh.vertices[nj];
            avg = (1.0 / static_cast<double>(nbr[vi].size())) * avg;
            const Vec2 old = mesh.vertices[vi];
            const double before = min_incident_quality(vi);
            mesh.vertices[vi] = avg;
            const double after = min_incident_quality(vi);
            // accept only orientation-safe moves that do not worsen the
            // worst incident triangle (smart Laplacian)
            if (!(after > 0.0 && after >= before)) mesh.vertices[vi] = old;
        }
        if (pass >= 2 && mesh_min_angle_impl(mesh) >= floor_angle) break;
    }
    if (mesh_min_angle_impl(mesh) < floor_angle)
        throw MeshFailure("mesh quality below the 15 degree angle floor");
    return mesh;
}

// Smallest interior angle of the mesh, in radians.
inline double mesh_min_angle(const Mesh& mesh) {
    return meshdetail::mesh_min_angle_impl(mesh);
}

}  // namespace deltaspec
