#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "vec2.hpp"

namespace ballistic {

/// Absolute geometric tolerance, in disc-diameter units.
constexpr double eps_geom = 1e-9;

/// Append-only store of unit-diameter disc centers. Disc id equals birth
/// order; only centers are kept (the disc hull is the center hull dilated
/// by the radius 1/2, so the radius never appears in hull bookkeeping).
struct DiscStore {
    std::vector<Vec2> center;
    std::vector<std::int64_t> parent; ///< -1 for initial discs

    std::uint32_t add(Vec2 c, std::int64_t par) {
        center.push_back(c);
        parent.push_back(par);
        return std::uint32_t(center.size() - 1);
    }
    std::size_t size() const { return center.size(); }
};

struct Disc {
    std::uint32_t id;
    Vec2 center;
    std::int64_t parent;
    std::uint32_t birth() const { return id; }
};

inline Disc disc_at(const DiscStore& d, std::uint32_t id) {
    return {id, d.center[id], d.parent[id]};
}

inline double linf(Vec2 a) { return std::max(std::abs(a.x), std::abs(a.y)); }

/// Strict left turn at b along a->b->c. Turns whose cross product does not
/// exceed eps_geom times the larger adjacent edge scale count as collinear;
/// such vertices carry zero arc measure and are evicted from rings.
inline bool strict_left_turn(Vec2 a, Vec2 b, Vec2 c) {
    const Vec2 d1 = b - a, d2 = c - b;
    const double scale = std::max(1.0, std::max(linf(d1), linf(d2)));
    return cross(d1, d2) > eps_geom * scale;
}

/// Edge s->t of a CCW ring is visible from q when q lies right of (or on)
/// the directed edge line; the on-line case counts as visible so borderline
/// collinear vertices get evicted rather than kept with zero measure.
inline bool edge_visible_from(Vec2 s, Vec2 t, Vec2 q) {
    const Vec2 d = t - s, w = q - s;
    const double scale = std::max(1.0, std::max(linf(d), linf(w)));
    return cross(d, w) < eps_geom * scale;
}

/// Hull ring vertex: disc id plus its outward-normal interval [lo, lo+measure),
/// the half-open arc of directions in which this disc is the support point.
/// The measure is the exterior angle; measures tile [0, 2pi).
struct HullVertex {
    std::uint32_t id = 0;
    double lo = 0.0;
    double measure = 0.0;
};

struct HullState {
    std::vector<HullVertex> ring; ///< CCW order
    bool angles_dirty = false;    ///< set while a structural edit is in flight

    std::size_t size() const { return ring.size(); }

    int find(std::uint32_t id) const {
        for (std::size_t i = 0; i < ring.size(); ++i)
            if (ring[i].id == id) return int(i);
        return -1;
    }

    double measure_sum() const {
        double s = 0.0;
        for (const auto& v : ring) s += v.measure;
        return s;
    }
};

/// Recompute the normal interval of one ring slot from its neighbors.
inline void refresh_interval(HullState& h, const DiscStore& d, std::size_t slot) {
    const std::size_t k = h.ring.size();
    HullVertex& v = h.ring[slot];
    const Vec2 c = d.center[v.id];
    if (k == 1) {
        v.lo = 0.0;
        v.measure = two_pi;
        return;
    }
    if (k == 2) {
        const Vec2 other = d.center[h.ring[1 - slot].id];
        v.lo = angle_of(perp_cw(c - other));
        v.measure = pi;
        return;
    }
    const Vec2 cp = d.center[h.ring[(slot + k - 1) % k].id];
    const Vec2 cn = d.center[h.ring[(slot + 1) % k].id];
    const Vec2 din = c - cp, dout = cn - c;
    const double turn = signed_angle(din, dout);
    if (!(turn > 0.0))
        throw InternalInvariantError("refresh_interval: non-convex corner");
    v.lo = angle_of(perp_cw(din));
    v.measure = turn;
}

inline void refresh_all_intervals(HullState& h, const DiscStore& d) {
    for (std::size_t i = 0; i < h.ring.size(); ++i) refresh_interval(h, d, i);
    h.angles_dirty = false;
}

/// O(n) expected min-gap validation on a unit grid; throws OverlapError if
/// any two centers are closer than 1 - eps_geom (discs may touch, not overlap).
inline void validate_min_gap(const std::vector<Vec2>& c) {
    const double lim2 = (1.0 - eps_geom) * (1.0 - eps_geom);
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
    grid.reserve(c.size() * 2);
    auto key = [](double x, double y) {
        const auto ix = std::uint64_t(std::uint32_t(std::int32_t(std::floor(x))));
        const auto iy = std::uint64_t(std::uint32_t(std::int32_t(std::floor(y))));
        return (ix << 32) | iy;
    };
    for (std::uint32_t i = 0; i < c.size(); ++i) {
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                const auto it = grid.find(key(c[i].x + dx, c[i].y + dy));
                if (it == grid.end()) continue;
                for (std::uint32_t j : it->second)
                    if (norm2(c[i] - c[j]) < lim2)
                        throw OverlapError("centers closer than one diameter");
            }
        grid[key(c[i].x, c[i].y)].push_back(i);
    }
}

/// Batch hull over all stored centers (Andrew monotone chain with the same
/// collinearity tolerance as the incremental path). Validates the min gap.
inline HullState build_hull(const DiscStore& discs) {
    const std::size_t n = discs.size();
    if (n == 0) throw EmptyInput("build_hull: no discs");
    validate_min_gap(discs.center);

    std::vector<std::uint32_t> idx(n);
    for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        const Vec2 pa = discs.center[a], pb = discs.center[b];
        return pa.x != pb.x ? pa.x < pb.x : pa.y < pb.y;
    });

    auto chain = [&](auto begin, auto end) {
        std::vector<std::uint32_t> out;
        for (auto it = begin; it != end; ++it) {
            while (out.size() >= 2 &&
                   !strict_left_turn(discs.center[out[out.size() - 2]],
                                     discs.center[out[out.size() - 1]], discs.center[*it]))
                out.pop_back();
            out.push_back(*it);
        }
        return out;
    };
    auto lower = chain(idx.begin(), idx.end());
    auto upper = chain(idx.rbegin(), idx.rend());

    HullState h;
    for (std::size_t i = 0; i + 1 < lower.size(); ++i) h.ring.push_back({lower[i], 0, 0});
    for (std::size_t i = 0; i + 1 < upper.size(); ++i) h.ring.push_back({upper[i], 0, 0});
    if (h.ring.empty()) h.ring.push_back({idx[0], 0, 0}); // single disc
    refresh_all_intervals(h, discs);
    return h;
}

inline HullState build_hull(const std::vector<Vec2>& centers) {
    DiscStore d;
    for (Vec2 c : centers) d.add(c, -1);
    return build_hull(d);
}

struct AttachmentPick {
    std::uint32_t vertex_id = 0;
    double phi = 0.0; ///< global outward-normal direction, in [0, 2pi)
};

/// One uniform draw over the total arc measure picks the vertex (weight
/// proportional to its exterior angle) and the direction within its
/// interval jointly.
template <class Rng>
AttachmentPick sample_attachment(const HullState& h, Rng& rng) {
    if (h.ring.empty()) throw EmptyInput("sample_attachment: empty hull");
    const double total = h.measure_sum();
    double target = rng.uniform01() * total;
    for (std::size_t i = 0; i < h.ring.size(); ++i) {
        const HullVertex& v = h.ring[i];
        if (target < v.measure || i + 1 == h.ring.size()) {
            const double off = std::min(target, v.measure * (1.0 - 1e-16));
            return {v.id, wrap_angle(v.lo + off)};
        }
        target -= v.measure;
    }
    throw InternalInvariantError("sample_attachment: fell off the ring");
}

struct AttachResult {
    std::uint32_t new_id = 0;
    std::vector<std::uint32_t> evicted;
};

namespace detail {

/// Attach when the ring is a 2-gon (all centers collinear so far).
inline void attach_to_segment(HullState& h, DiscStore& d, AttachResult& res, Vec2 q) {
    const std::uint32_t ia = h.ring[0].id, ib = h.ring[1].id;
    const Vec2 a = d.center[ia], b = d.center[ib];
    const Vec2 e = b - a, w = q - a;
    const double scale = std::max(1.0, std::max(linf(e), linf(w)));
    const double cr = cross(e, w);
    if (std::abs(cr) <= eps_geom * scale) {
        // still collinear: keep the two extreme points along the segment
        struct P { double t; std::uint32_t id; };
        P pts[3] = {{0.0, ia}, {dot(e, e), ib}, {dot(w, e), res.new_id}};
        auto lo = std::min_element(pts, pts + 3, [](P l, P r) { return l.t < r.t; });
        auto hi = std::max_element(pts, pts + 3, [](P l, P r) { return l.t < r.t; });
        for (const P& p : pts)
            if (p.id != lo->id && p.id != hi->id && p.id != res.new_id)
                res.evicted.push_back(p.id);
        h.ring = {{lo->id, 0, 0}, {hi->id, 0, 0}};
    } else if (cr > 0.0) {
        h.ring = {{ia, 0, 0}, {ib, 0, 0}, {res.new_id, 0, 0}};
    } else {
        h.ring = {{ia, 0, 0}, {res.new_id, 0, 0}, {ib, 0, 0}};
    }
    refresh_all_intervals(h, d);
}

/// General case: locate the contiguous run of edges visible from q around
/// the parent vertex, evict the run's interior vertices, splice q in. Cost
/// is O(evictions + 1), amortized O(1) over a run.
inline void attach_general(HullState& h, DiscStore& d, AttachResult& res, int slot, Vec2 q) {
    const int k = int(h.ring.size());
    auto cen = [&](int i) { return d.center[h.ring[((i % k) + k) % k].id]; };
    auto visible = [&](int e) { return edge_visible_from(cen(e), cen(e + 1), q); };

    int seed = -1;
    if (visible(slot)) seed = slot;
    else if (visible(slot - 1)) seed = slot - 1;
    else throw InternalInvariantError("attach: new center not outside the hull");

    int i = seed, j = seed, run = 1;
    while (run < k && visible(i - 1)) { --i; ++run; }
    while (run < k && visible(j + 1)) { ++j; ++run; }
    if (run >= k)
        throw InternalInvariantError("attach: every edge visible from new center");

    // survivors, CCW from the end of the last visible edge to the start of
    // the first one; the new vertex closes the ring between them
    std::vector<HullVertex> next_ring;
    next_ring.reserve(std::size_t(k - run + 2));
    for (int t = j + 1;; ++t) {
        next_ring.push_back(h.ring[((t % k) + k) % k]);
        if (((t % k) + k) % k == ((i % k) + k) % k) break;
    }
    for (int t = i + 1; t <= j; ++t)
        res.evicted.push_back(h.ring[((t % k) + k) % k].id);
    next_ring.push_back({res.new_id, 0, 0});
    h.ring = std::move(next_ring);

    const std::size_t m = h.ring.size();
    refresh_interval(h, d, 0);         // vertex after the new one
    refresh_interval(h, d, m - 2);     // vertex before the new one
    refresh_interval(h, d, m - 1);     // the new vertex
    h.angles_dirty = false;
}

} // namespace detail

/// Attach a new disc tangent to `vertex_id` in outward direction phi (must
/// lie in that vertex's normal interval). The new center is the parent
/// center plus the unit vector of phi; the ring update evicts any vertices
/// that stop being extremal, the parent included.
inline AttachResult attach(HullState& h, DiscStore& discs, std::uint32_t vertex_id, double phi) {
    const int slot = h.find(vertex_id);
    if (slot < 0) throw InternalInvariantError("attach: vertex not on the hull");
    const Vec2 q = discs.center[vertex_id] + unit_vector(phi);

    AttachResult res;
    res.new_id = discs.add(q, std::int64_t(vertex_id));
    h.angles_dirty = true;

    const std::size_t k = h.ring.size();
    if (k == 1) {
        h.ring.push_back({res.new_id, 0, 0});
        refresh_all_intervals(h, discs);
    } else if (k == 2) {
        detail::attach_to_segment(h, discs, res, q);
    } else {
        detail::attach_general(h, discs, res, slot, q);
    }
    h.angles_dirty = false;
    return res;
}

struct HullMetrics {
    double diameter = 0.0; ///< disc-boundary diameter: center diameter + 1
    std::uint32_t extremal_count = 0;
    std::vector<double> edge_lengths;    ///< ring order; k>=3: k edges, k==2: one
    std::vector<double> exterior_angles; ///< ring order, equals interval measures
};

inline HullMetrics hull_metrics(const HullState& h, const DiscStore& d) {
    HullMetrics m;
    const std::size_t k = h.ring.size();
    m.extremal_count = std::uint32_t(k);
    double best = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            best = std::max(best, norm2(d.center[h.ring[i].id] - d.center[h.ring[j].id]));
    m.diameter = std::sqrt(best) + 1.0;
    if (k == 2) {
        m.edge_lengths.push_back(dist(d.center[h.ring[0].id], d.center[h.ring[1].id]));
    } else if (k >= 3) {
        for (std::size_t i = 0; i < k; ++i)
            m.edge_lengths.push_back(
                dist(d.center[h.ring[i].id], d.center[h.ring[(i + 1) % k].id]));
    }
    for (const auto& v : h.ring) m.exterior_angles.push_back(v.measure);
    return m;
}

/// Full consistency audit of a ring: stored intervals match recomputed ones,
/// intervals tile [0, 2pi) contiguously, total measure is 2pi within 1e-9,
/// and every corner is strictly convex. Throws InternalInvariantError.
inline void audit_hull(const HullState& h, const DiscStore& d) {
    const std::size_t k = h.ring.size();
    if (k == 0) throw InternalInvariantError("audit: empty ring");
    if (h.angles_dirty) throw InternalInvariantError("audit: angles_dirty left set");

    HullState copy = h;
    for (std::size_t i = 0; i < k; ++i) {
        refresh_interval(copy, d, i);
        const double dlo = std::abs(wrap_angle(copy.ring[i].lo - h.ring[i].lo + pi) - pi);
        if (dlo > 1e-12 || std::abs(copy.ring[i].measure - h.ring[i].measure) > 1e-12)
            throw InternalInvariantError("audit: stored interval drifted");
    }
    if (std::abs(h.measure_sum() - two_pi) > 1e-9)
        throw InternalInvariantError("audit: angle sum off 2pi");
    for (std::size_t i = 0; i < k && k >= 3; ++i) {
        const Vec2 a = d.center[h.ring[i].id];
        const Vec2 b = d.center[h.ring[(i + 1) % k].id];
        const Vec2 c = d.center[h.ring[(i + 2) % k].id];
        if (!strict_left_turn(a, b, c))
            throw InternalInvariantError("audit: ring not strictly convex");
        // contiguity: next interval starts where this one ends
        const double end = wrap_angle(h.ring[i].lo + h.ring[i].measure);
        const double gap = std::abs(wrap_angle(end - h.ring[(i + 1) % k].lo + pi) - pi);
        if (gap > 1e-9) throw InternalInvariantError("audit: interval tiling gap");
    }
}

} // namespace ballistic
