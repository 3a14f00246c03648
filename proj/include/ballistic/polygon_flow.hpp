#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "vec2.hpp"

namespace ballistic {

/// Convex polygon under the mean attachment flow: each vertex with exterior
/// angle E moves along its normal-cone bisector at speed sin(E/2)/pi per
/// attachment step n.
struct PolygonState {
    std::vector<Vec2> vertices; ///< CCW
    double n = 0.0;             ///< continuous step-time
};

inline std::vector<double> polygon_exterior_angles(const std::vector<Vec2>& v) {
    const std::size_t k = v.size();
    std::vector<double> e(k);
    for (std::size_t i = 0; i < k; ++i) {
        const Vec2 din = v[i] - v[(i + k - 1) % k];
        const Vec2 dout = v[(i + 1) % k] - v[i];
        e[i] = signed_angle(din, dout);
    }
    return e;
}

inline std::vector<double> polygon_interior_angles(const std::vector<Vec2>& v) {
    std::vector<double> a = polygon_exterior_angles(v);
    for (double& x : a) x = pi - x;
    return a;
}

inline double min_edge_length(const std::vector<Vec2>& v) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i)
        best = std::min(best, dist(v[i], v[(i + 1) % v.size()]));
    return best;
}

inline void validate_flow_polygon(const std::vector<Vec2>& v) {
    if (v.size() < 3) throw DegeneratePolygon("flow needs at least 3 vertices");
    for (double e : polygon_exterior_angles(v))
        if (!(e > 0.0)) throw ConfigurationError("flow polygon must be strictly convex CCW");
}

/// Vertex velocities of the flow field. The bisector of the normal cone at
/// vertex i is the incoming edge normal rotated by half the exterior angle;
/// speeds clamp E at 0 so RK4 stages stay finite next to a merge.
inline std::vector<Vec2> flow_velocities(const std::vector<Vec2>& v) {
    const std::size_t k = v.size();
    std::vector<Vec2> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        const Vec2 din = v[i] - v[(i + k - 1) % k];
        const Vec2 dout = v[(i + 1) % k] - v[i];
        const double e = std::max(0.0, signed_angle(din, dout));
        const double dir = angle_of(din) - 0.5 * pi + 0.5 * e; // bisector
        out[i] = unit_vector(dir) * (std::sin(0.5 * e) / pi);
    }
    return out;
}

struct MergeEvent {
    double n = 0.0;
    std::size_t vertex_index = 0; ///< index at removal time
    Vec2 position;
    double exterior_angle = 0.0;
};

constexpr double eps_merge = 1e-6; ///< rad; below this a vertex has no influence

/// One RK4 step of size dn over the whole vertex field, then a merge sweep
/// removing every vertex whose exterior angle fell under eps_merge. Merges
/// are appended to `log` when given. Throws DegeneratePolygon when fewer
/// than 3 vertices remain.
inline PolygonState flow_step(const PolygonState& s, double dn,
                              std::vector<MergeEvent>* log = nullptr) {
    if (!(dn > 0.0)) throw ConfigurationError("flow_step: dn must be > 0");
    validate_flow_polygon(s.vertices);
    const std::size_t k = s.vertices.size();

    const std::vector<Vec2> k1 = flow_velocities(s.vertices);
    auto shifted = [&](const std::vector<Vec2>& vel, double f) {
        std::vector<Vec2> w(k);
        for (std::size_t i = 0; i < k; ++i) w[i] = s.vertices[i] + vel[i] * (f * dn);
        return w;
    };
    const std::vector<Vec2> k2 = flow_velocities(shifted(k1, 0.5));
    const std::vector<Vec2> k3 = flow_velocities(shifted(k2, 0.5));
    const std::vector<Vec2> k4 = flow_velocities(shifted(k3, 1.0));

    PolygonState next;
    next.n = s.n + dn;
    next.vertices.resize(k);
    for (std::size_t i = 0; i < k; ++i)
        next.vertices[i] =
            s.vertices[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dn / 6.0);

    // merge sweep; removing a vertex widens its neighbors, so re-scan
    for (bool removed = true; removed;) {
        removed = false;
        const std::vector<double> e = polygon_exterior_angles(next.vertices);
        for (std::size_t i = 0; i < next.vertices.size(); ++i) {
            if (e[i] >= eps_merge) continue;
            if (next.vertices.size() == 3)
                throw DegeneratePolygon("flow_step: merge left fewer than 3 vertices");
            if (log) log->push_back({next.n, i, next.vertices[i], e[i]});
            next.vertices.erase(next.vertices.begin() + std::ptrdiff_t(i));
            removed = true;
            break;
        }
    }
    return next;
}

struct FlowOptions {
    double dn_scale = 0.01;  ///< adaptive step = dn_scale * shortest edge
    double dn_cap = 0.1;     ///< upper bound on the step size
    double dn_floor = 1e-12; ///< guards against a vanishing shortest edge
    std::uint64_t max_steps = 1000000;
    bool stop_at_merge = false;
};

struct FlowResult {
    PolygonState state;
    std::vector<MergeEvent> merges;
    std::uint64_t steps = 0;
    bool reached_target = false;
};

/// Integrate the flow to n_target with the adaptive step; observe(state) is
/// called after every accepted step. Returns early at the step cap, on a
/// merge when stop_at_merge is set, and never overshoots n_target.
template <class Observe>
FlowResult flow_run(PolygonState s, double n_target, const FlowOptions& opt, Observe&& observe) {
    validate_flow_polygon(s.vertices);
    FlowResult r;
    while (s.n < n_target && r.steps < opt.max_steps) {
        double dn = std::min(opt.dn_scale * min_edge_length(s.vertices), opt.dn_cap);
        dn = std::min(std::max(dn, opt.dn_floor), n_target - s.n);
        const std::size_t merges_before = r.merges.size();
        s = flow_step(s, dn, &r.merges);
        r.steps += 1;
        observe(s);
        if (opt.stop_at_merge && r.merges.size() > merges_before) break;
    }
    r.reached_target = s.n >= n_target;
    r.state = std::move(s);
    return r;
}

inline FlowResult flow_run(PolygonState s, double n_target, const FlowOptions& opt = {}) {
    return flow_run(std::move(s), n_target, opt, [](const PolygonState&) {});
}

struct BetaRateResult {
    double fd_rate = 0.0;      ///< finite-difference d(beta)/dn
    double formula_rate = 0.0; ///< sin(beta) sin(gamma) / (pi r)
};

/// Two-vertex local configuration: x1 at the origin, x2 at (r, 0), shared
/// edge normal (0, 1), traversal passing x2 before x1. The half exterior
/// angles must satisfy 2 theta1 = pi/2 - beta - gamma and
/// 2 theta2 = pi/2 + beta - gamma; beta is the inclination the segment
/// x1 x2 picks up as both vertices move. One frozen-velocity step of size h
/// gives the finite-difference rate next to the closed form.
inline BetaRateResult beta_rate_check(double r, double beta, double gamma, double theta1,
                                      double theta2, double h) {
    if (!(r > 0.0)) throw ConfigurationError("beta_rate_check: r must be > 0");
    if (!(h > 0.0)) throw ConfigurationError("beta_rate_check: h must be > 0");
    if (!(theta1 > 0.0 && theta1 < 0.5 * pi) || !(theta2 > 0.0 && theta2 < 0.5 * pi))
        throw ConfigurationError("beta_rate_check: theta outside (0, pi/2)");
    if (std::abs(2.0 * theta1 - (0.5 * pi - beta - gamma)) > 1e-9 ||
        std::abs(2.0 * theta2 - (0.5 * pi + beta - gamma)) > 1e-9)
        throw ConfigurationError("beta_rate_check: angle constraints violated");

    const Vec2 x1{0.0, 0.0}, x2{r, 0.0};
    const Vec2 v1 = Vec2{-std::sin(theta1), std::cos(theta1)} * (std::sin(theta1) / pi);
    const Vec2 v2 = Vec2{std::sin(theta2), std::cos(theta2)} * (std::sin(theta2) / pi);
    const Vec2 before = x2 - x1;
    const Vec2 after = (x2 + v2 * h) - (x1 + v1 * h);

    BetaRateResult out;
    out.fd_rate = signed_angle(before, after) / h;
    out.formula_rate = std::sin(beta) * std::sin(gamma) / (pi * r);
    return out;
}

} // namespace ballistic
