#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "stats.hpp"

namespace ballistic {

struct AttachmentEvent {
    std::uint64_t step = 0; ///< 1-based attachment index
    std::uint32_t new_disc = 0;
    std::uint32_t parent = 0;
    double phi = 0.0;
    std::uint32_t evicted_begin = 0; ///< slice into RunRecord::evicted_pool
    std::uint32_t evicted_count = 0;
    std::uint32_t extremal_count_after = 0;
};

struct CheckpointSample {
    std::uint64_t step = 0;
    double diameter = 0.0;
    std::uint32_t extremal_count = 0;
    std::vector<double> exterior_angles;
    std::vector<double> edge_lengths;
};

struct ClusterConfig {
    std::uint64_t n_steps = 100000;
    std::uint64_t seed = 0;
    std::vector<Vec2> initial_centers = {{0.0, 0.0}};
    std::uint64_t checkpoint_start = 10; ///< first metric checkpoint
    double checkpoint_ratio = 1.1;       ///< geometric checkpoint spacing
    bool audit_every_step = false;       ///< testing hook: per-step ring audit
};

struct RunRecord {
    std::uint64_t seed = 0;
    std::uint64_t n_steps = 0;
    bool full_model = true; ///< free growth, no wedge constraint
    std::size_t n_initial = 1;
    std::vector<AttachmentEvent> events;
    std::vector<std::uint32_t> evicted_pool; ///< eviction ids, sliced per event
    std::vector<CheckpointSample> checkpoints;
    DiscStore discs;
    HullState hull;

    std::vector<std::uint32_t> evicted_of(const AttachmentEvent& e) const {
        return {evicted_pool.begin() + e.evicted_begin,
                evicted_pool.begin() + e.evicted_begin + e.evicted_count};
    }
};

inline CheckpointSample take_checkpoint(std::uint64_t step, const HullState& h,
                                        const DiscStore& d) {
    HullMetrics m = hull_metrics(h, d);
    CheckpointSample s;
    s.step = step;
    s.diameter = m.diameter;
    s.extremal_count = m.extremal_count;
    s.exterior_angles = std::move(m.exterior_angles);
    s.edge_lengths = std::move(m.edge_lengths);
    return s;
}

/// Grow a cluster for n_steps attachments. Deterministic: a (seed, config)
/// pair reproduces the record bit for bit. observe(record, event) runs after
/// every attachment (diagnostics hook; the record is mid-growth).
template <class Observe>
RunRecord run_cluster(const ClusterConfig& cfg, Observe&& observe) {
    RunRecord r;
    r.seed = cfg.seed;
    r.n_steps = cfg.n_steps;
    r.n_initial = cfg.initial_centers.size();
    for (Vec2 c : cfg.initial_centers) r.discs.add(c, -1);
    r.hull = build_hull(r.discs);
    r.events.reserve(cfg.n_steps);

    Xoshiro256 rng(cfg.seed);
    std::uint64_t next_cp = cfg.checkpoint_start;
    for (std::uint64_t step = 1; step <= cfg.n_steps; ++step) {
        const AttachmentPick pick = sample_attachment(r.hull, rng);
        AttachResult res = attach(r.hull, r.discs, pick.vertex_id, pick.phi);

        AttachmentEvent e;
        e.step = step;
        e.new_disc = res.new_id;
        e.parent = pick.vertex_id;
        e.phi = pick.phi;
        e.evicted_begin = std::uint32_t(r.evicted_pool.size());
        e.evicted_count = std::uint32_t(res.evicted.size());
        e.extremal_count_after = std::uint32_t(r.hull.size());
        r.evicted_pool.insert(r.evicted_pool.end(), res.evicted.begin(), res.evicted.end());
        r.events.push_back(e);
        observe(r, r.events.back());

        if (cfg.audit_every_step) audit_hull(r.hull, r.discs);
        if (step == next_cp || step == cfg.n_steps) {
            r.checkpoints.push_back(take_checkpoint(step, r.hull, r.discs));
            if (step == next_cp) {
                const auto scaled = std::uint64_t(double(next_cp) * cfg.checkpoint_ratio + 0.5);
                next_cp = std::max(next_cp + 1, scaled);
            }
        }
    }
    if (r.checkpoints.empty() || r.checkpoints.back().step != cfg.n_steps)
        r.checkpoints.push_back(take_checkpoint(cfg.n_steps, r.hull, r.discs));
    return r;
}

inline RunRecord run_cluster(const ClusterConfig& cfg) {
    return run_cluster(cfg, [](const RunRecord&, const AttachmentEvent&) {});
}

enum class ShapeClass { triangle, quadrangle, other };

inline const char* shape_name(ShapeClass s) {
    switch (s) {
        case ShapeClass::triangle: return "triangle";
        case ShapeClass::quadrangle: return "quadrangle";
        default: return "other";
    }
}

/// Macroscopic-edge classification: an edge is macroscopic when its length
/// is at least f_macro of the hull diameter.
inline ShapeClass classify_shape(const HullMetrics& m, double f_macro = 0.2) {
    if (m.extremal_count < 3) return ShapeClass::other;
    int macro = 0;
    for (double e : m.edge_lengths)
        if (e >= f_macro * m.diameter) ++macro;
    if (macro == 3) return ShapeClass::triangle;
    if (macro == 4) return ShapeClass::quadrangle;
    return ShapeClass::other;
}

struct GrowthFit {
    double rate = 0.0; ///< diameter per attachment step
    double r2 = 0.0;
};

/// Linear diameter-vs-step fit over the second half of the checkpoint list.
inline GrowthFit diameter_growth_rate(const RunRecord& r) {
    if (r.checkpoints.size() < 10)
        throw InsufficientData("diameter_growth_rate: fewer than 10 checkpoints");
    std::vector<double> xs, ys;
    for (std::size_t i = r.checkpoints.size() / 2; i < r.checkpoints.size(); ++i) {
        xs.push_back(double(r.checkpoints[i].step));
        ys.push_back(r.checkpoints[i].diameter);
    }
    const LinearFit f = linear_fit(xs, ys);
    return {f.slope, f.r2};
}

struct AngleSnapshot {
    std::uint64_t step = 0;
    std::vector<double> exterior_angles;
};

/// Exterior-angle snapshots at every checkpoint, in checkpoint order.
inline std::vector<AngleSnapshot> vertex_angle_series(const RunRecord& r) {
    std::vector<AngleSnapshot> out;
    out.reserve(r.checkpoints.size());
    for (const auto& c : r.checkpoints) out.push_back({c.step, c.exterior_angles});
    return out;
}

/// Rebuild the cluster by replaying recorded events (no RNG involved) and
/// verify each event's id and eviction list along the way.
inline std::pair<DiscStore, HullState> replay_events(const RunRecord& r) {
    DiscStore d;
    for (std::size_t i = 0; i < r.n_initial; ++i) d.add(r.discs.center[i], -1);
    HullState h = build_hull(d);
    for (const auto& e : r.events) {
        const AttachResult res = attach(h, d, e.parent, e.phi);
        if (res.new_id != e.new_disc)
            throw InternalInvariantError("replay: disc id diverged");
        if (res.evicted != r.evicted_of(e))
            throw InternalInvariantError("replay: eviction list diverged");
        if (h.size() != e.extremal_count_after)
            throw InternalInvariantError("replay: ring size diverged");
    }
    return {std::move(d), std::move(h)};
}

} // namespace ballistic
