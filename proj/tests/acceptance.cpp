// Acceptance gate: one numbered end-to-end check per invocation, printing a
// single PASS/FAIL line with the measured numbers. Run as `acceptance <k>`
// for k in 1..12, or with no argument for the full battery.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ballistic/branches.hpp"
#include "ballistic/cluster.hpp"
#include "ballistic/escape.hpp"
#include "ballistic/polygon_flow.hpp"
#include "ballistic/rng.hpp"
#include "ballistic/vertex_chain.hpp"
#include "support/oracles.hpp"

using namespace ballistic;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::vector<std::uint32_t> canonical_ring_ids(const HullState& h) {
    std::vector<std::uint32_t> ids;
    ids.reserve(h.size());
    for (const auto& v : h.ring) ids.push_back(v.id);
    const auto mn = std::min_element(ids.begin(), ids.end());
    std::rotate(ids.begin(), mn, ids.end());
    return ids;
}

// ------------------------------------------------------------- criterion 1
// Incremental hull maintenance equals a from-scratch rebuild throughout
// 1e4-step runs over 20 seeds, inside a 10 second budget.
bool criterion_1() {
    const auto t0 = clock_type::now();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ClusterConfig cfg;
        cfg.n_steps = 10000;
        cfg.seed = seed;
        bool ok = true;
        run_cluster(cfg, [&](const RunRecord& r, const AttachmentEvent& e) {
            if (e.step % 250 != 0 && e.step != r.n_steps) return;
            const HullState batch = build_hull(r.discs);
            if (canonical_ring_ids(r.hull) != canonical_ring_ids(batch)) ok = false;
            audit_hull(r.hull, r.discs);
        });
        if (!ok) {
            std::printf("criterion 1: FAIL incremental and batch hulls diverged (seed %llu)\n",
                        (unsigned long long)seed);
            return false;
        }
    }
    const double dt = seconds_since(t0);
    const bool pass = dt < 10.0;
    std::printf("criterion 1: %s incremental == batch at every probe, 20 seeds x 1e4 steps "
                "in %.2f s (budget 10 s)\n",
                pass ? "PASS" : "FAIL", dt);
    return pass;
}

// ------------------------------------------------------------- criterion 2
// The vertex arc measures tile the circle: sum stays within 1e-9 of 2 pi
// after every one of 1e6 attachments, inside a 60 second budget.
bool criterion_2() {
    const auto t0 = clock_type::now();
    ClusterConfig cfg;
    cfg.n_steps = 1000000;
    cfg.seed = 2;
    double worst = 0.0;
    run_cluster(cfg, [&](const RunRecord& r, const AttachmentEvent&) {
        worst = std::max(worst, std::abs(r.hull.measure_sum() - two_pi));
    });
    const double dt = seconds_since(t0);
    const bool pass = worst <= 1e-9 && dt < 60.0;
    std::printf("criterion 2: %s worst |angle sum - 2pi| = %.3g over 1e6 attachments "
                "in %.1f s (tolerance 1e-9, budget 60 s)\n",
                pass ? "PASS" : "FAIL", worst, dt);
    return pass;
}

// ------------------------------------------------------------- criterion 3
// Few-vertex attractor: the median extremal count after 1e5 steps lies in
// [3, 12] across 30 seeds.
bool criterion_3() {
    std::vector<double> counts;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        ClusterConfig cfg;
        cfg.n_steps = 100000;
        cfg.seed = seed;
        const RunRecord r = run_cluster(cfg);
        counts.push_back(double(r.checkpoints.back().extremal_count));
    }
    const double med = median(counts);
    const bool pass = med >= 3.0 && med <= 12.0;
    std::printf("criterion 3: %s median extremal count %.1f over 30 seeds at 1e5 steps "
                "(required within [3, 12])\n",
                pass ? "PASS" : "FAIL", med);
    return pass;
}

// ------------------------------------------------------------- criterion 4
// Ballistic radial growth: the second-half diameter-vs-step fit has
// r^2 >= 0.99 for at least 90% of 30 seeds.
bool criterion_4() {
    int good = 0;
    double worst_r2 = 1.0;
    for (std::uint64_t seed = 101; seed <= 130; ++seed) {
        ClusterConfig cfg;
        cfg.n_steps = 100000;
        cfg.seed = seed;
        const RunRecord r = run_cluster(cfg);
        const GrowthFit g = diameter_growth_rate(r);
        worst_r2 = std::min(worst_r2, g.r2);
        if (g.r2 >= 0.99 && g.rate > 0.0) ++good;
    }
    const bool pass = good >= 27;
    std::printf("criterion 4: %s linear growth r2 >= 0.99 in %d/30 runs (required >= 27, "
                "worst r2 %.4f)\n",
                pass ? "PASS" : "FAIL", good, worst_r2);
    return pass;
}

// ------------------------------------------------------------- criterion 5
// One-step moment quadrature matches the large-z closed forms to 1e-3
// relative at z = 1e4 across a (theta, x) grid.
bool criterion_5() {
    const double z = 1e4;
    bool pass = true;
    double worst = 0.0;
    for (double theta : {0.3 * pi, pi / 3.0, 0.45 * pi}) {
        const AsymptoticParams p = asymptotic_params(theta);
        for (double x : {1e-6, 0.1, 0.3}) {
            const OneStepMoments m = one_step_moments_quadrature(x, z, theta);
            const double drift_rel = std::abs(z * m.drift - x * p.drift_coef) /
                                     (x * p.drift_coef);
            const double var_rel =
                std::abs(z * z * m.variance - p.var_coef(x)) / p.var_coef(x);
            worst = std::max({worst, drift_rel, var_rel});
            if (drift_rel > 1e-3 || var_rel > 1e-3) pass = false;
        }
    }
    std::printf("criterion 5: %s drift and variance quadrature vs asymptotic forms, "
                "worst relative error %.3g at z = 1e4 (tolerance 1e-3)\n",
                pass ? "PASS" : "FAIL", worst);
    return pass;
}

// ------------------------------------------------------------- criterion 6
// The mean z-increment closed form agrees with direct quadrature of sin
// over both exposed arcs to 1e-12 on the same grid.
bool criterion_6() {
    using quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    bool pass = true;
    double worst = 0.0;
    for (double theta : {0.3 * pi, pi / 3.0, 0.45 * pi}) {
        for (double x : {0.0, 0.1, 0.3}) {
            const double atx = std::atan(x);
            double err = 0.0;
            const auto f = [](double a) { return std::sin(a); };
            const double left = quad::integrate(f, -atx, theta, 12, 1e-14, &err);
            const double right = quad::integrate(f, atx, theta, 12, 1e-14, &err);
            const double numeric = (left + right) / (2.0 * theta);
            const double diff = std::abs(numeric - mean_dz(x, theta));
            worst = std::max(worst, diff);
            if (diff > 1e-12) pass = false;
        }
    }
    std::printf("criterion 6: %s mean z-increment closed form vs quadrature, worst "
                "|diff| = %.3g (tolerance 1e-12)\n",
                pass ? "PASS" : "FAIL", worst);
    return pass;
}

// ------------------------------------------------------------- criterion 7
// Escape-time tails: both integrators recover the predicted exponent mu
// within 0.15 at four angles, and their hit-time samples agree under a
// two-sample KS test (p > 0.001).
bool criterion_7() {
    const double thetas[] = {0.30 * pi, 0.35 * pi, 0.40 * pi, 0.45 * pi};
    const std::uint64_t replicas[] = {4000000, 2000000, 1000000, 1000000};
    bool pass = true;
    for (int ti = 0; ti < 4; ++ti) {
        const SdeConfig base = sde_from_theta(thetas[ti], 1.6, 1e6, 1e-3);
        const double mu = asymptotic_params(thetas[ti]).mu;
        double exps[2] = {0.0, 0.0};
        std::vector<std::vector<double>> log_hits(2);
        const SdeMethod methods[2] = {SdeMethod::euler, SdeMethod::exact_bridge};
        for (int mi = 0; mi < 2; ++mi) {
            SdeConfig cfg = base;
            cfg.method = methods[mi];
            const std::uint64_t stream_base =
                splitmix64(std::uint64_t(7700 + ti) ^ std::uint64_t(mi + 1));
            std::vector<EscapeSample> samples(replicas[ti]);
            for (std::uint64_t rep = 0; rep < replicas[ti]; ++rep) {
                Xoshiro256 rng = replica_stream(stream_base, rep);
                samples[rep] = simulate_escape(cfg, rng);
            }
            exps[mi] = escape_tail_fit(samples).exponent_hat;
            for (const auto& s : samples) {
                if (s.censored) continue;
                log_hits[mi].push_back(std::log(s.t));
                if (log_hits[mi].size() == 100000) break;
            }
            if (std::abs(exps[mi] - mu) > 0.15) pass = false;
        }
        const KsResult ks = ks_two_sample(log_hits[0], log_hits[1]);
        if (ks.p <= 0.001) pass = false;
        std::printf("criterion 7:   theta/pi = %.2f: mu = %.4f, euler %.4f, bridge %.4f, "
                    "KS p = %.3f\n",
                    thetas[ti] / pi, mu, exps[0], exps[1], ks.p);
    }
    std::printf("criterion 7: %s exponents within 0.15 of mu and methods KS-consistent "
                "at 4 angles\n",
                pass ? "PASS" : "FAIL");
    return pass;
}

// ------------------------------------------------------------- criterion 8
// Fork-lifetime exponent at theta = 0.45 pi vs the asymptotic mu. Finite-z
// transients are expected; a deviation beyond 0.2 is flagged for review,
// never failed.
bool criterion_8() {
    ForkConfig fc;
    fc.theta = 0.45 * pi;
    fc.step_cap = 100000;
    const std::uint64_t n = 100000;
    std::vector<ForkLifetimeSample> samples(n);
    for (std::uint64_t rep = 0; rep < n; ++rep) {
        Xoshiro256 rng = replica_stream(8800, rep);
        samples[rep] = fork_lifetime(fc, rng);
    }
    const double mu = asymptotic_params(fc.theta).mu;
    const TailFit f = fork_tail_fit(samples);
    const double dev = std::abs(f.exponent_hat - mu);
    std::printf("criterion 8: PASS fork exponent %.4f vs asymptotic %.4f, deviation %.4f "
                "(window [%.3g, %.3g]) %s\n",
                f.exponent_hat, mu, dev, f.t_lo, f.t_hi,
                dev > 0.2 ? "FLAGGED: exceeds 0.2, finite-size transient suspected"
                          : "CONSISTENT");
    return true;
}

// ------------------------------------------------------------- criterion 9
// Survivor diagnostics: conditioned on deep survival the scaled position is
// uniform on (-a, a), and the conditional spread decays like t^(-1/2).
bool criterion_9() {
    SdeConfig ucfg = sde_from_theta(0.45 * pi, 2.0, 1e6, 2e-3);
    Xoshiro256 urng(0x910);
    const SurvivorDiagnostics ud = survivor_diagnostics(ucfg, {100.0}, 1e4, 45000, urng);
    std::vector<double> u;
    u.reserve(ud.x_at_condition.size());
    for (double x : ud.x_at_condition) u.push_back(0.5 * (x / ucfg.a + 1.0));
    const KsResult ks = ks_vs_uniform01(u);

    SdeConfig scfg = sde_from_theta(0.45 * pi, 1.67, 3e13, 4e-3);
    Xoshiro256 srng(0x911);
    const std::vector<double> probes{100.0, 177.8279, 316.2278, 562.3413, 1000.0};
    const SurvivorDiagnostics sd = survivor_diagnostics(scfg, probes, 3e13, 1000000, srng);
    const double slope = probe_std_slope(sd).slope;

    const bool pass = ks.d < 0.05 && std::abs(slope + 0.5) <= 0.1;
    std::printf("criterion 9: %s survivor-position KS distance %.4f vs uniform "
                "(%zu survivors, tolerance 0.05); conditional-std slope %.4f "
                "(required -0.5 +- 0.1, %zu deep survivors)\n",
                pass ? "PASS" : "FAIL", ks.d, ud.n_survivors, slope, sd.n_survivors);
    return pass;
}

// ------------------------------------------------------------ criterion 10
// Polygon flow: pairwise angle rates match the closed form to 1e-6, the
// equilateral triangle is a fixed shape to 1e-9 over Delta n = 100, and
// >= 95/100 random obtuse pentagons destabilize monotonically to a merge.
bool criterion_10() {
    bool pass = true;
    double worst_rate = 0.0;
    int combo = 0;
    for (double beta : {0.05, 0.1, 0.2, 0.3, 0.4}) {
        for (double gamma : {0.3, 0.6}) {
            const double r = (combo++ % 2) ? 10.0 : 5.0;
            const double theta1 = 0.5 * (0.5 * pi - beta - gamma);
            const double theta2 = 0.5 * (0.5 * pi + beta - gamma);
            const BetaRateResult br = beta_rate_check(r, beta, gamma, theta1, theta2, 1e-4);
            worst_rate = std::max(worst_rate, std::abs(br.fd_rate - br.formula_rate));
        }
    }
    if (worst_rate > 1e-6) pass = false;

    PolygonState tri;
    for (int i = 0; i < 3; ++i) {
        const double a = 2.0 * pi * i / 3.0;
        tri.vertices.push_back({2.0 * std::cos(a), 2.0 * std::sin(a)});
    }
    const FlowResult tr = flow_run(tri, 100.0);
    double worst_angle = 0.0;
    for (double a : polygon_interior_angles(tr.state.vertices))
        worst_angle = std::max(worst_angle, std::abs(a - pi / 3.0));
    if (!tr.reached_target || worst_angle > 1e-9) pass = false;

    FlowOptions opt;
    opt.dn_cap = 1e18; // the angle dynamics are scale-free
    opt.stop_at_merge = true;
    opt.max_steps = 200000;
    int good = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        std::vector<Vec2> pent;
        for (std::uint64_t attempt = trial * 1000;; ++attempt) {
            Xoshiro256 rng = replica_stream(12345, attempt);
            std::vector<double> ang(5);
            for (double& a : ang) a = 2.0 * pi * rng.uniform01();
            std::sort(ang.begin(), ang.end());
            std::vector<Vec2> v;
            for (double a : ang) v.push_back({std::cos(a), std::sin(a)});
            if (min_edge_length(v) < 0.05) continue;
            std::vector<double> interior = polygon_interior_angles(v);
            if (*std::min_element(interior.begin(), interior.end()) < 0.5 * pi + 0.02)
                continue;
            std::sort(interior.begin(), interior.end());
            bool distinct = true;
            for (std::size_t i = 1; i < interior.size(); ++i)
                if (interior[i] - interior[i - 1] < 0.02) distinct = false;
            if (!distinct) continue;
            pent = v;
            break;
        }
        PolygonState s;
        s.vertices = pent;
        const std::vector<double> e0 = polygon_exterior_angles(pent);
        double prev = *std::min_element(e0.begin(), e0.end());
        bool monotone = true;
        const FlowResult fr = flow_run(s, 1e18, opt, [&](const PolygonState& st) {
            if (st.vertices.size() < 5) return; // post-merge state
            const std::vector<double> e = polygon_exterior_angles(st.vertices);
            const double cur = *std::min_element(e.begin(), e.end());
            if (cur > prev + 1e-9) monotone = false;
            prev = cur;
        });
        if (!fr.merges.empty() && monotone) ++good;
    }
    if (good < 95) pass = false;

    std::printf("criterion 10: %s angle-rate worst |diff| %.3g (tolerance 1e-6); "
                "equilateral drift %.3g over dn = 100 (tolerance 1e-9); "
                "%d/100 pentagons destabilized monotonically (required >= 95)\n",
                pass ? "PASS" : "FAIL", worst_rate, worst_angle, good);
    return pass;
}

// ------------------------------------------------------------ criterion 11
// Branch decomposition and power-law machinery: exact partition identity on
// real runs, synthetic exponent recovery, small MLE bias, and plausible
// fork-size fits whose alpha is reported.
bool criterion_11() {
    bool pass = true;
    for (std::uint64_t seed = 11; seed <= 15; ++seed) {
        ClusterConfig cfg;
        cfg.n_steps = 100000;
        cfg.seed = seed;
        const RunRecord r = run_cluster(cfg);
        const BranchDecomposition d = extract_branches(r); // throws if inconsistent
        std::uint64_t total = d.backbone_size;
        for (const auto& b : d.branches) total += b.size;
        if (total != r.discs.size()) pass = false;
    }

    Xoshiro256 rng(1101);
    std::vector<std::uint64_t> synth;
    for (int i = 0; i < 10000; ++i) synth.push_back(oracle::pareto_size(2.5, 5, rng));
    const double alpha_synth = fit_power_law(synth, 5).alpha_hat;
    if (std::abs(alpha_synth - 2.5) > 0.1) pass = false;

    double worst_bias = 0.0;
    for (double alpha : {1.5, 2.0, 3.0}) {
        double sum = 0.0;
        for (std::uint64_t rep = 0; rep < 20; ++rep) {
            Xoshiro256 r2 = replica_stream(1102 + std::uint64_t(alpha * 10), rep);
            std::vector<std::uint64_t> s;
            for (int i = 0; i < 5000; ++i) s.push_back(oracle::pareto_size(alpha, 5, r2));
            sum += fit_power_law(s, 5).alpha_hat;
        }
        worst_bias = std::max(worst_bias, std::abs(sum / 20.0 - alpha));
    }
    if (worst_bias > 0.1) pass = false;

    std::printf("criterion 11:   synthetic alpha %.3f (target 2.5 +- 0.1), worst MLE bias "
                "%.3f (tolerance 0.1)\n",
                alpha_synth, worst_bias);

    for (double frac : {0.33, 0.35, 0.37}) {
        ForkConfig fc;
        fc.theta = frac * pi;
        fc.step_cap = 100000;
        const std::uint64_t n = 100000;
        std::vector<std::uint64_t> sizes;
        sizes.reserve(n);
        for (std::uint64_t rep = 0; rep < n; ++rep) {
            Xoshiro256 r3 = replica_stream(1110 + std::uint64_t(frac * 100), rep);
            const ForkLifetimeSample s = fork_lifetime(fc, r3);
            if (s.cause != ForkDeathCause::censored) sizes.push_back(std::uint64_t(s.t));
        }
        const PowerLawFit f = fit_power_law(sizes, 5);
        std::printf("criterion 11:   fork sizes at theta/pi = %.2f: alpha_hat %.3f, "
                    "ks %.4f (required < 0.1)\n",
                    frac, f.alpha_hat, f.ks_distance);
        if (f.ks_distance >= 0.1) pass = false;
    }

    std::printf("criterion 11: %s partition identity exact on 5 runs, synthetic and "
                "fork-size fits within bounds\n",
                pass ? "PASS" : "FAIL");
    return pass;
}

// ------------------------------------------------------------ criterion 12
// Shape diversity: across 100 seeds at 1e5 steps, triangles and quadrangles
// each occur in at least 5% of runs.
bool criterion_12() {
    int triangle = 0, quadrangle = 0, other = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        ClusterConfig cfg;
        cfg.n_steps = 100000;
        cfg.seed = seed;
        const RunRecord r = run_cluster(cfg);
        switch (classify_shape(hull_metrics(r.hull, r.discs))) {
            case ShapeClass::triangle: ++triangle; break;
            case ShapeClass::quadrangle: ++quadrangle; break;
            default: ++other; break;
        }
    }
    const bool pass = triangle >= 5 && quadrangle >= 5;
    std::printf("criterion 12: %s shapes over 100 seeds: %d triangles, %d quadrangles, "
                "%d other (each class required >= 5)\n",
                pass ? "PASS" : "FAIL", triangle, quadrangle, other);
    return pass;
}

} // namespace

int main(int argc, char** argv) {
    bool (*const criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                                  criterion_5, criterion_6, criterion_7, criterion_8,
                                  criterion_9, criterion_10, criterion_11, criterion_12};
    try {
        if (argc > 1) {
            const int k = std::atoi(argv[1]);
            if (k < 1 || k > 12) {
                std::fprintf(stderr, "usage: acceptance [1..12]\n");
                return 2;
            }
            return criteria[k - 1]() ? 0 : 1;
        }
        bool all = true;
        for (int k = 1; k <= 12; ++k) all = criteria[k - 1]() && all;
        return all ? 0 : 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "acceptance: unexpected error: %s\n", e.what());
        return 1;
    }
}
