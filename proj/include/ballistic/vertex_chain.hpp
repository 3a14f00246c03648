#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "vec2.hpp"

namespace ballistic {

/// Reduced state of a two-tip fork: Y is the signed height gap and Z > 0 the
/// horizontal gap between the tip centers; X = Y/Z is the middle-edge slope.
/// theta in (0, pi/2) is the fixed half-angle of the outer edges' normals.
struct VertexChainState {
    double y = 0.0;
    double z = 1.0;
    std::uint64_t n = 0;
    double theta = 0.0;
};

inline double chain_x(const VertexChainState& s) { return s.y / s.z; }

struct ChainStepInfo {
    bool right = true; ///< which tip received the disc (in |X| coordinates)
    double alpha = 0.0;
};

/// Apply one attachment at angle alpha, measured from the receiving tip's
/// vertical with positive direction outward. Right tip: Y += cos a; left
/// tip: Y -= cos a; both: Z += sin a (sin a may be negative on the right
/// arc, so Z can shrink on a step even though E[dZ] > 0).
inline void chain_apply(VertexChainState& s, bool right, double alpha) {
    const double c = std::cos(alpha), sn = std::sin(alpha);
    s.y += right ? c : -c;
    s.z += sn;
    s.n += 1;
}

/// One random chain step. The attachment angle is uniform on the union of
/// the two tip arcs: [-arctan x, theta] on the higher tip and
/// [arctan x, theta] on the lower one (total measure 2 theta, x = |X|).
/// Throws ArcCollapse when arctan |X| >= theta (the lower arc is empty).
template <class Rng>
ChainStepInfo chain_step(VertexChainState& s, Rng& rng) {
    const double xs = s.y / s.z;
    const bool reflected = xs < 0.0;
    const double x = std::abs(xs);
    const double atx = std::atan(x);
    if (!(atx < s.theta)) throw ArcCollapse("chain_step: arctan|X| >= theta");

    const double u = rng.uniform01() * 2.0 * s.theta;
    ChainStepInfo info;
    double alpha;
    if (u < s.theta + atx) {
        info.right = true;
        alpha = u - atx;
    } else {
        info.right = false;
        alpha = atx + (u - (s.theta + atx));
    }
    info.alpha = alpha;
    // in reflected coordinates the roles of the tips swap
    chain_apply(s, reflected ? !info.right : info.right, alpha);
    return info;
}

struct OneStepMoments {
    double drift = 0.0;         ///< E[dX]
    double second_moment = 0.0; ///< E[(dX)^2]
    double variance = 0.0;
};

/// Exact one-step moments of dX at state (x, z) by adaptive Gauss-Kronrod
/// quadrature over the two attachment arcs; absolute tolerance 1e-12 on
/// each integral (QuadratureFailure if the error estimate misses it).
inline OneStepMoments one_step_moments_quadrature(double x, double z, double theta) {
    if (!(theta > 0.0 && theta < pi / 2.0)) throw DomainError("theta outside (0, pi/2)");
    if (!(x >= 0.0)) throw DomainError("x must be >= 0");
    const double atx = std::atan(x);
    if (!(atx < theta)) throw DomainError("arctan x >= theta: arc collapsed");
    if (!(z * std::sqrt(1.0 + x * x) > x))
        throw DomainError("z too small: step denominator can vanish");

    // dX on the right/left arc; the algebraic rewrite avoids cancellation
    // between (xz + cos a)/(z + sin a) and x at large z.
    auto dx_right = [x, z](double a) { return (std::cos(a) - x * std::sin(a)) / (z + std::sin(a)); };
    auto dx_left = [x, z](double a) { return (-std::cos(a) - x * std::sin(a)) / (z + std::sin(a)); };

    using quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto integrate = [&](auto&& f, double lo, double hi) {
        double err = 0.0;
        const double val = quad::integrate(f, lo, hi, 12, 1e-14, &err);
        if (err > 1e-12 * std::max(1.0, std::abs(val)))
            throw QuadratureFailure("one-step moment integral did not converge");
        return val;
    };

    auto sq = [](auto&& f) {
        return [f](double a) { const double v = f(a); return v * v; };
    };

    OneStepMoments m;
    const double w = 1.0 / (2.0 * theta);
    m.drift = w * (integrate(dx_right, -atx, theta) + integrate(dx_left, atx, theta));
    m.second_moment =
        w * (integrate(sq(dx_right), -atx, theta) + integrate(sq(dx_left), atx, theta));
    m.variance = m.second_moment - m.drift * m.drift;
    return m;
}

/// E[dZ] at state (x, z-independent): (1/theta)(1/sqrt(1+x^2) - cos theta).
inline double mean_dz(double x, double theta) {
    return (1.0 / std::sqrt(1.0 + x * x) - std::cos(theta)) / theta;
}

struct AsymptoticParams {
    double theta = 0.0;
    double drift_coef = 0.0; ///< lim z E[dX] / x = cos(theta)/theta
    double var_coef0 = 0.0;  ///< lim z^2 Var(dX) at x = 0
    double dz_mean = 0.0;    ///< lim E[dZ] as x -> 0
    double mu = 0.0;         ///< drift_coef / dz_mean
    double sigma = 0.0;      ///< sqrt(var_coef0) / dz_mean

    /// lim z^2 Var(dX) at slope x.
    double var_coef(double x) const {
        const double c = std::cos(theta), s = std::sin(theta);
        const double x2 = x * x;
        return ((x2 + 1.0) * theta * theta - 2.0 * x2 * c * c - (x2 - 1.0) * theta * s * c) /
               (2.0 * theta * theta);
    }
};

inline AsymptoticParams asymptotic_params(double theta) {
    if (!(theta > 0.0 && theta < pi / 2.0)) throw DomainError("theta outside (0, pi/2)");
    AsymptoticParams p;
    p.theta = theta;
    const double c = std::cos(theta), s = std::sin(theta);
    p.drift_coef = c / theta;
    p.var_coef0 = (theta * theta + theta * s * c) / (2.0 * theta * theta);
    p.dz_mean = (1.0 - c) / theta;
    p.mu = c / (1.0 - c);
    p.sigma = std::sqrt((theta * theta + theta * s * c) / 2.0) / (1.0 - c);
    return p;
}

enum class ForkDeathCause { threshold, arc_collapse, censored };

inline const char* cause_name(ForkDeathCause c) {
    switch (c) {
        case ForkDeathCause::threshold: return "threshold";
        case ForkDeathCause::arc_collapse: return "arc_collapse";
        default: return "censored";
    }
}

struct ForkLifetimeSample {
    double t = 0.0; ///< death step count (time normalization t = n)
    ForkDeathCause cause = ForkDeathCause::censored;
    double x_final = 0.0;
};

struct ForkConfig {
    double theta = 0.0;
    double a = 0.5; ///< |X| death threshold; must satisfy 0 < a < tan(theta)
    double z0 = 1.0;
    std::uint64_t step_cap = 1000000;
};

inline void validate(const ForkConfig& cfg) {
    if (!(cfg.theta > 0.0 && cfg.theta < pi / 2.0)) throw DomainError("theta outside (0, pi/2)");
    if (!(cfg.a > 0.0 && cfg.a < std::tan(cfg.theta))) throw DomainError("need 0 < a < tan(theta)");
    if (!(cfg.z0 >= 1.0)) throw DomainError("z0 must be >= 1");
    if (cfg.step_cap == 0) throw DomainError("step_cap must be >= 1");
}

/// Run one fork from (Y,Z) = (0, z0) until |X| reaches a (threshold death),
/// the lower arc collapses, or the step cap censors the sample.
template <class Rng>
ForkLifetimeSample fork_lifetime(const ForkConfig& cfg, Rng& rng) {
    validate(cfg);
    const double theta = cfg.theta, two_theta = 2.0 * cfg.theta;
    double y = 0.0, z = cfg.z0;
    for (std::uint64_t n = 1; n <= cfg.step_cap; ++n) {
        const double x = std::abs(y) / z;
        if (x >= cfg.a) return {double(n - 1), ForkDeathCause::threshold, y / z};
        const double atx = std::atan(x);
        if (atx >= theta) return {double(n - 1), ForkDeathCause::arc_collapse, y / z};

        const double u = rng.uniform01() * two_theta;
        double alpha;
        bool right;
        if (u < theta + atx) {
            right = true;
            alpha = u - atx;
        } else {
            right = false;
            alpha = atx + (u - (theta + atx));
        }
        if (y < 0.0) right = !right;
        const double c = std::cos(alpha);
        y += right ? c : -c;
        z += std::sin(alpha);
        if (!(z > 0.0)) throw InternalInvariantError("fork_lifetime: Z reached zero");
    }
    return {double(cfg.step_cap), ForkDeathCause::censored, y / z};
}

/// Empirical survival P(T > n) on the given step grid. Censored samples
/// count as survivors at every grid point up to the cap.
inline std::vector<double> lifetime_tail_curve(const std::vector<ForkLifetimeSample>& samples,
                                               const std::vector<double>& grid) {
    if (samples.size() < 1000)
        throw InsufficientData("lifetime_tail_curve: need >= 1000 samples");
    std::vector<double> out;
    out.reserve(grid.size());
    for (double g : grid) {
        std::size_t m = 0;
        for (const auto& s : samples)
            if (s.cause == ForkDeathCause::censored ? s.t >= g : s.t > g) ++m;
        out.push_back(double(m) / double(samples.size()));
    }
    return out;
}

/// Tail fit of fork lifetimes via the shared survival-curve machinery.
inline TailFit fork_tail_fit(const std::vector<ForkLifetimeSample>& samples,
                             const TailFitOptions& opt = {}) {
    std::vector<double> t(samples.size());
    std::vector<bool> cens(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        t[i] = samples[i].t;
        cens[i] = samples[i].cause == ForkDeathCause::censored;
    }
    return tail_fit_survival(t, cens, opt);
}

} // namespace ballistic
