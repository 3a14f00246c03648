#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "stats.hpp"
#include "vertex_chain.hpp"

namespace ballistic {

enum class SdeMethod { euler, exact_bridge };

inline const char* method_name(SdeMethod m) {
    return m == SdeMethod::euler ? "euler" : "exact_bridge";
}

/// Scale-invariant linear SDE dX = (mu X / t) dt + (sigma / t) dW started
/// from X(t0) = 0, killed when |X| reaches the barrier a.
struct SdeConfig {
    double mu = 1.0;
    double sigma = 1.0;
    double a = 0.5;
    double t0 = 1.0;
    double t_max = 1000000.0;
    double h = 1e-3; ///< log-time grid spacing (euler grid ratio is 1+h)
    SdeMethod method = SdeMethod::exact_bridge;
};

inline void validate(const SdeConfig& cfg) {
    if (!(cfg.mu > 0.0)) throw DomainError("mu must be > 0");
    if (!(cfg.sigma >= 0.0)) throw DomainError("sigma must be >= 0");
    if (!(cfg.a > 0.0)) throw DomainError("barrier a must be > 0");
    if (!(cfg.t0 > 0.0)) throw DomainError("t0 must be > 0");
    if (!(cfg.t_max > cfg.t0)) throw DomainError("t_max must exceed t0");
    if (!(cfg.h > 0.0 && cfg.h <= 1e-2)) throw DomainError("h must be in (0, 1e-2]");
}

inline SdeConfig sde_from_theta(double theta, double a = 0.5, double t_max = 1000000.0,
                                double h = 1e-3, SdeMethod method = SdeMethod::exact_bridge) {
    const AsymptoticParams p = asymptotic_params(theta);
    SdeConfig cfg;
    cfg.mu = p.mu;
    cfg.sigma = p.sigma;
    cfg.a = a;
    cfg.t_max = t_max;
    cfg.h = h;
    cfg.method = method;
    return cfg;
}

struct EscapeSample {
    double t = 0.0; ///< barrier-hit time, or the horizon when censored
    bool censored = false;
};

/// Number of grid steps: the walk checks t_k = t0 (1+h)^k for k = 1..n and
/// censors afterward, so every reported hit time stays at or below t_max.
inline std::uint64_t grid_steps(const SdeConfig& cfg) {
    return std::uint64_t(std::floor(std::log(cfg.t_max / cfg.t0) / std::log1p(cfg.h)));
}

/// Euler-Maruyama on the geometric grid t_k = t0 (1+h)^k. Per step
/// dX = mu X h + sigma sqrt(h / t_k) N; both factors update
/// multiplicatively so the loop is add/mul only. visit(t, x) runs at every
/// grid point after the step.
template <class Rng, class Visit>
EscapeSample euler_walk(const SdeConfig& cfg, Rng& rng, Visit&& visit) {
    validate(cfg);
    const std::uint64_t n = grid_steps(cfg);
    const double growth = 1.0 + cfg.mu * cfg.h;
    const double decay = 1.0 / std::sqrt(1.0 + cfg.h);
    double x = 0.0;
    double t = cfg.t0;
    double noise_sd = cfg.sigma * std::sqrt(cfg.h / cfg.t0) * decay; // at t_1
    for (std::uint64_t k = 0; k < n; ++k) {
        x = x * growth + noise_sd * rng.normal();
        t *= 1.0 + cfg.h;
        noise_sd *= decay;
        visit(t, x);
        if (std::abs(x) >= cfg.a) return {t, false};
    }
    return {cfg.t_max, true};
}

/// Exact simulation through the time-change X_t = t^mu B(V(s)), s = log(t/t0),
/// V(s) = c_star (1 - e^{-lambda s}), lambda = 2 mu + 1. B is sampled at the
/// same s-grid as the euler walk (spacing log(1+h)), so both methods share
/// the grid-crossing detection convention; the barrier in B-coordinates is
/// a t0^{-mu} e^{-mu s}.
template <class Rng, class Visit>
EscapeSample bridge_walk(const SdeConfig& cfg, Rng& rng, Visit&& visit) {
    validate(cfg);
    const std::uint64_t n = grid_steps(cfg);
    const double ds = std::log1p(cfg.h);
    const double lambda = 2.0 * cfg.mu + 1.0;
    const double c_star = cfg.sigma * cfg.sigma / (lambda * std::pow(cfg.t0, lambda));
    const double q = -std::expm1(-lambda * ds); // 1 - e^{-lambda ds}
    const double sd_decay = std::exp(-0.5 * lambda * ds);
    const double barrier_decay = std::exp(-cfg.mu * ds);
    double w = 0.0;
    double t = cfg.t0;
    double inc_sd = std::sqrt(c_star * q); // over [s_0, s_1]
    double barrier = cfg.a * std::pow(cfg.t0, -cfg.mu) * barrier_decay; // at s_1
    for (std::uint64_t k = 0; k < n; ++k) {
        w += inc_sd * rng.normal();
        t *= 1.0 + cfg.h;
        inc_sd *= sd_decay;
        visit(t, cfg.a * w / barrier); // X = t^mu B(V) = a B / barrier
        if (std::abs(w) >= barrier) return {t, false};
        barrier *= barrier_decay;
    }
    return {cfg.t_max, true};
}

template <class Rng>
EscapeSample simulate_escape_euler(const SdeConfig& cfg, Rng& rng) {
    if (cfg.method != SdeMethod::euler) throw ConfigurationError("config method is not euler");
    return euler_walk(cfg, rng, [](double, double) {});
}

template <class Rng>
EscapeSample simulate_escape_bridge(const SdeConfig& cfg, Rng& rng) {
    if (cfg.method != SdeMethod::exact_bridge)
        throw ConfigurationError("config method is not exact_bridge");
    return bridge_walk(cfg, rng, [](double, double) {});
}

/// Dispatch on cfg.method.
template <class Rng>
EscapeSample simulate_escape(const SdeConfig& cfg, Rng& rng) {
    return cfg.method == SdeMethod::euler ? euler_walk(cfg, rng, [](double, double) {})
                                          : bridge_walk(cfg, rng, [](double, double) {});
}

/// Power-law tail fit of escape times through the shared survival machinery.
inline TailFit escape_tail_fit(const std::vector<EscapeSample>& samples,
                               const TailFitOptions& opt = {}) {
    std::vector<double> t(samples.size());
    std::vector<bool> cens(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        t[i] = samples[i].t;
        cens[i] = samples[i].censored;
    }
    return tail_fit_survival(t, cens, opt);
}

/// Conditional law of the process among paths that survive to t_condition:
/// X sampled at each probe time (first grid point at or past it) and at the
/// conditioning horizon itself.
struct SurvivorDiagnostics {
    std::vector<double> probe_times;              ///< grid-resolved, ascending
    std::vector<std::vector<double>> x_at_probes; ///< [probe][survivor]
    std::vector<double> x_at_condition;           ///< one entry per survivor
    std::vector<double> probe_std;                ///< conditional std per probe
    std::size_t n_paths = 0;
    std::size_t n_survivors = 0;
};

/// Runs n_paths to t_condition and keeps only the survivors. Probes must be
/// ascending and inside (t0, t_condition). Throws InsufficientSurvivors when
/// fewer than 1000 paths reach the horizon.
template <class Rng>
SurvivorDiagnostics survivor_diagnostics(SdeConfig cfg, const std::vector<double>& probes,
                                         double t_condition, std::size_t n_paths, Rng& rng) {
    cfg.t_max = t_condition;
    validate(cfg);
    for (std::size_t i = 0; i < probes.size(); ++i) {
        if (!(probes[i] > cfg.t0 && probes[i] < t_condition))
            throw ConfigurationError("probe time outside (t0, t_condition)");
        if (i > 0 && !(probes[i] > probes[i - 1]))
            throw ConfigurationError("probe times must be strictly ascending");
    }

    SurvivorDiagnostics out;
    out.n_paths = n_paths;
    out.probe_times.assign(probes.size(), 0.0);
    out.x_at_probes.assign(probes.size(), {});

    std::vector<double> probe_x(probes.size(), 0.0);
    for (std::size_t path = 0; path < n_paths; ++path) {
        std::size_t next_probe = 0;
        double last_x = 0.0;
        auto visit = [&](double t, double x) {
            while (next_probe < probes.size() && t >= probes[next_probe]) {
                probe_x[next_probe] = x;
                if (out.probe_times[next_probe] == 0.0) out.probe_times[next_probe] = t;
                ++next_probe;
            }
            last_x = x;
        };
        const EscapeSample s = cfg.method == SdeMethod::euler ? euler_walk(cfg, rng, visit)
                                                              : bridge_walk(cfg, rng, visit);
        if (!s.censored) continue;
        out.n_survivors += 1;
        for (std::size_t i = 0; i < probes.size(); ++i)
            out.x_at_probes[i].push_back(probe_x[i]);
        out.x_at_condition.push_back(last_x);
    }
    if (out.n_survivors < 1000)
        throw InsufficientSurvivors("survivor_diagnostics: fewer than 1000 survivors");

    out.probe_std.reserve(probes.size());
    for (const auto& xs : out.x_at_probes) {
        double mean = 0.0;
        for (double v : xs) mean += v;
        mean /= double(xs.size());
        double ss = 0.0;
        for (double v : xs) ss += (v - mean) * (v - mean);
        out.probe_std.push_back(std::sqrt(ss / double(xs.size() - 1)));
    }
    return out;
}

/// Log-log slope of conditional std against probe time.
inline LinearFit probe_std_slope(const SurvivorDiagnostics& d) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < d.probe_times.size(); ++i) {
        lx.push_back(std::log(d.probe_times[i]));
        ly.push_back(std::log(d.probe_std[i]));
    }
    return linear_fit(lx, ly);
}

} // namespace ballistic
