#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace ballistic {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_se = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw InsufficientData("linear_fit needs >= 2 paired points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw InsufficientData("linear_fit: degenerate abscissa");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    if (n > 2) {
        const double ss_res = std::max(0.0, syy - f.slope * sxy);
        f.slope_se = std::sqrt(ss_res / (double(n - 2) * sxx));
    } else {
        f.slope_se = std::numeric_limits<double>::infinity();
    }
    return f;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw EmptyInput("median of empty set");
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    double hi = v[m];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + m - 1, v.begin() + m);
    return 0.5 * (v[m - 1] + hi);
}

/// Kolmogorov tail probability Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double ks_tail_prob(double lambda) {
    if (lambda < 0.18) return 1.0;
    double sum = 0.0, sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * double(j) * double(j) * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

struct KsResult {
    double d = 0.0;
    double p = 1.0;
};

/// Two-sample KS on raw samples (ties handled by joint advancement).
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw EmptyInput("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(double(i) / na - double(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    KsResult r;
    r.d = d;
    r.p = ks_tail_prob((ne + 0.12 + 0.11 / ne) * d);
    return r;
}

/// One-sample KS against U[0,1); input values must already lie in [0,1].
inline KsResult ks_vs_uniform01(std::vector<double> u) {
    if (u.empty()) throw EmptyInput("ks_vs_uniform01: empty sample");
    std::sort(u.begin(), u.end());
    const double n = double(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max(d, std::abs(double(i + 1) / n - u[i]));
        d = std::max(d, std::abs(u[i] - double(i) / n));
    }
    const double sn = std::sqrt(n);
    KsResult r;
    r.d = d;
    r.p = ks_tail_prob((sn + 0.12 + 0.11 / sn) * d);
    return r;
}

struct TailFitOptions {
    double t_min = 100.0;          ///< first grid abscissa considered
    std::size_t min_survivors = 30;///< grid points below this survivor count are dropped
    double grid_ratio = 1.15;      ///< geometric spacing of the probe grid
    std::size_t min_samples = 10000;
};

struct TailFit {
    double exponent_hat = 0.0;     ///< -slope of log survival vs log t
    double exponent_se = 0.0;      ///< OLS standard error of the slope
    double t_lo = 0.0;             ///< fit window actually used
    double t_hi = 0.0;
    std::size_t points = 0;        ///< grid points entering the fit
    std::size_t n_samples = 0;
};

/// Power-law tail fit of a survival curve from (time, censored) samples.
/// A censored sample means survival past its recorded time, so it counts as
/// a survivor at every grid point below the censor time; the grid never
/// reaches the censor horizon.
inline TailFit tail_fit_survival(const std::vector<double>& times,
                                 const std::vector<bool>& censored,
                                 const TailFitOptions& opt = {}) {
    const std::size_t n = times.size();
    if (n != censored.size()) throw ConfigurationError("tail_fit: size mismatch");
    if (n < opt.min_samples) throw InsufficientData("tail_fit: fewer samples than required");

    std::vector<double> uncensored;
    uncensored.reserve(n);
    double horizon = std::numeric_limits<double>::infinity();
    double t_max_obs = 0.0;
    std::size_t n_cens = 0;
    for (std::size_t i = 0; i < n; ++i) {
        t_max_obs = std::max(t_max_obs, times[i]);
        if (censored[i]) {
            horizon = std::min(horizon, times[i]);
            ++n_cens;
        } else {
            uncensored.push_back(times[i]);
        }
    }
    // with no deaths the curve is flat at 1 and carries no tail information
    if (uncensored.empty()) throw WindowEmpty("tail_fit: every sample censored");
    std::sort(uncensored.begin(), uncensored.end());
    const double grid_end = std::min(horizon, t_max_obs) * 0.999999;

    std::vector<double> lx, ly;
    double t_lo = 0.0, t_hi = 0.0;
    for (double t = opt.t_min; t < grid_end; t *= opt.grid_ratio) {
        // survivors: uncensored with T > t, plus all censored (censor time > t).
        const auto it = std::upper_bound(uncensored.begin(), uncensored.end(), t);
        const std::size_t m = std::size_t(uncensored.end() - it) + n_cens;
        if (m < opt.min_survivors) continue;
        if (lx.empty()) t_lo = t;
        t_hi = t;
        lx.push_back(std::log(t));
        ly.push_back(std::log(double(m) / double(n)));
    }
    if (lx.size() < 2) throw WindowEmpty("tail_fit: no usable grid window");

    const LinearFit f = linear_fit(lx, ly);
    TailFit out;
    out.exponent_hat = -f.slope;
    out.exponent_se = f.slope_se;
    out.t_lo = t_lo;
    out.t_hi = t_hi;
    out.points = lx.size();
    out.n_samples = n;
    return out;
}

} // namespace ballistic
