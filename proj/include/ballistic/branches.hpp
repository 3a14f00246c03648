#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cluster.hpp"
#include "errors.hpp"
#include "stats.hpp"

namespace ballistic {

/// One side branch: a maximal parent-tree subtree hanging off the backbone.
struct BranchRecord {
    std::uint32_t root = 0;  ///< first off-backbone disc of the subtree
    std::uint64_t birth = 0; ///< attachment step of the root (0 for initial discs)
    std::uint64_t size = 0;  ///< subtree cardinality, root included
};

struct BranchDecomposition {
    std::vector<bool> backbone; ///< per disc id
    std::size_t backbone_size = 0;
    std::vector<BranchRecord> branches;
};

/// Backbone = union of parent paths from the final ring vertices back to
/// initial discs; everything else decomposes into branches. Sizes come from
/// one reverse sweep (a parent id is always smaller than its child's).
inline BranchDecomposition extract_branches(const RunRecord& r) {
    const std::size_t n = r.discs.size();
    BranchDecomposition out;
    out.backbone.assign(n, false);
    for (const auto& v : r.hull.ring) {
        std::int64_t id = std::int64_t(v.id);
        while (id >= 0 && !out.backbone[std::size_t(id)]) {
            out.backbone[std::size_t(id)] = true;
            out.backbone_size += 1;
            id = r.discs.parent[std::size_t(id)];
        }
    }

    std::vector<std::uint64_t> weight(n, 0);
    std::uint64_t covered = 0;
    for (std::size_t i = n; i-- > 0;) {
        if (out.backbone[i]) continue;
        weight[i] += 1;
        const std::int64_t par = r.discs.parent[i];
        if (par >= 0 && !out.backbone[std::size_t(par)]) {
            weight[std::size_t(par)] += weight[i];
        } else {
            const std::uint64_t birth = i >= r.n_initial ? std::uint64_t(i - r.n_initial + 1) : 0;
            out.branches.push_back({std::uint32_t(i), birth, weight[i]});
            covered += weight[i];
        }
    }
    if (covered + out.backbone_size != n)
        throw InternalInvariantError("extract_branches: partition identity violated");
    return out;
}

struct PowerLawFit {
    double alpha_hat = 0.0;   ///< discrete MLE tail exponent (density convention)
    double alpha_ls = 0.0;    ///< log-log CCDF least-squares cross-check
    std::uint64_t s_min = 0;
    std::size_t n_tail = 0;
    double ks_distance = 0.0; ///< empirical vs fitted CCDF, a diagnostic only
};

/// Model CCDF P(S >= s) = ((s - 1/2) / (s_min - 1/2))^(1 - alpha) for
/// integer s >= s_min (continuity-corrected discrete power law).
inline double power_law_ccdf(double s, double s_min, double alpha) {
    return std::pow((s - 0.5) / (s_min - 0.5), 1.0 - alpha);
}

/// Tail MLE alpha_hat = 1 + n / sum ln(s_i / (s_min - 1/2)) over sizes
/// >= s_min, with the empirical-vs-model KS distance as a fit diagnostic.
/// Throws InsufficientTail below 50 tail samples or when the tail is a
/// single repeated value (the likelihood degenerates).
inline PowerLawFit fit_power_law(const std::vector<std::uint64_t>& sizes,
                                 std::uint64_t s_min = 5) {
    if (s_min < 2) throw ConfigurationError("fit_power_law: s_min must be >= 2");
    std::vector<std::uint64_t> tail;
    for (std::uint64_t s : sizes)
        if (s >= s_min) tail.push_back(s);
    if (tail.size() < 50) throw InsufficientTail("fit_power_law: fewer than 50 tail sizes");
    std::sort(tail.begin(), tail.end());
    if (tail.front() == tail.back())
        throw InsufficientTail("fit_power_law: all tail sizes equal");

    const double ref = double(s_min) - 0.5;
    double log_sum = 0.0;
    for (std::uint64_t s : tail) log_sum += std::log(double(s) / ref);

    PowerLawFit fit;
    fit.s_min = s_min;
    fit.n_tail = tail.size();
    fit.alpha_hat = 1.0 + double(tail.size()) / log_sum;

    // distinct sizes with their >= and > empirical tail fractions
    const double n = double(tail.size());
    std::vector<double> lx, ly;
    double d = 0.0;
    for (std::size_t i = 0; i < tail.size();) {
        std::size_t j = i;
        while (j < tail.size() && tail[j] == tail[i]) ++j;
        const double s = double(tail[i]);
        const double emp_ge = double(tail.size() - i) / n;
        const double emp_gt = double(tail.size() - j) / n;
        d = std::max(d, std::abs(emp_ge - power_law_ccdf(s, double(s_min), fit.alpha_hat)));
        d = std::max(d, std::abs(emp_gt - power_law_ccdf(s + 1.0, double(s_min), fit.alpha_hat)));
        lx.push_back(std::log(s));
        ly.push_back(std::log(emp_ge));
        i = j;
    }
    fit.ks_distance = d;
    fit.alpha_ls = 1.0 - linear_fit(lx, ly).slope;
    return fit;
}

/// Branch sizes of a run, ready for fitting.
inline std::vector<std::uint64_t> branch_sizes(const BranchDecomposition& d) {
    std::vector<std::uint64_t> out;
    out.reserve(d.branches.size());
    for (const auto& b : d.branches) out.push_back(b.size);
    return out;
}

} // namespace ballistic
