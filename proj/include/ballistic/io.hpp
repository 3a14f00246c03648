#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "cluster.hpp"
#include "errors.hpp"
#include "escape.hpp"
#include "vertex_chain.hpp"

namespace ballistic {

/// Shortest round-trip decimal form (17 significant digits).
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

/// One attachment event as a single JSONL line (newline included); angles
/// carry 17 significant digits.
inline std::string event_jsonl_line(const AttachmentEvent& e,
                                    const std::vector<std::uint32_t>& evicted) {
    std::string s = "{\"step\":" + std::to_string(e.step);
    s += ",\"new_disc\":" + std::to_string(e.new_disc);
    s += ",\"parent\":" + std::to_string(e.parent);
    s += ",\"phi\":" + fmt17(e.phi);
    s += ",\"evicted\":[";
    for (std::size_t i = 0; i < evicted.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(evicted[i]);
    }
    s += "],\"extremal_count\":" + std::to_string(e.extremal_count_after);
    s += "}\n";
    return s;
}

inline std::string events_jsonl(const RunRecord& r) {
    std::string s;
    s.reserve(r.events.size() * 96);
    for (const auto& e : r.events) s += event_jsonl_line(e, r.evicted_of(e));
    return s;
}

inline std::string checkpoints_csv(const RunRecord& r) {
    std::string s = "step,diameter,extremal_count\n";
    for (const auto& c : r.checkpoints)
        s += std::to_string(c.step) + "," + fmt17(c.diameter) + "," +
             std::to_string(c.extremal_count) + "\n";
    return s;
}

inline std::string fork_samples_csv(double theta, double a,
                                    const std::vector<ForkLifetimeSample>& samples) {
    std::string s = "theta,a,T,cause\n";
    const std::string prefix = fmt17(theta) + "," + fmt17(a) + ",";
    for (const auto& f : samples)
        s += prefix + fmt17(f.t) + "," + cause_name(f.cause) + "\n";
    return s;
}

inline std::string tail_curve_csv(const std::vector<double>& grid,
                                  const std::vector<double>& survival) {
    std::string s = "n,survival\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        s += fmt17(grid[i]) + "," + fmt17(survival[i]) + "\n";
    return s;
}

inline std::string escape_samples_csv(const SdeConfig& cfg,
                                      const std::vector<EscapeSample>& samples) {
    std::string s = "mu,sigma,a,method,T,censored\n";
    const std::string prefix = fmt17(cfg.mu) + "," + fmt17(cfg.sigma) + "," + fmt17(cfg.a) +
                               "," + method_name(cfg.method) + ",";
    for (const auto& e : samples)
        s += prefix + fmt17(e.t) + "," + (e.censored ? "1" : "0") + "\n";
    return s;
}

inline std::string ccdf_csv(std::vector<std::uint64_t> sizes) {
    std::sort(sizes.begin(), sizes.end());
    std::string s = "size,ccdf\n";
    const double n = double(sizes.size());
    for (std::size_t i = 0; i < sizes.size();) {
        std::size_t j = i;
        while (j < sizes.size() && sizes[j] == sizes[i]) ++j;
        s += std::to_string(sizes[i]) + "," + fmt17(double(sizes.size() - i) / n) + "\n";
        i = j;
    }
    return s;
}

} // namespace ballistic
