#pragma once

#include <algorithm>
#include <cstdio>
#include <string>

#include "geometry.hpp"

namespace ballistic {

struct SvgOptions {
    double hue_old = 240.0; ///< oldest disc (blue end)
    double hue_new = 0.0;   ///< newest disc (red end)
    double margin = 0.05;   ///< viewBox margin as a fraction of the extent
};

namespace detail {

inline void svg_num(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    out += buf;
}

inline void svg_xy(std::string& out, Vec2 p) {
    svg_num(out, p.x);
    out += ' ';
    svg_num(out, -p.y); // svg y grows downward
}

} // namespace detail

/// Render the cluster: one radius-1/2 circle per disc with hue linear in
/// birth order, plus the disc-hull boundary (tangent segments alternating
/// with radius-1/2 arcs around the ring) in black.
inline std::string render_svg(const DiscStore& discs, const HullState& hull,
                              const SvgOptions& opt = {}) {
    if (discs.size() == 0) throw EmptyInput("render_svg: no discs");

    double x0 = discs.center[0].x, x1 = x0, y0 = discs.center[0].y, y1 = y0;
    for (Vec2 c : discs.center) {
        x0 = std::min(x0, c.x - 0.5);
        x1 = std::max(x1, c.x + 0.5);
        y0 = std::min(y0, c.y - 0.5);
        y1 = std::max(y1, c.y + 0.5);
    }
    const double pad = opt.margin * std::max({x1 - x0, y1 - y0, 1.0});
    const double stroke = std::max(0.06, 0.004 * std::max(x1 - x0, y1 - y0));

    std::string s;
    s.reserve(discs.size() * 96 + 1024);
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"";
    detail::svg_num(s, x0 - pad);
    s += ' ';
    detail::svg_num(s, -y1 - pad);
    s += ' ';
    detail::svg_num(s, (x1 - x0) + 2.0 * pad);
    s += ' ';
    detail::svg_num(s, (y1 - y0) + 2.0 * pad);
    s += "\">\n";

    const double denom = discs.size() > 1 ? double(discs.size() - 1) : 1.0;
    for (std::size_t i = 0; i < discs.size(); ++i) {
        const double t = double(i) / denom;
        const int hue = int(opt.hue_old + (opt.hue_new - opt.hue_old) * t);
        s += "<circle cx=\"";
        detail::svg_num(s, discs.center[i].x);
        s += "\" cy=\"";
        detail::svg_num(s, -discs.center[i].y);
        s += "\" r=\"0.5\" fill=\"hsl(" + std::to_string(hue) + ",85%,55%)\"/>\n";
    }

    const std::string style =
        "\" fill=\"none\" stroke=\"black\" stroke-width=\"" + std::to_string(stroke) + "\"/>\n";
    if (hull.size() == 1) {
        s += "<circle cx=\"";
        detail::svg_num(s, discs.center[hull.ring[0].id].x);
        s += "\" cy=\"";
        detail::svg_num(s, -discs.center[hull.ring[0].id].y);
        s += "\" r=\"0.5" + style;
    } else {
        // boundary path: per vertex, the exposed arc over its normal interval,
        // then the common-tangent segment to the next vertex's arc start
        s += "<path d=\"M ";
        const HullVertex& first = hull.ring[0];
        detail::svg_xy(s, discs.center[first.id] + unit_vector(first.lo) * 0.5);
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const HullVertex& v = hull.ring[i];
            const Vec2 c = discs.center[v.id];
            s += " A 0.5 0.5 0 ";
            s += v.measure > pi ? '1' : '0';
            s += " 0 "; // model-CCW arc; y is negated, so svg sweep is 0
            detail::svg_xy(s, c + unit_vector(v.lo + v.measure) * 0.5);
            const HullVertex& w = hull.ring[(i + 1) % hull.size()];
            s += " L ";
            detail::svg_xy(s, discs.center[w.id] + unit_vector(w.lo) * 0.5);
        }
        s += " Z" + style;
    }
    s += "</svg>\n";
    return s;
}

} // namespace ballistic
