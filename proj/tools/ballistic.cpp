// Command-line laboratory for the disc-aggregation model: cluster growth
// runs with SVG renders, fork-lifetime ensembles, escape-time tail fits,
// and the deterministic polygon flow. Every command echoes its resolved
// configuration into the output directory; reruns are byte-identical.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ballistic/branches.hpp"
#include "ballistic/cluster.hpp"
#include "ballistic/escape.hpp"
#include "ballistic/io.hpp"
#include "ballistic/parallel.hpp"
#include "ballistic/polygon_flow.hpp"
#include "ballistic/svg.hpp"
#include "ballistic/vertex_chain.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace ballistic;

namespace {

void write_json_file(const fs::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

const CLI::Validator theta_range{
    [](std::string& s) -> std::string {
        try {
            const double v = std::stod(s);
            if (v > 0.0 && v < 0.5 * pi) return {};
        } catch (...) {
        }
        return "theta must lie in (0, pi/2), got '" + s + "'";
    },
    "FLOAT in (0, pi/2)", "theta_range"};

json tail_fit_json(const TailFit& f) {
    return {{"exponent_hat", f.exponent_hat},
            {"stderr", f.exponent_se},
            {"window", {{"t_lo", f.t_lo}, {"t_hi", f.t_hi}, {"points", f.points}}},
            {"n_samples", f.n_samples}};
}

json power_law_fit_json(const std::vector<std::uint64_t>& sizes, std::uint64_t s_min) {
    try {
        const PowerLawFit f = fit_power_law(sizes, s_min);
        return {{"s_min", f.s_min},
                {"alpha_hat", f.alpha_hat},
                {"alpha_ls", f.alpha_ls},
                {"n_tail", f.n_tail},
                {"ks_distance", f.ks_distance}};
    } catch (const Error& e) {
        return {{"s_min", s_min}, {"error", e.name()}};
    }
}

// ---------------------------------------------------------------- clusters

struct ClusterArgs {
    double n = 100000; // double so "--n 1e6" parses
    std::uint64_t seed = 1;
    std::uint64_t replicas = 1;
    unsigned threads = default_threads();
    double f_macro = 0.2;
    bool audit = false;
    std::string out;
};

int run_simulate_cluster(const ClusterArgs& a) {
    fs::create_directories(a.out);
    json cfg = {{"command", "simulate-cluster"}, {"n", std::uint64_t(a.n)},
                {"seed", a.seed},               {"replicas", a.replicas},
                {"threads", a.threads},         {"f_macro", a.f_macro},
                {"audit", a.audit}};
    write_json_file(fs::path(a.out) / "config.json", cfg);

    std::vector<json> replica_summaries(a.replicas);
    parallel_replicas(a.replicas, a.threads, [&](std::uint64_t rep) {
        ClusterConfig cc;
        cc.n_steps = std::uint64_t(a.n);
        cc.seed = splitmix64(a.seed ^ rep); // per-replica stream contract
        cc.audit_every_step = a.audit;

        const std::string suffix = a.replicas == 1 ? "" : "_r" + std::to_string(rep);
        const fs::path events_path = fs::path(a.out) / ("events" + suffix + ".jsonl");
        std::ofstream events(events_path, std::ios::binary);
        if (!events) throw IoError("cannot open " + events_path.string());

        // rolling trail for the failure dump
        std::deque<std::string> trail;
        RunRecord rec;
        try {
            rec = run_cluster(cc, [&](const RunRecord& r, const AttachmentEvent& e) {
                std::string line = event_jsonl_line(e, r.evicted_of(e));
                events << line;
                trail.push_back(std::move(line));
                if (trail.size() > 100) trail.pop_front();
            });
        } catch (const Error&) {
            std::string dump;
            for (const auto& l : trail) dump += l;
            write_text_file(fs::path(a.out) / ("diagnostic" + suffix + ".jsonl"), dump);
            throw;
        }
        events.close();
        write_text_file(fs::path(a.out) / ("checkpoints" + suffix + ".csv"),
                        checkpoints_csv(rec));
        if (rep == 0)
            write_text_file(fs::path(a.out) / "cluster.svg", render_svg(rec.discs, rec.hull));

        const HullMetrics m = hull_metrics(rec.hull, rec.discs);
        json s = {{"replica", rep},
                  {"stream_seed", cc.seed},
                  {"n_steps", rec.n_steps},
                  {"diameter", m.diameter},
                  {"extremal_count", m.extremal_count},
                  {"shape", shape_name(classify_shape(m, a.f_macro))},
                  {"angle_sum_error", std::abs(rec.hull.measure_sum() - two_pi)}};
        try {
            const GrowthFit g = diameter_growth_rate(rec);
            s["growth"] = {{"rate", g.rate}, {"r2", g.r2}};
        } catch (const Error& e) {
            s["growth"] = {{"error", e.name()}};
        }
        const BranchDecomposition bd = extract_branches(rec);
        const std::vector<std::uint64_t> sizes = branch_sizes(bd);
        json fits = json::array();
        for (std::uint64_t s_min : {3, 5, 10}) fits.push_back(power_law_fit_json(sizes, s_min));
        s["branches"] = {{"backbone_size", bd.backbone_size},
                         {"count", bd.branches.size()},
                         {"fits", fits}};
        replica_summaries[rep] = std::move(s);
    });

    std::vector<double> extremal;
    std::map<std::string, int> shapes{{"triangle", 0}, {"quadrangle", 0}, {"other", 0}};
    for (const auto& s : replica_summaries) {
        extremal.push_back(double(s.at("extremal_count").get<std::uint64_t>()));
        shapes[s.at("shape").get<std::string>()] += 1;
    }
    json summary = {{"replicas", replica_summaries},
                    {"aggregate",
                     {{"median_extremal_count", median(extremal)},
                      {"shape_counts",
                       {{"triangle", shapes["triangle"]},
                        {"quadrangle", shapes["quadrangle"]},
                        {"other", shapes["other"]}}}}}};
    write_json_file(fs::path(a.out) / "summary.json", summary);
    return 0;
}

// ------------------------------------------------------------------- forks

struct VertexArgs {
    std::vector<double> thetas;
    double a = 0.5;
    double z0 = 1.0;
    std::uint64_t cap = 1000000;
    std::uint64_t replicas = 100000;
    std::uint64_t seed = 1;
    unsigned threads = default_threads();
    std::string out;
};

int run_simulate_vertex(const VertexArgs& a) {
    fs::create_directories(a.out);
    json cfg = {{"command", "simulate-vertex"},
                {"theta", a.thetas},
                {"a", a.a},
                {"z0", a.z0},
                {"cap", a.cap},
                {"replicas", a.replicas},
                {"seed", a.seed},
                {"threads", a.threads}};
    write_json_file(fs::path(a.out) / "config.json", cfg);

    json fits = json::array();
    for (std::size_t ti = 0; ti < a.thetas.size(); ++ti) {
        ForkConfig fc;
        fc.theta = a.thetas[ti];
        fc.a = a.a;
        fc.z0 = a.z0;
        fc.step_cap = a.cap;
        validate(fc);

        const std::uint64_t theta_base = splitmix64(a.seed ^ (ti + 1));
        std::vector<ForkLifetimeSample> samples(a.replicas);
        parallel_replicas(a.replicas, a.threads, [&](std::uint64_t rep) {
            Xoshiro256 rng = replica_stream(theta_base, rep);
            samples[rep] = fork_lifetime(fc, rng);
        });

        const std::string tag = std::to_string(ti);
        write_text_file(fs::path(a.out) / ("samples_" + tag + ".csv"),
                        fork_samples_csv(fc.theta, fc.a, samples));

        std::vector<double> grid;
        for (double g = 1.0; g <= double(a.cap); g *= 2.0) grid.push_back(g);
        write_text_file(fs::path(a.out) / ("tail_" + tag + ".csv"),
                        tail_curve_csv(grid, lifetime_tail_curve(samples, grid)));

        std::size_t censored = 0;
        for (const auto& s : samples) censored += s.cause == ForkDeathCause::censored;
        json entry = {{"theta", fc.theta},
                      {"a", fc.a},
                      {"mu", asymptotic_params(fc.theta).mu},
                      {"censored_fraction", double(censored) / double(samples.size())}};
        try {
            entry["fit"] = tail_fit_json(fork_tail_fit(samples));
        } catch (const Error& e) {
            entry["fit"] = {{"error", e.name()}};
        }
        fits.push_back(std::move(entry));
    }
    write_json_file(fs::path(a.out) / "fits.json", fits);
    return 0;
}

// ------------------------------------------------------------------ escape

struct EscapeArgs {
    double theta = 0.0; // 0 means not given
    double mu = 0.0;
    double sigma = 0.0;
    double a = 0.5;
    std::string method = "exact_bridge";
    std::uint64_t replicas = 100000;
    double horizon = 1000000.0;
    double h = 1e-3;
    std::uint64_t seed = 1;
    unsigned threads = default_threads();
    std::string out;
};

int run_escape_tail(const EscapeArgs& a) {
    fs::create_directories(a.out);
    SdeConfig base;
    if (a.theta > 0.0) {
        base = sde_from_theta(a.theta, a.a, a.horizon, a.h);
    } else {
        base.mu = a.mu;
        base.sigma = a.sigma;
        base.a = a.a;
        base.t_max = a.horizon;
        base.h = a.h;
    }
    json cfg = {{"command", "escape-tail"},
                {"mu", base.mu},
                {"sigma", base.sigma},
                {"a", base.a},
                {"method", a.method},
                {"replicas", a.replicas},
                {"horizon", a.horizon},
                {"h", a.h},
                {"seed", a.seed},
                {"threads", a.threads}};
    if (a.theta > 0.0) cfg["theta"] = a.theta;
    write_json_file(fs::path(a.out) / "config.json", cfg);

    std::vector<SdeMethod> methods;
    if (a.method == "euler") methods = {SdeMethod::euler};
    else if (a.method == "exact_bridge") methods = {SdeMethod::exact_bridge};
    else methods = {SdeMethod::euler, SdeMethod::exact_bridge};

    json out = {{"fits", json::array()}};
    std::vector<std::vector<double>> hit_times(methods.size());
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        SdeConfig sc = base;
        sc.method = methods[mi];
        validate(sc);
        const std::uint64_t method_base = splitmix64(a.seed ^ (mi + 1));
        std::vector<EscapeSample> samples(a.replicas);
        parallel_replicas(a.replicas, a.threads, [&](std::uint64_t rep) {
            Xoshiro256 rng = replica_stream(method_base, rep);
            samples[rep] = simulate_escape(sc, rng);
        });
        write_text_file(fs::path(a.out) / ("samples_" + std::string(method_name(sc.method)) +
                                           ".csv"),
                        escape_samples_csv(sc, samples));

        std::size_t censored = 0;
        for (const auto& s : samples) {
            censored += s.censored;
            if (!s.censored) hit_times[mi].push_back(s.t);
        }
        json entry = {{"method", method_name(sc.method)},
                      {"censored_fraction", double(censored) / double(samples.size())}};
        try {
            entry["fit"] = tail_fit_json(escape_tail_fit(samples));
        } catch (const Error& e) {
            entry["fit"] = {{"error", e.name()}};
        }
        out["fits"].push_back(std::move(entry));
    }
    if (a.theta > 0.0) out["mu_reference"] = asymptotic_params(a.theta).mu;
    if (methods.size() == 2) {
        const KsResult ks = ks_two_sample(hit_times[0], hit_times[1]);
        out["ks_d"] = ks.d;
        out["ks_p"] = ks.p;
    }
    write_json_file(fs::path(a.out) / "fit.json", out);
    return 0;
}

// ------------------------------------------------------------------ flow

struct FlowArgs {
    std::string vertices_file;
    double n_target = 100.0;
    double dn = 0.0; // 0 = adaptive
    std::uint64_t max_steps = 1000000;
    std::uint64_t sample_every = 1;
    std::string out;
};

std::vector<Vec2> read_vertices_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vertices file: " + path);
    std::vector<Vec2> v;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double x, y;
        if (!(ls >> x)) continue; // blank
        std::string rest;
        if (!(ls >> y) || (ls >> rest)) {
            throw ConfigurationError("vertices file line " + std::to_string(lineno) +
                                     ": expected 'x y'");
        }
        v.push_back({x, y});
    }
    return v;
}

int run_polygon_flow(const FlowArgs& a) {
    fs::create_directories(a.out);
    json cfg = {{"command", "polygon-flow"}, {"vertices_file", a.vertices_file},
                {"n_target", a.n_target},    {"dn", a.dn},
                {"max_steps", a.max_steps},  {"sample_every", a.sample_every}};
    write_json_file(fs::path(a.out) / "config.json", cfg);

    PolygonState s;
    s.vertices = read_vertices_file(a.vertices_file);
    validate_flow_polygon(s.vertices);

    std::string traj = "n,vertex_count,interior_angles\n";
    auto record_row = [&](const PolygonState& st) {
        std::vector<double> ia = polygon_interior_angles(st.vertices);
        std::sort(ia.begin(), ia.end());
        traj += fmt17(st.n) + "," + std::to_string(st.vertices.size()) + ",";
        for (std::size_t i = 0; i < ia.size(); ++i) {
            if (i) traj += ';';
            traj += fmt17(ia[i]);
        }
        traj += '\n';
    };
    record_row(s);

    // drive flow_step directly so a vanished polygon still leaves its
    // trajectory, merges, and last valid state behind
    const FlowOptions opt;
    std::vector<MergeEvent> merge_log;
    std::uint64_t steps = 0;
    std::string stopped;
    while (s.n < a.n_target && steps < a.max_steps) {
        double dn = a.dn > 0.0 ? a.dn
                               : std::min(opt.dn_scale * min_edge_length(s.vertices), opt.dn_cap);
        dn = std::min(std::max(dn, opt.dn_floor), a.n_target - s.n);
        const std::size_t merges_before = merge_log.size();
        try {
            s = flow_step(s, dn, &merge_log);
        } catch (const DegeneratePolygon& e) {
            merge_log.resize(merges_before); // the rejected step never happened
            stopped = e.name();
            break;
        }
        steps += 1;
        if (steps % a.sample_every == 0) record_row(s);
    }

    write_text_file(fs::path(a.out) / "trajectory.csv", traj);
    std::string merges;
    for (const auto& m : merge_log)
        merges += "{\"n\":" + fmt17(m.n) + ",\"vertex_index\":" +
                  std::to_string(m.vertex_index) + ",\"x\":" + fmt17(m.position.x) +
                  ",\"y\":" + fmt17(m.position.y) +
                  ",\"exterior_angle\":" + fmt17(m.exterior_angle) + "}\n";
    write_text_file(fs::path(a.out) / "merges.jsonl", merges);

    json summary = {{"final_n", s.n},
                    {"final_vertex_count", s.vertices.size()},
                    {"merge_count", merge_log.size()},
                    {"steps", steps},
                    {"reached_target", s.n >= a.n_target}};
    if (!stopped.empty()) summary["stopped"] = stopped;
    write_json_file(fs::path(a.out) / "flow_summary.json", summary);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ballistic disc-aggregation laboratory"};
    app.require_subcommand(1);

    ClusterArgs ca;
    CLI::App* sc = app.add_subcommand("simulate-cluster", "grow clusters, emit events + SVG");
    sc->add_option("--n", ca.n, "attachment steps")->check(CLI::Range(1.0, 1e8));
    sc->add_option("--seed", ca.seed, "base RNG seed");
    sc->add_option("--replicas", ca.replicas, "independent runs")
        ->check(CLI::Range(std::uint64_t(1), std::uint64_t(100000)));
    sc->add_option("--threads", ca.threads, "worker threads");
    sc->add_option("--f-macro", ca.f_macro, "macroscopic edge threshold (fraction of diameter)")
        ->check(CLI::Range(0.0, 1.0));
    sc->add_flag("--audit", ca.audit, "full ring audit after every step");
    sc->add_option("--out", ca.out, "output directory")->required();

    VertexArgs va;
    CLI::App* sv = app.add_subcommand("simulate-vertex", "fork-lifetime ensembles + tail fits");
    sv->add_option("--theta", va.thetas, "half opening angle(s), radians")
        ->required()
        ->check(theta_range);
    sv->add_option("--a", va.a, "|X| death threshold");
    sv->add_option("--z0", va.z0, "initial tip gap");
    sv->add_option("--cap", va.cap, "censoring step cap");
    sv->add_option("--replicas", va.replicas, "fork samples per theta");
    sv->add_option("--seed", va.seed, "base RNG seed");
    sv->add_option("--threads", va.threads, "worker threads");
    sv->add_option("--out", va.out, "output directory")->required();

    EscapeArgs ea;
    CLI::App* se = app.add_subcommand("escape-tail", "escape-time tails of the outward SDE");
    CLI::Option* ot = se->add_option("--theta", ea.theta, "derive (mu, sigma) from theta")
                          ->check(theta_range);
    CLI::Option* om = se->add_option("--mu", ea.mu, "drift coefficient");
    CLI::Option* os = se->add_option("--sigma", ea.sigma, "noise coefficient");
    om->excludes(ot)->needs(os);
    os->excludes(ot)->needs(om);
    se->add_option("--a", ea.a, "barrier");
    se->add_option("--method", ea.method, "euler | exact_bridge | both")
        ->check(CLI::IsMember({"euler", "exact_bridge", "both"}));
    se->add_option("--replicas", ea.replicas, "escape samples per method");
    se->add_option("--horizon", ea.horizon, "censoring time");
    se->add_option("--dh", ea.h, "log-time grid spacing");
    se->add_option("--seed", ea.seed, "base RNG seed");
    se->add_option("--threads", ea.threads, "worker threads");
    se->add_option("--out", ea.out, "output directory")->required();

    FlowArgs fa;
    CLI::App* sf = app.add_subcommand("polygon-flow", "deterministic mean polygon flow");
    sf->add_option("--vertices-file", fa.vertices_file, "CCW vertices, one 'x y' per line")
        ->required()
        ->check(CLI::ExistingFile);
    sf->add_option("--n-target", fa.n_target, "integrate to this step-time");
    sf->add_option("--dn", fa.dn, "fixed step size (default: adaptive)");
    sf->add_option("--max-steps,--steps", fa.max_steps, "integrator step cap");
    sf->add_option("--sample-every", fa.sample_every, "trajectory row thinning")
        ->check(CLI::Range(std::uint64_t(1), std::uint64_t(1000000000)));
    sf->add_option("--out", fa.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sc->parsed()) return run_simulate_cluster(ca);
        if (sv->parsed()) return run_simulate_vertex(va);
        if (se->parsed()) {
            if (!ot->count() && !(om->count() && os->count())) {
                std::cerr << "escape-tail: give --theta or both --mu and --sigma\n";
                return 2;
            }
            return run_escape_tail(ea);
        }
        if (sf->parsed()) return run_polygon_flow(fa);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
