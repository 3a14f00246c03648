#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ballistic/cluster.hpp"
#include "ballistic/io.hpp"
#include "ballistic/svg.hpp"

using namespace ballistic;

namespace {

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++n;
    return n;
}

std::size_t count_lines(const std::string& s) {
    return count_occurrences(s, "\n");
}

std::filesystem::path fresh_dir(const char* tag) {
    const auto p = std::filesystem::temp_directory_path() /
                   (std::string("ballistic_test_") + tag);
    std::filesystem::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("decimal formatting round-trips every double") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 1e300, pi, -2.5, 0.0, 5e-324}) {
        const std::string s = fmt17(v);
        REQUIRE(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(fmt17(0.5) == "0.5");
    CHECK(fmt17(1.0) == "1");
}

TEST_CASE("attachment events serialize to stable json lines") {
    AttachmentEvent e;
    e.step = 1;
    e.new_disc = 2;
    e.parent = 0;
    e.phi = 0.5;
    e.extremal_count_after = 5;
    CHECK(event_jsonl_line(e, {3, 4}) ==
          "{\"step\":1,\"new_disc\":2,\"parent\":0,\"phi\":0.5,"
          "\"evicted\":[3,4],\"extremal_count\":5}\n");
    CHECK(event_jsonl_line(e, {}) ==
          "{\"step\":1,\"new_disc\":2,\"parent\":0,\"phi\":0.5,"
          "\"evicted\":[],\"extremal_count\":5}\n");
}

TEST_CASE("run serializers emit one line per event and checkpoint") {
    ClusterConfig cfg;
    cfg.n_steps = 50;
    cfg.seed = 5;
    const RunRecord r = run_cluster(cfg);

    const std::string ev = events_jsonl(r);
    CHECK(count_lines(ev) == r.events.size());
    CHECK(ev.substr(0, 9) == "{\"step\":1");

    const std::string cp = checkpoints_csv(r);
    std::istringstream in(cp);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "step,diameter,extremal_count");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        REQUIRE(count_occurrences(line, ",") == 2);
        ++rows;
    }
    CHECK(rows == r.checkpoints.size());
}

TEST_CASE("sample tables carry their parameters on every row") {
    std::vector<ForkLifetimeSample> fork(2);
    fork[0] = {12.0, ForkDeathCause::threshold, 0.6};
    fork[1] = {100.0, ForkDeathCause::censored, 0.1};
    const std::string fs = fork_samples_csv(1.1, 0.5, fork);
    std::istringstream in(fs);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "theta,a,T,cause");
    REQUIRE(std::getline(in, line));
    CHECK(line == "1.1000000000000001,0.5,12,threshold");
    REQUIRE(std::getline(in, line));
    CHECK(line == "1.1000000000000001,0.5,100,censored");

    SdeConfig cfg;
    cfg.mu = 2.0;
    cfg.sigma = 1.0;
    cfg.a = 0.5;
    cfg.method = SdeMethod::exact_bridge;
    const std::string es = escape_samples_csv(cfg, {{7.5, false}, {1e6, true}});
    std::istringstream in2(es);
    REQUIRE(std::getline(in2, line));
    CHECK(line == "mu,sigma,a,method,T,censored");
    REQUIRE(std::getline(in2, line));
    CHECK(line == "2,1,0.5,exact_bridge,7.5,0");
    REQUIRE(std::getline(in2, line));
    CHECK(line == "2,1,0.5,exact_bridge,1000000,1");
}

TEST_CASE("tail curves and ccdfs serialize in order") {
    CHECK(tail_curve_csv({1.0, 2.0}, {1.0, 0.25}) == "n,survival\n1,1\n2,0.25\n");

    const std::string cc = ccdf_csv({3, 1, 2, 2});
    std::istringstream in(cc);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "size,ccdf");
    double prev = 2.0;
    bool first = true;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const std::size_t comma = line.find(',');
        const double v = std::strtod(line.c_str() + comma + 1, nullptr);
        if (first) CHECK(v == 1.0);
        first = false;
        REQUIRE(v <= prev);
        prev = v;
        ++rows;
    }
    CHECK(rows == 3); // distinct sizes 1, 2, 3
}

TEST_CASE("text files round-trip and nested directories appear on demand") {
    const auto dir = fresh_dir("io");
    const auto nested = dir / "a" / "b" / "data.txt";
    write_text_file(nested, "hello\nworld\n");
    std::ifstream in(nested, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == "hello\nworld\n");

    // a regular file blocking the parent chain makes directory creation fail
    const auto blocker = dir / "plain.txt";
    write_text_file(blocker, "x");
    REQUIRE_THROWS(write_text_file(blocker / "child.txt", "y"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("rendering requires at least one disc") {
    DiscStore discs;
    HullState hull;
    CHECK_THROWS_AS(render_svg(discs, hull), EmptyInput);
}

TEST_CASE("a single disc renders as a filled circle with a circular outline") {
    DiscStore discs;
    discs.add({0.0, 0.0}, -1);
    const HullState hull = build_hull(discs);
    const std::string svg = render_svg(discs, hull);
    CHECK(count_occurrences(svg, "<circle") == 2);
    CHECK(count_occurrences(svg, "hsl(240,85%,55%)") == 1);
    CHECK(count_occurrences(svg, "<path") == 0);
    CHECK(svg.find("viewBox=\"") != std::string::npos);
}

TEST_CASE("two tangent discs render as two arcs joined by two segments") {
    DiscStore discs;
    discs.add({0.0, 0.0}, -1);
    discs.add({1.0, 0.0}, 0);
    const HullState hull = build_hull(discs);
    const std::string svg = render_svg(discs, hull);
    CHECK(count_occurrences(svg, " A 0.5") == 2);
    CHECK(count_occurrences(svg, " L ") == 2);
    CHECK(count_occurrences(svg, "<path d=\"M ") == 1);
    CHECK(count_occurrences(svg, " Z\"") == 1);
    // hue endpoints: oldest blue, newest red
    CHECK(count_occurrences(svg, "hsl(240,85%,55%)") == 1);
    CHECK(count_occurrences(svg, "hsl(0,85%,55%)") == 1);
}

TEST_CASE("a triangular cluster closes its boundary path") {
    DiscStore discs;
    discs.add({0.0, 0.0}, -1);
    discs.add({2.0, 0.0}, 0);
    discs.add({1.0, 1.8}, 1);
    const HullState hull = build_hull(discs);
    const std::string svg = render_svg(discs, hull);
    CHECK(count_occurrences(svg, " A 0.5") == 3);
    CHECK(count_occurrences(svg, " L ") == 3);
    CHECK(count_occurrences(svg, " Z\"") == 1);
}

TEST_CASE("large renders stay well formed") {
    ClusterConfig cfg;
    cfg.n_steps = 999;
    cfg.seed = 9;
    const RunRecord r = run_cluster(cfg);
    const std::string svg = render_svg(r.discs, r.hull);
    REQUIRE(svg.rfind("<svg ", 0) == 0);
    REQUIRE(svg.substr(svg.size() - 7) == "</svg>\n");
    CHECK(count_occurrences(svg, "<circle") == 1000);
    CHECK(count_occurrences(svg, "<path d=\"M ") == 1);
    CHECK(count_occurrences(svg, "<") == count_occurrences(svg, ">"));
}
