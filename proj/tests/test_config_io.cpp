#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "starlab/config.hpp"
#include "starlab/io.hpp"

using namespace starlab;
using namespace starlab::config;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("starlab_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("parse_config: defaults for an empty object") {
    const RunConfig cfg = parse_config("{}");
    CHECK(cfg.shell.num_orbits == 72);
    CHECK(cfg.shell.sats_per_orbit == 22);
    CHECK(cfg.shell.altitude == doctest::Approx(550e3));
    CHECK(cfg.shell.inclination == doctest::Approx(53.0 * M_PI / 180.0));
    CHECK(cfg.net.isl_bandwidth == doctest::Approx(1e12));
    CHECK(cfg.net.gsl_bandwidth == doctest::Approx(100e9));
    CHECK(cfg.net.isl_noise == doctest::Approx(0.1));
    CHECK(cfg.net.gsl_noise == doctest::Approx(0.001));
    CHECK(cfg.net.buffer_size == 1000);
    CHECK(cfg.net.packet_size == doctest::Approx(12e3));
    CHECK(cfg.net.min_elevation == doctest::Approx(25.0 * M_PI / 180.0));
    CHECK(cfg.topology_spec.generator == "starfield");
    CHECK(cfg.topology_spec.params.degree_bound == 4);
}

TEST_CASE("parse_config: unknown keys rejected at every level") {
    CHECK_THROWS(parse_config(R"({"bogus": 1})"));
    CHECK_THROWS(parse_config(R"({"shell": {"altitude_km": 550}})"));
    CHECK_THROWS(parse_config(R"({"demand": {"patern": "uniform"}})"));
    CHECK_THROWS(parse_config(R"({"topology": {"kappa": 4}})"));
    CHECK_THROWS(parse_config(R"({"network": {"bandwidth": 1}})"));
    CHECK_THROWS(parse_config(R"({"time": {"start": 0}})"));
}

TEST_CASE("parse_config: validation failures") {
    CHECK_THROWS(parse_config(R"({"shell": {"num_orbits": 0}})"));
    CHECK_THROWS(parse_config(R"({"topology": {"generator": "motif"}})"));
    CHECK_THROWS(parse_config(R"({"demand": {"pattern": "nope"}})"));
    CHECK_THROWS(parse_config(R"({"duration_s": -1})"));
}

TEST_CASE("config: degree inputs and unit conversions") {
    const RunConfig cfg = parse_config(
        R"({"shell": {"inclination_deg": 90, "mean_motion_rad_per_hour": 7.2},
            "network": {"min_elevation_deg": 40}})");
    CHECK(cfg.shell.inclination == doctest::Approx(M_PI / 2));
    CHECK(cfg.shell.mean_motion == doctest::Approx(7.2 / 3600.0));
    CHECK(cfg.net.min_elevation == doctest::Approx(40.0 * M_PI / 180.0));
}

TEST_CASE("config round trip and stable digest") {
    RunConfig cfg = parse_config(R"({"duration_s": 2.5, "output_dir": "elsewhere"})");
    const RunConfig again = parse_config(to_json(cfg));
    CHECK(to_json(cfg) == to_json(again));
    CHECK(cfg.digest() == again.digest());
    RunConfig other = cfg;
    other.duration = 3.0;
    CHECK(cfg.digest() != other.digest());
}

TEST_CASE("topology CSV round trip with provenance header") {
    TempDir tmp;
    topology::Topology topo;
    topo.num_satellites = 10;
    topo.generator = "plus_grid";
    topo.add_edge(0, 1);
    topo.add_edge(3, 7);
    topo.add_edge(2, 9);
    topo.finalize();
    const io::Provenance prov{"deadbeef", "plus_grid"};
    const std::string path = tmp.file("topo.csv");
    io::write_topology_csv(path, topo, prov);
    const std::string text = slurp(path);
    CHECK(text.find("deadbeef") != std::string::npos);
    const topology::Topology back = io::read_topology_csv(path);
    CHECK(back.num_satellites == topo.num_satellites);
    CHECK(back.edges == topo.edges);
}

TEST_CASE("cdf CSV: header, p90 marker, nondecreasing fractions") {
    TempDir tmp;
    const std::string path = tmp.file("cdf.csv");
    std::vector<double> values;
    for (int k = 1; k <= 100; ++k) values.push_back(k * 0.1);
    io::write_cdf_csv(path, values, {"cafe", "test"});
    const std::string text = slurp(path);
    CHECK(text.find("p90=") != std::string::npos);
    CHECK(text.find("cafe") != std::string::npos);
    // fractions in the body are nondecreasing, ending at 1
    std::istringstream lines(text);
    std::string line;
    double last = -1.0;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#' || line.find("value") == 0) continue;
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        const double frac = std::stod(line.substr(comma + 1));
        CHECK(frac >= last);
        last = frac;
    }
    CHECK(last == doctest::Approx(1.0));
}

TEST_CASE("geojson export: feature counts and roles") {
    const constellation::ShellConfig cfg = []{
        constellation::ShellConfig c = constellation::ShellConfig::phase1();
        c.num_orbits = 4;
        c.sats_per_orbit = 5;
        return c;
    }();
    const auto eph = constellation::generate_shell(cfg, {0.0});
    const topology::Topology grid = topology::plus_grid(4, 5);
    const std::string text = io::export_geojson(eph.positions[0], cfg.sats_per_orbit,
                                                grid, {}, nullptr, nullptr);
    // 20 satellite points + 40 ISL lines
    std::size_t points = 0, lines = 0, pos = 0;
    while ((pos = text.find("\"Point\"", pos)) != std::string::npos) {
        ++points;
        pos += 7;
    }
    pos = 0;
    while ((pos = text.find("\"LineString\"", pos)) != std::string::npos) {
        ++lines;
        pos += 12;
    }
    CHECK(points == 20);
    CHECK(lines == 40);
    CHECK(text.find("intra") != std::string::npos);
    CHECK(text.find("inter") != std::string::npos);

    // an empty topology still yields a valid, empty collection
    topology::Topology none;
    none.num_satellites = 0;
    const std::string empty = io::export_geojson({}, 1, none, {}, nullptr, nullptr);
    CHECK(empty.find("FeatureCollection") != std::string::npos);
}

TEST_CASE("czml export mentions every satellite") {
    constellation::ShellConfig cfg = constellation::ShellConfig::phase1();
    cfg.num_orbits = 2;
    cfg.sats_per_orbit = 3;
    const auto eph = constellation::generate_shell(cfg, {0.0});
    const topology::Topology grid = topology::plus_grid(2, 3);
    const std::string text = io::export_czml(eph.positions[0], 3, grid);
    CHECK(text.find("document") != std::string::npos);
    for (int k = 0; k < 6; ++k)
        CHECK(text.find("sat-" + std::to_string(k)) != std::string::npos);
}

TEST_CASE("sim report files written with headers") {
    TempDir tmp;
    simulator::SimReport report;
    report.generated = 10;
    report.delivered = 9;
    report.dropped = 1;
    simulator::FlowReport fr;
    fr.src = 0;
    fr.dst = 1;
    fr.generated = 10;
    fr.delivered = 9;
    fr.rtt_samples = {0.01, 0.012, 0.011};
    report.flows.push_back(fr);
    io::write_sim_report(tmp.file(""), report, {"f00d", "sim"});
    CHECK(slurp(tmp.file("report.json")).find("\"generated\"") != std::string::npos);
    CHECK(slurp(tmp.file("flows.csv")).find("src") != std::string::npos);
    CHECK(slurp(tmp.file("cdf_rtt.csv")).find("p90=") != std::string::npos);
}
