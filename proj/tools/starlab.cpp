// Command-line front end: one experiment per invocation, all outputs under
// the configured directory.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "starlab/config.hpp"
#include "starlab/constellation.hpp"
#include "starlab/demand.hpp"
#include "starlab/flat.hpp"
#include "starlab/io.hpp"
#include "starlab/routing.hpp"
#include "starlab/simulator.hpp"
#include "starlab/topology.hpp"

namespace {

using namespace starlab;

struct Workspace {
    config::RunConfig cfg;
    io::Provenance prov;
    std::string out_dir;
};

Workspace make_workspace(const std::string& config_path,
                         std::optional<std::uint64_t> seed,
                         const std::string& out_override) {
    Workspace ws;
    ws.cfg = config_path.empty() ? config::RunConfig{} : config::load_config(config_path);
    if (seed.has_value()) {
        ws.cfg.demand_spec.seed = *seed;
        ws.cfg.topology_spec.seed = *seed;
    }
    if (!out_override.empty()) ws.cfg.output_dir = out_override;
    ws.cfg.validate();
    ws.out_dir = ws.cfg.output_dir;
    ws.prov = {ws.cfg.digest(), ws.cfg.topology_spec.generator};
    return ws;
}

struct Scene {
    constellation::Ephemeris eph;
    constellation::RangeGraph range;
    std::vector<demand::GroundStation> stations;
    demand::DemandMatrix delta;
};

Scene build_scene(const config::RunConfig& cfg) {
    Scene sc;
    sc.eph = constellation::generate_shell(cfg.shell, cfg.time.samples());
    sc.range = constellation::range_graph(sc.eph, cfg.shell.effective_isl_range());
    sc.stations =
        demand::load_stations_csv(cfg.demand_spec.stations_csv, cfg.shell.shell_radius());
    sc.delta = demand::build_demand(sc.stations, cfg.demand_spec.pattern,
                                    cfg.demand_spec.base_intensity, cfg.demand_spec.seed);
    if (cfg.demand_spec.noise_mu != 0.0 || cfg.demand_spec.noise_sigma != 0.0)
        sc.delta = demand::perturb_demand(sc.delta, cfg.demand_spec.noise_mu,
                                          cfg.demand_spec.noise_sigma,
                                          cfg.demand_spec.seed + 1);
    return sc;
}

topology::StarfieldParams field_params(const config::RunConfig& cfg) {
    auto p = cfg.topology_spec.params;
    return p;
}

topology::Topology build_topology(const config::RunConfig& cfg, const Scene& sc) {
    const auto& gen = cfg.topology_spec.generator;
    if (gen == "plus_grid")
        return topology::plus_grid(cfg.shell.num_orbits, cfg.shell.sats_per_orbit);
    if (gen == "random")
        return topology::random_topology(sc.range, sc.eph,
                                         cfg.topology_spec.params.degree_bound,
                                         cfg.topology_spec.seed);
    if (gen == "static_starfield")
        return topology::static_starfield(sc.range, sc.eph, sc.delta, sc.stations,
                                          field_params(cfg));
    return topology::starfield(sc.range, sc.eph, sc.delta, sc.stations,
                               field_params(cfg));
}

std::vector<topology::Epoch> split_epochs(const config::RunConfig& cfg) {
    std::vector<topology::Epoch> epochs;
    const double span = cfg.time.stop - cfg.time.start;
    const int n = cfg.topology_spec.epochs;
    for (int k = 0; k < n; ++k)
        epochs.push_back({cfg.time.start + span * k / n,
                          cfg.time.start + span * (k + 1) / n});
    return epochs;
}

const std::vector<Vec3>& positions_near(const constellation::Ephemeris& eph, double t) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < eph.times.size(); ++k) {
        const double d = std::fabs(eph.times[k] - t);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return eph.positions[best];
}

int cmd_constellation(const Workspace& ws) {
    const auto eph = constellation::generate_shell(ws.cfg.shell, ws.cfg.time.samples());
    io::write_ephemeris_csv(ws.out_dir + "/ephemeris.csv", eph, ws.prov);
    std::cout << "wrote " << ws.out_dir << "/ephemeris.csv ("
              << ws.cfg.shell.num_satellites() << " satellites, "
              << eph.times.size() << " samples)\n";
    return 0;
}

int cmd_topology(const Workspace& ws) {
    const Scene sc = build_scene(ws.cfg);
    const auto topo = build_topology(ws.cfg, sc);
    io::write_topology_csv(ws.out_dir + "/topology.csv", topo, ws.prov);
    io::write_demand_csv(ws.out_dir + "/demand.csv", sc.delta, sc.stations, ws.prov);
    const auto report =
        routing::stretch_report(topo, sc.eph.midpoint_positions(), sc.stations,
                                sc.delta, ws.cfg.net.min_elevation);
    io::write_stretch_report(ws.out_dir, report, ws.prov);
    std::cout << ws.cfg.topology_spec.generator << ": " << topo.edges.size()
              << " edges, stretch p90=" << report.stretch.p90
              << " mean hops=" << report.hops.mean << '\n';
    return 0;
}

int cmd_simulate(const Workspace& ws) {
    const Scene sc = build_scene(ws.cfg);
    std::vector<std::pair<topology::Epoch, topology::Topology>> schedule;
    if (ws.cfg.topology_spec.generator == "starfield" && ws.cfg.topology_spec.epochs > 1) {
        schedule = topology::dynamic_schedule(sc.eph, split_epochs(ws.cfg), sc.delta,
                                              sc.stations, field_params(ws.cfg),
                                              ws.cfg.shell.effective_isl_range());
    } else {
        schedule.push_back(
            {{ws.cfg.time.start, ws.cfg.time.stop}, build_topology(ws.cfg, sc)});
    }
    std::vector<std::vector<Vec3>> epoch_positions;
    for (const auto& [epoch, topo] : schedule)
        epoch_positions.push_back(
            positions_near(sc.eph, (epoch.start + epoch.end) / 2.0));
    const auto report =
        simulator::run(schedule, epoch_positions, sc.stations, sc.delta, ws.cfg.net,
                       ws.cfg.duration, ws.cfg.topology_spec.seed);
    io::write_sim_report(ws.out_dir, report, ws.prov);
    std::cout << "generated=" << report.generated << " delivered=" << report.delivered
              << " dropped=" << report.dropped
              << " in_flight=" << report.in_flight_at_end << '\n';
    return 0;
}

int cmd_analyze_demand(const Workspace& ws, double lat_step, double lon_step) {
    const Scene sc = build_scene(ws.cfg);
    const auto stats =
        demand::regional_flow_stats(sc.delta, sc.stations, lat_step, lon_step);
    io::write_regions_csv(ws.out_dir + "/regions.csv", stats, ws.prov);
    std::cout << "weighted mean resultant length = "
              << stats.weighted_mean_resultant_length << '\n';
    return 0;
}

int cmd_export_viz(const Workspace& ws, const std::string& topology_csv) {
    const Scene sc = build_scene(ws.cfg);
    const auto topo = topology_csv.empty() ? build_topology(ws.cfg, sc)
                                           : io::read_topology_csv(topology_csv);
    const auto& positions = sc.eph.midpoint_positions();
    std::filesystem::create_directories(ws.out_dir);
    {
        std::ofstream out(ws.out_dir + "/topology.geojson");
        out << io::export_geojson(positions, ws.cfg.shell.sats_per_orbit, topo,
                                  sc.stations, &sc.delta, nullptr);
    }
    {
        std::ofstream out(ws.out_dir + "/topology.czml");
        out << io::export_czml(positions, ws.cfg.shell.sats_per_orbit, topo);
    }
    std::cout << "wrote " << ws.out_dir << "/topology.geojson and .czml\n";
    return 0;
}

int cmd_flat(const Workspace& ws, int instances, std::uint64_t seed) {
    const auto ex = flat::motivating_example();
    std::cout << "unit grid corner stretch  = " << ex.grid_stretch << '\n';
    std::cout << "diagonal overlay stretch  = " << ex.diagonal_stretch << '\n';

    std::filesystem::create_directories(ws.out_dir);
    std::ofstream out(ws.out_dir + "/flat_bounds.csv");
    out << "# version=" << io::kVersion << "\n";
    out << "seed,measured_length,theorem2_bound,violated\n";
    int violations = 0;
    for (int k = 0; k < instances; ++k) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(k);
        flat::FlatField field = flat::gen_flat_field(4.0, 0.05, 8.0, 8.0, s);
        field.range = 2.0;
        const double side = 4.0;
        const std::vector<double> dirs = {0.3, 0.3, 0.3, 0.3};
        const auto rg = flat::rotated_grid_topology(field, side, dirs);
        const flat::Vec2 s_pt{0.5, 0.5};
        const flat::Vec2 d_pt{7.0, 7.0};
        // endpoints must take part in the rotated grid; most satellites are
        // not snapped grid points and stay isolated
        const auto degrees = rg.topo.degrees();
        const auto nearest_node = [&](const flat::Vec2& p) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < field.positions.size(); ++k) {
                if (degrees[k] == 0) continue;
                const double d = (field.positions[k] - p).norm();
                if (d < best_d) { best_d = d; best = static_cast<int>(k); }
            }
            return best;
        };
        const int a = nearest_node(s_pt);
        const int b = nearest_node(d_pt);
        const double measured = flat::shortest_path_length(field, rg.topo, a, b);
        // split the straight segment at the region boundaries (2x2 regions)
        const flat::Vec2 seg = d_pt - s_pt;
        std::vector<double> cuts = {0.0, 1.0};
        for (const double c : {side}) {
            if (std::abs(seg.x) > 1e-12) {
                const double t = (c - s_pt.x) / seg.x;
                if (t > 0.0 && t < 1.0) cuts.push_back(t);
            }
            if (std::abs(seg.y) > 1e-12) {
                const double t = (c - s_pt.y) / seg.y;
                if (t > 0.0 && t < 1.0) cuts.push_back(t);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        const double seg_angle = std::atan2(seg.y, seg.x);
        std::vector<flat::RegionSegment> segments;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double len = seg.norm() * (cuts[k + 1] - cuts[k]);
            if (len < 1e-12) continue;
            const flat::Vec2 mid = s_pt + seg * (0.5 * (cuts[k] + cuts[k + 1]));
            const int ri = std::min(1, static_cast<int>(mid.x / side));
            const int rj = std::min(1, static_cast<int>(mid.y / side));
            segments.push_back(
                {len, seg_angle - dirs[static_cast<std::size_t>(rj * 2 + ri)]});
        }
        const double bound =
            flat::theorem2_upper_bound(segments, field.range, field.density,
                                       field.distortion);
        const bool bad = measured > bound;
        violations += bad ? 1 : 0;
        out << s << ',' << measured << ',' << bound << ',' << (bad ? 1 : 0) << '\n';
    }
    std::cout << instances << " instances, " << violations << " bound violations\n";
    return violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LEO mega-constellation topology laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "run configuration (JSON)");
    app.add_option("--seed", seed, "override demand/topology seeds");
    app.add_option("--out", out_override, "override output directory");

    auto* constellation_cmd =
        app.add_subcommand("constellation", "generate and export an ephemeris");
    auto* topology_cmd =
        app.add_subcommand("topology", "build a topology and its stretch report");
    auto* simulate_cmd = app.add_subcommand("simulate", "packet-level simulation");
    auto* flat_cmd = app.add_subcommand("flat", "flat-plane bounds and examples");
    int flat_instances = 100;
    std::uint64_t flat_seed = 1;
    flat_cmd->add_option("--instances", flat_instances, "seeded instances to check");
    flat_cmd->add_option("--flat-seed", flat_seed, "first instance seed");
    auto* viz_cmd = app.add_subcommand("export-viz", "GeoJSON + CZML export");
    std::string topology_csv;
    viz_cmd->add_option("--topology-csv", topology_csv,
                        "visualize an existing topology file");
    auto* analyze_cmd =
        app.add_subcommand("analyze-demand", "regional flow direction statistics");
    double lat_step = 20.0;
    double lon_step = 30.0;
    analyze_cmd->add_option("--lat-step", lat_step, "latitude cell size, degrees");
    analyze_cmd->add_option("--lon-step", lon_step, "longitude cell size, degrees");

    CLI11_PARSE(app, argc, argv);

    try {
        const Workspace ws = make_workspace(config_path, seed, out_override);
        if (constellation_cmd->parsed()) return cmd_constellation(ws);
        if (topology_cmd->parsed()) return cmd_topology(ws);
        if (simulate_cmd->parsed()) return cmd_simulate(ws);
        if (flat_cmd->parsed()) return cmd_flat(ws, flat_instances, flat_seed);
        if (viz_cmd->parsed()) return cmd_export_viz(ws, topology_csv);
        if (analyze_cmd->parsed()) return cmd_analyze_demand(ws, lat_step, lon_step);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
