// Python bindings for the starlab core library.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "starlab/constellation.hpp"
#include "starlab/demand.hpp"
#include "starlab/flat.hpp"
#include "starlab/routing.hpp"
#include "starlab/simulator.hpp"
#include "starlab/topology.hpp"

namespace py = pybind11;
using namespace starlab;

namespace {

std::vector<std::vector<double>> matrix_rows(const demand::DemandMatrix& m) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.size));
    for (int i = 0; i < m.size; ++i)
        for (int j = 0; j < m.size; ++j)
            rows[static_cast<std::size_t>(i)].push_back(m.at(i, j));
    return rows;
}

demand::DemandMatrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    demand::DemandMatrix m(static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size())
            throw std::invalid_argument("demand matrix must be square");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
    return m;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "LEO constellation topology laboratory (C++ core bindings)";

    py::class_<constellation::ShellConfig>(mod, "ShellConfig")
        .def(py::init<>())
        .def_readwrite("altitude", &constellation::ShellConfig::altitude)
        .def_readwrite("inclination", &constellation::ShellConfig::inclination)
        .def_readwrite("num_orbits", &constellation::ShellConfig::num_orbits)
        .def_readwrite("sats_per_orbit", &constellation::ShellConfig::sats_per_orbit)
        .def_readwrite("phase_offset", &constellation::ShellConfig::phase_offset)
        .def_readwrite("mean_motion", &constellation::ShellConfig::mean_motion)
        .def_readwrite("isl_max_range", &constellation::ShellConfig::isl_max_range)
        .def_readwrite("min_altitude_clearance",
                       &constellation::ShellConfig::min_altitude_clearance)
        .def("shell_radius", &constellation::ShellConfig::shell_radius)
        .def("num_satellites", &constellation::ShellConfig::num_satellites)
        .def("effective_isl_range", &constellation::ShellConfig::effective_isl_range)
        .def("validate", &constellation::ShellConfig::validate)
        .def_static("phase1", &constellation::ShellConfig::phase1);

    py::class_<constellation::Ephemeris>(mod, "Ephemeris")
        .def_readonly("config", &constellation::Ephemeris::config)
        .def_readonly("times", &constellation::Ephemeris::times)
        .def("positions_at", [](const constellation::Ephemeris& eph, std::size_t k) {
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& p : eph.positions.at(k))
                out.emplace_back(p.x, p.y, p.z);
            return out;
        });

    py::class_<constellation::RangeGraph>(mod, "RangeGraph")
        .def_readonly("num_satellites", &constellation::RangeGraph::num_satellites)
        .def_readonly("neighbors", &constellation::RangeGraph::neighbors)
        .def("has_edge", &constellation::RangeGraph::has_edge)
        .def("num_edges", &constellation::RangeGraph::num_edges);

    mod.def("generate_shell", &constellation::generate_shell, py::arg("config"),
            py::arg("times"));
    mod.def("range_graph", &constellation::range_graph, py::arg("ephemeris"),
            py::arg("range_meters"));
    mod.def("max_isl_range", &constellation::max_isl_range, py::arg("shell_radius"),
            py::arg("clearance_altitude"));

    py::class_<demand::GroundStation>(mod, "GroundStation")
        .def_readonly("id", &demand::GroundStation::id)
        .def_readonly("name", &demand::GroundStation::name)
        .def_readonly("latitude_deg", &demand::GroundStation::latitude_deg)
        .def_readonly("longitude_deg", &demand::GroundStation::longitude_deg)
        .def_readonly("population", &demand::GroundStation::population)
        .def_static("from_lat_lon", &demand::GroundStation::from_lat_lon,
                    py::arg("id"), py::arg("name"), py::arg("lat_deg"),
                    py::arg("lon_deg"), py::arg("population"), py::arg("shell_radius"));

    mod.def("load_stations_csv", &demand::load_stations_csv, py::arg("path"),
            py::arg("shell_radius"));

    py::class_<demand::DemandMatrix>(mod, "DemandMatrix")
        .def(py::init<int>(), py::arg("size") = 0)
        .def_readonly("size", &demand::DemandMatrix::size)
        .def("get", [](const demand::DemandMatrix& m, int i, int j) { return m.at(i, j); })
        .def("set", [](demand::DemandMatrix& m, int i, int j, double v) { m.at(i, j) = v; })
        .def("total", &demand::DemandMatrix::total)
        .def("mean_nonzero", &demand::DemandMatrix::mean_nonzero)
        .def("normalized", &demand::DemandMatrix::normalized)
        .def("rows", &matrix_rows)
        .def_static("from_rows", &matrix_from_rows);

    mod.def("build_demand",
            [](const std::vector<demand::GroundStation>& stations,
               const std::string& pattern, double base_intensity, std::uint64_t seed) {
                return demand::build_demand(stations, demand::pattern_from_string(pattern),
                                            base_intensity, seed);
            },
            py::arg("stations"), py::arg("pattern"), py::arg("base_intensity") = 1.0,
            py::arg("seed") = 1);
    mod.def("perturb_demand", &demand::perturb_demand, py::arg("delta"), py::arg("mu"),
            py::arg("sigma"), py::arg("seed"));
    mod.def("regional_resultant_length",
            [](const demand::DemandMatrix& delta,
               const std::vector<demand::GroundStation>& stations, double lat_step,
               double lon_step) {
                return demand::regional_flow_stats(delta, stations, lat_step, lon_step)
                    .weighted_mean_resultant_length;
            },
            py::arg("delta"), py::arg("stations"), py::arg("lat_step_deg") = 20.0,
            py::arg("lon_step_deg") = 30.0);

    py::class_<topology::Topology>(mod, "Topology")
        .def_readonly("num_satellites", &topology::Topology::num_satellites)
        .def_readonly("degree_bound", &topology::Topology::degree_bound)
        .def_readonly("edges", &topology::Topology::edges)
        .def_readonly("generator", &topology::Topology::generator)
        .def_readonly("isolated", &topology::Topology::isolated)
        .def("degrees", &topology::Topology::degrees)
        .def("has_edge", &topology::Topology::has_edge);

    py::class_<topology::StarfieldParams>(mod, "StarfieldParams")
        .def(py::init<>())
        .def_readwrite("degree_bound", &topology::StarfieldParams::degree_bound)
        .def_readwrite("field_constant", &topology::StarfieldParams::field_constant)
        .def_readwrite("crown_strength", &topology::StarfieldParams::crown_strength)
        .def_readwrite("crown_decay", &topology::StarfieldParams::crown_decay)
        .def_readwrite("crown_enabled", &topology::StarfieldParams::crown_enabled)
        .def_readwrite("epsilon", &topology::StarfieldParams::epsilon)
        .def_readwrite("normalize_demand", &topology::StarfieldParams::normalize_demand)
        .def_property("mode",
                      [](const topology::StarfieldParams& p) {
                          return p.mode == topology::DistanceMode::kPlain
                                     ? "plain" : "prioritized";
                      },
                      [](topology::StarfieldParams& p, const std::string& m) {
                          p.mode = topology::mode_from_string(m);
                      });

    mod.def("starfield", &topology::starfield, py::arg("range_graph"),
            py::arg("ephemeris"), py::arg("delta"), py::arg("stations"),
            py::arg("params"));
    mod.def("static_starfield", &topology::static_starfield, py::arg("range_graph"),
            py::arg("ephemeris"), py::arg("delta"), py::arg("stations"),
            py::arg("params"));
    mod.def("plus_grid", &topology::plus_grid, py::arg("num_orbits"),
            py::arg("sats_per_orbit"));
    mod.def("random_topology", &topology::random_topology, py::arg("range_graph"),
            py::arg("ephemeris"), py::arg("degree_bound"), py::arg("seed"));

    mod.def("stretch_summary",
            [](const topology::Topology& topo, const constellation::Ephemeris& eph,
               const std::vector<demand::GroundStation>& stations,
               const demand::DemandMatrix& delta, double min_elevation_rad) {
                const auto rep = routing::stretch_report(
                    topo, eph.midpoint_positions(), stations, delta, min_elevation_rad);
                py::dict out;
                out["flows"] = rep.flows.size();
                out["unreachable_flows"] = rep.unreachable_flows;
                out["stretch_mean"] = rep.stretch.mean;
                out["stretch_p50"] = rep.stretch.p50;
                out["stretch_p90"] = rep.stretch.p90;
                out["stretch_p99"] = rep.stretch.p99;
                out["hops_mean"] = rep.hops.mean;
                out["weighted_mean_stretch"] = routing::weighted_mean_stretch(rep, delta);
                return out;
            },
            py::arg("topology"), py::arg("ephemeris"), py::arg("stations"),
            py::arg("delta"), py::arg("min_elevation_rad") = 25.0 * M_PI / 180.0);

    mod.def("simulate",
            [](const topology::Topology& topo, const constellation::Ephemeris& eph,
               const std::vector<demand::GroundStation>& stations,
               const demand::DemandMatrix& delta, double duration, std::uint64_t seed) {
                const std::vector<std::pair<topology::Epoch, topology::Topology>>
                    schedule = {{topology::Epoch{0.0, duration}, topo}};
                const std::vector<std::vector<Vec3>> pos = {eph.midpoint_positions()};
                simulator::NetParams params;
                const auto rep = simulator::run(schedule, pos, stations, delta, params,
                                                duration, seed);
                py::dict out;
                out["generated"] = rep.generated;
                out["delivered"] = rep.delivered;
                out["dropped"] = rep.dropped;
                out["in_flight_at_end"] = rep.in_flight_at_end;
                out["total_isl_forwards"] = rep.total_isl_forwards;
                return out;
            },
            py::arg("topology"), py::arg("ephemeris"), py::arg("stations"),
            py::arg("delta"), py::arg("duration") = 60.0, py::arg("seed") = 1);

    mod.def("motivating_example", []() {
        const auto ex = flat::motivating_example();
        py::dict out;
        out["grid_stretch"] = ex.grid_stretch;
        out["diagonal_stretch"] = ex.diagonal_stretch;
        out["grid_axis_stretch"] = ex.grid_axis_stretch;
        out["diagonal_axis_stretch"] = ex.diagonal_axis_stretch;
        return out;
    });
}
