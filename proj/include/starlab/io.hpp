#ifndef STARLAB_IO_HPP
#define STARLAB_IO_HPP

#include <string>
#include <vector>

#include "starlab/constellation.hpp"
#include "starlab/demand.hpp"
#include "starlab/routing.hpp"
#include "starlab/simulator.hpp"
#include "starlab/topology.hpp"

namespace starlab::io {

inline constexpr const char* kVersion = "0.1.0";

/// Stamped at the top of every output file (comment lines in CSV, an object
/// in JSON) so results stay traceable to the exact run.
struct Provenance {
    std::string config_digest;
    std::string generator;
};

void write_ephemeris_csv(const std::string& path, const constellation::Ephemeris& eph,
                         const Provenance& prov);

void write_topology_csv(const std::string& path, const topology::Topology& topo,
                        const Provenance& prov);
topology::Topology read_topology_csv(const std::string& path);

void write_demand_csv(const std::string& path, const demand::DemandMatrix& delta,
                      const std::vector<demand::GroundStation>& stations,
                      const Provenance& prov);

void write_regions_csv(const std::string& path, const demand::RegionalFlowStats& stats,
                       const Provenance& prov);

/// values must be sorted ascending; emits cumulative fractions plus a p90
/// marker column.
void write_cdf_csv(const std::string& path, const std::vector<double>& values,
                   const Provenance& prov);

void write_stretch_report(const std::string& dir, const routing::StretchReport& report,
                          const Provenance& prov);

/// report.json, flows.csv, links.csv, cdf_rtt.csv under dir.
void write_sim_report(const std::string& dir, const simulator::SimReport& report,
                      const Provenance& prov);

/// GeoJSON FeatureCollection: satellites as points, ISLs as role-tagged
/// polylines (intra/inter), optional demand geodesics styled by intensity
/// and one selected path polyline.
std::string export_geojson(const std::vector<Vec3>& sat_positions, int sats_per_orbit,
                           const topology::Topology& topo,
                           const std::vector<demand::GroundStation>& stations,
                           const demand::DemandMatrix* delta,
                           const std::vector<int>* selected_path);

/// Minimal CZML document with satellite points and ISL polylines.
std::string export_czml(const std::vector<Vec3>& sat_positions, int sats_per_orbit,
                        const topology::Topology& topo);

}  // namespace starlab::io

#endif
