#include "starlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace starlab::io {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setprecision(17);
    return out;
}

void stamp(std::ofstream& out, const Provenance& prov) {
    out << "# version=" << kVersion << " config=" << prov.config_digest
        << " generator=" << prov.generator << "\n";
}

json prov_json(const Provenance& prov) {
    return {{"version", kVersion},
            {"config", prov.config_digest},
            {"generator", prov.generator}};
}

std::pair<double, double> lat_lon_deg(const Vec3& p) {
    const double r = p.norm();
    const double lat = std::asin(p.z / r) * 180.0 / M_PI;
    const double lon = std::atan2(p.y, p.x) * 180.0 / M_PI;
    return {lat, lon};
}

json point_coords(const Vec3& p) {
    const auto [lat, lon] = lat_lon_deg(p);
    return json::array({lon, lat, p.norm() - constellation::kEarthRadius});
}

}  // namespace

void write_ephemeris_csv(const std::string& path, const constellation::Ephemeris& eph,
                         const Provenance& prov) {
    auto out = open_out(path);
    stamp(out, prov);
    out << "time_s,satellite,orbit,slot,x_m,y_m,z_m\n";
    for (std::size_t t = 0; t < eph.times.size(); ++t)
        for (std::size_t s = 0; s < eph.positions[t].size(); ++s) {
            const auto id = eph.id_of(static_cast<int>(s));
            const Vec3& p = eph.positions[t][s];
            out << eph.times[t] << ',' << s << ',' << id.orbit << ',' << id.slot << ','
                << p.x << ',' << p.y << ',' << p.z << '\n';
        }
}

void write_topology_csv(const std::string& path, const topology::Topology& topo,
                        const Provenance& prov) {
    auto out = open_out(path);
    stamp(out, prov);
    out << "# num_satellites=" << topo.num_satellites
        << " degree_bound=" << topo.degree_bound << " edges=" << topo.edges.size()
        << "\n";
    out << "a,b\n";
    for (const auto& [a, b] : topo.edges) out << a << ',' << b << '\n';
}

topology::Topology read_topology_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    topology::Topology topo;
    std::string line;
    int max_node = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            // Recover the satellite count from the header when present.
            const auto pos = line.find("num_satellites=");
            if (pos != std::string::npos)
                topo.num_satellites = std::stoi(line.substr(pos + 15));
            continue;
        }
        if (line.rfind("a,b", 0) == 0) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("malformed topology line: " + line);
        const int a = std::stoi(line.substr(0, comma));
        const int b = std::stoi(line.substr(comma + 1));
        topo.add_edge(std::min(a, b), std::max(a, b));
        max_node = std::max({max_node, a, b});
    }
    if (topo.num_satellites == 0) topo.num_satellites = max_node + 1;
    topo.finalize();
    return topo;
}

void write_demand_csv(const std::string& path, const demand::DemandMatrix& delta,
                      const std::vector<demand::GroundStation>& stations,
                      const Provenance& prov) {
    auto out = open_out(path);
    stamp(out, prov);
    out << "src,dst,src_name,dst_name,intensity\n";
    for (int i = 0; i < delta.size; ++i)
        for (int j = 0; j < delta.size; ++j)
            if (delta.at(i, j) > 0.0)
                out << i << ',' << j << ','
                    << stations[static_cast<std::size_t>(i)].name << ','
                    << stations[static_cast<std::size_t>(j)].name << ','
                    << delta.at(i, j) << '\n';
}

void write_regions_csv(const std::string& path, const demand::RegionalFlowStats& stats,
                       const Provenance& prov) {
    auto out = open_out(path);
    stamp(out, prov);
    out << "# lat_step_deg=" << stats.lat_step_deg
        << " lon_step_deg=" << stats.lon_step_deg
        << " weighted_mean_resultant_length=" << stats.weighted_mean_resultant_length
        << "\n";
    out << "lat_index,lon_index,theta_component,phi_component,weight,resultant_length\n";
    for (const auto& c : stats.cells)
        out << c.lat_index << ',' << c.lon_index << ',' << c.theta_component << ','
            << c.phi_component << ',' << c.weight << ',' << c.resultant_length << '\n';
}

void write_cdf_csv(const std::string& path, const std::vector<double>& values,
                   const Provenance& prov) {
    auto out = open_out(path);
    stamp(out, prov);
    const double p90 = values.empty() ? 0.0 : routing::percentile(values, 90.0);
    out << "# p90=" << p90 << "\n";
    out << "value,cumulative_fraction\n";
    const double n = static_cast<double>(values.size());
    for (std::size_t k = 0; k < values.size(); ++k)
        out << values[k] << ',' << static_cast<double>(k + 1) / n << '\n';
}

namespace {

json summary_json(const routing::DistributionSummary& s) {
    return {{"mean", s.mean}, {"p50", s.p50}, {"p75", s.p75}, {"p90", s.p90},
            {"p99", s.p99}};
}

}  // namespace

void write_stretch_report(const std::string& dir, const routing::StretchReport& report,
                          const Provenance& prov) {
    std::filesystem::create_directories(dir);
    json root;
    root["provenance"] = prov_json(prov);
    root["stretch"] = summary_json(report.stretch);
    root["hops"] = summary_json(report.hops);
    root["unreachable_flows"] = report.unreachable_flows;
    root["hop_buckets"] = {{"1-4", report.hop_buckets[0]},
                           {"5-10", report.hop_buckets[1]},
                           {"11-15", report.hop_buckets[2]},
                           {">=16", report.hop_buckets[3]}};
    auto out = open_out(dir + "/report.json");
    out << root.dump(2) << '\n';

    auto flows = open_out(dir + "/flows.csv");
    stamp(flows, prov);
    flows << "src,dst,path_length_m,geodesic_m,stretch,hops,reachable\n";
    for (const auto& f : report.flows)
        flows << f.src << ',' << f.dst << ',' << f.path_length << ',' << f.geodesic
              << ',' << f.stretch << ',' << f.hops << ',' << (f.reachable ? 1 : 0)
              << '\n';

    write_cdf_csv(dir + "/cdf_stretch.csv", report.stretch.sorted_values, prov);
    write_cdf_csv(dir + "/cdf_hops.csv", report.hops.sorted_values, prov);
}

void write_sim_report(const std::string& dir, const simulator::SimReport& report,
                      const Provenance& prov) {
    std::filesystem::create_directories(dir);
    json root;
    root["provenance"] = prov_json(prov);
    root["generated"] = report.generated;
    root["delivered"] = report.delivered;
    root["dropped"] = report.dropped;
    root["in_flight_at_end"] = report.in_flight_at_end;
    root["total_isl_forwards"] = report.total_isl_forwards;
    root["warnings"] = report.warnings;
    auto out = open_out(dir + "/report.json");
    out << root.dump(2) << '\n';

    auto flows = open_out(dir + "/flows.csv");
    stamp(flows, prov);
    flows << "src,dst,generated,delivered,dropped,mean_stretch,mean_hops,mean_rtt_s,"
             "jitter_s\n";
    std::vector<double> rtts;
    for (const auto& f : report.flows) {
        flows << f.src << ',' << f.dst << ',' << f.generated << ',' << f.delivered
              << ',' << f.dropped << ',' << f.mean_stretch << ',' << f.mean_hops << ','
              << f.mean_rtt << ',' << f.jitter << '\n';
        rtts.insert(rtts.end(), f.rtt_samples.begin(), f.rtt_samples.end());
    }

    auto links = open_out(dir + "/links.csv");
    stamp(links, prov);
    links << "a,b,packets_forwarded,usage_ratio\n";
    for (const auto& l : report.links)
        links << l.a << ',' << l.b << ',' << l.packets_forwarded << ','
              << l.usage_ratio << '\n';

    std::sort(rtts.begin(), rtts.end());
    write_cdf_csv(dir + "/cdf_rtt.csv", rtts, prov);
}

std::string export_geojson(const std::vector<Vec3>& sat_positions, int sats_per_orbit,
                           const topology::Topology& topo,
                           const std::vector<demand::GroundStation>& stations,
                           const demand::DemandMatrix* delta,
                           const std::vector<int>* selected_path) {
    json features = json::array();
    for (std::size_t s = 0; s < sat_positions.size(); ++s)
        features.push_back({{"type", "Feature"},
                            {"geometry",
                             {{"type", "Point"},
                              {"coordinates", point_coords(sat_positions[s])}}},
                            {"properties",
                             {{"role", "satellite"}, {"id", s}}}});
    for (const auto& [a, b] : topo.edges) {
        const bool intra = sats_per_orbit > 0 && a / sats_per_orbit == b / sats_per_orbit;
        features.push_back(
            {{"type", "Feature"},
             {"geometry",
              {{"type", "LineString"},
               {"coordinates",
                json::array({point_coords(sat_positions[static_cast<std::size_t>(a)]),
                             point_coords(sat_positions[static_cast<std::size_t>(b)])})}}},
             {"properties", {{"role", intra ? "intra" : "inter"}, {"a", a}, {"b", b}}}});
    }
    if (delta != nullptr) {
        for (int i = 0; i < delta->size; ++i)
            for (int j = 0; j < delta->size; ++j)
                if (delta->at(i, j) > 0.0)
                    features.push_back(
                        {{"type", "Feature"},
                         {"geometry",
                          {{"type", "LineString"},
                           {"coordinates",
                            json::array(
                                {point_coords(stations[static_cast<std::size_t>(i)].position),
                                 point_coords(
                                     stations[static_cast<std::size_t>(j)].position)})}}},
                         {"properties",
                          {{"role", "demand"},
                           {"src", i},
                           {"dst", j},
                           {"intensity", delta->at(i, j)}}}});
    }
    if (selected_path != nullptr && selected_path->size() > 1) {
        json coords = json::array();
        for (int s : *selected_path)
            coords.push_back(point_coords(sat_positions[static_cast<std::size_t>(s)]));
        features.push_back({{"type", "Feature"},
                            {"geometry",
                             {{"type", "LineString"}, {"coordinates", coords}}},
                            {"properties", {{"role", "selected"}}}});
    }
    const json root = {{"type", "FeatureCollection"}, {"features", features}};
    return root.dump(2);
}

std::string export_czml(const std::vector<Vec3>& sat_positions, int sats_per_orbit,
                        const topology::Topology& topo) {
    json doc = json::array();
    doc.push_back({{"id", "document"}, {"name", "starlab"}, {"version", "1.0"}});
    for (std::size_t s = 0; s < sat_positions.size(); ++s) {
        const Vec3& p = sat_positions[s];
        doc.push_back({{"id", "sat-" + std::to_string(s)},
                       {"position", {{"cartesian", json::array({p.x, p.y, p.z})}}},
                       {"point", {{"pixelSize", 3}}}});
    }
    for (const auto& [a, b] : topo.edges) {
        const Vec3& pa = sat_positions[static_cast<std::size_t>(a)];
        const Vec3& pb = sat_positions[static_cast<std::size_t>(b)];
        const bool intra = sats_per_orbit > 0 && a / sats_per_orbit == b / sats_per_orbit;
        doc.push_back(
            {{"id", "isl-" + std::to_string(a) + "-" + std::to_string(b)},
             {"name", intra ? "intra" : "inter"},
             {"polyline",
              {{"positions",
                {{"cartesian", json::array({pa.x, pa.y, pa.z, pb.x, pb.y, pb.z})}}},
               {"width", 1}}}});
    }
    return doc.dump(2);
}

}  // namespace starlab::io
