#include "starlab/routing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace starlab::routing {

using constellation::kEarthRadius;
using constellation::kSpeedOfLight;
using geometry::SpherePoint;

double elevation_angle(const Vec3& ground_pos, const Vec3& sat_pos) {
    const Vec3 up = ground_pos.normalized();
    const Vec3 to_sat = sat_pos - ground_pos;
    const double n = to_sat.norm();
    if (n == 0.0) throw std::invalid_argument("elevation_angle: coincident positions");
    return std::asin(std::clamp(to_sat.dot(up) / n, -1.0, 1.0));
}

WeightedNet attach_stations(const Topology& topo,
                            const std::vector<Vec3>& sat_positions,
                            const std::vector<GroundStation>& stations,
                            double min_elevation_rad) {
    WeightedNet net;
    net.num_satellites = topo.num_satellites;
    net.isl.resize(static_cast<std::size_t>(topo.num_satellites));
    for (const auto& [a, b] : topo.edges) {
        const double delay =
            (sat_positions[static_cast<std::size_t>(a)] -
             sat_positions[static_cast<std::size_t>(b)]).norm() / kSpeedOfLight;
        net.isl[static_cast<std::size_t>(a)].emplace_back(b, delay);
        net.isl[static_cast<std::size_t>(b)].emplace_back(a, delay);
    }
    for (auto& adj : net.isl) std::sort(adj.begin(), adj.end());

    net.station_links.resize(stations.size());
    for (std::size_t g = 0; g < stations.size(); ++g) {
        for (int s = 0; s < topo.num_satellites; ++s) {
            const Vec3& sp = sat_positions[static_cast<std::size_t>(s)];
            if (elevation_angle(stations[g].position, sp) >= min_elevation_rad) {
                const double delay = (sp - stations[g].position).norm() / kSpeedOfLight;
                net.station_links[g].push_back({s, delay});
            }
        }
        if (net.station_links[g].empty())
            net.unreachable_stations.push_back(static_cast<int>(g));
    }
    return net;
}

namespace {

struct SsspResult {
    std::vector<double> dist;  // seconds from the source station
    std::vector<int> prev;     // previous satellite, -1 = source GSL entry
};

// Dijkstra over the satellite graph seeded with the source station's GSLs.
SsspResult satellite_sssp(const WeightedNet& net, int src_station) {
    const double inf = std::numeric_limits<double>::infinity();
    SsspResult r;
    r.dist.assign(static_cast<std::size_t>(net.num_satellites), inf);
    r.prev.assign(static_cast<std::size_t>(net.num_satellites), -2);

    using Item = std::pair<double, int>;  // (dist, satellite); index breaks ties
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (const auto& gsl : net.station_links[static_cast<std::size_t>(src_station)]) {
        if (gsl.delay < r.dist[static_cast<std::size_t>(gsl.satellite)]) {
            r.dist[static_cast<std::size_t>(gsl.satellite)] = gsl.delay;
            r.prev[static_cast<std::size_t>(gsl.satellite)] = -1;
            pq.emplace(gsl.delay, gsl.satellite);
        }
    }
    while (!pq.empty()) {
        const auto [d, s] = pq.top();
        pq.pop();
        if (d > r.dist[static_cast<std::size_t>(s)]) continue;
        for (const auto& [t, w] : net.isl[static_cast<std::size_t>(s)]) {
            const double nd = d + w;
            auto& dt = r.dist[static_cast<std::size_t>(t)];
            // strict improvement keeps tie-breaking on the lower flat index
            // (neighbors are scanned in ascending order)
            if (nd < dt) {
                dt = nd;
                r.prev[static_cast<std::size_t>(t)] = s;
                pq.emplace(nd, t);
            }
        }
    }
    return r;
}

}  // namespace

std::vector<FlowPathStats> shortest_paths(const WeightedNet& net,
                                          const std::vector<GroundStation>& stations,
                                          int src_station) {
    const auto sssp = satellite_sssp(net, src_station);
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<FlowPathStats> out;
    out.reserve(stations.size());
    for (std::size_t dst = 0; dst < stations.size(); ++dst) {
        FlowPathStats fs;
        fs.src = src_station;
        fs.dst = static_cast<int>(dst);
        if (static_cast<int>(dst) == src_station) {
            fs.reachable = true;
            fs.stretch = 0.0;
            out.push_back(fs);
            continue;
        }
        double best = inf;
        int exit_sat = -1;
        for (const auto& gsl : net.station_links[dst]) {
            const double total = sssp.dist[static_cast<std::size_t>(gsl.satellite)] + gsl.delay;
            if (total < best - 1e-15 ||
                (std::abs(total - best) <= 1e-15 && gsl.satellite < exit_sat)) {
                best = total;
                exit_sat = gsl.satellite;
            }
        }
        if (exit_sat < 0 || !std::isfinite(best)) {
            out.push_back(fs);
            continue;
        }
        fs.reachable = true;
        for (int s = exit_sat; s != -1; s = sssp.prev[static_cast<std::size_t>(s)])
            fs.path.push_back(s);
        std::reverse(fs.path.begin(), fs.path.end());
        fs.path_length = best * kSpeedOfLight;
        fs.hops = static_cast<int>(fs.path.size()) + 1;  // +2 GSLs, -1 for fencepost
        const SpherePoint pu(stations[static_cast<std::size_t>(src_station)].position,
                             kEarthRadius);
        const SpherePoint pv(stations[dst].position, kEarthRadius);
        fs.geodesic = geometry::geodesic_distance(pu, pv);
        fs.stretch = fs.geodesic > 0.0 ? fs.path_length / fs.geodesic
                                       : std::numeric_limits<double>::infinity();
        out.push_back(fs);
    }
    return out;
}

DistributionSummary summarize(std::vector<double> values) {
    DistributionSummary s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    s.sorted_values = std::move(values);
    s.p50 = percentile(s.sorted_values, 50.0);
    s.p75 = percentile(s.sorted_values, 75.0);
    s.p90 = percentile(s.sorted_values, 90.0);
    s.p99 = percentile(s.sorted_values, 99.0);
    return s;
}

double percentile(const std::vector<double>& sorted_values, double pct) {
    if (sorted_values.empty())
        throw std::invalid_argument("percentile of an empty sample");
    const auto n = sorted_values.size();
    const auto rank = static_cast<std::size_t>(
        std::ceil(pct / 100.0 * static_cast<double>(n)));
    return sorted_values[std::min(n - 1, rank == 0 ? 0 : rank - 1)];
}

StretchReport stretch_report(const Topology& topo,
                             const std::vector<Vec3>& sat_positions,
                             const std::vector<GroundStation>& stations,
                             const DemandMatrix& delta,
                             double min_elevation_rad) {
    const WeightedNet net =
        attach_stations(topo, sat_positions, stations, min_elevation_rad);

    StretchReport report;
    std::vector<double> stretches, hops;
    for (int src = 0; src < delta.size; ++src) {
        bool any = false;
        for (int dst = 0; dst < delta.size; ++dst)
            if (delta.at(src, dst) > 0.0) any = true;
        if (!any) continue;
        const auto paths = shortest_paths(net, stations, src);
        for (int dst = 0; dst < delta.size; ++dst) {
            if (delta.at(src, dst) <= 0.0) continue;
            const auto& fs = paths[static_cast<std::size_t>(dst)];
            if (!fs.reachable) {
                ++report.unreachable_flows;
                continue;
            }
            report.flows.push_back(fs);
            stretches.push_back(fs.stretch);
            hops.push_back(static_cast<double>(fs.hops));
            const int h = fs.hops;
            if (h <= 4) ++report.hop_buckets[0];
            else if (h <= 10) ++report.hop_buckets[1];
            else if (h <= 15) ++report.hop_buckets[2];
            else ++report.hop_buckets[3];
        }
    }
    report.stretch = summarize(std::move(stretches));
    report.hops = summarize(std::move(hops));
    return report;
}

double weighted_mean_stretch(const StretchReport& report, const DemandMatrix& weights) {
    double num = 0.0, den = 0.0;
    for (const auto& fs : report.flows) {
        const double w = weights.at(fs.src, fs.dst);
        num += w * fs.stretch;
        den += w;
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace starlab::routing
