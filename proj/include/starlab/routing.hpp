#ifndef STARLAB_ROUTING_HPP
#define STARLAB_ROUTING_HPP

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "starlab/demand.hpp"
#include "starlab/topology.hpp"

namespace starlab::routing {

using demand::DemandMatrix;
using demand::GroundStation;
using topology::Topology;

/// Satellite ISL graph weighted by propagation delay, plus per-station lists
/// of visible satellites (elevation >= min_elevation). Stations never relay
/// transit traffic: paths use GSLs only at their own endpoints.
struct WeightedNet {
    int num_satellites = 0;
    std::vector<std::vector<std::pair<int, double>>> isl;  // [sat] -> (sat, delay s)
    struct Gsl {
        int satellite = 0;
        double delay = 0.0;  // seconds
    };
    std::vector<std::vector<Gsl>> station_links;  // [station] -> visible sats
    std::vector<int> unreachable_stations;        // no visible satellite
};

/// Elevation of a satellite above a ground position's local horizon plane.
double elevation_angle(const Vec3& ground_pos, const Vec3& sat_pos);

WeightedNet attach_stations(const Topology& topo,
                            const std::vector<Vec3>& sat_positions,
                            const std::vector<GroundStation>& stations,
                            double min_elevation_rad);

struct FlowPathStats {
    int src = 0;
    int dst = 0;
    std::vector<int> path;        // satellite flat indices, src GSL to dst GSL
    double path_length = 0.0;     // meters, GSLs included
    double geodesic = 0.0;        // meters, Earth-surface great circle
    double stretch = 0.0;
    int hops = 0;                 // edge count, the two GSLs included
    bool reachable = false;
};

/// Single-source shortest paths from a station to all others. Deterministic:
/// ties break on the lower satellite flat index.
std::vector<FlowPathStats> shortest_paths(const WeightedNet& net,
                                          const std::vector<GroundStation>& stations,
                                          int src_station);

struct DistributionSummary {
    double mean = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double p90 = 0.0;
    double p99 = 0.0;
    std::vector<double> sorted_values;  // CDF support
};

DistributionSummary summarize(std::vector<double> values);

/// Sort-based percentile (nearest-rank) over the summary's sorted support.
double percentile(const std::vector<double>& sorted_values, double pct);

struct StretchReport {
    std::vector<FlowPathStats> flows;   // every Delta_ij > 0, reachable only
    int unreachable_flows = 0;
    DistributionSummary stretch;
    DistributionSummary hops;
    /// Hop histogram: short 1-4, midsize 5-10, long 11-15, very long >= 16.
    std::array<std::size_t, 4> hop_buckets{};
};

StretchReport stretch_report(const Topology& topo,
                             const std::vector<Vec3>& sat_positions,
                             const std::vector<GroundStation>& stations,
                             const DemandMatrix& delta,
                             double min_elevation_rad);

/// Intensity-weighted mean stretch of a report under the given weights.
double weighted_mean_stretch(const StretchReport& report, const DemandMatrix& weights);

}  // namespace starlab::routing

#endif
