#ifndef STARLAB_TOPOLOGY_HPP
#define STARLAB_TOPOLOGY_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "starlab/constellation.hpp"
#include "starlab/demand.hpp"

namespace starlab::topology {

using constellation::Ephemeris;
using constellation::RangeGraph;

enum class DistanceMode { kPlain, kPrioritized };

DistanceMode mode_from_string(const std::string& name);

/// Degree-bounded undirected ISL edge set over flat satellite indices.
struct Topology {
    int num_satellites = 0;
    int degree_bound = 4;
    std::vector<std::pair<int, int>> edges;  // a < b, sorted, unique
    std::string generator;
    std::vector<int> isolated;  // satellites left without any ISL

    std::vector<int> degrees() const;
    bool has_edge(int a, int b) const;
    void add_edge(int a, int b);
    void finalize();  // sort + dedupe
};

struct StarfieldParams {
    int degree_bound = 4;              // kappa
    double field_constant = 1e7;       // K
    double crown_strength = 1.0;       // eta
    double crown_decay = 10.0;         // omega
    bool crown_enabled = true;
    double epsilon = 1e-12;            // geometric fallback weight, per meter
    DistanceMode mode = DistanceMode::kPlain;
    bool normalize_demand = true;      // unit-mean intensities before field eval
};

/// Per-flow link distance of a candidate ISL from s to s'. Plain:
/// |f_perp . (P_s - P_s')|. Prioritized biases toward longer links in weak
/// field regions: |f_perp . (P_s - P_s')| / |P_s - P_s'|^(2 exp(-|f|)).
double link_distance(const Vec3& pos_s, const Vec3& pos_other, const Vec3& f,
                     const Vec3& f_perp, DistanceMode mode);

/// Demand-aware topology: per satellite, pick the neighbor minimizing the
/// aggregate per-flow distance, then fill the remaining floor(kappa/2)-1
/// explicit links at evenly spaced angles. Degree conflicts fall back to the
/// next-best candidate in flat-index processing order.
Topology starfield(const RangeGraph& range, const Ephemeris& eph,
                   const demand::DemandMatrix& delta,
                   const std::vector<demand::GroundStation>& stations,
                   const StarfieldParams& params);

/// Time-invariant variant: two intra-orbit links per satellite plus one
/// demand-optimal inter-orbit offset per adjacent orbit pair, feasible over
/// the whole ephemeris window.
Topology static_starfield(const RangeGraph& range, const Ephemeris& eph,
                          const demand::DemandMatrix& delta,
                          const std::vector<demand::GroundStation>& stations,
                          const StarfieldParams& params);

/// The four-neighbor baseline grid.
Topology plus_grid(int num_orbits, int sats_per_orbit);

/// Seeded baseline: random intra-orbit partner offset plus one random
/// feasible inter-orbit offset per adjacent orbit pair.
Topology random_topology(const RangeGraph& range, const Ephemeris& eph,
                         int degree_bound, std::uint64_t seed);

struct Epoch {
    double start = 0.0;
    double end = 0.0;
};

/// One Starfield topology per epoch, computed from that epoch's time samples.
std::vector<std::pair<Epoch, Topology>> dynamic_schedule(
    const Ephemeris& eph, const std::vector<Epoch>& epochs,
    const demand::DemandMatrix& delta,
    const std::vector<demand::GroundStation>& stations,
    const StarfieldParams& params, double range_meters);

}  // namespace starlab::topology

#endif
