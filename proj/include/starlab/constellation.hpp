#ifndef STARLAB_CONSTELLATION_HPP
#define STARLAB_CONSTELLATION_HPP

#include <cstdint>
#include <vector>

#include "starlab/geometry.hpp"
#include "starlab/vec3.hpp"

namespace starlab::constellation {

inline constexpr double kEarthRadius = 6371e3;          // meters
inline constexpr double kSpeedOfLight = 299792458.0;    // m/s
inline constexpr double kIslRangeCap = 5000e3;          // meters

/// Walker-style shell parameters. The Phase-1 preset is 72 orbits x 22
/// satellites at 550 km / 53 deg with half-step inter-orbit phasing.
struct ShellConfig {
    double altitude = 550e3;                  // meters
    double inclination = 53.0 * M_PI / 180.0; // radians
    int num_orbits = 72;
    int sats_per_orbit = 22;
    double phase_offset = 0.5;                // fraction of intra-orbit step
    double mean_motion = 3.98 / 3600.0;       // rad/s (3.98 rad/h)
    double isl_max_range = 0.0;               // meters; 0 = derive from clearance
    double min_altitude_clearance = 80e3;     // meters

    double shell_radius() const { return kEarthRadius + altitude; }
    int num_satellites() const { return num_orbits * sats_per_orbit; }
    void validate() const;
    /// isl_max_range if set, else max_isl_range() for this shell.
    double effective_isl_range() const;

    static ShellConfig phase1() { return ShellConfig{}; }
};

struct SatelliteId {
    int orbit = 0;
    int slot = 0;
    bool operator==(const SatelliteId&) const = default;
};

/// Time-indexed satellite positions on the shell. Satellites are addressed
/// by flat index orbit * sats_per_orbit + slot.
struct Ephemeris {
    ShellConfig config;
    std::vector<double> times;                 // seconds
    std::vector<std::vector<Vec3>> positions;  // [time][flat index]

    int flat_index(SatelliteId id) const {
        return id.orbit * config.sats_per_orbit + id.slot;
    }
    SatelliteId id_of(int flat) const {
        return {flat / config.sats_per_orbit, flat % config.sats_per_orbit};
    }
    /// Positions at the sample nearest the window midpoint.
    const std::vector<Vec3>& midpoint_positions() const;
};

/// Symmetric adjacency of satellite pairs within ISL range at every sampled
/// time of the generation window.
struct RangeGraph {
    int num_satellites = 0;
    std::vector<std::vector<int>> neighbors;  // sorted, no self loops

    bool has_edge(int a, int b) const;
    std::size_t num_edges() const;
};

void validate(const ShellConfig& config);

/// Satellite (i, j) at time t: slot placed at phase angle
/// 2*pi*j/N_S + i*phase_offset*(2*pi/N_S) + mean_motion*t in the equatorial
/// plane, rotated by the inclination about X, then by RAAN 2*pi*i/N_O about Z.
Ephemeris generate_shell(const ShellConfig& config, const std::vector<double>& times);

/// Longest chord at shell radius rho whose midpoint stays above the clearance
/// sphere, capped at 5000 km.
double max_isl_range(double rho, double clearance_altitude);

/// Edge iff the pair stays within range r at every sampled time.
RangeGraph range_graph(const Ephemeris& eph, double r);

/// Highest reachable latitude of the shell: the inclination.
double crown_latitude(const ShellConfig& config);

}  // namespace starlab::constellation

#endif
