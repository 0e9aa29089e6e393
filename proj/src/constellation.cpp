#include "starlab/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace starlab::constellation {

void validate(const ShellConfig& c) {
    if (c.num_orbits < 1 || c.sats_per_orbit < 1)
        throw std::invalid_argument("shell: orbit and slot counts must be >= 1");
    if (!(c.inclination > 0.0 && c.inclination <= M_PI / 2.0))
        throw std::invalid_argument("shell: inclination must lie in (0, pi/2]");
    if (!(c.altitude > 0.0))
        throw std::invalid_argument("shell: altitude must be positive");
    if (!(c.mean_motion > 0.0))
        throw std::invalid_argument("shell: mean motion must be positive");
    if (c.min_altitude_clearance >= c.altitude)
        throw std::invalid_argument("shell: clearance altitude must stay below the shell");
}

void ShellConfig::validate() const { constellation::validate(*this); }

double ShellConfig::effective_isl_range() const {
    if (isl_max_range > 0.0) return isl_max_range;
    return max_isl_range(shell_radius(), min_altitude_clearance);
}

const std::vector<Vec3>& Ephemeris::midpoint_positions() const {
    if (times.empty()) throw std::invalid_argument("ephemeris has no time samples");
    const double mid = 0.5 * (times.front() + times.back());
    std::size_t best = 0;
    for (std::size_t k = 1; k < times.size(); ++k)
        if (std::abs(times[k] - mid) < std::abs(times[best] - mid)) best = k;
    return positions[best];
}

bool RangeGraph::has_edge(int a, int b) const {
    if (a == b) return false;
    const auto& ns = neighbors[a];
    return std::binary_search(ns.begin(), ns.end(), b);
}

std::size_t RangeGraph::num_edges() const {
    std::size_t total = 0;
    for (const auto& ns : neighbors) total += ns.size();
    return total / 2;
}

Ephemeris generate_shell(const ShellConfig& config, const std::vector<double>& times) {
    validate(config);
    if (times.empty()) throw std::invalid_argument("generate_shell: empty time grid");

    const double rho = config.shell_radius();
    const double ci = std::cos(config.inclination);
    const double si = std::sin(config.inclination);
    const double slot_step = 2.0 * M_PI / config.sats_per_orbit;

    Ephemeris eph;
    eph.config = config;
    eph.times = times;
    eph.positions.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        auto& frame = eph.positions[k];
        frame.resize(static_cast<std::size_t>(config.num_satellites()));
        for (int i = 0; i < config.num_orbits; ++i) {
            const double raan = 2.0 * M_PI * i / config.num_orbits;
            const double cr = std::cos(raan), sr = std::sin(raan);
            for (int j = 0; j < config.sats_per_orbit; ++j) {
                const double phase = slot_step * (j + i * config.phase_offset) +
                                     config.mean_motion * times[k];
                // Equatorial placement, then inclination about X, then RAAN about Z.
                const double ex = rho * std::cos(phase);
                const double ey = rho * std::sin(phase);
                const double ix = ex;
                const double iy = ci * ey;
                const double iz = si * ey;
                frame[static_cast<std::size_t>(i * config.sats_per_orbit + j)] =
                    Vec3{cr * ix - sr * iy, sr * ix + cr * iy, iz};
            }
        }
    }
    return eph;
}

double max_isl_range(double rho, double clearance_altitude) {
    const double rho_c = kEarthRadius + clearance_altitude;
    if (rho_c >= rho) return 0.0;
    const double chord = 2.0 * std::sqrt(rho * rho - rho_c * rho_c);
    return std::min(chord, kIslRangeCap);
}

RangeGraph range_graph(const Ephemeris& eph, double r) {
    const int n = eph.config.num_satellites();
    RangeGraph graph;
    graph.num_satellites = n;
    graph.neighbors.resize(static_cast<std::size_t>(n));
    const double r2 = r * r;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            bool in_range = true;
            for (const auto& frame : eph.positions) {
                if ((frame[a] - frame[b]).norm2() > r2) {
                    in_range = false;
                    break;
                }
            }
            if (in_range) {
                graph.neighbors[a].push_back(b);
                graph.neighbors[b].push_back(a);
            }
        }
    }
    return graph;
}

double crown_latitude(const ShellConfig& config) {
    validate(config);
    return config.inclination;
}

}  // namespace starlab::constellation
