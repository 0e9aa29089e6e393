#ifndef STARLAB_DEMAND_HPP
#define STARLAB_DEMAND_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "starlab/constellation.hpp"
#include "starlab/geometry.hpp"

namespace starlab::demand {

using geometry::SpherePoint;

struct GroundStation {
    int id = 0;
    std::string name;
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    double population = 0.0;    // 0 when unknown
    Vec3 position;              // on the Earth radius
    SpherePoint shell_position; // radially scaled onto the shell

    static GroundStation from_lat_lon(int id, std::string name, double lat_deg,
                                      double lon_deg, double population,
                                      double shell_radius);
};

/// Parses `name,lat_deg,lon_deg,population` CSV (header optional) and scales
/// every station onto the given shell.
std::vector<GroundStation> load_stations_csv(const std::string& path,
                                             double shell_radius);

/// m x m nonnegative traffic intensities, zero diagonal.
struct DemandMatrix {
    int size = 0;
    std::vector<double> values;  // row-major

    explicit DemandMatrix(int m = 0) : size(m), values(static_cast<std::size_t>(m) * m, 0.0) {}
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * size + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * size + j]; }
    double total() const;
    double mean_nonzero() const;
    /// Copy with every entry divided by the mean nonzero intensity.
    DemandMatrix normalized() const;
};

enum class Pattern { kUniform, kHotspot, kDistance, kPopulation, kMerged };

Pattern pattern_from_string(const std::string& name);
std::string pattern_name(Pattern p);

/// Delta_ij = c_ij * W_hat_ij: pattern weight normalized to unit mean over
/// the off-diagonal entries, times a per-entry constant drawn uniformly from
/// (0, base_intensity]. Merged multiplies the normalized distance and
/// population weights and re-normalizes the product to unit mean.
DemandMatrix build_demand(const std::vector<GroundStation>& stations, Pattern pattern,
                          double base_intensity, std::uint64_t seed);

struct FieldParams {
    double field_constant = 1e7;  // K in the field law
    double crown_strength = 1.0;  // eta
    double crown_decay = 10.0;    // omega
    bool crown_enabled = true;
    double inclination = 53.0 * M_PI / 180.0;
    /// Squared-distance floor (meters): denominators are clamped below one
    /// intra-orbit spacing so satellites nearly coincident with a projected
    /// station see a finite field.
    double min_distance = 0.0;
};

/// Per-flow tangent field at p (Eq.-of-motion for link steering):
///   K * Delta_uv * [ tan(p->u) / d_km(p,v)^2 - tan(p->v) / d_km(p,u)^2 ]
/// Geodesic distances enter in kilometers so that K ~ 1e6..1e7 spans the
/// weak-to-strong field regimes.
Vec3 demand_field(const SpherePoint& p, const SpherePoint& u, const SpherePoint& v,
                  double intensity, double field_constant, double min_distance = 0.0);

/// Crown reorientation: f + eta * exp(-omega*(sin i - |p.z|/rho)) * (f.phi) phi.
Vec3 crown_adjust(const Vec3& f, const SpherePoint& p, double inclination,
                  double eta, double omega);

struct FieldSample {
    SpherePoint point;
    Vec3 field;        // tangent at point
    Vec3 field_perp;   // (field x p) / rho
};

/// Sum of crown-adjusted per-flow fields at p, re-projected onto the tangent
/// plane, with the 90-degree rotated companion.
FieldSample aggregate_field(const SpherePoint& p, const DemandMatrix& delta,
                            const std::vector<GroundStation>& stations,
                            const FieldParams& params);

struct RegionCell {
    int lat_index = 0;
    int lon_index = 0;
    double theta_component = 0.0;  // weighted tangent sum, latitude basis
    double phi_component = 0.0;    // weighted tangent sum, longitude basis
    double weight = 0.0;           // sum of intensities through the region
    double resultant_length = 0.0; // ||sum w*tau|| / sum w
};

struct RegionalFlowStats {
    double lat_step_deg = 0.0;
    double lon_step_deg = 0.0;
    std::vector<RegionCell> cells;
    /// Traffic-weighted mean of the per-region resultant lengths, in [0,1].
    double weighted_mean_resultant_length = 0.0;
};

/// Directional flow statistics of the demand over a lat/lon mesh. Flows are
/// taken per unordered station pair (intensity Delta_ij + Delta_ji, oriented
/// eastward by the heading at the arc midpoint); each flow is charged to a
/// region when the great-circle projection of the region midpoint falls in
/// the region and on the minor arc between the endpoints.
RegionalFlowStats regional_flow_stats(const DemandMatrix& delta,
                                      const std::vector<GroundStation>& stations,
                                      double lat_step_deg, double lon_step_deg);

/// Scales each nonzero entry by max(0, 1 + N(mu, sigma)). Deterministic per seed.
DemandMatrix perturb_demand(const DemandMatrix& delta, double mu, double sigma,
                            std::uint64_t seed);

}  // namespace starlab::demand

#endif
