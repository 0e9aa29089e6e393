#ifndef STARLAB_GEOMETRY_HPP
#define STARLAB_GEOMETRY_HPP

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "starlab/vec3.hpp"

namespace starlab::geometry {

/// Signalled on degenerate inputs (antipodal tangents, pole frames, ...).
class GeometryError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

inline constexpr double kUnitTol = 1e-9;       // relative, unit-vector checks
inline constexpr double kShellRelTol = 1e-6;   // relative, on-shell checks

/// A point constrained to a sphere of radius `shell_radius` centered at the
/// Earth's center (ECI origin).
struct SpherePoint {
    Vec3 position;
    double shell_radius = 0.0;

    SpherePoint() = default;
    SpherePoint(const Vec3& pos, double radius);
};

/// Great-circle distance 2*rho*asin(|p-q| / (2*rho)), in meters.
/// Rejects points on different shells.
double geodesic_distance(const SpherePoint& p, const SpherePoint& q);

/// Unit tangent at p of the geodesic from p toward q:
/// ((q x p) x p) normalized. Coincident or antipodal inputs are degenerate.
Vec3 unit_tangent(const SpherePoint& p, const SpherePoint& q);

/// Local (theta_hat, phi_hat) frame at p: theta_hat points toward increasing
/// latitude, phi_hat toward increasing longitude (east). With p_hat this
/// forms a right-handed frame: theta_hat x phi_hat = -p_hat.
/// Pole inputs (X = Y = 0) are rejected.
std::pair<Vec3, Vec3> lat_lon_unit_vectors(const SpherePoint& p);

/// Among `candidates` passing the clockwise orientation criterion
/// sgn[((s - s') x (s - s_star)) . s] > 0, returns the index whose link
/// angle at s relative to (s - s_star) is closest to beta. Ties break to the
/// lowest index. Throws GeometryError when no candidate survives the filter.
std::size_t angular_select(const Vec3& s, const Vec3& s_star, double beta,
                           const std::vector<Vec3>& candidates);

/// Closest point on the great circle through u and v to p:
/// rho * normalize(p - (p.n)n) with n the circle normal. Rejects p parallel
/// to the normal (every circle point equidistant).
SpherePoint project_to_geodesic(const SpherePoint& p, const SpherePoint& u,
                                const SpherePoint& v);

/// Radially projects a ground position (norm ~ rho_earth) onto the shell of
/// radius rho by scaling with rho / rho_earth.
SpherePoint scale_to_shell(const Vec3& ground_pos, double rho_earth, double rho);

}  // namespace starlab::geometry

#endif
