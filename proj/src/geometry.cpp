#include "starlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace starlab::geometry {

SpherePoint::SpherePoint(const Vec3& pos, double radius)
    : position(pos), shell_radius(radius) {
    if (!pos.finite() || !std::isfinite(radius) || radius <= 0.0)
        throw GeometryError("SpherePoint requires finite coordinates and a positive radius");
    if (std::abs(pos.norm() - radius) > kShellRelTol * radius)
        throw GeometryError("SpherePoint position is not on the shell");
}

double geodesic_distance(const SpherePoint& p, const SpherePoint& q) {
    const double rho = p.shell_radius;
    if (std::abs(q.shell_radius - rho) > kShellRelTol * rho)
        throw GeometryError("geodesic_distance requires points on the same shell");
    const double chord = (p.position - q.position).norm();
    // Chord can exceed 2*rho by floating-point noise for antipodal points.
    const double ratio = std::min(chord / (2.0 * rho), 1.0);
    return 2.0 * rho * std::asin(ratio);
}

Vec3 unit_tangent(const SpherePoint& p, const SpherePoint& q) {
    const Vec3 n = q.position.cross(p.position);
    const Vec3 tangent = n.cross(p.position);
    const double tn = tangent.norm();
    if (tn <= kUnitTol * p.shell_radius * p.shell_radius * p.shell_radius)
        throw GeometryError("unit_tangent: coincident or antipodal points");
    return tangent / tn;
}

std::pair<Vec3, Vec3> lat_lon_unit_vectors(const SpherePoint& p) {
    const double X = p.position.x, Y = p.position.y, Z = p.position.z;
    const double h2 = X * X + Y * Y;
    if (h2 <= 0.0 || std::sqrt(h2) < kUnitTol * p.shell_radius)
        throw GeometryError("lat_lon_unit_vectors: point at a pole");
    const double h = std::sqrt(h2);
    const Vec3 phi_hat{-Y / h, X / h, 0.0};
    const double rho = p.shell_radius;
    const Vec3 theta_hat{-X * Z / (rho * h), -Y * Z / (rho * h), h / rho};
    return {theta_hat, phi_hat};
}

std::size_t angular_select(const Vec3& s, const Vec3& s_star, double beta,
                           const std::vector<Vec3>& candidates) {
    if (!(beta > 0.0 && beta < M_PI))
        throw GeometryError("angular_select: beta must lie in (0, pi)");
    const Vec3 ref = s - s_star;
    const double ref_norm = ref.norm();
    if (ref_norm == 0.0) throw GeometryError("angular_select: s == s_star");
    const double cos_beta = std::cos(beta);

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    bool found = false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Vec3 link = s - candidates[i];
        const double ln = link.norm();
        if (ln == 0.0) continue;
        if (link.cross(ref).dot(s) <= 0.0) continue;  // clockwise orientation only
        const double score = std::abs(link.dot(ref) / (ln * ref_norm) - cos_beta);
        if (score < best) {  // strict: ties keep the lowest index
            best = score;
            best_idx = i;
            found = true;
        }
    }
    if (!found) throw GeometryError("angular_select: no angular neighbor");
    return best_idx;
}

SpherePoint project_to_geodesic(const SpherePoint& p, const SpherePoint& u,
                                const SpherePoint& v) {
    const Vec3 cross = u.position.cross(v.position);
    const double cn = cross.norm();
    if (cn <= kUnitTol * u.shell_radius * u.shell_radius)
        throw GeometryError("project_to_geodesic: u, v degenerate");
    const Vec3 n_hat = cross / cn;
    const Vec3 in_plane = p.position - n_hat * p.position.dot(n_hat);
    const double ipn = in_plane.norm();
    if (ipn <= kUnitTol * p.shell_radius)
        throw GeometryError("project_to_geodesic: p parallel to the circle normal");
    return SpherePoint(in_plane * (p.shell_radius / ipn), p.shell_radius);
}

SpherePoint scale_to_shell(const Vec3& ground_pos, double rho_earth, double rho) {
    const double n = ground_pos.norm();
    if (n == 0.0) throw GeometryError("scale_to_shell: zero position");
    if (std::abs(n - rho_earth) > kShellRelTol * rho_earth)
        throw GeometryError("scale_to_shell: position not on the Earth radius");
    return SpherePoint(ground_pos * (rho / rho_earth), rho);
}

}  // namespace starlab::geometry
