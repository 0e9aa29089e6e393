#ifndef STARLAB_FLAT_HPP
#define STARLAB_FLAT_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "starlab/topology.hpp"

namespace starlab::flat {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const;
};

/// Distorted lattice over a rectangular window: one satellite uniformly
/// sampled inside the disk of radius `distortion` around each lattice point
/// (i/density, j/density).
struct FlatField {
    double density = 1.0;     // satellites per unit length along each axis
    double distortion = 0.0;  // eta, in [0, 1/(2 density))
    double window_w = 0.0;
    double window_h = 0.0;
    double range = 1.0;       // maximum link length R
    int degree_bound = 4;
    std::uint64_t seed = 0;
    int nx = 0;               // lattice columns
    int ny = 0;               // lattice rows
    std::vector<Vec2> positions;  // row-major: index = j * nx + i

    int nearest_satellite(const Vec2& p) const;
};

struct FlatDemand {
    Vec2 src;
    Vec2 dst;

    double length() const;
    double orientation() const;  // angle of dst - src in [0, 2*pi)
};

FlatField gen_flat_field(double density, double distortion, double window_w,
                         double window_h, std::uint64_t seed);

struct MotivatingExample {
    double grid_stretch = 0.0;       // corner-to-corner on the unit grid
    double diagonal_stretch = 0.0;   // same demand on the diagonal overlay
    double grid_axis_stretch = 0.0;  // axis-parallel demand, unit grid
    double diagonal_axis_stretch = 0.0;
};

/// The 7x7 unit-grid example: a corner-to-corner demand pays a sqrt(2)
/// stretch on the square grid but only about 1.14 once two diagonal chains
/// are overlaid, while axis-parallel demands stay at stretch 1.
MotivatingExample motivating_example();

/// Exact maximum, over all reference directions, of the number of demands
/// oriented (mod pi) within epsilon of that direction.
int max_aligned_demands(const std::vector<FlatDemand>& demands, double epsilon);

/// Worst-demand stretch lower bound for a region of area `area` holding
/// `num_demands` demands, of which at most `lambda` share any epsilon-cone.
/// Returns +infinity when epsilon = pi/2 and the aligned-edge budget cannot
/// cover the demand.
double theorem1_lower_bound(double area, double density, int degree_bound,
                            double range, double epsilon, int num_demands,
                            int lambda, double l_sd);

/// One straight-line piece of a demand inside a single region.
struct RegionSegment {
    double length = 0.0;
    double angle_to_primary = 0.0;  // radians between segment and the
                                    // region's primary direction
};

/// Path-length upper bound for the rotated-grid construction: each region
/// costs one hop of slack plus the segment length scaled by
/// |cos| + |sin| of its misalignment, inflated by the satellite snapping
/// error, plus R/2 per region boundary crossed.
double theorem2_upper_bound(const std::vector<RegionSegment>& segments,
                            double range, double density, double distortion);

struct RotatedGrid {
    topology::Topology topo;        // over flat-field satellite indices
    int stitch_edges = 0;           // inter-region boundary connections
    int max_region_degree = 0;      // satellite degree from in-region edges
};

/// Per-region rotated square grid of spacing range/2, grid points snapped to
/// their nearest satellites, with nearest-boundary-point stitching between
/// adjacent regions. `primary_directions` is row-major over the region grid
/// (angle of each region's primary direction, radians).
RotatedGrid rotated_grid_topology(const FlatField& field, double region_side,
                                  const std::vector<double>& primary_directions);

/// Euclidean-weighted shortest path between two satellites; +infinity when
/// disconnected.
double shortest_path_length(const FlatField& field, const topology::Topology& topo,
                            int src, int dst);

}  // namespace starlab::flat

#endif
