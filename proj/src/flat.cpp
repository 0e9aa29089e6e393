#include "starlab/flat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

namespace starlab::flat {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTol = 1e-9;
}  // namespace

double Vec2::norm() const { return std::hypot(x, y); }

int FlatField::nearest_satellite(const Vec2& p) const {
    if (positions.empty()) throw std::logic_error("nearest_satellite: empty field");
    // Lattice locality: the nearest satellite sits within one cell of the
    // nearest lattice point, so a 3x3 lattice neighborhood suffices.
    const int ci = std::clamp(static_cast<int>(std::lround(p.x * density)), 0, nx - 1);
    const int cj = std::clamp(static_cast<int>(std::lround(p.y * density)), 0, ny - 1);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
            const int i = ci + di;
            const int j = cj + dj;
            if (i < 0 || i >= nx || j < 0 || j >= ny) continue;
            const int idx = j * nx + i;
            const double d = (positions[static_cast<std::size_t>(idx)] - p).norm();
            if (d < best_d) {
                best_d = d;
                best = idx;
            }
        }
    return best;
}

double FlatDemand::length() const { return (dst - src).norm(); }

double FlatDemand::orientation() const {
    const Vec2 d = dst - src;
    if (d.norm() <= 0.0) throw std::invalid_argument("demand with src == dst");
    double a = std::atan2(d.y, d.x);
    if (a < 0.0) a += 2.0 * kPi;
    return a;
}

FlatField gen_flat_field(double density, double distortion, double window_w,
                         double window_h, std::uint64_t seed) {
    if (density <= 0.0 || window_w <= 0.0 || window_h <= 0.0)
        throw std::invalid_argument("gen_flat_field: density and window must be positive");
    if (distortion < 0.0 || distortion >= 1.0 / (2.0 * density))
        throw std::invalid_argument("gen_flat_field: distortion outside [0, 1/(2 rho))");

    FlatField field;
    field.density = density;
    field.distortion = distortion;
    field.window_w = window_w;
    field.window_h = window_h;
    field.seed = seed;
    field.nx = static_cast<int>(std::floor(window_w * density + 1.0 + kTol));
    field.ny = static_cast<int>(std::floor(window_h * density + 1.0 + kTol));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    field.positions.reserve(static_cast<std::size_t>(field.nx) *
                            static_cast<std::size_t>(field.ny));
    for (int j = 0; j < field.ny; ++j)
        for (int i = 0; i < field.nx; ++i) {
            Vec2 p{i / density, j / density};
            if (distortion > 0.0) {
                // Uniform over the eta-disk via rejection.
                double dx = 0.0;
                double dy = 0.0;
                do {
                    dx = (2.0 * unit(rng) - 1.0) * distortion;
                    dy = (2.0 * unit(rng) - 1.0) * distortion;
                } while (dx * dx + dy * dy > distortion * distortion);
                p.x += dx;
                p.y += dy;
            }
            field.positions.push_back(p);
        }
    return field;
}

double shortest_path_length(const FlatField& field, const topology::Topology& topo,
                            int src, int dst) {
    const int n = static_cast<int>(field.positions.size());
    if (src < 0 || src >= n || dst < 0 || dst >= n)
        throw std::out_of_range("shortest_path_length: satellite index");
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
    for (const auto& [a, b] : topo.edges) {
        const double w = (field.positions[static_cast<std::size_t>(a)] -
                          field.positions[static_cast<std::size_t>(b)]).norm();
        adj[static_cast<std::size_t>(a)].emplace_back(b, w);
        adj[static_cast<std::size_t>(b)].emplace_back(a, w);
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(n), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<std::size_t>(src)] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (u == dst) return d;
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        for (const auto& [v, w] : adj[static_cast<std::size_t>(u)])
            if (d + w < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = d + w;
                pq.emplace(d + w, v);
            }
    }
    return dist[static_cast<std::size_t>(dst)];
}

MotivatingExample motivating_example() {
    // 7x7 unit lattice; columns A..G map to x = 0..6, rows 1..7 to y = 0..6.
    FlatField field = gen_flat_field(1.0, 0.0, 6.0, 6.0, 0);
    const auto idx = [&](int x, int y) { return y * field.nx + x; };

    topology::Topology grid;
    grid.num_satellites = static_cast<int>(field.positions.size());
    grid.generator = "unit-grid";
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 7; ++x) {
            if (x + 1 < 7) grid.add_edge(idx(x, y), idx(x + 1, y));
            if (y + 1 < 7) grid.add_edge(idx(x, y), idx(x, y + 1));
        }
    grid.finalize();

    // Diagonal overlay: perimeter unit edges, two diagonal chains crossing at
    // the center, and unit entry edges from the left and right perimeters.
    topology::Topology diag;
    diag.num_satellites = grid.num_satellites;
    diag.generator = "diagonal-overlay";
    for (int t = 0; t < 6; ++t) {
        diag.add_edge(idx(t, 0), idx(t + 1, 0));
        diag.add_edge(idx(t, 6), idx(t + 1, 6));
        diag.add_edge(idx(0, t), idx(0, t + 1));
        diag.add_edge(idx(6, t), idx(6, t + 1));
    }
    for (int t = 0; t < 4; ++t) {
        diag.add_edge(idx(1 + t, 2 + t), idx(2 + t, 3 + t));  // up-right chain
        diag.add_edge(idx(5 - t, 2 + t), idx(4 - t, 3 + t));  // up-left chain
    }
    diag.add_edge(idx(0, 2), idx(1, 2));
    diag.add_edge(idx(6, 2), idx(5, 2));
    diag.finalize();

    const int a1 = idx(0, 0);
    const int g7 = idx(6, 6);
    const int a7 = idx(0, 6);
    const double corner_geo = (field.positions[static_cast<std::size_t>(g7)] -
                               field.positions[static_cast<std::size_t>(a1)]).norm();
    const double axis_geo = (field.positions[static_cast<std::size_t>(a7)] -
                             field.positions[static_cast<std::size_t>(a1)]).norm();

    MotivatingExample ex;
    ex.grid_stretch = shortest_path_length(field, grid, a1, g7) / corner_geo;
    ex.diagonal_stretch = shortest_path_length(field, diag, a1, g7) / corner_geo;
    ex.grid_axis_stretch = shortest_path_length(field, grid, a1, a7) / axis_geo;
    ex.diagonal_axis_stretch = shortest_path_length(field, diag, a1, a7) / axis_geo;
    return ex;
}

int max_aligned_demands(const std::vector<FlatDemand>& demands, double epsilon) {
    if (demands.empty()) return 0;
    // Orientations mod pi (edges and demands are undirected for alignment).
    std::vector<double> angles;
    angles.reserve(demands.size());
    for (const auto& d : demands) angles.push_back(std::fmod(d.orientation(), kPi));
    std::sort(angles.begin(), angles.end());
    // A maximizing epsilon-cone can start at some demand angle; scan each as
    // the left edge of a circular window of width 2*epsilon.
    const auto circ_diff = [](double a, double b) {
        double d = std::fabs(a - b);
        return std::min(d, kPi - d);
    };
    int best = 0;
    for (double ref : angles) {
        int count = 0;
        for (double a : angles)
            if (circ_diff(a, ref) <= epsilon + kTol ||
                circ_diff(a, std::fmod(ref + epsilon, kPi)) <= epsilon + kTol)
                ++count;
        best = std::max(best, count);
    }
    return std::min<int>(best, static_cast<int>(demands.size()));
}

double theorem1_lower_bound(double area, double density, int degree_bound,
                            double range, double epsilon, int num_demands,
                            int lambda, double l_sd) {
    if (epsilon < 0.0 || epsilon >= kPi)
        throw std::invalid_argument("theorem1_lower_bound: epsilon outside [0, pi)");
    if (area <= 0.0 || density <= 0.0 || degree_bound <= 0 || range <= 0.0 ||
        num_demands < 1 || lambda < 0 || l_sd <= 0.0)
        throw std::invalid_argument("theorem1_lower_bound: nonpositive argument");

    const double aligned_budget = range * lambda *
                                  (2.0 * area * density * density + 1.0) * degree_bound /
                                  num_demands;
    const double aligned = std::min(l_sd, aligned_budget);
    const double rest = l_sd - aligned;
    if (rest <= 0.0) return 1.0;
    // cos(pi/2) does not round to exactly zero; treat anything at rounding
    // scale as the degenerate perpendicular case
    const double c = std::fabs(std::cos(epsilon));
    if (c < 1e-12) return std::numeric_limits<double>::infinity();
    return (aligned + rest / c) / l_sd;
}

double theorem2_upper_bound(const std::vector<RegionSegment>& segments,
                            double range, double density, double distortion) {
    if (segments.empty())
        throw std::invalid_argument("theorem2_upper_bound: empty region sequence");
    if (range <= 0.0 || density <= 0.0 || distortion < 0.0)
        throw std::invalid_argument("theorem2_upper_bound: invalid parameters");
    const double snap = 2.0 * distortion + 1.0 / (std::sqrt(2.0) * density);
    const double inflate = 1.0 + 4.0 * snap / range;
    double sum = 0.0;
    for (const auto& seg : segments)
        sum += range + seg.length * (std::fabs(std::cos(seg.angle_to_primary)) +
                                     std::fabs(std::sin(seg.angle_to_primary)));
    return inflate * sum + (static_cast<double>(segments.size()) - 1.0) * range / 2.0;
}

namespace {

// Points of one region's rotated grid: interior line intersections plus
// grid-line/boundary intersections, with adjacency along lines and along the
// region perimeter.
struct RegionGrid {
    std::vector<Vec2> points;
    std::vector<std::pair<int, int>> adjacency;  // indices into points
    std::vector<int> boundary;                   // point indices on the perimeter
};

RegionGrid build_region_grid(const Vec2& lo, double side, double spacing,
                             double angle) {
    RegionGrid grid;
    const Vec2 center{lo.x + side / 2.0, lo.y + side / 2.0};
    const Vec2 u{std::cos(angle), std::sin(angle)};      // primary axis
    const Vec2 v{-std::sin(angle), std::cos(angle)};     // secondary axis

    const auto to_world = [&](double a, double b) {
        return Vec2{center.x + a * u.x + b * v.x, center.y + a * u.y + b * v.y};
    };
    const auto inside = [&](const Vec2& p) {
        return p.x >= lo.x - kTol && p.x <= lo.x + side + kTol &&
               p.y >= lo.y - kTol && p.y <= lo.y + side + kTol;
    };
    const auto on_boundary = [&](const Vec2& p) {
        return std::fabs(p.x - lo.x) <= kTol || std::fabs(p.x - lo.x - side) <= kTol ||
               std::fabs(p.y - lo.y) <= kTol || std::fabs(p.y - lo.y - side) <= kTol;
    };

    // Grid coordinates large enough to cover the rotated square.
    const int span = static_cast<int>(std::ceil(side / spacing)) + 2;
    std::map<std::pair<int, int>, int> interior;  // (a, b) -> point index
    const auto add_point = [&](const Vec2& p) {
        grid.points.push_back(p);
        return static_cast<int>(grid.points.size()) - 1;
    };
    for (int a = -span; a <= span; ++a)
        for (int b = -span; b <= span; ++b) {
            const Vec2 p = to_world(a * spacing, b * spacing);
            if (inside(p)) interior[{a, b}] = add_point(p);
        }

    // Boundary clip of each grid line: where the line leaves the square
    // between an inside point and an outside lattice step.
    const auto clip = [&](const Vec2& from, const Vec2& dir) -> Vec2 {
        // Smallest positive t with from + t*dir on the square boundary.
        double best = std::numeric_limits<double>::infinity();
        const auto consider = [&](double t) {
            if (t > kTol && t < best) best = t;
        };
        if (std::fabs(dir.x) > kTol) {
            consider((lo.x - from.x) / dir.x);
            consider((lo.x + side - from.x) / dir.x);
        }
        if (std::fabs(dir.y) > kTol) {
            consider((lo.y - from.y) / dir.y);
            consider((lo.y + side - from.y) / dir.y);
        }
        return from + dir * best;
    };

    for (const auto& [ab, idx] : interior) {
        const auto [a, b] = ab;
        const std::pair<int, int> steps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& [da, db] : steps) {
            const auto it = interior.find({a + da, b + db});
            if (it != interior.end()) {
                if (it->second > idx) grid.adjacency.emplace_back(idx, it->second);
                continue;
            }
            // Neighbor lattice point is outside: the line exits through the
            // boundary; add the boundary intersection as a point.
            const Vec2 dir{da * u.x + db * v.x, da * u.y + db * v.y};
            const Vec2 exit = clip(grid.points[static_cast<std::size_t>(idx)], dir);
            if (!on_boundary(exit)) continue;
            const int bidx = add_point(exit);
            grid.boundary.push_back(bidx);
            grid.adjacency.emplace_back(idx, bidx);
        }
    }

    // Chain boundary points along the perimeter (adjacent "on the boundary").
    std::vector<int> ring = grid.boundary;
    std::sort(ring.begin(), ring.end(), [&](int a, int b) {
        // Order by perimeter arc-length parameter.
        const auto param = [&](const Vec2& p) {
            if (std::fabs(p.y - lo.y) <= kTol) return p.x - lo.x;
            if (std::fabs(p.x - lo.x - side) <= kTol) return side + (p.y - lo.y);
            if (std::fabs(p.y - lo.y - side) <= kTol) return 3.0 * side - (p.x - lo.x);
            return 4.0 * side - (p.y - lo.y);
        };
        return param(grid.points[static_cast<std::size_t>(a)]) <
               param(grid.points[static_cast<std::size_t>(b)]);
    });
    for (std::size_t k = 0; k + 1 < ring.size(); ++k)
        grid.adjacency.emplace_back(std::min(ring[k], ring[k + 1]),
                                    std::max(ring[k], ring[k + 1]));
    if (ring.size() > 2)
        grid.adjacency.emplace_back(std::min(ring.front(), ring.back()),
                                    std::max(ring.front(), ring.back()));
    return grid;
}

}  // namespace

RotatedGrid rotated_grid_topology(const FlatField& field, double region_side,
                                  const std::vector<double>& primary_directions) {
    const double cell = 1.0 / field.density;
    if (region_side <= 0.0 ||
        std::fabs(region_side / cell - std::round(region_side / cell)) > 1e-6)
        throw std::invalid_argument("rotated_grid_topology: region side must be a "
                                    "multiple of 1/density");
    const double snap = 2.0 * field.distortion + 1.0 / (std::sqrt(2.0) * field.density);
    const double margin = field.range - (field.range / 2.0 + 2.0 * snap);
    if (margin <= 0.0)
        throw std::invalid_argument(
            "rotated_grid_topology: range condition violated, margin = " +
            std::to_string(margin));
    const double spacing = field.range / 2.0;

    const int regions_x = std::max(1, static_cast<int>(std::floor(
                               field.window_w / region_side + kTol)));
    const int regions_y = std::max(1, static_cast<int>(std::floor(
                               field.window_h / region_side + kTol)));
    if (primary_directions.size() !=
        static_cast<std::size_t>(regions_x) * static_cast<std::size_t>(regions_y))
        throw std::invalid_argument(
            "rotated_grid_topology: one primary direction per region required");

    RotatedGrid out;
    out.topo.num_satellites = static_cast<int>(field.positions.size());
    out.topo.degree_bound = field.degree_bound;
    out.topo.generator = "rotated-grid";

    // The continuous region spans side - 1/density (its lattice extent).
    const double side = region_side - cell;
    std::set<std::pair<int, int>> edge_set;
    std::vector<int> region_degree(field.positions.size(), 0);
    // Per region: mapped boundary points (world position, satellite id).
    std::vector<std::vector<std::pair<Vec2, int>>> boundary_sats(
        primary_directions.size());

    for (int rj = 0; rj < regions_y; ++rj)
        for (int ri = 0; ri < regions_x; ++ri) {
            const std::size_t ridx = static_cast<std::size_t>(rj) * regions_x + ri;
            const Vec2 lo{ri * region_side, rj * region_side};
            const RegionGrid grid =
                build_region_grid(lo, side, spacing, primary_directions[ridx]);
            std::vector<int> mapped(grid.points.size());
            for (std::size_t k = 0; k < grid.points.size(); ++k)
                mapped[k] = field.nearest_satellite(grid.points[k]);
            for (const auto& [a, b] : grid.adjacency) {
                const int sa = mapped[static_cast<std::size_t>(a)];
                const int sb = mapped[static_cast<std::size_t>(b)];
                if (sa == sb) continue;
                if (!edge_set.insert({std::min(sa, sb), std::max(sa, sb)}).second)
                    continue;
                ++region_degree[static_cast<std::size_t>(sa)];
                ++region_degree[static_cast<std::size_t>(sb)];
            }
            for (int bidx : grid.boundary)
                boundary_sats[ridx].emplace_back(grid.points[static_cast<std::size_t>(bidx)],
                                                 mapped[static_cast<std::size_t>(bidx)]);
        }
    out.max_region_degree =
        *std::max_element(region_degree.begin(), region_degree.end());

    // Stitch adjacent regions: for each boundary point of either side, link
    // the satellites mapped from the two sides' nearest boundary points.
    const auto stitch = [&](std::size_t ra, std::size_t rb, bool vertical,
                            double shared_lo_a, double shared_lo_b) {
        // Keep points on the facing edges only.
        const auto facing = [&](const std::vector<std::pair<Vec2, int>>& pts,
                                double coord) {
            std::vector<std::pair<Vec2, int>> out_pts;
            for (const auto& pr : pts) {
                const double c = vertical ? pr.first.x : pr.first.y;
                if (std::fabs(c - coord) <= kTol) out_pts.push_back(pr);
            }
            return out_pts;
        };
        const auto side_a = facing(boundary_sats[ra], shared_lo_a);
        const auto side_b = facing(boundary_sats[rb], shared_lo_b);
        if (side_a.empty() || side_b.empty()) return;
        const auto nearest = [&](const Vec2& p,
                                 const std::vector<std::pair<Vec2, int>>& pts) {
            int best = pts.front().second;
            double best_d = std::numeric_limits<double>::infinity();
            for (const auto& [q, sat] : pts) {
                const double d = (q - p).norm();
                if (d < best_d) {
                    best_d = d;
                    best = sat;
                }
            }
            return best;
        };
        const auto connect = [&](int sa, int sb) {
            if (sa == sb) return;
            if (edge_set.insert({std::min(sa, sb), std::max(sa, sb)}).second)
                ++out.stitch_edges;
        };
        for (const auto& [p, sat] : side_a) connect(sat, nearest(p, side_b));
        for (const auto& [p, sat] : side_b) connect(nearest(p, side_a), sat);
    };

    for (int rj = 0; rj < regions_y; ++rj)
        for (int ri = 0; ri < regions_x; ++ri) {
            const std::size_t ridx = static_cast<std::size_t>(rj) * regions_x + ri;
            if (ri + 1 < regions_x)
                stitch(ridx, ridx + 1, true, ri * region_side + side,
                       (ri + 1) * region_side);
            if (rj + 1 < regions_y)
                stitch(ridx, ridx + static_cast<std::size_t>(regions_x), false,
                       rj * region_side + side, (rj + 1) * region_side);
        }

    for (const auto& [a, b] : edge_set) out.topo.add_edge(a, b);
    out.topo.finalize();
    return out;
}

}  // namespace starlab::flat
