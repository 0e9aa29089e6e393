#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "starlab/topology.hpp"

using namespace starlab;
using namespace starlab::constellation;
using namespace starlab::topology;
using demand::DemandMatrix;
using demand::GroundStation;

namespace {

struct Scene {
    ShellConfig cfg;
    Ephemeris eph;
    RangeGraph range;
    std::vector<GroundStation> stations;
    DemandMatrix delta{0};
};

Scene toy_scene(int orbits = 8, int slots = 12) {
    Scene s;
    s.cfg = ShellConfig::phase1();
    s.cfg.num_orbits = orbits;
    s.cfg.sats_per_orbit = slots;
    s.eph = generate_shell(s.cfg, {0.0, 30.0, 60.0});
    s.range = range_graph(s.eph, s.cfg.effective_isl_range());
    const double rho = s.cfg.shell_radius();
    const double lats[] = {40.7, 51.5, 35.7, -23.5, 28.6, 1.35};
    const double lons[] = {-74.0, -0.1, 139.7, -46.6, 77.2, 103.8};
    for (int i = 0; i < 6; ++i)
        s.stations.push_back(GroundStation::from_lat_lon(i, "c" + std::to_string(i),
                                                         lats[i], lons[i], 1e7, rho));
    s.delta = build_demand(s.stations, demand::Pattern::kDistance, 1.0, 3);
    return s;
}

void check_invariants(const Topology& topo, const RangeGraph& range, int kappa) {
    const auto deg = topo.degrees();
    for (int d : deg) CHECK(d <= kappa);
    for (const auto& [a, b] : topo.edges) {
        CHECK(a < b);
        CHECK(range.has_edge(a, b));
    }
    // sorted and unique
    CHECK(std::is_sorted(topo.edges.begin(), topo.edges.end()));
    CHECK(std::adjacent_find(topo.edges.begin(), topo.edges.end()) == topo.edges.end());
}

}  // namespace

TEST_CASE("plus_grid: exact shape") {
    const Topology big = plus_grid(72, 22);
    CHECK(big.edges.size() == 3168);
    for (int d : big.degrees()) CHECK(d == 4);

    const Topology small = plus_grid(3, 3);
    CHECK(small.edges.size() == 18);
    for (int d : small.degrees()) CHECK(d == 4);
}

TEST_CASE("plus_grid edges within the phase-1 range graph off the seam") {
    const ShellConfig cfg = ShellConfig::phase1();
    const Ephemeris eph = generate_shell(cfg, {0.0, 50.0, 100.0});
    const RangeGraph range = range_graph(eph, cfg.effective_isl_range());
    const Topology grid = plus_grid(cfg.num_orbits, cfg.sats_per_orbit);
    const int ns = cfg.sats_per_orbit;
    const int seam_orbit = cfg.num_orbits - 1;
    int seam_edges = 0;
    for (const auto& [a, b] : grid.edges) {
        // The orbit 71 <-> orbit 0 pair is the phasing seam: the accumulated
        // half-step offsets leave same-slot satellites ~13,000 km apart there.
        if (a / ns == 0 && b / ns == seam_orbit) {
            CHECK(!range.has_edge(a, b));
            ++seam_edges;
        } else {
            CHECK(range.has_edge(a, b));
        }
    }
    CHECK(seam_edges == ns);
}

TEST_CASE("link_distance: orientation behavior") {
    const Vec3 s{6921e3, 0, 0};
    const Vec3 other{6921e3, 900e3, 0};  // link along +y from other to s
    const Vec3 f{0, 1, 0};               // field along the link
    const Vec3 f_perp{0, 0, 1};          // rotated: perpendicular to link
    // link parallel to f (perpendicular to f_perp) costs zero
    CHECK(link_distance(s, other, f, f_perp, DistanceMode::kPlain) ==
          doctest::Approx(0.0));
    CHECK(link_distance(s, other, f, f_perp, DistanceMode::kPrioritized) ==
          doctest::Approx(0.0));

    // link parallel to f_perp costs the full projection
    const Vec3 other2{6921e3, 0, 900e3};
    const double plain = link_distance(s, other2, f, Vec3{0, 0, 2}, DistanceMode::kPlain);
    CHECK(plain == doctest::Approx(2.0 * 900.0));  // |f_perp| * |d| in km

    // strong field: prioritized collapses to plain (exponent ~ 0)
    const Vec3 strong{0, 20, 0};
    const double pr =
        link_distance(s, other2, strong, Vec3{0, 0, 2}, DistanceMode::kPrioritized);
    CHECK(pr == doctest::Approx(plain).epsilon(1e-6));

    CHECK_THROWS(link_distance(s, s, f, f_perp, DistanceMode::kPlain));
}

TEST_CASE("mode_from_string") {
    CHECK(mode_from_string("plain") == DistanceMode::kPlain);
    CHECK(mode_from_string("prioritized") == DistanceMode::kPrioritized);
    CHECK_THROWS(mode_from_string("fast"));
}

TEST_CASE("starfield: invariants and kappa=4 shape on a toy shell") {
    const Scene s = toy_scene();
    StarfieldParams params;
    const Topology topo = starfield(s.range, s.eph, s.delta, s.stations, params);
    check_invariants(topo, s.range, params.degree_bound);
    CHECK(topo.generator == "starfield");
    CHECK(topo.isolated.empty());
    // every satellite selected at least its argmin link, so degree >= 1
    for (int d : topo.degrees()) CHECK(d >= 1);
}

TEST_CASE("starfield: zero demand with the epsilon fallback is grid-like") {
    const Scene s = toy_scene();
    DemandMatrix zero(static_cast<int>(s.stations.size()));
    StarfieldParams params;
    const Topology topo = starfield(s.range, s.eph, zero, s.stations, params);
    check_invariants(topo, s.range, params.degree_bound);
    // with no field the argmin falls back to the geometric tiebreak, so most
    // satellites keep a link to their nearest in-range neighbor (a few lose
    // it to degree conflicts)
    const auto& pos = s.eph.midpoint_positions();
    int have_nearest = 0;
    for (int a = 0; a < topo.num_satellites; ++a) {
        int nearest = -1;
        double best = 1e300;
        for (int b : s.range.neighbors[a]) {
            const double d = (pos[static_cast<std::size_t>(a)] -
                              pos[static_cast<std::size_t>(b)]).norm();
            if (d < best) best = d, nearest = b;
        }
        if (nearest >= 0 && topo.has_edge(std::min(a, nearest), std::max(a, nearest)))
            ++have_nearest;
    }
    CHECK(have_nearest >= topo.num_satellites / 2);
}

TEST_CASE("starfield: plain mode is invariant to demand scale") {
    const Scene s = toy_scene();
    StarfieldParams params;
    params.mode = DistanceMode::kPlain;
    params.normalize_demand = false;  // expose the raw intensities
    DemandMatrix scaled = s.delta;
    for (double& v : scaled.values) v *= 10.0;
    const Topology a = starfield(s.range, s.eph, s.delta, s.stations, params);
    const Topology b = starfield(s.range, s.eph, scaled, s.stations, params);
    CHECK(a.edges == b.edges);
}

TEST_CASE("starfield: determinism") {
    const Scene s = toy_scene();
    StarfieldParams params;
    params.mode = DistanceMode::kPrioritized;
    const Topology a = starfield(s.range, s.eph, s.delta, s.stations, params);
    const Topology b = starfield(s.range, s.eph, s.delta, s.stations, params);
    CHECK(a.edges == b.edges);
}

TEST_CASE("static_starfield: degree exactly 4, one offset per orbit pair") {
    const Scene s = toy_scene();
    StarfieldParams params;
    const Topology topo = static_starfield(s.range, s.eph, s.delta, s.stations, params);
    check_invariants(topo, s.range, params.degree_bound);
    for (int d : topo.degrees()) CHECK(d == 4);
    CHECK(topo.edges.size() ==
          static_cast<std::size_t>(2 * s.cfg.num_satellites()));

    // inter-orbit links between adjacent orbits share a single slot offset
    const int ns = s.cfg.sats_per_orbit;
    std::map<std::pair<int, int>, std::vector<int>> offsets;
    for (const auto& [a, b] : topo.edges) {
        const int oa = a / ns, ob = b / ns;
        if (oa == ob) continue;
        offsets[{oa, ob}].push_back(((b % ns) - (a % ns) + ns) % ns);
    }
    for (const auto& [pair, offs] : offsets) {
        CHECK(offs.size() == static_cast<std::size_t>(ns));
        for (int o : offs) CHECK(o == offs.front());
    }
}

TEST_CASE("static_starfield: zero demand offset minimizes link length") {
    const Scene s = toy_scene();
    DemandMatrix zero(static_cast<int>(s.stations.size()));
    StarfieldParams params;
    const Topology topo = static_starfield(s.range, s.eph, zero, s.stations, params);
    // find the offset picked for orbit pair (0, 1) and compare against the
    // brute-force shortest-total-length offset
    const auto& pos = s.eph.midpoint_positions();
    const int ns = s.cfg.sats_per_orbit;
    int picked = -1;
    for (const auto& [a, b] : topo.edges) {
        if (a / ns == 0 && b / ns == 1) {
            picked = ((b % ns) - (a % ns) + ns) % ns;
            break;
        }
    }
    REQUIRE(picked >= 0);
    double best_len = 1e300;
    int best_off = -1;
    for (int off = 0; off < ns; ++off) {
        double total = 0.0;
        for (int j = 0; j < ns; ++j)
            total += (pos[j] - pos[ns + (j + off) % ns]).norm();
        if (total < best_len) {
            best_len = total;
            best_off = off;
        }
    }
    CHECK(picked == best_off);
}

TEST_CASE("random_topology: seeded determinism and degree bound") {
    const Scene s = toy_scene();
    const Topology a = random_topology(s.range, s.eph, 4, 11);
    const Topology b = random_topology(s.range, s.eph, 4, 11);
    CHECK(a.edges == b.edges);
    check_invariants(a, s.range, 4);
    const Topology c = random_topology(s.range, s.eph, 4, 12);
    CHECK(a.edges != c.edges);  // overwhelmingly likely for distinct seeds
}

TEST_CASE("dynamic_schedule: single epoch equals starfield, determinism") {
    const Scene s = toy_scene();
    StarfieldParams params;
    const double r = s.cfg.effective_isl_range();
    const std::vector<Epoch> one = {{0.0, 60.0}};
    const auto sched = dynamic_schedule(s.eph, one, s.delta, s.stations, params, r);
    REQUIRE(sched.size() == 1);
    const Topology direct = starfield(s.range, s.eph, s.delta, s.stations, params);
    CHECK(sched[0].second.edges == direct.edges);

    const std::vector<Epoch> two = {{0.0, 30.0}, {30.0, 60.0}};
    const auto sched2 = dynamic_schedule(s.eph, two, s.delta, s.stations, params, r);
    REQUIRE(sched2.size() == 2);
    // range membership is per epoch: each epoch's topology only has to stay
    // in range over that epoch's own time samples
    for (const auto& [epoch, topo] : sched2) {
        Ephemeris sub;
        sub.config = s.cfg;
        for (std::size_t k = 0; k < s.eph.times.size(); ++k)
            if (s.eph.times[k] >= epoch.start - 1e-9 &&
                s.eph.times[k] <= epoch.end + 1e-9) {
                sub.times.push_back(s.eph.times[k]);
                sub.positions.push_back(s.eph.positions[k]);
            }
        const RangeGraph sub_range = range_graph(sub, r);
        check_invariants(topo, sub_range, params.degree_bound);
    }
    const auto sched3 = dynamic_schedule(s.eph, two, s.delta, s.stations, params, r);
    for (std::size_t k = 0; k < sched2.size(); ++k)
        CHECK(sched2[k].second.edges == sched3[k].second.edges);
}
