#include "starlab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace starlab::topology {

using demand::DemandMatrix;
using demand::FieldParams;
using demand::GroundStation;
using geometry::SpherePoint;

DistanceMode mode_from_string(const std::string& name) {
    if (name == "plain") return DistanceMode::kPlain;
    if (name == "prioritized") return DistanceMode::kPrioritized;
    throw std::invalid_argument("unknown distance mode: " + name);
}

std::vector<int> Topology::degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(num_satellites), 0);
    for (const auto& [a, b] : edges) {
        ++deg[static_cast<std::size_t>(a)];
        ++deg[static_cast<std::size_t>(b)];
    }
    return deg;
}

bool Topology::has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
}

void Topology::add_edge(int a, int b) {
    if (a == b) throw std::invalid_argument("topology: self loop");
    if (a > b) std::swap(a, b);
    edges.emplace_back(a, b);
}

void Topology::finalize() {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

double link_distance(const Vec3& pos_s, const Vec3& pos_other, const Vec3& f,
                     const Vec3& f_perp, DistanceMode mode) {
    const Vec3 d = (pos_s - pos_other) / 1000.0;  // kilometers, as in the
                                                  // aggregate metric
    const double dn2 = d.norm2();
    if (dn2 == 0.0) throw std::invalid_argument("link_distance: coincident satellites");
    const double projection = std::abs(f_perp.dot(d));
    if (mode == DistanceMode::kPlain) return projection;
    const double exponent = 2.0 * std::exp(-f.norm());
    return projection / std::pow(std::sqrt(dn2), exponent);
}

namespace {

struct Flow {
    SpherePoint u;
    SpherePoint v;
    double intensity = 0.0;
};

// Per-flow steering data at one satellite.
struct FlowField {
    Vec3 f_perp;
    double neg_exponent = 0.0;  // -2 * exp(-|f|), prioritized mode only
};

std::vector<Flow> collect_flows(const DemandMatrix& delta,
                                const std::vector<GroundStation>& stations,
                                bool fold_ordered_pairs) {
    std::vector<Flow> flows;
    for (int i = 0; i < delta.size; ++i) {
        for (int j = fold_ordered_pairs ? i + 1 : 0; j < delta.size; ++j) {
            if (i == j) continue;
            // The per-flow |f_perp . dP| is linear in the intensity and, up to
            // sign, symmetric under endpoint swap; in plain mode the ordered
            // pair (j, i) can therefore be folded into (i, j).
            const double intensity = fold_ordered_pairs
                                         ? delta.at(i, j) + delta.at(j, i)
                                         : delta.at(i, j);
            if (intensity <= 0.0) continue;
            flows.push_back({stations[i].shell_position, stations[j].shell_position,
                             intensity});
        }
    }
    return flows;
}

FieldParams field_params(const StarfieldParams& p, double inclination,
                         double intra_orbit_spacing) {
    FieldParams fp;
    fp.field_constant = p.field_constant;
    fp.crown_strength = p.crown_strength;
    fp.crown_decay = p.crown_decay;
    fp.crown_enabled = p.crown_enabled;
    fp.inclination = inclination;
    fp.min_distance = intra_orbit_spacing;
    return fp;
}

void flow_fields_at(const SpherePoint& p, const std::vector<Flow>& flows,
                    const FieldParams& params, DistanceMode mode,
                    std::vector<FlowField>& out) {
    out.resize(flows.size());
    for (std::size_t k = 0; k < flows.size(); ++k) {
        Vec3 f = demand::demand_field(p, flows[k].u, flows[k].v, flows[k].intensity,
                                      params.field_constant, params.min_distance);
        if (params.crown_enabled)
            f = demand::crown_adjust(f, p, params.inclination, params.crown_strength,
                                     params.crown_decay);
        out[k].f_perp = f.cross(p.position) / p.shell_radius;
        if (mode == DistanceMode::kPrioritized)
            out[k].neg_exponent = -2.0 * std::exp(-f.norm());
    }
}

// Aggregate per-flow distance of the candidate link, including the epsilon
// fallback that keeps zero-field satellites preferring short links.
double aggregate_distance(const Vec3& pos_s, const Vec3& pos_other,
                          const std::vector<FlowField>& fields, DistanceMode mode,
                          double epsilon) {
    // Kilometers throughout: the prioritized denominator's exponent varies per
    // flow, so the metric is only meaningful under one fixed length unit, and
    // the epsilon fallback is specified per kilometer of link length.
    const Vec3 d = (pos_s - pos_other) / 1000.0;
    const double dn = d.norm();
    const double log_dn = mode == DistanceMode::kPrioritized ? std::log(dn) : 0.0;
    double total = 0.0;
    for (const auto& ff : fields) {
        double dist = std::abs(ff.f_perp.dot(d));
        if (mode == DistanceMode::kPrioritized)
            dist *= std::exp(ff.neg_exponent * log_dn);
        total += dist;
    }
    const double fallback_count = fields.empty() ? 1.0 : static_cast<double>(fields.size());
    return total + epsilon * dn * fallback_count;
}

double intra_orbit_spacing(const Ephemeris& eph) {
    const double rho = eph.config.shell_radius();
    return 2.0 * rho * std::sin(M_PI / eph.config.sats_per_orbit);
}

}  // namespace

Topology starfield(const RangeGraph& range, const Ephemeris& eph,
                   const DemandMatrix& delta,
                   const std::vector<GroundStation>& stations,
                   const StarfieldParams& params) {
    if (params.degree_bound < 2)
        throw std::invalid_argument("starfield: degree bound must be >= 2");
    const auto& positions = eph.midpoint_positions();
    const int n = eph.config.num_satellites();
    const double rho = eph.config.shell_radius();

    const DemandMatrix normalized =
        params.normalize_demand ? delta.normalized() : delta;
    const bool fold = params.mode == DistanceMode::kPlain;
    const auto flows = collect_flows(normalized, stations, fold);
    const auto fp = field_params(params, eph.config.inclination, intra_orbit_spacing(eph));

    const int kappa = params.degree_bound;
    const int angular_links = kappa / 2 - 1;

    Topology topo;
    topo.num_satellites = n;
    topo.degree_bound = kappa;
    topo.generator = "starfield";

    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    std::vector<FlowField> fields;
    std::vector<double> dist;
    std::vector<int> order;

    // Walks the ranked candidate list until a neighbor with spare degree is
    // found; gives up after kappa occupied candidates.
    const auto try_link = [&](int s, const std::vector<int>& ranked) {
        int failures = 0;
        for (int cand : ranked) {
            if (degree[static_cast<std::size_t>(s)] >= kappa) return;
            if (topo.has_edge(s, cand)) continue;
            if (degree[static_cast<std::size_t>(cand)] >= kappa) {
                if (++failures >= kappa) return;
                continue;
            }
            topo.add_edge(s, cand);
            // keep the edge list queryable during construction
            std::sort(topo.edges.begin(), topo.edges.end());
            ++degree[static_cast<std::size_t>(s)];
            ++degree[static_cast<std::size_t>(cand)];
            return;
        }
    };

    for (int s = 0; s < n; ++s) {
        const auto& candidates = range.neighbors[static_cast<std::size_t>(s)];
        if (candidates.empty()) {
            topo.isolated.push_back(s);
            continue;
        }
        const SpherePoint ps(positions[static_cast<std::size_t>(s)], rho);
        flow_fields_at(ps, flows, fp, params.mode, fields);

        dist.resize(candidates.size());
        for (std::size_t c = 0; c < candidates.size(); ++c)
            dist[c] = aggregate_distance(ps.position,
                                         positions[static_cast<std::size_t>(candidates[c])],
                                         fields, params.mode, params.epsilon);
        order.resize(candidates.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return dist[a] < dist[b]; });

        std::vector<int> ranked(order.size());
        for (std::size_t k = 0; k < order.size(); ++k)
            ranked[k] = candidates[static_cast<std::size_t>(order[k])];
        try_link(s, ranked);

        const int star = ranked.front();  // angular reference, per the selection rule
        for (int j = 1; j <= angular_links; ++j) {
            const double beta = j * M_PI / (angular_links + 1);
            // Orientation-filtered candidates ranked by closeness to beta.
            const Vec3 ref = ps.position - positions[static_cast<std::size_t>(star)];
            const double ref_norm = ref.norm();
            if (ref_norm == 0.0) break;
            const double cos_beta = std::cos(beta);
            std::vector<std::pair<double, int>> angular;
            for (int cand : candidates) {
                if (cand == star) continue;
                const Vec3 link = ps.position - positions[static_cast<std::size_t>(cand)];
                if (link.cross(ref).dot(ps.position) <= 0.0) continue;
                const double score =
                    std::abs(link.dot(ref) / (link.norm() * ref_norm) - cos_beta);
                angular.emplace_back(score, cand);
            }
            std::stable_sort(angular.begin(), angular.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            std::vector<int> angular_ranked;
            angular_ranked.reserve(angular.size());
            for (const auto& [score, cand] : angular) angular_ranked.push_back(cand);
            try_link(s, angular_ranked);
        }
    }

    topo.finalize();
    return topo;
}

Topology static_starfield(const RangeGraph& range, const Ephemeris& eph,
                          const DemandMatrix& delta,
                          const std::vector<GroundStation>& stations,
                          const StarfieldParams& params) {
    const int n_o = eph.config.num_orbits;
    const int n_s = eph.config.sats_per_orbit;
    const auto& positions = eph.midpoint_positions();
    const double rho = eph.config.shell_radius();

    const DemandMatrix normalized =
        params.normalize_demand ? delta.normalized() : delta;
    const bool fold = params.mode == DistanceMode::kPlain;
    const auto flows = collect_flows(normalized, stations, fold);
    const auto fp = field_params(params, eph.config.inclination, intra_orbit_spacing(eph));

    Topology topo;
    topo.num_satellites = eph.config.num_satellites();
    topo.degree_bound = params.degree_bound;
    topo.generator = "static_starfield";

    const auto flat = [n_s](int orbit, int slot) { return orbit * n_s + slot; };

    // Intra-orbit ring.
    for (int i = 0; i < n_o; ++i)
        for (int j = 0; j < n_s; ++j) {
            const int a = flat(i, j), b = flat(i, (j + 1) % n_s);
            if (!range.has_edge(a, b))
                throw std::runtime_error("static_starfield: intra-orbit neighbors out of range");
            topo.add_edge(a, b);
        }

    // One demand-optimal offset per adjacent orbit pair.
    std::vector<FlowField> fields;
    std::vector<std::vector<FlowField>> orbit_fields(static_cast<std::size_t>(n_s));
    for (int i = 0; i < n_o; ++i) {
        const int next = (i + 1) % n_o;
        for (int j = 0; j < n_s; ++j) {
            const SpherePoint ps(positions[static_cast<std::size_t>(flat(i, j))], rho);
            flow_fields_at(ps, flows, fp, params.mode, orbit_fields[static_cast<std::size_t>(j)]);
        }
        double best_cost = 0.0;
        int best_offset = -1;
        for (int p = 0; p < n_s; ++p) {
            bool feasible = true;
            for (int j = 0; j < n_s && feasible; ++j)
                feasible = range.has_edge(flat(i, j), flat(next, (j + p) % n_s));
            if (!feasible) continue;
            double cost = 0.0;
            for (int j = 0; j < n_s; ++j)
                cost += aggregate_distance(
                    positions[static_cast<std::size_t>(flat(i, j))],
                    positions[static_cast<std::size_t>(flat(next, (j + p) % n_s))],
                    orbit_fields[static_cast<std::size_t>(j)], params.mode, params.epsilon);
            if (best_offset < 0 || cost < best_cost) {
                best_cost = cost;
                best_offset = p;
            }
        }
        if (best_offset < 0)
            throw std::runtime_error("static_starfield: no feasible offset between orbits " +
                                     std::to_string(i) + " and " + std::to_string(next));
        for (int j = 0; j < n_s; ++j)
            topo.add_edge(flat(i, j), flat(next, (j + best_offset) % n_s));
    }

    topo.finalize();
    return topo;
}

Topology plus_grid(int num_orbits, int sats_per_orbit) {
    Topology topo;
    topo.num_satellites = num_orbits * sats_per_orbit;
    topo.degree_bound = 4;
    topo.generator = "plus_grid";
    const auto flat = [sats_per_orbit](int orbit, int slot) {
        return orbit * sats_per_orbit + slot;
    };
    for (int i = 0; i < num_orbits; ++i) {
        for (int j = 0; j < sats_per_orbit; ++j) {
            topo.add_edge(flat(i, j), flat(i, (j + 1) % sats_per_orbit));
            topo.add_edge(flat(i, j), flat((i + 1) % num_orbits, j));
        }
    }
    topo.finalize();
    return topo;
}

Topology random_topology(const RangeGraph& range, const Ephemeris& eph,
                         int degree_bound, std::uint64_t seed) {
    if (degree_bound % 2 != 0 || degree_bound < 2)
        throw std::invalid_argument("random_topology: degree bound must be even and >= 2");
    const int n_o = eph.config.num_orbits;
    const int n_s = eph.config.sats_per_orbit;
    const auto flat = [n_s](int orbit, int slot) { return orbit * n_s + slot; };

    std::mt19937_64 rng(seed);

    Topology topo;
    topo.num_satellites = eph.config.num_satellites();
    topo.degree_bound = degree_bound;
    topo.generator = "random";

    // Intra-orbit: one random in-range slot offset, applied orbit-wide.
    for (int i = 0; i < n_o; ++i) {
        std::vector<int> feasible;
        for (int q = 1; q <= n_s / 2; ++q) {
            bool ok = true;
            for (int j = 0; j < n_s && ok; ++j)
                ok = range.has_edge(flat(i, j), flat(i, (j + q) % n_s));
            if (ok) feasible.push_back(q);
        }
        if (feasible.empty())
            throw std::runtime_error("random_topology: no feasible intra-orbit offset for orbit " +
                                     std::to_string(i));
        const int q = feasible[std::uniform_int_distribution<std::size_t>(
            0, feasible.size() - 1)(rng)];
        for (int j = 0; j < n_s; ++j) topo.add_edge(flat(i, j), flat(i, (j + q) % n_s));
    }

    // Inter-orbit: one random feasible offset per adjacent orbit pair.
    for (int i = 0; i < n_o; ++i) {
        const int next = (i + 1) % n_o;
        std::vector<int> feasible;
        for (int p = 0; p < n_s; ++p) {
            bool ok = true;
            for (int j = 0; j < n_s && ok; ++j)
                ok = range.has_edge(flat(i, j), flat(next, (j + p) % n_s));
            if (ok) feasible.push_back(p);
        }
        if (feasible.empty())
            throw std::runtime_error("random_topology: no feasible offset between orbits " +
                                     std::to_string(i) + " and " + std::to_string(next));
        const int p = feasible[std::uniform_int_distribution<std::size_t>(
            0, feasible.size() - 1)(rng)];
        for (int j = 0; j < n_s; ++j) topo.add_edge(flat(i, j), flat(next, (j + p) % n_s));
    }

    topo.finalize();
    return topo;
}

std::vector<std::pair<Epoch, Topology>> dynamic_schedule(
    const Ephemeris& eph, const std::vector<Epoch>& epochs,
    const DemandMatrix& delta, const std::vector<GroundStation>& stations,
    const StarfieldParams& params, double range_meters) {
    if (epochs.empty()) throw std::invalid_argument("dynamic_schedule: no epochs");
    for (std::size_t k = 0; k + 1 < epochs.size(); ++k)
        if (std::abs(epochs[k].end - epochs[k + 1].start) > 1e-9)
            throw std::invalid_argument("dynamic_schedule: epochs must be contiguous");

    std::vector<std::pair<Epoch, Topology>> schedule;
    for (const auto& epoch : epochs) {
        Ephemeris sub;
        sub.config = eph.config;
        for (std::size_t k = 0; k < eph.times.size(); ++k) {
            if (eph.times[k] >= epoch.start - 1e-9 && eph.times[k] <= epoch.end + 1e-9) {
                sub.times.push_back(eph.times[k]);
                sub.positions.push_back(eph.positions[k]);
            }
        }
        if (sub.times.empty())
            throw std::invalid_argument("dynamic_schedule: epoch has no ephemeris samples");
        const RangeGraph sub_range = constellation::range_graph(sub, range_meters);
        schedule.emplace_back(epoch, starfield(sub_range, sub, delta, stations, params));
    }
    return schedule;
}

}  // namespace starlab::topology
