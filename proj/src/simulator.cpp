#include "starlab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace starlab::simulator {

using constellation::kEarthRadius;
using constellation::kSpeedOfLight;
using geometry::SpherePoint;
using routing::WeightedNet;

void NetParams::validate() const {
    if (isl_bandwidth <= 0.0 || gsl_bandwidth <= 0.0 || isl_noise <= 0.0 ||
        gsl_noise <= 0.0 || buffer_size <= 0 || packet_size <= 0.0 ||
        gsl_reference_distance <= 0.0 || isl_reference_distance < 0.0)
        throw std::invalid_argument("network parameters must be positive");
}

double link_capacity(double distance, double nominal_bandwidth, double noise_coeff,
                     double reference_distance) {
    if (distance <= 0.0) throw std::invalid_argument("link_capacity: distance must be > 0");
    const double snr_ref = std::exp2(1.0 / noise_coeff) - 1.0;
    const double ratio = reference_distance / distance;
    const double snr = snr_ref * ratio * ratio;
    return nominal_bandwidth * noise_coeff * std::log2(1.0 + snr);
}

namespace {

// Directed link key: node ids with satellites in [0, n) and stations in
// [n, n + m).
using LinkKey = std::pair<int, int>;

struct LinkState {
    double capacity = 0.0;     // bits/s
    double prop_delay = 0.0;   // seconds
    double length = 0.0;       // meters
    double busy_until = 0.0;
    int queued = 0;
    std::size_t forwarded = 0;
};

struct Packet {
    std::size_t id = 0;
    int src = 0;               // station ids
    int dst = 0;
    double created = 0.0;
    double forward_created = 0.0;  // creation time of the originating packet
    double path_length = 0.0;
    int hops = 0;
    bool is_echo = false;
};

enum class EventKind { kArrivalAtNode, kTxComplete, kSourceEmit };

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind{};
    int node = 0;          // kArrivalAtNode: node reached; kSourceEmit: flow index
    std::size_t packet = 0;
    LinkKey link{};        // kTxComplete

    bool operator>(const Event& o) const {
        return std::tie(time, seq) > std::tie(o.time, o.seq);
    }
};

// Per-epoch forwarding state: distance-to-destination tables per station.
struct EpochTables {
    WeightedNet net;
    // dist_to_dst[dst][sat] = seconds from sat to station dst (down-link included)
    std::vector<std::vector<double>> dist_to_dst;
};

std::vector<double> to_destination_distance(const WeightedNet& net, int dst) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(net.num_satellites), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (const auto& gsl : net.station_links[static_cast<std::size_t>(dst)]) {
        if (gsl.delay < dist[static_cast<std::size_t>(gsl.satellite)]) {
            dist[static_cast<std::size_t>(gsl.satellite)] = gsl.delay;
            pq.emplace(gsl.delay, gsl.satellite);
        }
    }
    while (!pq.empty()) {
        const auto [d, s] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(s)]) continue;
        for (const auto& [t, w] : net.isl[static_cast<std::size_t>(s)]) {
            if (d + w < dist[static_cast<std::size_t>(t)]) {
                dist[static_cast<std::size_t>(t)] = d + w;
                pq.emplace(d + w, t);
            }
        }
    }
    return dist;
}

}  // namespace

std::vector<CdfPoint> cdf_points(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::vector<CdfPoint> cdf;
    cdf.reserve(values.size());
    const double n = static_cast<double>(values.size());
    for (std::size_t k = 0; k < values.size(); ++k)
        cdf.push_back({values[k], static_cast<double>(k + 1) / n});
    return cdf;
}

SimReport run(const std::vector<std::pair<Epoch, Topology>>& schedule,
              const std::vector<std::vector<Vec3>>& epoch_positions,
              const std::vector<GroundStation>& stations,
              const DemandMatrix& delta, const NetParams& params,
              double duration, std::uint64_t seed) {
    params.validate();
    if (schedule.empty()) throw std::invalid_argument("run: empty schedule");
    if (schedule.size() != epoch_positions.size())
        throw std::invalid_argument("run: one position frame per epoch required");

    const int n_sats = schedule.front().second.num_satellites;
    const int m = static_cast<int>(stations.size());
    const double tx_bits = params.packet_size * 8.0;

    double isl_ref = params.isl_reference_distance;
    if (isl_ref <= 0.0) {
        // Default anchor: the intra-orbit neighbor spacing (flat indices 0, 1
        // are adjacent slots of orbit 0).
        isl_ref = (epoch_positions.front()[0] - epoch_positions.front()[1]).norm();
    }

    // Routing tables per epoch.
    std::vector<EpochTables> tables(schedule.size());
    for (std::size_t e = 0; e < schedule.size(); ++e) {
        tables[e].net = routing::attach_stations(schedule[e].second, epoch_positions[e],
                                                 stations, params.min_elevation);
        tables[e].dist_to_dst.resize(static_cast<std::size_t>(m));
        for (int dst = 0; dst < m; ++dst)
            tables[e].dist_to_dst[static_cast<std::size_t>(dst)] =
                to_destination_distance(tables[e].net, dst);
    }

    const auto epoch_of = [&](double t) -> std::size_t {
        for (std::size_t e = 0; e < schedule.size(); ++e)
            if (t < schedule[e].first.end || e + 1 == schedule.size()) return e;
        return schedule.size() - 1;
    };

    SimReport report;
    std::map<LinkKey, LinkState> links;
    const auto link_state = [&](int from, int to, std::size_t epoch) -> LinkState& {
        const LinkKey key{from, to};
        auto it = links.find(key);
        if (it != links.end()) return it->second;
        LinkState st;
        const bool from_gs = from >= n_sats;
        const bool to_gs = to >= n_sats;
        const Vec3 pa = from_gs ? stations[static_cast<std::size_t>(from - n_sats)].position
                                : epoch_positions[epoch][static_cast<std::size_t>(from)];
        const Vec3 pb = to_gs ? stations[static_cast<std::size_t>(to - n_sats)].position
                              : epoch_positions[epoch][static_cast<std::size_t>(to)];
        st.length = (pa - pb).norm();
        st.prop_delay = st.length / kSpeedOfLight;
        const bool is_gsl = from_gs || to_gs;
        st.capacity = is_gsl
            ? link_capacity(st.length, params.gsl_bandwidth, params.gsl_noise,
                            params.gsl_reference_distance)
            : link_capacity(st.length, params.isl_bandwidth, params.isl_noise, isl_ref);
        if (st.capacity <= 0.0)
            report.warnings.push_back("zero-capacity link encountered");
        return links.emplace(key, st).first->second;
    };

    // Flows with positive rate.
    struct FlowDef {
        int src, dst;
        double rate;
        std::mt19937_64 rng;
    };
    std::vector<FlowDef> flow_defs;
    std::vector<FlowReport> flow_reports;
    std::unordered_map<std::uint64_t, std::size_t> flow_index;
    for (int i = 0; i < delta.size; ++i)
        for (int j = 0; j < delta.size; ++j)
            if (delta.at(i, j) > 0.0) {
                const std::uint64_t key =
                    static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(m) + j;
                flow_index[key] = flow_defs.size();
                flow_defs.push_back({i, j, delta.at(i, j),
                                     std::mt19937_64(seed ^ (key * 0x9e3779b97f4a7c15ULL))});
                FlowReport fr;
                fr.src = i;
                fr.dst = j;
                flow_reports.push_back(fr);
            }

    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    std::uint64_t seq = 0;
    std::vector<Packet> packets;
    std::vector<double> flow_geodesic(flow_defs.size());
    std::vector<double> stretch_sum(flow_defs.size(), 0.0);
    std::vector<double> hop_sum(flow_defs.size(), 0.0);
    for (std::size_t f = 0; f < flow_defs.size(); ++f) {
        const SpherePoint pu(stations[static_cast<std::size_t>(flow_defs[f].src)].position,
                             kEarthRadius);
        const SpherePoint pv(stations[static_cast<std::size_t>(flow_defs[f].dst)].position,
                             kEarthRadius);
        flow_geodesic[f] = geometry::geodesic_distance(pu, pv);
    }

    const auto schedule_emit = [&](std::size_t f, double now) {
        std::exponential_distribution<double> gap(flow_defs[f].rate);
        const double t = now + gap(flow_defs[f].rng);
        if (t < duration)
            events.push({t, seq++, EventKind::kSourceEmit, static_cast<int>(f), 0, {}});
    };
    for (std::size_t f = 0; f < flow_defs.size(); ++f) schedule_emit(f, 0.0);

    const auto enqueue_on_link = [&](std::size_t pkt, int from, int to, double now) {
        auto& st = link_state(from, to, epoch_of(now));
        if (st.queued >= params.buffer_size) {
            ++report.dropped;
            auto& p = packets[pkt];
            if (!p.is_echo) {
                const std::uint64_t key = static_cast<std::uint64_t>(p.src) *
                                          static_cast<std::uint64_t>(m) + p.dst;
                ++flow_reports[flow_index.at(key)].dropped;
            }
            return;
        }
        ++st.queued;
        const double tx_time = tx_bits / st.capacity;
        const double depart = std::max(now, st.busy_until) + tx_time;
        st.busy_until = depart;
        ++st.forwarded;
        packets[pkt].path_length += st.length;
        ++packets[pkt].hops;
        if (params.record_trace)
            report.trace.push_back({from, to, pkt, now, depart});
        events.push({depart, seq++, EventKind::kTxComplete, 0, pkt, {from, to}});
        events.push({depart + st.prop_delay, seq++, EventKind::kArrivalAtNode, to, pkt, {}});
    };

    // Picks the forwarding action at `node` toward the packet's destination.
    // Returns the next node id, or -1 when the destination is unreachable.
    const auto next_hop = [&](int node, int dst, std::size_t epoch) -> int {
        const auto& tab = tables[epoch];
        const auto& dist = tab.dist_to_dst[static_cast<std::size_t>(dst)];
        if (node >= n_sats) {
            // Station: enter via the best visible satellite.
            const int station = node - n_sats;
            double best = std::numeric_limits<double>::infinity();
            int best_sat = -1;
            for (const auto& gsl : tab.net.station_links[static_cast<std::size_t>(station)]) {
                const double total = gsl.delay + dist[static_cast<std::size_t>(gsl.satellite)];
                if (total < best) {
                    best = total;
                    best_sat = gsl.satellite;
                }
            }
            return std::isinf(best) ? -1 : best_sat;
        }
        const double here = dist[static_cast<std::size_t>(node)];
        if (std::isinf(here)) return -1;
        // Down-link when this satellite's best move is delivery.
        for (const auto& gsl : tab.net.station_links[static_cast<std::size_t>(dst)]) {
            if (gsl.satellite == node && gsl.delay <= here + 1e-15) return n_sats + dst;
        }
        for (const auto& [t, w] : tab.net.isl[static_cast<std::size_t>(node)]) {
            if (w + dist[static_cast<std::size_t>(t)] <= here + 1e-15) return t;
        }
        return -1;
    };

    const auto record_delivery = [&](std::size_t pkt, double now) {
        auto& p = packets[pkt];
        ++report.delivered;
        if (!p.is_echo) {
            const std::uint64_t key = static_cast<std::uint64_t>(p.src) *
                                      static_cast<std::uint64_t>(m) + p.dst;
            const std::size_t f = flow_index.at(key);
            ++flow_reports[f].delivered;
            stretch_sum[f] += p.path_length / flow_geodesic[f];
            hop_sum[f] += p.hops;
            // Immediate echo for the RTT measurement.
            Packet echo;
            echo.id = packets.size();
            echo.src = p.dst;
            echo.dst = p.src;
            echo.created = now;
            echo.forward_created = p.forward_created;
            echo.is_echo = true;
            packets.push_back(echo);
            ++report.generated;
            const int entry = next_hop(n_sats + echo.src, echo.dst, epoch_of(now));
            if (entry < 0) {
                ++report.dropped;
            } else {
                enqueue_on_link(echo.id, n_sats + echo.src, entry, now);
            }
        } else {
            const std::uint64_t key = static_cast<std::uint64_t>(p.dst) *
                                      static_cast<std::uint64_t>(m) + p.src;
            flow_reports[flow_index.at(key)].rtt_samples.push_back(now - p.forward_created);
        }
    };

    while (!events.empty()) {
        const Event ev = events.top();
        events.pop();
        switch (ev.kind) {
            case EventKind::kSourceEmit: {
                const auto f = static_cast<std::size_t>(ev.node);
                schedule_emit(f, ev.time);
                Packet p;
                p.id = packets.size();
                p.src = flow_defs[f].src;
                p.dst = flow_defs[f].dst;
                p.created = ev.time;
                p.forward_created = ev.time;
                packets.push_back(p);
                ++report.generated;
                ++flow_reports[f].generated;
                const int entry = next_hop(n_sats + p.src, p.dst, epoch_of(ev.time));
                if (entry < 0) {
                    ++report.dropped;
                    ++flow_reports[f].dropped;
                } else {
                    enqueue_on_link(p.id, n_sats + p.src, entry, ev.time);
                }
                break;
            }
            case EventKind::kTxComplete: {
                --links.at(ev.link).queued;
                break;
            }
            case EventKind::kArrivalAtNode: {
                auto& p = packets[ev.packet];
                if (ev.node >= n_sats && ev.node - n_sats == p.dst) {
                    record_delivery(ev.packet, ev.time);
                    break;
                }
                const int next = next_hop(ev.node, p.dst, epoch_of(ev.time));
                if (next < 0) {
                    ++report.dropped;
                    if (!p.is_echo) {
                        const std::uint64_t key = static_cast<std::uint64_t>(p.src) *
                                                  static_cast<std::uint64_t>(m) + p.dst;
                        ++flow_reports[flow_index.at(key)].dropped;
                    }
                    break;
                }
                enqueue_on_link(ev.packet, ev.node, next, ev.time);
                break;
            }
        }
    }

    report.in_flight_at_end = report.generated - report.delivered - report.dropped;

    for (std::size_t f = 0; f < flow_defs.size(); ++f) {
        auto& fr = flow_reports[f];
        if (fr.delivered > 0) {
            fr.mean_stretch = stretch_sum[f] / static_cast<double>(fr.delivered);
            fr.mean_hops = hop_sum[f] / static_cast<double>(fr.delivered);
        }
        if (!fr.rtt_samples.empty()) {
            double sum = 0.0;
            for (double r : fr.rtt_samples) sum += r;
            fr.mean_rtt = sum / static_cast<double>(fr.rtt_samples.size());
            double var = 0.0;
            for (double r : fr.rtt_samples) var += (r - fr.mean_rtt) * (r - fr.mean_rtt);
            fr.jitter = std::sqrt(var / static_cast<double>(fr.rtt_samples.size()));
        }
        report.flows.push_back(std::move(fr));
    }

    for (const auto& [key, st] : links) {
        if (key.first >= n_sats || key.second >= n_sats) continue;  // ISLs only
        report.total_isl_forwards += st.forwarded;
        LinkReport lr;
        lr.a = std::min(key.first, key.second);
        lr.b = std::max(key.first, key.second);
        lr.packets_forwarded = st.forwarded;
        report.links.push_back(lr);
    }
    // Merge the two directions of each ISL.
    std::map<std::pair<int, int>, LinkReport> merged;
    for (const auto& lr : report.links) {
        auto& agg = merged[{lr.a, lr.b}];
        agg.a = lr.a;
        agg.b = lr.b;
        agg.packets_forwarded += lr.packets_forwarded;
    }
    report.links.clear();
    const double routed = static_cast<double>(report.generated);
    for (auto& [key, lr] : merged) {
        lr.usage_ratio = routed > 0.0 ? static_cast<double>(lr.packets_forwarded) / routed
                                      : 0.0;
        report.links.push_back(lr);
    }
    return report;
}

}  // namespace starlab::simulator
