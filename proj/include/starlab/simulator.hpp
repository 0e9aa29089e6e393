#ifndef STARLAB_SIMULATOR_HPP
#define STARLAB_SIMULATOR_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "starlab/routing.hpp"
#include "starlab/topology.hpp"

namespace starlab::simulator {

using demand::DemandMatrix;
using demand::GroundStation;
using topology::Epoch;
using topology::Topology;

struct NetParams {
    double isl_bandwidth = 1e12;       // bits/s at the reference distance
    double gsl_bandwidth = 100e9;      // bits/s at the reference distance
    double isl_noise = 0.1;            // spectral-efficiency knob
    double gsl_noise = 0.001;
    int buffer_size = 1000;            // packets per link FIFO
    double packet_size = 12e3;         // bytes
    double isl_reference_distance = 0.0;  // 0 = intra-orbit neighbor spacing
    double gsl_reference_distance = 550e3;
    double min_elevation = 25.0 * M_PI / 180.0;
    bool record_trace = false;  // keep the per-hop trace in the report (large)

    void validate() const;
};

/// Shannon-style rate: nominal * nu * log2(1 + SNR(d)) with
/// SNR(d) = (2^(1/nu) - 1) * (d_ref / d)^2, so capacity(d_ref) = nominal.
double link_capacity(double distance, double nominal_bandwidth, double noise_coeff,
                     double reference_distance);

struct FlowReport {
    int src = 0;
    int dst = 0;
    std::size_t generated = 0;
    std::size_t delivered = 0;
    std::size_t dropped = 0;
    double mean_stretch = 0.0;   // over delivered packets
    double mean_hops = 0.0;
    double mean_rtt = 0.0;       // seconds, echo round trips
    double jitter = 0.0;         // stddev of RTT
    std::vector<double> rtt_samples;
};

struct LinkReport {
    int a = 0;
    int b = 0;                   // satellite flat indices
    std::size_t packets_forwarded = 0;
    double usage_ratio = 0.0;    // forwarded / total routed packets
};

/// One transmission on one directed link. Node ids put satellites in
/// [0, n_sats) and stations at n_sats + station id.
struct TraceRecord {
    int from = 0;
    int to = 0;
    std::size_t packet = 0;
    double enqueued = 0.0;  // seconds, arrival at the link queue
    double departed = 0.0;  // seconds, end of serialization
};

struct SimReport {
    std::size_t generated = 0;
    std::size_t delivered = 0;
    std::size_t dropped = 0;
    std::size_t in_flight_at_end = 0;
    std::size_t total_isl_forwards = 0;
    std::vector<FlowReport> flows;
    std::vector<LinkReport> links;
    std::vector<TraceRecord> trace;  // populated only when record_trace is set
    std::vector<std::string> warnings;
};

/// Event-driven packet simulation over a per-epoch topology schedule.
/// Poisson sources at rate Delta_ij, FIFO per-link buffers of B packets,
/// Shannon-rate serialization plus propagation delay, and immediate echo
/// packets from the destination for RTT measurement.
SimReport run(const std::vector<std::pair<Epoch, Topology>>& schedule,
              const std::vector<std::vector<Vec3>>& epoch_positions,
              const std::vector<GroundStation>& stations,
              const DemandMatrix& delta, const NetParams& params,
              double duration, std::uint64_t seed);

struct CdfPoint {
    double value = 0.0;
    double cumulative_fraction = 0.0;
};

std::vector<CdfPoint> cdf_points(std::vector<double> values);

}  // namespace starlab::simulator

#endif
