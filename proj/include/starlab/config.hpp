#ifndef STARLAB_CONFIG_HPP
#define STARLAB_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "starlab/constellation.hpp"
#include "starlab/demand.hpp"
#include "starlab/simulator.hpp"
#include "starlab/topology.hpp"

namespace starlab::config {

struct TimeGrid {
    double start = 0.0;
    double stop = 60.0;
    int num_samples = 2;

    std::vector<double> samples() const;
};

struct DemandSpec {
    std::string stations_csv = "data/cities.csv";
    demand::Pattern pattern = demand::Pattern::kDistance;
    double base_intensity = 1.0;
    std::uint64_t seed = 1;
    double noise_mu = 0.0;
    double noise_sigma = 0.0;
};

struct TopologySpec {
    std::string generator = "starfield";  // starfield | static_starfield |
                                          // plus_grid | random
    topology::StarfieldParams params;
    int epochs = 1;
    std::uint64_t seed = 1;
};

/// One experiment: every default equals the headline simulation setup.
struct RunConfig {
    constellation::ShellConfig shell;
    TimeGrid time;
    DemandSpec demand_spec;
    TopologySpec topology_spec;
    simulator::NetParams net;
    double duration = 1.0;       // seconds of simulated traffic
    std::string output_dir = "out";

    void validate() const;
    /// Stable digest of the parsed content, for provenance headers.
    std::string digest() const;
};

/// Strict parse: unknown keys anywhere are an error.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string to_json(const RunConfig& config);

}  // namespace starlab::config

#endif
