#include "starlab/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace starlab::config {

using nlohmann::json;

std::vector<double> TimeGrid::samples() const {
    if (num_samples < 1 || stop < start)
        throw std::invalid_argument("time grid: need num_samples >= 1 and stop >= start");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(num_samples));
    if (num_samples == 1) {
        out.push_back(start);
        return out;
    }
    const double step = (stop - start) / (num_samples - 1);
    for (int k = 0; k < num_samples; ++k) out.push_back(start + k * step);
    return out;
}

void RunConfig::validate() const {
    shell.validate();
    net.validate();
    (void)time.samples();
    if (demand_spec.base_intensity <= 0.0)
        throw std::invalid_argument("demand: base_intensity must be positive");
    if (demand_spec.noise_sigma < 0.0)
        throw std::invalid_argument("demand: noise_sigma must be nonnegative");
    if (topology_spec.generator != "starfield" &&
        topology_spec.generator != "static_starfield" &&
        topology_spec.generator != "plus_grid" && topology_spec.generator != "random")
        throw std::invalid_argument("topology: unknown generator '" +
                                    topology_spec.generator + "'");
    if (topology_spec.epochs < 1)
        throw std::invalid_argument("topology: epochs must be >= 1");
    if (duration < 0.0) throw std::invalid_argument("duration must be nonnegative");
}

namespace {

constexpr double kDegToRad = M_PI / 180.0;

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& scope) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok)
            throw std::invalid_argument("config: unknown key '" + scope + "." + key + "'");
    }
}

template <typename T>
void maybe(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

void maybe_deg(const json& obj, const char* key, double& out_rad) {
    if (obj.contains(key)) out_rad = obj.at(key).get<double>() * kDegToRad;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json root = json::parse(json_text);
    RunConfig cfg;
    reject_unknown(root,
                   {"shell", "time", "demand", "topology", "network", "duration_s",
                    "output_dir"},
                   "");

    if (root.contains("shell")) {
        const json& s = root["shell"];
        reject_unknown(s,
                       {"altitude_m", "inclination_deg", "num_orbits", "sats_per_orbit",
                        "phase_offset", "mean_motion_rad_per_hour", "isl_max_range_m",
                        "min_altitude_clearance_m"},
                       "shell");
        maybe(s, "altitude_m", cfg.shell.altitude);
        maybe_deg(s, "inclination_deg", cfg.shell.inclination);
        maybe(s, "num_orbits", cfg.shell.num_orbits);
        maybe(s, "sats_per_orbit", cfg.shell.sats_per_orbit);
        maybe(s, "phase_offset", cfg.shell.phase_offset);
        if (s.contains("mean_motion_rad_per_hour"))
            cfg.shell.mean_motion = s.at("mean_motion_rad_per_hour").get<double>() / 3600.0;
        maybe(s, "isl_max_range_m", cfg.shell.isl_max_range);
        maybe(s, "min_altitude_clearance_m", cfg.shell.min_altitude_clearance);
    }
    if (root.contains("time")) {
        const json& t = root["time"];
        reject_unknown(t, {"start_s", "stop_s", "num_samples"}, "time");
        maybe(t, "start_s", cfg.time.start);
        maybe(t, "stop_s", cfg.time.stop);
        maybe(t, "num_samples", cfg.time.num_samples);
    }
    if (root.contains("demand")) {
        const json& d = root["demand"];
        reject_unknown(d,
                       {"stations_csv", "pattern", "base_intensity", "seed", "noise_mu",
                        "noise_sigma"},
                       "demand");
        maybe(d, "stations_csv", cfg.demand_spec.stations_csv);
        if (d.contains("pattern"))
            cfg.demand_spec.pattern =
                demand::pattern_from_string(d.at("pattern").get<std::string>());
        maybe(d, "base_intensity", cfg.demand_spec.base_intensity);
        maybe(d, "seed", cfg.demand_spec.seed);
        maybe(d, "noise_mu", cfg.demand_spec.noise_mu);
        maybe(d, "noise_sigma", cfg.demand_spec.noise_sigma);
    }
    if (root.contains("topology")) {
        const json& t = root["topology"];
        reject_unknown(t,
                       {"generator", "degree_bound", "field_constant", "crown_strength",
                        "crown_decay", "crown_enabled", "epsilon", "mode", "epochs",
                        "seed", "normalize_demand"},
                       "topology");
        maybe(t, "generator", cfg.topology_spec.generator);
        maybe(t, "degree_bound", cfg.topology_spec.params.degree_bound);
        maybe(t, "field_constant", cfg.topology_spec.params.field_constant);
        maybe(t, "crown_strength", cfg.topology_spec.params.crown_strength);
        maybe(t, "crown_decay", cfg.topology_spec.params.crown_decay);
        maybe(t, "crown_enabled", cfg.topology_spec.params.crown_enabled);
        maybe(t, "epsilon", cfg.topology_spec.params.epsilon);
        if (t.contains("mode"))
            cfg.topology_spec.params.mode =
                topology::mode_from_string(t.at("mode").get<std::string>());
        maybe(t, "normalize_demand", cfg.topology_spec.params.normalize_demand);
        maybe(t, "epochs", cfg.topology_spec.epochs);
        maybe(t, "seed", cfg.topology_spec.seed);
    }
    if (root.contains("network")) {
        const json& n = root["network"];
        reject_unknown(n,
                       {"isl_bandwidth_bps", "gsl_bandwidth_bps", "isl_noise",
                        "gsl_noise", "buffer_packets", "packet_bytes",
                        "isl_reference_distance_m", "gsl_reference_distance_m",
                        "min_elevation_deg"},
                       "network");
        maybe(n, "isl_bandwidth_bps", cfg.net.isl_bandwidth);
        maybe(n, "gsl_bandwidth_bps", cfg.net.gsl_bandwidth);
        maybe(n, "isl_noise", cfg.net.isl_noise);
        maybe(n, "gsl_noise", cfg.net.gsl_noise);
        maybe(n, "buffer_packets", cfg.net.buffer_size);
        maybe(n, "packet_bytes", cfg.net.packet_size);
        maybe(n, "isl_reference_distance_m", cfg.net.isl_reference_distance);
        maybe(n, "gsl_reference_distance_m", cfg.net.gsl_reference_distance);
        maybe_deg(n, "min_elevation_deg", cfg.net.min_elevation);
    }
    maybe(root, "duration_s", cfg.duration);
    maybe(root, "output_dir", cfg.output_dir);

    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string to_json(const RunConfig& cfg) {
    json root;
    root["shell"] = {
        {"altitude_m", cfg.shell.altitude},
        {"inclination_deg", cfg.shell.inclination / kDegToRad},
        {"num_orbits", cfg.shell.num_orbits},
        {"sats_per_orbit", cfg.shell.sats_per_orbit},
        {"phase_offset", cfg.shell.phase_offset},
        {"mean_motion_rad_per_hour", cfg.shell.mean_motion * 3600.0},
        {"isl_max_range_m", cfg.shell.isl_max_range},
        {"min_altitude_clearance_m", cfg.shell.min_altitude_clearance},
    };
    root["time"] = {{"start_s", cfg.time.start},
                    {"stop_s", cfg.time.stop},
                    {"num_samples", cfg.time.num_samples}};
    root["demand"] = {
        {"stations_csv", cfg.demand_spec.stations_csv},
        {"pattern", demand::pattern_name(cfg.demand_spec.pattern)},
        {"base_intensity", cfg.demand_spec.base_intensity},
        {"seed", cfg.demand_spec.seed},
        {"noise_mu", cfg.demand_spec.noise_mu},
        {"noise_sigma", cfg.demand_spec.noise_sigma},
    };
    root["topology"] = {
        {"generator", cfg.topology_spec.generator},
        {"degree_bound", cfg.topology_spec.params.degree_bound},
        {"field_constant", cfg.topology_spec.params.field_constant},
        {"crown_strength", cfg.topology_spec.params.crown_strength},
        {"crown_decay", cfg.topology_spec.params.crown_decay},
        {"crown_enabled", cfg.topology_spec.params.crown_enabled},
        {"epsilon", cfg.topology_spec.params.epsilon},
        {"mode",
         cfg.topology_spec.params.mode == topology::DistanceMode::kPlain ? "plain"
                                                                         : "prioritized"},
        {"normalize_demand", cfg.topology_spec.params.normalize_demand},
        {"epochs", cfg.topology_spec.epochs},
        {"seed", cfg.topology_spec.seed},
    };
    root["network"] = {
        {"isl_bandwidth_bps", cfg.net.isl_bandwidth},
        {"gsl_bandwidth_bps", cfg.net.gsl_bandwidth},
        {"isl_noise", cfg.net.isl_noise},
        {"gsl_noise", cfg.net.gsl_noise},
        {"buffer_packets", cfg.net.buffer_size},
        {"packet_bytes", cfg.net.packet_size},
        {"isl_reference_distance_m", cfg.net.isl_reference_distance},
        {"gsl_reference_distance_m", cfg.net.gsl_reference_distance},
        {"min_elevation_deg", cfg.net.min_elevation / kDegToRad},
    };
    root["duration_s"] = cfg.duration;
    root["output_dir"] = cfg.output_dir;
    return root.dump(2);
}

std::string RunConfig::digest() const {
    const std::size_t h = std::hash<std::string>{}(to_json(*this));
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

}  // namespace starlab::config
