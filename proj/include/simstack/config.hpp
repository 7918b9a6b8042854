#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "simstack/channel.hpp"
#include "simstack/geometry.hpp"
#include "simstack/link.hpp"
#include "simstack/optimizer.hpp"

namespace simstack {

// Full experiment description. Every field has a default matching the
// reference parameter set (28 GHz carrier, 28x28 array, D = 10 lambda,
// K = 3 dB, p_s = 40 dBm, sigma_v = -104 dBm, C0 = -35 dB, gamma = 2.8,
// E = 2000, eta = 0.005), so an empty config file is valid.
struct ExperimentConfig {
    SimGeometry geom;
    ReceiverGeometry rx;
    ChannelParams channel;
    PskConfig psk;
    TrainConfig train;

    std::string target_glyph = "cross";   // used when target_file is empty
    std::string target_file;
    std::string output_dir = "out";
    std::uint64_t master_seed = 1;

    void validate() const;  // throws std::invalid_argument with field names
};

ExperimentConfig default_config();

// Parses a JSON config file; unknown keys are rejected. Throws
// std::invalid_argument (bad values) or std::runtime_error (I/O).
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// Resolved config as a JSON string (used for CSV header comments).
std::string config_to_json(const ExperimentConfig& cfg);

// Resolves the target source (file or glyph) to the receive-array shape.
TargetPattern resolve_target(const ExperimentConfig& cfg);

}  // namespace simstack
