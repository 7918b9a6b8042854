#include "simstack/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "simstack/patterns.hpp"

namespace simstack {

using nlohmann::json;

namespace {

constexpr double speed_of_light = 299792458.0;  // m/s

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() +
                                        "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    double wavelength = speed_of_light / 28.0e9;
    cfg.geom.num_layers = 8;
    cfg.geom.atoms_per_layer = 441;
    cfg.geom.thickness = 10.0;
    cfg.geom.atom_area = 1.0;
    cfg.geom.atom_pitch = 1.0;
    cfg.geom.feed_distance = cfg.geom.layer_spacing();  // d_ts = d_s
    cfg.rx.rows = 28;
    cfg.rx.cols = 28;
    cfg.rx.antenna_spacing = 0.5;
    cfg.rx.link_distance_m = 5.0;
    cfg.rx.wavelength_m = wavelength;
    cfg.channel = ChannelParams{3.0, -35.0, 2.8, cfg.rx.link_distance_m};
    cfg.psk = PskConfig{4, 40.0, -104.0};
    cfg.train = TrainConfig{};
    return cfg;
}

void ExperimentConfig::validate() const {
    geom.validate();
    rx.validate();
    if (psk.order < 2)
        throw std::invalid_argument("config: psk.order must be >= 2");
    if (train.epochs < 1)
        throw std::invalid_argument("config: train.epochs must be >= 1");
    if (!(train.learning_rate > 0.0))
        throw std::invalid_argument("config: train.learning_rate must be > 0");
    if (!(train.decay_factor > 0.0) || train.decay_factor > 1.0)
        throw std::invalid_argument("config: train.decay_factor must be in (0,1]");
    if (train.plateau_window < 1)
        throw std::invalid_argument("config: train.plateau_window must be >= 1");
    if (train.plateau_rel_tol < 0.0)
        throw std::invalid_argument("config: train.plateau_rel_tol must be >= 0");
    if (!(channel.pathloss_exponent > 0.0))
        throw std::invalid_argument("config: channel.pathloss_exponent must be > 0");
    if (target_file.empty() && target_glyph.empty())
        throw std::invalid_argument("config: need target glyph or file");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") +
                                    e.what());
    }
    ExperimentConfig cfg = default_config();
    reject_unknown_keys(j, {"geometry", "channel", "psk", "train", "target",
                            "output_dir", "seed"},
                        "top level");

    bool feed_given = false;
    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        reject_unknown_keys(
            g,
            {"num_layers", "atoms_per_layer", "thickness_wl", "atom_area_wl2",
             "atom_pitch_wl", "feed_distance_wl", "rx_rows", "rx_cols",
             "antenna_spacing_wl", "link_distance_m", "carrier_ghz"},
            "geometry");
        read(g, "num_layers", cfg.geom.num_layers);
        read(g, "atoms_per_layer", cfg.geom.atoms_per_layer);
        read(g, "thickness_wl", cfg.geom.thickness);
        read(g, "atom_area_wl2", cfg.geom.atom_area);
        read(g, "atom_pitch_wl", cfg.geom.atom_pitch);
        if (g.contains("feed_distance_wl")) {
            cfg.geom.feed_distance = g["feed_distance_wl"].get<double>();
            feed_given = true;
        }
        read(g, "rx_rows", cfg.rx.rows);
        read(g, "rx_cols", cfg.rx.cols);
        read(g, "antenna_spacing_wl", cfg.rx.antenna_spacing);
        read(g, "link_distance_m", cfg.rx.link_distance_m);
        if (g.contains("carrier_ghz"))
            cfg.rx.wavelength_m =
                speed_of_light / (g["carrier_ghz"].get<double>() * 1e9);
    }
    if (cfg.geom.num_layers >= 2 && !feed_given)
        cfg.geom.feed_distance = cfg.geom.layer_spacing();

    if (j.contains("channel")) {
        const auto& c = j["channel"];
        reject_unknown_keys(
            c, {"rician_K_dB", "pathloss_C0_dB", "pathloss_exponent"},
            "channel");
        read(c, "rician_K_dB", cfg.channel.rician_K_dB);
        read(c, "pathloss_C0_dB", cfg.channel.pathloss_ref_C0_dB);
        read(c, "pathloss_exponent", cfg.channel.pathloss_exponent);
    }
    cfg.channel.distance_m = cfg.rx.link_distance_m;

    if (j.contains("psk")) {
        const auto& p = j["psk"];
        reject_unknown_keys(p, {"order", "tx_power_dBm", "noise_power_dBm"},
                            "psk");
        read(p, "order", cfg.psk.order);
        read(p, "tx_power_dBm", cfg.psk.tx_power_dBm);
        read(p, "noise_power_dBm", cfg.psk.noise_power_dBm);
    }
    if (j.contains("train")) {
        const auto& t = j["train"];
        reject_unknown_keys(t,
                            {"epochs", "learning_rate", "decay_factor",
                             "plateau_window", "plateau_rel_tol",
                             "train_with_noise"},
                            "train");
        read(t, "epochs", cfg.train.epochs);
        read(t, "learning_rate", cfg.train.learning_rate);
        read(t, "decay_factor", cfg.train.decay_factor);
        read(t, "plateau_window", cfg.train.plateau_window);
        read(t, "plateau_rel_tol", cfg.train.plateau_rel_tol);
        read(t, "train_with_noise", cfg.train.train_with_noise);
    }
    if (j.contains("target")) {
        const auto& t = j["target"];
        reject_unknown_keys(t, {"glyph", "file"}, "target");
        if (t.contains("file")) {
            cfg.target_file = t["file"].get<std::string>();
            cfg.target_glyph.clear();
        }
        if (t.contains("glyph")) cfg.target_glyph = t["glyph"].get<std::string>();
    }
    read(j, "output_dir", cfg.output_dir);
    read(j, "seed", cfg.master_seed);

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["geometry"] = {{"num_layers", cfg.geom.num_layers},
                     {"atoms_per_layer", cfg.geom.atoms_per_layer},
                     {"thickness_wl", cfg.geom.thickness},
                     {"atom_area_wl2", cfg.geom.atom_area},
                     {"atom_pitch_wl", cfg.geom.atom_pitch},
                     {"feed_distance_wl", cfg.geom.feed_distance},
                     {"rx_rows", cfg.rx.rows},
                     {"rx_cols", cfg.rx.cols},
                     {"antenna_spacing_wl", cfg.rx.antenna_spacing},
                     {"link_distance_m", cfg.rx.link_distance_m},
                     {"carrier_ghz", speed_of_light / cfg.rx.wavelength_m / 1e9}};
    j["channel"] = {{"rician_K_dB", cfg.channel.rician_K_dB},
                    {"pathloss_C0_dB", cfg.channel.pathloss_ref_C0_dB},
                    {"pathloss_exponent", cfg.channel.pathloss_exponent}};
    j["psk"] = {{"order", cfg.psk.order},
                {"tx_power_dBm", cfg.psk.tx_power_dBm},
                {"noise_power_dBm", cfg.psk.noise_power_dBm}};
    j["train"] = {{"epochs", cfg.train.epochs},
                  {"learning_rate", cfg.train.learning_rate},
                  {"decay_factor", cfg.train.decay_factor},
                  {"plateau_window", cfg.train.plateau_window},
                  {"plateau_rel_tol", cfg.train.plateau_rel_tol},
                  {"train_with_noise", cfg.train.train_with_noise}};
    if (!cfg.target_file.empty())
        j["target"] = {{"file", cfg.target_file}};
    else
        j["target"] = {{"glyph", cfg.target_glyph}};
    j["output_dir"] = cfg.output_dir;
    j["seed"] = cfg.master_seed;
    return j.dump();
}

TargetPattern resolve_target(const ExperimentConfig& cfg) {
    if (!cfg.target_file.empty())
        return load_pattern(cfg.target_file, cfg.rx.rows, cfg.rx.cols);
    return make_glyph(cfg.target_glyph, cfg.rx.rows, cfg.rx.cols);
}

}  // namespace simstack
