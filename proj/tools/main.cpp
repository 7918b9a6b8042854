#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "simstack/channel.hpp"
#include "simstack/config.hpp"
#include "simstack/diffraction.hpp"
#include "simstack/link.hpp"
#include "simstack/optimizer.hpp"
#include "simstack/patterns.hpp"
#include "simstack/stack_io.hpp"

namespace fs = std::filesystem;
using namespace simstack;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;
constexpr int exit_io = 4;

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    return out;
}

void write_csv_header(std::ofstream& out, const ExperimentConfig& cfg) {
    out << "# config " << config_to_json(cfg) << "\n";
    out << "# master_seed " << cfg.master_seed << "\n";
}

Eigen::VectorXd generated_pattern(const StackState& stack,
                                  const PropagationSet& prop,
                                  const Channel& ch, const PskConfig& psk,
                                  const TargetPattern& target) {
    Eigen::VectorXd e = received_energies(stack, prop, ch, psk);
    double z = zeta(e, target);
    return (z * e).cwiseMin(1.0).cwiseMax(0.0);
}

struct TrainOutputs {
    StackState stack;
    TrainReport report;
    Channel channel;
    PropagationSet prop;
    TargetPattern target;
};

TrainOutputs run_training(const ExperimentConfig& cfg) {
    TrainOutputs out;
    out.target = resolve_target(cfg);
    out.prop = build_propagation(cfg.geom);
    Rng ch_rng(derive_seed(cfg.master_seed, 1));
    out.channel = sample_channel(cfg.channel, cfg.rx, cfg.geom, ch_rng);
    TrainConfig tcfg = cfg.train;
    tcfg.seed = derive_seed(cfg.master_seed, 2);
    auto [stack, report] =
        train(cfg.geom, out.prop, out.channel, cfg.psk, out.target, tcfg);
    out.stack = std::move(stack);
    out.report = std::move(report);
    return out;
}

int cmd_train(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    TrainOutputs t = run_training(cfg);

    auto loss_csv = open_out(fs::path(cfg.output_dir) / "loss.csv");
    write_csv_header(loss_csv, cfg);
    loss_csv << "epoch,loss,lr\n";
    double lr = cfg.train.learning_rate;
    std::size_t next_event = 0;
    for (std::size_t e = 0; e < t.report.loss_history.size(); ++e) {
        while (next_event < t.report.lr_events.size() &&
               t.report.lr_events[next_event].first ==
                   static_cast<int>(e))
            lr = t.report.lr_events[next_event++].second;
        loss_csv << e << "," << t.report.loss_history[e] << "," << lr << "\n";
    }

    save_stack(t.stack, (fs::path(cfg.output_dir) / "stack.txt").string());
    save_pattern_pgm(
        generated_pattern(t.stack, t.prop, t.channel, cfg.psk, t.target),
        cfg.rx.rows, cfg.rx.cols,
        (fs::path(cfg.output_dir) / "pattern.pgm").string());
    save_pattern_pgm(t.target.bits, cfg.rx.rows, cfg.rx.cols,
                     (fs::path(cfg.output_dir) / "target.pgm").string());

    auto summary = open_out(fs::path(cfg.output_dir) / "summary.json");
    summary << "{\n"
            << "  \"final_mse\": " << t.report.final_loss << ",\n"
            << "  \"initial_mse\": " << t.report.initial_loss << ",\n"
            << "  \"zeta\": " << t.report.final_zeta << ",\n"
            << "  \"epochs\": " << t.report.loss_history.size() << ",\n"
            << "  \"lr_decay_events\": " << t.report.lr_events.size() << ",\n"
            << "  \"wall_time_s\": " << t.report.wall_time_s << ",\n"
            << "  \"seed\": " << cfg.master_seed << "\n"
            << "}\n";

    std::cout << "final MSE " << t.report.final_loss << " (zeta "
              << t.report.final_zeta << ", " << t.report.loss_history.size()
              << " epochs, " << t.report.wall_time_s << " s)\n";
    return exit_ok;
}

struct SweepRow {
    double value = 0.0;
    std::uint64_t seed = 0;
    double final_mse = 0.0;
};

int cmd_sweep(ExperimentConfig cfg, const std::string& axis,
              const std::vector<double>& values,
              const std::vector<std::uint64_t>& seeds) {
    if (values.empty() || seeds.empty())
        throw std::invalid_argument("sweep: need at least one value and seed");
    fs::create_directories(cfg.output_dir);

    std::vector<SweepRow> rows;
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto capture = [&](auto&& fn) {
        return [&err_mutex, &first_error, fn] {
            try {
                fn();
            } catch (...) {
                std::scoped_lock lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        };
    };
    if (axis == "beta") {
        // Train once per seed on the clean channel, evaluate per beta.
        rows.resize(values.size() * seeds.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t si = next.fetch_add(1); si < seeds.size();
                 si = next.fetch_add(1)) {
                ExperimentConfig cell = cfg;
                cell.master_seed = seeds[si];
                TrainOutputs t = run_training(cell);
                for (std::size_t vi = 0; vi < values.size(); ++vi) {
                    double beta = values[vi];
                    Channel eval_ch = t.channel;
                    if (beta > 0.0) {
                        Rng rng(derive_seed(seeds[si], 500 + vi));
                        eval_ch = perturb_channel(t.channel, beta, rng);
                    }
                    double mse =
                        loss(t.stack, t.prop, eval_ch, cell.psk, t.target);
                    rows[vi * seeds.size() + si] = {beta, seeds[si], mse};
                }
            }
        };
        std::size_t workers =
            std::min<std::size_t>(seeds.size(),
                                  std::max(1u, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < workers; ++i)
            pool.emplace_back(capture(worker));
        for (auto& th : pool) th.join();
    } else {
        struct Cell {
            double value;
            std::uint64_t seed;
        };
        std::vector<Cell> cells;
        for (double v : values)
            for (auto s : seeds) cells.push_back({v, s});
        rows.resize(cells.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < cells.size();
                 i = next.fetch_add(1)) {
                ExperimentConfig cell = cfg;
                cell.master_seed = cells[i].seed;
                if (axis == "layers")
                    cell.geom.num_layers = static_cast<int>(cells[i].value);
                else if (axis == "atoms")
                    cell.geom.atoms_per_layer = static_cast<int>(cells[i].value);
                else if (axis == "lr")
                    cell.train.learning_rate = cells[i].value;
                else
                    throw std::invalid_argument("sweep: unknown axis " + axis);
                cell.geom.feed_distance = cell.geom.layer_spacing();
                cell.validate();
                TrainOutputs t = run_training(cell);
                rows[i] = {cells[i].value, cells[i].seed, t.report.final_loss};
            }
        };
        std::size_t workers =
            std::min<std::size_t>(cells.size(),
                                  std::max(1u, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < workers; ++i)
            pool.emplace_back(capture(worker));
        for (auto& th : pool) th.join();
    }

    if (first_error) std::rethrow_exception(first_error);

    auto csv = open_out(fs::path(cfg.output_dir) / ("sweep_" + axis + ".csv"));
    write_csv_header(csv, cfg);
    csv << "axis,value,seed,final_mse\n";
    for (const auto& r : rows)
        csv << axis << "," << r.value << "," << r.seed << "," << r.final_mse
            << "\n";
    std::cout << "wrote " << rows.size() << " rows to sweep_" << axis
              << ".csv\n";
    return exit_ok;
}

int bits_per_symbol(int order) {
    int b = 0;
    while ((1 << b) < order) ++b;
    if ((1 << b) != order)
        throw std::invalid_argument(
            "link: payload framing requires a power-of-two PSK order");
    return b;
}

std::vector<int> payload_to_symbols(const std::string& payload, int order) {
    int bps = bits_per_symbol(order);
    std::vector<int> bits;
    bits.reserve(payload.size() * 8);
    for (unsigned char byte : payload)
        for (int b = 7; b >= 0; --b) bits.push_back((byte >> b) & 1);
    while (bits.size() % bps != 0) bits.push_back(0);
    std::vector<int> symbols;
    symbols.reserve(bits.size() / bps);
    for (std::size_t i = 0; i < bits.size(); i += bps) {
        int s = 0;
        for (int b = 0; b < bps; ++b) s = (s << 1) | bits[i + b];
        symbols.push_back(s);
    }
    return symbols;
}

std::string symbols_to_payload(const std::vector<int>& symbols, int order,
                               std::size_t num_bytes) {
    int bps = bits_per_symbol(order);
    std::vector<int> bits;
    bits.reserve(symbols.size() * bps);
    for (int s : symbols)
        for (int b = bps - 1; b >= 0; --b) bits.push_back((s >> b) & 1);
    std::string payload;
    for (std::size_t i = 0; i + 8 <= bits.size() && payload.size() < num_bytes;
         i += 8) {
        int byte = 0;
        for (int b = 0; b < 8; ++b) byte = (byte << 1) | bits[i + b];
        payload.push_back(static_cast<char>(byte));
    }
    return payload;
}

int cmd_link(const ExperimentConfig& cfg, const std::string& stack_path,
             const std::string& payload, int slots) {
    fs::create_directories(cfg.output_dir);
    StackState stack = load_stack(stack_path);
    PropagationSet prop = build_propagation(cfg.geom);
    TargetPattern target = resolve_target(cfg);
    Rng ch_rng(derive_seed(cfg.master_seed, 1));
    Channel ch = sample_channel(cfg.channel, cfg.rx, cfg.geom, ch_rng);

    std::vector<int> sent = payload_to_symbols(payload, cfg.psk.order);
    // Repeat the payload cyclically to fill the requested observation slots.
    std::vector<int> tx;
    tx.reserve(static_cast<std::size_t>(slots));
    for (int t = 0; t < slots; ++t) tx.push_back(sent[t % sent.size()]);

    Rng noise_rng(derive_seed(cfg.master_seed, 3));
    ReceivedBlock block = receive(stack, prop, ch, cfg.psk, tx, noise_rng);
    Eigen::VectorXcd gains = effective_gains(stack, prop, ch);
    std::vector<double> phases = mrc_detect(block, gains, cfg.psk);
    std::vector<int> detected;
    detected.reserve(phases.size());
    for (double p : phases) detected.push_back(demodulate(p, cfg.psk.order));

    double ser = symbol_error_rate(tx, detected);
    std::vector<int> first_pass(detected.begin(),
                                detected.begin() +
                                    static_cast<long>(sent.size()));
    std::string recovered =
        symbols_to_payload(first_pass, cfg.psk.order, payload.size());

    EnergyPattern pattern = energy_pattern(block, cfg.rx.rows, cfg.rx.cols);
    save_pattern_pgm(pattern.values, pattern.rows, pattern.cols,
                     (fs::path(cfg.output_dir) / "link_energy.pgm").string());
    save_pattern_pgm(target.bits, cfg.rx.rows, cfg.rx.cols,
                     (fs::path(cfg.output_dir) / "link_target.pgm").string());

    auto report = open_out(fs::path(cfg.output_dir) / "link_report.json");
    report << "{\n"
           << "  \"payload_bits\": " << payload.size() * 8 << ",\n"
           << "  \"slots\": " << slots << ",\n"
           << "  \"ser\": " << ser << ",\n"
           << "  \"payload_recovered\": "
           << (recovered == payload ? "true" : "false") << "\n"
           << "}\n";

    std::cout << "payload bits: " << payload.size() * 8 << "\n"
              << "SER over " << slots << " slots: " << ser << "\n"
              << "payload " << (recovered == payload ? "recovered" : "corrupted")
              << ": \"" << recovered << "\"\n";
    return exit_ok;
}

int cmd_pattern(const std::string& in_path, const std::string& glyph, int rows,
                int cols, double threshold, const std::string& to,
                const std::string& out_file) {
    TargetPattern p;
    if (!glyph.empty()) {
        p = make_glyph(glyph, rows, cols);
    } else if (!in_path.empty()) {
        if (threshold > 0.0) {
            p = edge_detect(load_pgm(in_path), threshold);
        } else {
            // Shape taken from the file itself for PGM inputs.
            GrayImage img = load_pgm(in_path);
            p = load_pattern(in_path, static_cast<int>(img.pixels.rows()),
                             static_cast<int>(img.pixels.cols()), true);
        }
    } else {
        throw std::invalid_argument("pattern: need --in or --glyph");
    }

    if (to == "pgm") {
        save_pattern_pgm(p.bits, p.rows, p.cols, out_file);
    } else {
        std::ofstream out(out_file);
        if (!out) throw std::runtime_error("cannot open " + out_file);
        for (int r = 0; r < p.rows; ++r) {
            for (int c = 0; c < p.cols; ++c) {
                if (c) out << " ";
                out << static_cast<int>(
                    p.bits(static_cast<Eigen::Index>(r) * p.cols + c));
            }
            out << "\n";
        }
    }
    std::cout << "wrote " << p.rows << "x" << p.cols << " pattern to "
              << out_file << "\n";
    return exit_ok;
}

int classify_error(const std::exception& e) {
    std::string msg = e.what();
    if (msg.find("diverged") != std::string::npos ||
        msg.find("degenerate") != std::string::npos ||
        msg.find("non-finite") != std::string::npos)
        return exit_numeric;
    return exit_io;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stacked-metasurface pattern synthesis and link simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::int64_t seed_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", seed_override, "master seed override");
        sub->add_option("--out", out_dir, "output directory override");
    };

    auto* train_cmd = app.add_subcommand("train", "optimize the stack");
    add_common(train_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep");
    add_common(sweep_cmd);
    std::string axis = "layers";
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
    sweep_cmd->add_option("--axis", axis, "layers|atoms|lr|beta")->required();
    sweep_cmd->add_option("--values", values, "axis values")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--seeds", seeds, "seed list")
        ->required()
        ->delimiter(',');

    auto* link_cmd = app.add_subcommand("link", "PSK link simulation");
    add_common(link_cmd);
    std::string stack_path;
    std::string payload = "A desk with blue surface.";
    int slots = 0;
    link_cmd->add_option("--stack", stack_path, "trained stack file")
        ->required();
    link_cmd->add_option("--payload", payload, "ASCII payload");
    link_cmd->add_option("--slots", slots,
                         "observation slots (default: one per symbol)");

    auto* pattern_cmd =
        app.add_subcommand("pattern", "edge-detect / convert patterns");
    std::string in_path;
    std::string glyph;
    int rows = 28;
    int cols = 28;
    double threshold = 0.0;
    std::string to = "pgm";
    std::string out_file = "pattern.pgm";
    pattern_cmd->add_option("--in", in_path, "input PGM or 0/1 text file");
    pattern_cmd->add_option("--glyph", glyph, "built-in glyph name");
    pattern_cmd->add_option("--rows", rows, "glyph rows");
    pattern_cmd->add_option("--cols", cols, "glyph cols");
    pattern_cmd->add_option("--edge-threshold", threshold,
                            "Sobel threshold in (0,1); 0 = plain convert");
    pattern_cmd->add_option("--to", to, "pgm|txt");
    pattern_cmd->add_option("--out-file", out_file, "output file");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg;
        if (app.got_subcommand(pattern_cmd))
            return cmd_pattern(in_path, glyph, rows, cols, threshold, to,
                               out_file);

        try {
            cfg = config_path.empty() ? default_config()
                                      : load_config(config_path);
            if (seed_override >= 0)
                cfg.master_seed = static_cast<std::uint64_t>(seed_override);
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return exit_config;
        }

        if (app.got_subcommand(train_cmd)) return cmd_train(cfg);
        if (app.got_subcommand(sweep_cmd))
            return cmd_sweep(cfg, axis, values, seeds);
        if (app.got_subcommand(link_cmd)) {
            if (slots <= 0) {
                int bps = bits_per_symbol(cfg.psk.order);
                slots = static_cast<int>((payload.size() * 8 + bps - 1) / bps);
            }
            return cmd_link(cfg, stack_path, payload, slots);
        }
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify_error(e);
    }
}
