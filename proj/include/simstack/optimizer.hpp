#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "simstack/channel.hpp"
#include "simstack/diffraction.hpp"
#include "simstack/link.hpp"
#include "simstack/patterns.hpp"

namespace simstack {

struct TrainConfig {
    int epochs = 2000;
    double learning_rate = 0.005;   // per antenna; the step applies eta * M
    double decay_factor = 0.8;      // applied to the learning rate on plateau
    int plateau_window = 50;        // consecutive flat iterations to trigger
    double plateau_rel_tol = 1e-4;
    std::uint64_t seed = 0;
    bool train_with_noise = false;  // adds a receiver-noise draw per iteration
};

struct TrainReport {
    std::vector<double> loss_history;              // one entry per epoch
    std::vector<std::pair<int, double>> lr_events; // (epoch, new eta)
    double initial_loss = 0.0;
    double final_loss = 0.0;
    double final_zeta = 0.0;
    double wall_time_s = 0.0;
};

struct Gradients {
    Eigen::ArrayXXd amplitude;  // dL/da, L x N
    Eigen::ArrayXXd phase;      // dL/dphi, L x N
};

// a ~ U[0,1), phi ~ U[0,2pi), i.i.d. per atom per layer.
StackState init_stack(const SimGeometry& geom, Rng& rng);

// Noiseless per-antenna energies p_s |g_m|^2.
Eigen::VectorXd received_energies(const StackState& stack,
                                  const PropagationSet& prop,
                                  const Channel& ch, const PskConfig& cfg);

// Closed-form scaling zeta = sum(tg .* e) / sum(e.^2); minimizes the
// objective over the scalar for fixed energies.
double zeta(const Eigen::VectorXd& energies, const TargetPattern& target);

// (1/M) sum_m (zeta e_m - tg_m)^2 with zeta recomputed from the energies.
double loss(const StackState& stack, const PropagationSet& prop,
            const Channel& ch, const PskConfig& cfg,
            const TargetPattern& target);

// Analytic gradients; zeta is held constant within one evaluation. Upstream
// and downstream partial products are cached so the cost is O(L M N^2).
Gradients gradients(const StackState& stack, const PropagationSet& prop,
                    const Channel& ch, const PskConfig& cfg,
                    const TargetPattern& target);

// Simultaneous update of all amplitudes and phases.
StackState step(const StackState& stack, const Gradients& grads, double eta);

// Per-layer min-max rescale of amplitudes onto [0, 1-eps]; phases wrapped
// into [0, 2pi). Idempotent.
StackState project(StackState stack);

std::pair<StackState, TrainReport> train(const SimGeometry& geom,
                                         const PropagationSet& prop,
                                         const Channel& ch,
                                         const PskConfig& cfg,
                                         const TargetPattern& target,
                                         const TrainConfig& tcfg);

}  // namespace simstack
