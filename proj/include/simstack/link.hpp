#pragma once

#include <cmath>
#include <vector>
#include <Eigen/Core>

#include "simstack/channel.hpp"
#include "simstack/diffraction.hpp"
#include "simstack/random.hpp"

namespace simstack {

inline double dbm_to_linear(double dbm) { return std::pow(10.0, dbm / 10.0); }

struct PskConfig {
    int order = 4;                   // J
    double tx_power_dBm = 40.0;      // p_s
    double noise_power_dBm = -104.0; // sigma_v^2

    double tx_power() const { return dbm_to_linear(tx_power_dBm); }     // mW
    double noise_power() const { return dbm_to_linear(noise_power_dBm); }
};

// One block of received samples: M antennas x T observation slots.
struct ReceivedBlock {
    Eigen::MatrixXcd samples;
    std::vector<int> symbols_sent;
};

// Normalized received energy image (max entry 1 when nonzero).
struct EnergyPattern {
    Eigen::VectorXd values;
    int rows = 0;
    int cols = 0;
};

// Constellation phase o = 2 pi index / J.
double modulate(int index, const PskConfig& cfg);

// exp(j * 2 pi k / J); axis-aligned points (multiples of pi/2) are exact,
// which keeps quarter-turn rotations norm-preserving bit for bit.
cxd psk_phasor(int index, int order);

int demodulate(double phase, int order);  // nearest index, ties to lower

// Effective per-antenna gains g = H B w^1.
Eigen::VectorXcd effective_gains(const StackState& stack,
                                 const PropagationSet& prop,
                                 const Channel& ch);

// y_{m,t} = sqrt(p_s) e^{j o_t} g_m + v_{m,t}, v ~ CN(0, sigma_v^2).
ReceivedBlock receive(const StackState& stack, const PropagationSet& prop,
                      const Channel& ch, const PskConfig& cfg,
                      const std::vector<int>& symbols, Rng& rng);

// Per-slot detected phase via maximal ratio combining.
std::vector<double> mrc_detect(const ReceivedBlock& block,
                               const Eigen::VectorXcd& gains,
                               const PskConfig& cfg);

// Slot-averaged |y|^2 divided by its max.
EnergyPattern energy_pattern(const ReceivedBlock& block, int rows, int cols);

double symbol_error_rate(const std::vector<int>& sent,
                         const std::vector<int>& detected);

// Global-window SSIM with the standard constants for 8-bit dynamic range;
// inputs are [0,1] images of equal shape.
double ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace simstack
