#include "simstack/link.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simstack {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

double modulate(int index, const PskConfig& cfg) {
    if (index < 0 || index >= cfg.order)
        throw std::out_of_range("modulate: symbol index out of range");
    return two_pi * index / cfg.order;
}

cxd psk_phasor(int index, int order) {
    // Quarter-turn constellation points are exact so that rotating by them
    // is a sign/swap and preserves |.|^2 bitwise.
    if ((4LL * index) % order == 0) {
        switch ((4 * index / order) % 4) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }
    return std::polar(1.0, two_pi * index / order);
}

int demodulate(double phase, int order) {
    if (order < 2) throw std::invalid_argument("demodulate: order must be >= 2");
    double turns = phase / two_pi * order;
    double lo = std::floor(turns);
    double frac = turns - lo;
    long long idx = static_cast<long long>(lo) + (frac > 0.5 ? 1 : 0);
    long long j = order;
    return static_cast<int>(((idx % j) + j) % j);
}

Eigen::VectorXcd effective_gains(const StackState& stack,
                                 const PropagationSet& prop,
                                 const Channel& ch) {
    return ch.H * forward_field(stack, prop);
}

ReceivedBlock receive(const StackState& stack, const PropagationSet& prop,
                      const Channel& ch, const PskConfig& cfg,
                      const std::vector<int>& symbols, Rng& rng) {
    Eigen::VectorXcd g = effective_gains(stack, prop, ch);
    const double amp = std::sqrt(cfg.tx_power());
    const double noise_sd = std::sqrt(cfg.noise_power());
    const Eigen::Index m = g.size();
    const auto t = static_cast<Eigen::Index>(symbols.size());

    Eigen::VectorXcd x = amp * g;  // sqrt(p_s) g_m, shared by all slots
    ReceivedBlock block;
    block.samples.resize(m, t);
    block.symbols_sent = symbols;
    for (Eigen::Index slot = 0; slot < t; ++slot) {
        cxd phasor = psk_phasor(symbols[static_cast<std::size_t>(slot)],
                                cfg.order);
        for (Eigen::Index i = 0; i < m; ++i) {
            cxd y = x(i) * phasor;
            if (noise_sd > 0.0) y += noise_sd * sample_cn(rng);
            block.samples(i, slot) = y;
        }
    }
    return block;
}

std::vector<double> mrc_detect(const ReceivedBlock& block,
                               const Eigen::VectorXcd& gains,
                               const PskConfig& cfg) {
    double gain_power = gains.squaredNorm();
    if (!(gain_power > 0.0))
        throw std::runtime_error("mrc_detect: all-zero gains");
    const double p_s = cfg.tx_power();
    const double amp = std::sqrt(p_s);
    std::vector<double> phases;
    phases.reserve(static_cast<std::size_t>(block.samples.cols()));
    for (Eigen::Index t = 0; t < block.samples.cols(); ++t) {
        cxd acc = 0.0;
        for (Eigen::Index m = 0; m < gains.size(); ++m)
            acc += std::conj(amp * gains(m)) * block.samples(m, t);
        acc /= p_s * gain_power;  // positive real, kept for fidelity
        phases.push_back(std::arg(acc));
    }
    return phases;
}

EnergyPattern energy_pattern(const ReceivedBlock& block, int rows, int cols) {
    const Eigen::Index m = block.samples.rows();
    const Eigen::Index t = block.samples.cols();
    if (t < 1) throw std::invalid_argument("energy_pattern: empty block");
    if (static_cast<Eigen::Index>(rows) * cols != m)
        throw std::invalid_argument("energy_pattern: shape mismatch");

    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    for (Eigen::Index slot = 0; slot < t; ++slot)
        for (Eigen::Index i = 0; i < m; ++i)
            e(i) += std::norm(block.samples(i, slot));
    e /= static_cast<double>(t);

    double peak = e.maxCoeff();
    if (!(peak > 0.0))
        throw std::runtime_error("energy_pattern: degenerate all-zero energies");
    return EnergyPattern{e / peak, rows, cols};
}

double symbol_error_rate(const std::vector<int>& sent,
                         const std::vector<int>& detected) {
    if (sent.empty() || sent.size() != detected.size())
        throw std::invalid_argument("symbol_error_rate: length mismatch");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < sent.size(); ++i)
        if (sent[i] != detected[i]) ++errors;
    return static_cast<double>(errors) / static_cast<double>(sent.size());
}

double ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("ssim: shape mismatch");
    const double n = static_cast<double>(a.size());
    // Standard constants for an 8-bit dynamic range, single global window.
    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    Eigen::MatrixXd x = 255.0 * a;
    Eigen::MatrixXd y = 255.0 * b;
    double mx = x.mean();
    double my = y.mean();
    double vx = (x.array() - mx).square().sum() / n;
    double vy = (y.array() - my).square().sum() / n;
    double cov = ((x.array() - mx) * (y.array() - my)).sum() / n;
    return ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
           ((mx * mx + my * my + c1) * (vx + vy + c2));
}

}  // namespace simstack
