#include "simstack/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simstack {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double amplitude_eps = 1e-6;  // keeps amplitudes strictly below 1

void check_dims(const StackState& stack, const PropagationSet& prop,
                const Channel& ch, const TargetPattern* target) {
    if (static_cast<int>(prop.inter_layer.size()) != stack.layers() - 1)
        throw std::invalid_argument("optimizer: stack/propagation layer mismatch");
    if (ch.H.cols() != stack.atoms())
        throw std::invalid_argument("optimizer: channel/stack atom mismatch");
    if (target && target->bits.size() != ch.H.rows())
        throw std::invalid_argument("optimizer: target/channel size mismatch");
}

double zeta_of(const Eigen::VectorXd& e, const Eigen::VectorXd& tg) {
    double denom = e.array().square().sum();
    if (!(denom > 0.0))
        throw std::runtime_error("zeta: degenerate all-zero energies");
    return tg.dot(e) / denom;
}

double mse_of(const Eigen::VectorXd& e, const Eigen::VectorXd& tg, double z) {
    return (z * e - tg).squaredNorm() / static_cast<double>(e.size());
}

// One forward evaluation with optional per-antenna receiver noise, plus
// everything the gradient needs (cached per-layer fields).
struct Evaluation {
    std::vector<Eigen::VectorXcd> upstream;  // U^l arriving at layer l input
    Eigen::VectorXcd y;                      // sqrt(p_s) g (+ noise)
    Eigen::VectorXd energies;                // |y|^2
    double zeta = 0.0;
    double loss = 0.0;
};

Evaluation evaluate(const StackState& stack, const PropagationSet& prop,
                    const Channel& ch, const PskConfig& cfg,
                    const TargetPattern& target,
                    const Eigen::VectorXcd* noise) {
    check_dims(stack, prop, ch, &target);
    const int layers = stack.layers();
    Evaluation ev;
    ev.upstream.resize(layers);
    ev.upstream[0] = prop.feed;
    for (int l = 1; l < layers; ++l)
        ev.upstream[l] =
            prop.inter_layer[l - 1] *
            stack.layer_coefficients(l - 1).cwiseProduct(ev.upstream[l - 1]);

    Eigen::VectorXcd g =
        ch.H *
        stack.layer_coefficients(layers - 1).cwiseProduct(ev.upstream[layers - 1]);
    ev.y = std::sqrt(cfg.tx_power()) * g;
    if (noise) ev.y += *noise;
    ev.energies = ev.y.cwiseAbs2();
    ev.zeta = zeta_of(ev.energies, target.bits);
    ev.loss = mse_of(ev.energies, target.bits, ev.zeta);
    return ev;
}

Gradients gradients_from(const StackState& stack, const PropagationSet& prop,
                         const Channel& ch, const PskConfig& cfg,
                         const TargetPattern& target, const Evaluation& ev) {
    const int layers = stack.layers();
    const int atoms = stack.atoms();
    const double m = static_cast<double>(target.bits.size());
    const double sqrt_ps = std::sqrt(cfg.tx_power());

    // d e_m / d theta = 2 Re(conj(y_m) sqrt(p_s) d g_m / d theta); fold the
    // residual weighting into one complex vector s.
    Eigen::VectorXd residual = ev.zeta * ev.energies - target.bits;
    Eigen::VectorXcd s = (4.0 * ev.zeta * sqrt_ps / m) *
                         ev.y.conjugate().cwiseProduct(residual.cast<cxd>());

    Gradients grads;
    grads.amplitude.resize(layers, atoms);
    grads.phase.resize(layers, atoms);

    // Downstream rows V^l (M x N), built top-down; t = V^lT s collapses the
    // antenna sum so each layer costs one mat-vec plus the recursion gemm.
    Eigen::MatrixXcd v = ch.H;
    for (int l = layers - 1; l >= 0; --l) {
        Eigen::VectorXcd t = v.transpose() * s;
        for (int n = 0; n < atoms; ++n) {
            cxd phase_factor = std::polar(1.0, stack.phases(l, n));
            cxd core = ev.upstream[l](n) * t(n);
            grads.amplitude(l, n) = std::real(phase_factor * core);
            grads.phase(l, n) = std::real(
                cxd(0.0, 1.0) * stack.amplitudes(l, n) * phase_factor * core);
        }
        if (l > 0) {
            Eigen::VectorXcd z = stack.layer_coefficients(l);
            v = (v * z.asDiagonal()) * prop.inter_layer[l - 1];
        }
    }
    return grads;
}

}  // namespace

StackState init_stack(const SimGeometry& geom, Rng& rng) {
    geom.validate();
    const int layers = geom.num_layers;
    const int atoms = geom.atoms_per_layer;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    StackState stack;
    stack.amplitudes.resize(layers, atoms);
    stack.phases.resize(layers, atoms);
    for (int l = 0; l < layers; ++l)
        for (int n = 0; n < atoms; ++n) {
            stack.amplitudes(l, n) = unit(rng);
            stack.phases(l, n) = two_pi * unit(rng);
        }
    return stack;
}

Eigen::VectorXd received_energies(const StackState& stack,
                                  const PropagationSet& prop,
                                  const Channel& ch, const PskConfig& cfg) {
    check_dims(stack, prop, ch, nullptr);
    Eigen::VectorXcd g = ch.H * forward_field(stack, prop);
    return cfg.tx_power() * g.cwiseAbs2();
}

double zeta(const Eigen::VectorXd& energies, const TargetPattern& target) {
    if (energies.size() != target.bits.size())
        throw std::invalid_argument("zeta: size mismatch");
    return zeta_of(energies, target.bits);
}

double loss(const StackState& stack, const PropagationSet& prop,
            const Channel& ch, const PskConfig& cfg,
            const TargetPattern& target) {
    Eigen::VectorXd e = received_energies(stack, prop, ch, cfg);
    double z = zeta_of(e, target.bits);
    return mse_of(e, target.bits, z);
}

Gradients gradients(const StackState& stack, const PropagationSet& prop,
                    const Channel& ch, const PskConfig& cfg,
                    const TargetPattern& target) {
    Evaluation ev = evaluate(stack, prop, ch, cfg, target, nullptr);
    return gradients_from(stack, prop, ch, cfg, target, ev);
}

StackState step(const StackState& stack, const Gradients& grads, double eta) {
    if (!(eta >= 0.0)) throw std::invalid_argument("step: eta must be >= 0");
    StackState next = stack;
    next.amplitudes -= eta * grads.amplitude;
    next.phases -= eta * grads.phase;
    return next;
}

StackState project(StackState stack) {
    const double hi = 1.0 - amplitude_eps;
    for (int l = 0; l < stack.layers(); ++l) {
        auto row = stack.amplitudes.row(l);
        double lo_a = row.minCoeff();
        double hi_a = row.maxCoeff();
        if (hi_a > lo_a) {
            // (x - lo)/range maps the max to exactly 1, so the rescale is a
            // bit-exact fixed point once the row spans [0, 1-eps].
            if (!(lo_a == 0.0 && hi_a == hi))
                row = (row - lo_a) / (hi_a - lo_a) * hi;
        } else {
            row.setConstant(std::clamp(lo_a, 0.0, hi));
        }
        auto ph = stack.phases.row(l);
        for (int n = 0; n < stack.atoms(); ++n) {
            double p = ph(n);
            double wrapped = p - two_pi * std::floor(p / two_pi);
            if (wrapped >= two_pi) wrapped = 0.0;  // guard against rounding up
            ph(n) = wrapped;
        }
    }
    return stack;
}

std::pair<StackState, TrainReport> train(const SimGeometry& geom,
                                         const PropagationSet& prop,
                                         const Channel& ch,
                                         const PskConfig& cfg,
                                         const TargetPattern& target,
                                         const TrainConfig& tcfg) {
    if (tcfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    auto t0 = std::chrono::steady_clock::now();

    Rng rng(tcfg.seed);
    StackState stack = init_stack(geom, rng);
    const double noise_sd = std::sqrt(cfg.noise_power());
    const Eigen::Index m = target.bits.size();

    auto draw_noise = [&]() {
        Eigen::VectorXcd v(m);
        for (Eigen::Index i = 0; i < m; ++i) v(i) = noise_sd * sample_cn(rng);
        return v;
    };

    Evaluation cur = evaluate(stack, prop, ch, cfg, target, nullptr);

    TrainReport report;
    report.initial_loss = cur.loss;
    report.loss_history.reserve(static_cast<std::size_t>(tcfg.epochs));

    StackState best = stack;
    double best_loss = cur.loss;
    double best_zeta = cur.zeta;
    double eta = tcfg.learning_rate;
    int flat_count = 0;
    double prev_loss = cur.loss;

    for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
        Evaluation* grad_eval = &cur;
        Evaluation noisy;
        if (tcfg.train_with_noise) {
            Eigen::VectorXcd v = draw_noise();
            noisy = evaluate(stack, prop, ch, cfg, target, &v);
            grad_eval = &noisy;
        }
        Gradients grads = gradients_from(stack, prop, ch, cfg, target, *grad_eval);
        // The configured rate is per antenna: the update uses eta * M, i.e.
        // descends the un-normalized sum objective, so step sizes do not
        // shrink as the array grows while the recorded loss stays the mean.
        stack = project(step(stack, grads, eta * static_cast<double>(m)));
        cur = evaluate(stack, prop, ch, cfg, target, nullptr);
        if (!std::isfinite(cur.loss))
            throw std::runtime_error("train: loss diverged to non-finite value");

        report.loss_history.push_back(cur.loss);
        if (cur.loss < best_loss) {
            best_loss = cur.loss;
            best_zeta = cur.zeta;
            best = stack;
        }

        double denom = std::max(std::abs(prev_loss), 1e-300);
        if (std::abs(cur.loss - prev_loss) / denom < tcfg.plateau_rel_tol) {
            if (++flat_count >= tcfg.plateau_window) {
                eta *= tcfg.decay_factor;
                report.lr_events.emplace_back(epoch, eta);
                flat_count = 0;
            }
        } else {
            flat_count = 0;
        }
        prev_loss = cur.loss;
    }

    report.final_loss = best_loss;
    report.final_zeta = best_zeta;
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return {std::move(best), std::move(report)};
}

}  // namespace simstack
