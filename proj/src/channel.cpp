#include "simstack/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "simstack/geometry.hpp"

namespace simstack {

double path_loss(double C0_dB, double gamma, double d_m) {
    if (!(d_m > 0.0)) throw std::domain_error("path_loss: d must be > 0");
    return std::pow(10.0, C0_dB / 10.0) * std::pow(d_m, -gamma);
}

Eigen::MatrixXcd los_matrix(const ReceiverGeometry& rx,
                            const SimGeometry& geom) {
    auto atoms = layer_coordinates(geom, geom.num_layers);
    auto ants = receiver_coordinates(rx, geom);
    Eigen::MatrixXd d = pairwise_distances(ants, atoms);
    Eigen::MatrixXcd los(d.rows(), d.cols());
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (Eigen::Index m = 0; m < d.rows(); ++m)
        for (Eigen::Index n = 0; n < d.cols(); ++n)
            los(m, n) = std::polar(1.0, -two_pi * d(m, n));
    return los;
}

Channel sample_channel(const ChannelParams& params, const ReceiverGeometry& rx,
                       const SimGeometry& geom, Rng& rng) {
    double k_lin = std::pow(10.0, params.rician_K_dB / 10.0);
    double q = path_loss(params.pathloss_ref_C0_dB, params.pathloss_exponent,
                         params.distance_m);
    double los_scale = std::sqrt(k_lin * q / (1.0 + k_lin));
    double nlos_scale = std::sqrt(q / (1.0 + k_lin));

    Eigen::MatrixXcd h = los_scale * los_matrix(rx, geom);
    for (Eigen::Index m = 0; m < h.rows(); ++m)
        for (Eigen::Index n = 0; n < h.cols(); ++n)
            h(m, n) += nlos_scale * sample_cn(rng);
    return Channel{std::move(h), params, 0};
}

Channel perturb_channel(const Channel& ch, double beta, Rng& rng,
                        bool literal_variance) {
    if (beta < 0.0) throw std::domain_error("perturb_channel: beta must be >= 0");
    if (beta == 0.0) return ch;

    double total_power = ch.H.squaredNorm();
    double entries = static_cast<double>(ch.H.size());
    double per_entry_var = literal_variance ? beta * total_power
                                            : beta * total_power / entries;
    double sd = std::sqrt(per_entry_var);

    Channel out = ch;
    for (Eigen::Index m = 0; m < out.H.rows(); ++m)
        for (Eigen::Index n = 0; n < out.H.cols(); ++n)
            out.H(m, n) += sd * sample_cn(rng);
    return out;
}

}  // namespace simstack
