#pragma once

#include <cstdint>
#include <Eigen/Core>

#include "simstack/diffraction.hpp"
#include "simstack/geometry.hpp"
#include "simstack/random.hpp"

namespace simstack {

struct ChannelParams {
    double rician_K_dB = 3.0;
    double pathloss_ref_C0_dB = -35.0;  // gain at 1 m
    double pathloss_exponent = 2.8;
    double distance_m = 5.0;
};

// One block-fading realization from the output layer to the receive array.
struct Channel {
    Eigen::MatrixXcd H;  // M x N
    ChannelParams params;
    std::uint64_t seed = 0;
};

// Linear power gain q = 10^(C0_dB/10) * d^-gamma, d in meters.
double path_loss(double C0_dB, double gamma, double d_m);

// Unit-modulus LOS phases exp(-j 2 pi d_{m,n}), distances in wavelengths.
Eigen::MatrixXcd los_matrix(const ReceiverGeometry& rx, const SimGeometry& geom);

// H = sqrt(Kq/(1+K)) H_LOS + sqrt(q/(1+K)) H_NLOS, K linear, NLOS ~ CN(0,1).
Channel sample_channel(const ChannelParams& params, const ReceiverGeometry& rx,
                       const SimGeometry& geom, Rng& rng);

// Estimation-error model: H' = H + dH with E||dH||_F^2 / ||H||_F^2 = beta.
// Per-entry error variance is beta ||H||_F^2 / (M N); with
// literal_variance=true every entry instead gets variance beta ||H||_F^2
// (the un-normalized reading), kept behind this switch for study.
Channel perturb_channel(const Channel& ch, double beta, Rng& rng,
                        bool literal_variance = false);

}  // namespace simstack
