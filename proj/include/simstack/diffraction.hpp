#pragma once

#include <complex>
#include <vector>
#include <Eigen/Core>

#include "simstack/geometry.hpp"

namespace simstack {

using cxd = std::complex<double>;

// Trainable per-atom transmission coefficients, one row per layer.
// amplitudes in [0, 1), phases in [0, 2*pi).
struct StackState {
    Eigen::ArrayXXd amplitudes;  // L x N
    Eigen::ArrayXXd phases;      // L x N

    int layers() const { return static_cast<int>(amplitudes.rows()); }
    int atoms() const { return static_cast<int>(amplitudes.cols()); }

    // z^l = a^l .* exp(j phi^l) for 0-based layer l.
    Eigen::VectorXcd layer_coefficients(int layer) const;
};

// Geometry-only propagation data, computed once and reused across training.
struct PropagationSet {
    std::vector<Eigen::MatrixXcd> inter_layer;  // W^2 .. W^L, each N x N
    Eigen::VectorXcd feed;                      // w^1, length N
};

// Scalar diffraction coupling between two points on parallel planes,
// lambda-normalized:
//   (axial_gap * area / d^2) * (1/(2 pi d) - j) * exp(j 2 pi d)
cxd propagation_coefficient(double axial_gap, double area, double distance);

// W^layer for 2 <= layer <= L; entry (n, nn) couples atom nn on layer-1
// to atom n on layer. Symmetric because adjacent grids are congruent.
Eigen::MatrixXcd build_inter_layer_matrix(const SimGeometry& geom, int layer);

// w^1: feed antenna at (0,0,-d_ts) to each atom of the first layer.
Eigen::VectorXcd build_feed_vector(const SimGeometry& geom);

PropagationSet build_propagation(const SimGeometry& geom);

// Full stack response B = Z^L W^L ... Z^2 W^2 Z^1 (N x N). O(L N^3); use
// forward_field when only B w^1 is needed.
Eigen::MatrixXcd compose_response(const StackState& stack,
                                  const PropagationSet& prop);

// B w^1 evaluated as a vector chain, O(L N^2).
Eigen::VectorXcd forward_field(const StackState& stack,
                               const PropagationSet& prop);

}  // namespace simstack
