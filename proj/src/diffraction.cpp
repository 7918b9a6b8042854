#include "simstack/diffraction.hpp"

#include <numbers>
#include <stdexcept>

namespace simstack {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

Eigen::VectorXcd StackState::layer_coefficients(int layer) const {
    const int n = atoms();
    Eigen::VectorXcd z(n);
    for (int i = 0; i < n; ++i)
        z(i) = std::polar(amplitudes(layer, i), phases(layer, i));
    return z;
}

cxd propagation_coefficient(double axial_gap, double area, double distance) {
    if (!(distance > 0.0))
        throw std::domain_error("propagation_coefficient: distance must be > 0");
    double amp = axial_gap * area / (distance * distance);
    cxd obliquity(1.0 / (two_pi * distance), -1.0);
    return amp * obliquity * std::polar(1.0, two_pi * distance);
}

Eigen::MatrixXcd build_inter_layer_matrix(const SimGeometry& geom, int layer) {
    if (layer < 2 || layer > geom.num_layers)
        throw std::out_of_range("build_inter_layer_matrix: layer out of range");
    auto prev = layer_coordinates(geom, layer - 1);
    auto cur = layer_coordinates(geom, layer);
    double d_s = geom.layer_spacing();
    const int n = geom.atoms_per_layer;
    Eigen::MatrixXcd w(n, n);
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            double dx = cur[row].x - prev[col].x;
            double dy = cur[row].y - prev[col].y;
            double dist = std::sqrt(dx * dx + dy * dy + d_s * d_s);
            w(row, col) = propagation_coefficient(d_s, geom.atom_area, dist);
        }
    }
    return w;
}

Eigen::VectorXcd build_feed_vector(const SimGeometry& geom) {
    auto first = layer_coordinates(geom, 1);
    double d_ts = geom.feed_distance;
    const int n = geom.atoms_per_layer;
    Eigen::VectorXcd w(n);
    for (int i = 0; i < n; ++i) {
        double dist = std::sqrt(first[i].x * first[i].x +
                                first[i].y * first[i].y + d_ts * d_ts);
        w(i) = propagation_coefficient(d_ts, geom.atom_area, dist);
    }
    return w;
}

PropagationSet build_propagation(const SimGeometry& geom) {
    geom.validate();
    PropagationSet prop;
    prop.inter_layer.reserve(geom.num_layers - 1);
    for (int layer = 2; layer <= geom.num_layers; ++layer)
        prop.inter_layer.push_back(build_inter_layer_matrix(geom, layer));
    prop.feed = build_feed_vector(geom);
    return prop;
}

Eigen::MatrixXcd compose_response(const StackState& stack,
                                  const PropagationSet& prop) {
    const int n = stack.atoms();
    const int layers = stack.layers();
    if (static_cast<int>(prop.inter_layer.size()) != layers - 1 ||
        (layers > 1 && prop.inter_layer[0].rows() != n))
        throw std::invalid_argument("compose_response: dimension mismatch");
    Eigen::MatrixXcd b = stack.layer_coefficients(0).asDiagonal();
    for (int l = 1; l < layers; ++l) {
        b = prop.inter_layer[l - 1] * b;
        b = stack.layer_coefficients(l).asDiagonal() * b;
    }
    return b;
}

Eigen::VectorXcd forward_field(const StackState& stack,
                               const PropagationSet& prop) {
    const int layers = stack.layers();
    Eigen::VectorXcd u =
        stack.layer_coefficients(0).cwiseProduct(prop.feed);
    for (int l = 1; l < layers; ++l) {
        u = prop.inter_layer[l - 1] * u;
        u = stack.layer_coefficients(l).cwiseProduct(u);
    }
    return u;
}

}  // namespace simstack
