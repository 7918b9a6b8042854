#include <doctest.h>

#include <numbers>
#include <random>

#include "simstack/diffraction.hpp"
#include "simstack/optimizer.hpp"

using namespace simstack;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

SimGeometry small_geom(int layers, int atoms) {
    SimGeometry g;
    g.num_layers = layers;
    g.atoms_per_layer = atoms;
    g.thickness = static_cast<double>(layers - 1);
    g.feed_distance = 1.0;
    return g;
}

StackState all_ones(int layers, int atoms) {
    StackState s;
    s.amplitudes = Eigen::ArrayXXd::Ones(layers, atoms);
    s.phases = Eigen::ArrayXXd::Zero(layers, atoms);
    return s;
}

// Scalar re-evaluation of the coupling formula, independent of the
// library path (used as the per-entry oracle).
cxd coeff_oracle(double gap, double area, double d) {
    cxd val = cxd(1.0 / (two_pi * d), -1.0);
    val *= gap * area / (d * d);
    return val * cxd(std::cos(two_pi * d), std::sin(two_pi * d));
}

}  // namespace

TEST_CASE("propagation_coefficient at unit arguments") {
    cxd c = propagation_coefficient(1.0, 1.0, 1.0);
    CHECK(c.real() == doctest::Approx(0.159155).epsilon(1e-5));
    CHECK(c.imag() == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("propagation_coefficient modulus and limit") {
    for (double d : {0.5, 1.0, 2.5, 10.0}) {
        cxd c = propagation_coefficient(2.0, 0.5, d);
        double expected =
            (2.0 * 0.5 / (d * d)) * std::sqrt(1.0 / (two_pi * d * two_pi * d) + 1.0);
        CHECK(std::abs(c) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(std::abs(propagation_coefficient(1.0, 1.0, 1e9)) < 1e-17);
    CHECK_THROWS_AS(propagation_coefficient(1.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(propagation_coefficient(1.0, 1.0, -1.0), std::domain_error);
}

TEST_CASE("inter-layer matrix matches scalar oracle and is symmetric") {
    auto g = small_geom(3, 4);
    auto w = build_inter_layer_matrix(g, 2);

    auto prev = layer_coordinates(g, 1);
    auto cur = layer_coordinates(g, 2);
    for (int n = 0; n < 4; ++n)
        for (int nn = 0; nn < 4; ++nn) {
            double dx = cur[n].x - prev[nn].x;
            double dy = cur[n].y - prev[nn].y;
            double dist = std::sqrt(dx * dx + dy * dy + 1.0);
            CHECK(std::abs(w(n, nn) - coeff_oracle(1.0, 1.0, dist)) < 1e-15);
        }
    CHECK((w - w.transpose()).cwiseAbs().maxCoeff() < 1e-15);

    auto g1 = small_geom(2, 1);
    auto w1 = build_inter_layer_matrix(g1, 2);
    CHECK(std::abs(w1(0, 0) - propagation_coefficient(1.0, 1.0, 1.0)) == 0.0);

    CHECK_THROWS_AS(build_inter_layer_matrix(g, 1), std::out_of_range);
    CHECK_THROWS_AS(build_inter_layer_matrix(g, 4), std::out_of_range);
}

TEST_CASE("feed vector symmetry orbits and scalar oracle") {
    auto g9 = small_geom(2, 9);
    auto w = build_feed_vector(g9);
    auto first = layer_coordinates(g9, 1);
    for (int n = 0; n < 9; ++n) {
        double dist = std::sqrt(first[n].x * first[n].x +
                                first[n].y * first[n].y + 1.0);
        CHECK(std::abs(w(n) - coeff_oracle(1.0, 1.0, dist)) < 1e-15);
    }
    // Four corners of the 3x3 grid share a distance, so share a coefficient.
    CHECK(w(0) == w(2));
    CHECK(w(0) == w(6));
    CHECK(w(0) == w(8));
    // Edge midpoints likewise.
    CHECK(w(1) == w(3));
    CHECK(w(1) == w(5));

    auto g1 = small_geom(2, 1);
    auto wf = build_feed_vector(g1);
    CHECK(std::abs(wf(0) - propagation_coefficient(1.0, 1.0, 1.0)) == 0.0);
}

TEST_CASE("compose_response identity and annihilation") {
    auto g = small_geom(2, 4);
    auto prop = build_propagation(g);
    auto stack = all_ones(2, 4);
    auto b = compose_response(stack, prop);
    CHECK((b - prop.inter_layer[0]).cwiseAbs().maxCoeff() < 1e-15);

    stack.amplitudes.row(1).setZero();
    b = compose_response(stack, prop);
    CHECK(b.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("compose_response equals naive dense product") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        int layers = 2 + static_cast<int>(rng() % 3);
        int side = 2 + static_cast<int>(rng() % 3);
        int atoms = side * side;
        auto g = small_geom(layers, atoms);
        auto prop = build_propagation(g);
        auto stack = init_stack(g, rng);

        Eigen::MatrixXcd ref =
            Eigen::MatrixXcd(stack.layer_coefficients(0).asDiagonal());
        for (int l = 1; l < layers; ++l)
            ref = Eigen::MatrixXcd(stack.layer_coefficients(l).asDiagonal()) *
                  (prop.inter_layer[l - 1] * ref);

        auto b = compose_response(stack, prop);
        CHECK((b - ref).norm() / ref.norm() < 1e-12);
    }
}

TEST_CASE("forward_field matches matrix route and is layer-linear") {
    Rng rng(11);
    auto g = small_geom(3, 9);
    auto prop = build_propagation(g);
    auto stack = init_stack(g, rng);

    Eigen::VectorXcd u = forward_field(stack, prop);
    Eigen::VectorXcd ref = compose_response(stack, prop) * prop.feed;
    CHECK((u - ref).norm() / ref.norm() < 1e-12);

    // Scaling one layer's amplitudes scales the output linearly.
    StackState scaled = stack;
    scaled.amplitudes.row(1) *= 0.5;
    Eigen::VectorXcd u2 = forward_field(scaled, prop);
    CHECK((u2 - 0.5 * u).norm() < 1e-12 * u.norm());

    auto ones = all_ones(2, 9);
    auto prop2 = build_propagation(small_geom(2, 9));
    Eigen::VectorXcd w2w1 = prop2.inter_layer[0] * prop2.feed;
    CHECK((forward_field(ones, prop2) - w2w1).norm() < 1e-15);
}

TEST_CASE("response is affine in a single coefficient") {
    Rng rng(13);
    auto g = small_geom(3, 9);
    auto prop = build_propagation(g);
    auto stack = init_stack(g, rng);

    auto at = [&](double amp) {
        StackState s = stack;
        s.amplitudes(1, 4) = amp;
        return forward_field(s, prop);
    };
    Eigen::VectorXcd f0 = at(0.0);
    Eigen::VectorXcd f1 = at(0.4);
    Eigen::VectorXcd f2 = at(0.8);
    // f(2a) - f(0) should be exactly twice f(a) - f(0).
    CHECK(((f2 - f0) - 2.0 * (f1 - f0)).norm() < 1e-12 * f2.norm());
}
