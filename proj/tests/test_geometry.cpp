#include <doctest.h>

#include "simstack/geometry.hpp"

using namespace simstack;

namespace {

SimGeometry small_geom(int layers, int atoms) {
    SimGeometry g;
    g.num_layers = layers;
    g.atoms_per_layer = atoms;
    g.thickness = static_cast<double>(layers - 1);  // d_s = 1
    g.atom_area = 1.0;
    g.atom_pitch = 1.0;
    g.feed_distance = 1.0;
    return g;
}

}  // namespace

TEST_CASE("validation enforces structural invariants") {
    CHECK_THROWS_AS(small_geom(1, 4).validate(), std::invalid_argument);
    CHECK_THROWS_AS(small_geom(2, 8).validate(), std::invalid_argument);
    auto g = small_geom(2, 4);
    g.thickness = 0.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    CHECK_NOTHROW(small_geom(3, 9).validate());
    CHECK(small_geom(3, 8 * 8).side_length() == 8);
    CHECK(small_geom(6, 441).layer_spacing() == doctest::Approx(5.0 / 5.0));
}

TEST_CASE("layer_coordinates centered grids") {
    auto g1 = small_geom(2, 1);
    auto pts = layer_coordinates(g1, 2);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].x == 0.0);
    CHECK(pts[0].y == 0.0);
    CHECK(pts[0].z == doctest::Approx(1.0));

    auto g4 = small_geom(2, 4);
    pts = layer_coordinates(g4, 1);
    for (const auto& p : pts) {
        CHECK(std::abs(p.x) == doctest::Approx(0.5));
        CHECK(std::abs(p.y) == doctest::Approx(0.5));
        CHECK(p.z == 0.0);
    }

    auto g9 = small_geom(2, 9);
    pts = layer_coordinates(g9, 1);
    CHECK(pts[4].x == doctest::Approx(0.0));  // center atom
    CHECK(pts[4].y == doctest::Approx(0.0));
    bool has_corner = false;
    for (const auto& p : pts)
        if (p.x == doctest::Approx(-1.0) && p.y == doctest::Approx(-1.0))
            has_corner = true;
    CHECK(has_corner);

    CHECK_THROWS_AS(layer_coordinates(g9, 0), std::out_of_range);
    CHECK_THROWS_AS(layer_coordinates(g9, 3), std::out_of_range);
}

TEST_CASE("receiver_coordinates grid and aperture") {
    auto g = small_geom(2, 4);
    ReceiverGeometry rx;
    rx.wavelength_m = 1.0;
    rx.link_distance_m = 3.0;

    rx.rows = rx.cols = 1;
    auto pts = receiver_coordinates(rx, g);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].x == 0.0);
    CHECK(pts[0].z == doctest::Approx(1.0 + 3.0));

    rx.rows = rx.cols = 2;
    rx.antenna_spacing = 0.5;
    pts = receiver_coordinates(rx, g);
    for (const auto& p : pts) {
        CHECK(std::abs(p.x) == doctest::Approx(0.25));
        CHECK(std::abs(p.y) == doctest::Approx(0.25));
    }

    rx.rows = rx.cols = 28;
    pts = receiver_coordinates(rx, g);
    double min_x = 1e9, max_x = -1e9;
    for (const auto& p : pts) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
    }
    CHECK(max_x - min_x == doctest::Approx(13.5));  // (28-1)*0.5
}

TEST_CASE("pairwise_distances basics") {
    std::vector<Point3> a = {{0, 0, 0}, {1, 0, 0}};
    std::vector<Point3> b = {{0, 0, 0}, {3, 0, 4}};
    auto d = pairwise_distances(a, b);
    CHECK(d(0, 0) == 0.0);
    CHECK(d(0, 1) == doctest::Approx(5.0));  // 3-4-5 triangle
    CHECK(d(1, 0) == doctest::Approx(1.0));

    std::vector<Point3> axial = {{0, 0, 0}};
    std::vector<Point3> shifted = {{0, 0, 1.25}};
    CHECK(pairwise_distances(axial, shifted)(0, 0) == doctest::Approx(1.25));
}

TEST_CASE("layer pair distances bounded below by spacing and reproducible") {
    auto g = small_geom(3, 9);
    auto l1 = layer_coordinates(g, 1);
    auto l2 = layer_coordinates(g, 2);
    auto d = pairwise_distances(l2, l1);
    CHECK(d.minCoeff() >= g.layer_spacing());

    auto d2 = pairwise_distances(layer_coordinates(g, 2), layer_coordinates(g, 1));
    CHECK((d - d2).cwiseAbs().maxCoeff() == 0.0);  // bit-identical
}
