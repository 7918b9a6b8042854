#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "simstack/patterns.hpp"

using namespace simstack;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/simstack_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
    void write(const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
};

}  // namespace

TEST_CASE("text grid parsing") {
    TempFile f("grid.txt");
    f.write("1 0\n0 1\n");
    auto p = load_pattern(f.path, 2, 2);
    CHECK(p.bits(0) == 1.0);
    CHECK(p.bits(1) == 0.0);
    CHECK(p.bits(2) == 0.0);
    CHECK(p.bits(3) == 1.0);

    SUBCASE("wrong token count rejected") {
        f.write("1 0 0 1 1\n");
        CHECK_THROWS_AS(load_pattern(f.path, 2, 2), std::runtime_error);
        f.write("1 0 0\n");
        CHECK_THROWS_AS(load_pattern(f.path, 2, 2), std::runtime_error);
    }
    SUBCASE("non-binary values rejected") {
        f.write("1 0 2 1\n");
        CHECK_THROWS_AS(load_pattern(f.path, 2, 2), std::runtime_error);
    }
    SUBCASE("all-zero rejected unless allowed") {
        f.write("0 0 0 0\n");
        CHECK_THROWS_AS(load_pattern(f.path, 2, 2), std::runtime_error);
        auto z = load_pattern(f.path, 2, 2, true);
        CHECK(z.bits.maxCoeff() == 0.0);
    }
}

TEST_CASE("pgm threshold at mid-gray") {
    TempFile f("thresh.pgm");
    // P2 with values straddling 128 after maxval scaling.
    f.write("P2\n2 2\n255\n255 128 127 0\n");
    auto p = load_pattern(f.path, 2, 2);
    CHECK(p.bits(0) == 1.0);
    CHECK(p.bits(1) == 1.0);  // 128 maps to 1
    CHECK(p.bits(2) == 0.0);  // 127 maps to 0
    CHECK(p.bits(3) == 0.0);

    SUBCASE("all-white image") {
        f.write("P2\n2 2\n255\n255 255 255 255\n");
        auto w = load_pattern(f.path, 2, 2);
        CHECK(w.bits.minCoeff() == 1.0);
    }
    SUBCASE("maxval rescaling") {
        // maxval 15: pixel 8 scales to 8/15*255 = 136 >= 128.
        f.write("P2\n2 2\n15\n15 8 7 0\n");
        auto s = load_pattern(f.path, 2, 2);
        CHECK(s.bits(0) == 1.0);
        CHECK(s.bits(1) == 1.0);
        CHECK(s.bits(2) == 0.0);
    }
    SUBCASE("shape mismatch rejected") {
        f.write("P2\n2 2\n255\n255 0 0 255\n");
        CHECK_THROWS_AS(load_pattern(f.path, 3, 3), std::runtime_error);
    }
}

TEST_CASE("save/load round trip through P5") {
    TempFile f("roundtrip.pgm");
    Eigen::VectorXd bits(6);
    bits << 1, 0, 0, 1, 1, 0;
    save_pattern_pgm(bits, 2, 3, f.path);
    auto back = load_pattern(f.path, 2, 3);
    CHECK((back.bits - bits).cwiseAbs().maxCoeff() == 0.0);

    // Gray value 0.5 rounds to 128, which thresholds to 1.
    Eigen::VectorXd gray = Eigen::VectorXd::Constant(4, 0.5);
    save_pattern_pgm(gray, 2, 2, f.path);
    auto img = load_pgm(f.path);
    CHECK(img.pixels(0, 0) == doctest::Approx(128.0 / 255.0));
    CHECK(load_pattern(f.path, 2, 2).bits(0) == 1.0);

    CHECK_THROWS_AS(save_pattern_pgm(bits, 2, 2, f.path),
                    std::invalid_argument);
}

TEST_CASE("load_pgm normalizes to unit range and skips comments") {
    TempFile f("comment.pgm");
    f.write("P2\n# a comment line\n2 2\n255\n0 51 102 255\n");
    auto img = load_pgm(f.path);
    CHECK(img.pixels(0, 0) == 0.0);
    CHECK(img.pixels(0, 1) == doctest::Approx(0.2));
    CHECK(img.pixels(1, 1) == 1.0);

    CHECK_THROWS_AS(load_pgm("/tmp/simstack_no_such_file.pgm"),
                    std::runtime_error);
    f.write("P3\n2 2\n255\n0 0 0 0\n");
    CHECK_THROWS_AS(load_pgm(f.path), std::runtime_error);
}

TEST_CASE("sobel response on a vertical step") {
    // Left half 0, right half 1: gradient magnitude peaks on the two
    // columns adjacent to the step and vanishes far from it.
    GrayImage img;
    img.pixels = Eigen::MatrixXd::Zero(5, 6);
    img.pixels.rightCols(3).setOnes();
    auto p = edge_detect(img, 0.5);
    for (int r = 0; r < 5; ++r) {
        CHECK(p.bits(r * 6 + 2) == 1.0);
        CHECK(p.bits(r * 6 + 3) == 1.0);
        CHECK(p.bits(r * 6 + 0) == 0.0);
        CHECK(p.bits(r * 6 + 5) == 0.0);
    }

    // Hand-check the raw magnitude at an interior step pixel: gx = 4, gy = 0
    // before normalization, and no other column beats it, so the normalized
    // value there is exactly 1 and survives any threshold below 1.
    auto tight = edge_detect(img, 0.999);
    CHECK(tight.bits(2 * 6 + 2) == 1.0);
}

TEST_CASE("edge_detect invariances and rejections") {
    GrayImage img;
    img.pixels = Eigen::MatrixXd::Zero(6, 6);
    img.pixels.block(2, 2, 2, 2).setOnes();

    // Normalization by the max makes the result invariant to positive
    // affine intensity changes.
    GrayImage scaled;
    scaled.pixels = 0.4 * img.pixels;
    scaled.pixels.array() += 0.1;
    auto a = edge_detect(img, 0.3);
    auto b = edge_detect(scaled, 0.3);
    CHECK((a.bits - b.bits).cwiseAbs().maxCoeff() == 0.0);

    GrayImage flat;
    flat.pixels = Eigen::MatrixXd::Constant(4, 4, 0.7);
    CHECK_THROWS_AS(edge_detect(flat, 0.5), std::runtime_error);

    GrayImage tiny;
    tiny.pixels = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(edge_detect(tiny, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(edge_detect(img, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(edge_detect(img, 1.0), std::invalid_argument);
}

TEST_CASE("glyph generation") {
    for (const char* name : {"cross", "ring", "square", "tee"}) {
        auto p = make_glyph(name, 28, 28);
        CHECK(p.rows == 28);
        CHECK(p.cols == 28);
        CHECK(p.bits.maxCoeff() == 1.0);
        CHECK(p.bits.minCoeff() == 0.0);
        double fill = p.bits.sum() / p.bits.size();
        CHECK(fill > 0.01);
        CHECK(fill < 0.6);
    }

    // A cross covers the full central row and column.
    auto cross = make_glyph("cross", 15, 15);
    for (int c = 0; c < 15; ++c) CHECK(cross.bits(7 * 15 + c) == 1.0);
    for (int r = 0; r < 15; ++r) CHECK(cross.bits(r * 15 + 7) == 1.0);

    // A ring leaves the center and the corners empty.
    auto ring = make_glyph("ring", 28, 28);
    CHECK(ring.bits(13 * 28 + 13) == 0.0);
    CHECK(ring.bits(0) == 0.0);

    CHECK_THROWS_AS(make_glyph("star", 28, 28), std::invalid_argument);
}
