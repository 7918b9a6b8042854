#pragma once

#include <string>
#include <Eigen/Core>

namespace simstack {

// Binary target pattern, the visual semantic carried by the energy image.
// bits holds 0/1 values, row-major over (rows, cols).
struct TargetPattern {
    Eigen::VectorXd bits;
    int rows = 0;
    int cols = 0;
};

struct GrayImage {
    Eigen::MatrixXd pixels;  // values in [0, 1]
};

// Parses either a plain-text 0/1 grid or a PGM (P2/P5) thresholded at
// mid-gray (>= 128 -> 1). Rejects all-zero patterns unless allow_all_zero.
TargetPattern load_pattern(const std::string& path, int rows, int cols,
                           bool allow_all_zero = false);

GrayImage load_pgm(const std::string& path);

// Sobel gradient magnitude with replicate padding, normalized by its max,
// then thresholded (>= threshold -> 1). Constant images are rejected.
TargetPattern edge_detect(const GrayImage& img, double threshold);

// 8-bit PGM (P5), pixel = round(255 * v), row-major.
void save_pattern_pgm(const Eigen::VectorXd& values, int rows, int cols,
                      const std::string& path);

// Built-in geometric glyphs: "cross", "ring", "square", "tee".
TargetPattern make_glyph(const std::string& name, int rows, int cols);

}  // namespace simstack
