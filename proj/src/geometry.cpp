#include "simstack/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace simstack {

namespace {

int integer_sqrt(int n) {
    int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    while (s * s > n) --s;
    while ((s + 1) * (s + 1) <= n) ++s;
    return s;
}

// Centered square grid, row-major: index i -> (row, col), x along columns,
// y along rows (top row has the most negative y offset mirrored to +y so
// that pattern row 0 renders at the top of the image).
std::vector<Point3> centered_grid(int rows, int cols, double pitch, double z) {
    std::vector<Point3> pts;
    pts.reserve(static_cast<std::size_t>(rows) * cols);
    const double x0 = -0.5 * (cols - 1) * pitch;
    const double y0 = 0.5 * (rows - 1) * pitch;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            pts.push_back({x0 + c * pitch, y0 - r * pitch, z});
        }
    }
    return pts;
}

}  // namespace

int SimGeometry::side_length() const { return integer_sqrt(atoms_per_layer); }

double SimGeometry::layer_spacing() const {
    return thickness / (num_layers - 1);
}

double SimGeometry::output_plane_z() const {
    return (num_layers - 1) * layer_spacing();
}

void SimGeometry::validate() const {
    if (num_layers < 2)
        throw std::invalid_argument("geometry: num_layers must be >= 2");
    int s = side_length();
    if (atoms_per_layer < 1 || s * s != atoms_per_layer)
        throw std::invalid_argument(
            "geometry: atoms_per_layer must be a perfect square, got " +
            std::to_string(atoms_per_layer));
    if (!(thickness > 0.0) || !(atom_area > 0.0) || !(atom_pitch > 0.0) ||
        !(feed_distance > 0.0))
        throw std::invalid_argument("geometry: all lengths must be positive");
}

void ReceiverGeometry::validate() const {
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("receiver: rows and cols must be >= 1");
    if (!(antenna_spacing > 0.0))
        throw std::invalid_argument("receiver: antenna_spacing must be > 0");
    if (!(link_distance_m > 0.0) || !(wavelength_m > 0.0))
        throw std::invalid_argument(
            "receiver: link_distance_m and wavelength_m must be > 0");
}

std::vector<Point3> layer_coordinates(const SimGeometry& geom, int layer) {
    if (layer < 1 || layer > geom.num_layers)
        throw std::out_of_range("layer_coordinates: layer out of range");
    int side = geom.side_length();
    double z = (layer - 1) * geom.layer_spacing();
    return centered_grid(side, side, geom.atom_pitch, z);
}

std::vector<Point3> receiver_coordinates(const ReceiverGeometry& rx,
                                         const SimGeometry& geom) {
    double z = geom.output_plane_z() + rx.link_distance_wl();
    return centered_grid(rx.rows, rx.cols, rx.antenna_spacing, z);
}

Eigen::MatrixXd pairwise_distances(const std::vector<Point3>& a,
                                   const std::vector<Point3>& b) {
    Eigen::MatrixXd d(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            double dx = b[j].x - a[i].x;
            double dy = b[j].y - a[i].y;
            double dz = b[j].z - a[i].z;
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::sqrt(dx * dx + dy * dy + dz * dz);
        }
    }
    return d;
}

}  // namespace simstack
