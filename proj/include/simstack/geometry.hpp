#pragma once

#include <vector>
#include <Eigen/Core>

namespace simstack {

// All lengths are wavelength-normalized (lambda = 1) unless a field name
// says otherwise. Metric quantities are converted once at config parse time.

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// Stacked metasurface layout: L square layers of N meta-atoms each,
// uniformly spaced over the stack thickness, fed by a single antenna on axis.
struct SimGeometry {
    int num_layers = 2;        // L
    int atoms_per_layer = 4;   // N, must be a perfect square
    double thickness = 10.0;   // D
    double atom_area = 1.0;    // S_a
    double atom_pitch = 1.0;   // r
    double feed_distance = 1.0; // d_ts, antenna to first layer

    int side_length() const;                  // sqrt(N)
    double layer_spacing() const;             // d_s = D / (L - 1)
    double output_plane_z() const;            // z of the last layer
    void validate() const;                    // throws std::invalid_argument
};

// Uniform planar receive array, coaxial with the stack.
struct ReceiverGeometry {
    int rows = 28;                 // M_row
    int cols = 28;                 // M_col
    double antenna_spacing = 0.5;  // d_r [lambda]
    double link_distance_m = 5.0;  // d, output layer to array [meters]
    double wavelength_m = 0.010706874; // lambda [meters]

    int num_antennas() const { return rows * cols; }
    double link_distance_wl() const { return link_distance_m / wavelength_m; }
    void validate() const;
};

// Meta-atom positions of one layer (1-based layer index), centered square
// grid in the plane z = (layer-1) * d_s. The feed antenna is at (0,0,-d_ts).
std::vector<Point3> layer_coordinates(const SimGeometry& geom, int layer);

// Antenna positions: centered rows x cols grid in the plane
// z = output_plane_z + link_distance, row-major order. The same order maps
// antenna index m to pattern pixel (row, col).
std::vector<Point3> receiver_coordinates(const ReceiverGeometry& rx,
                                         const SimGeometry& geom);

// Entry (i, j) = |b[j] - a[i]|.
Eigen::MatrixXd pairwise_distances(const std::vector<Point3>& a,
                                   const std::vector<Point3>& b);

}  // namespace simstack
