#include "simstack/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace simstack {

namespace {

void check_pattern_not_empty(const TargetPattern& p, bool allow_all_zero,
                             const std::string& what) {
    if (!allow_all_zero && p.bits.maxCoeff() <= 0.0)
        throw std::runtime_error(what + ": all-zero pattern");
}

// Skips whitespace and '#' comment lines in a PGM header.
int next_pgm_token(std::istream& in) {
    while (true) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int v;
    if (!(in >> v)) throw std::runtime_error("pgm: malformed header");
    return v;
}

Eigen::MatrixXd read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("pgm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P2" && magic != "P5")
        throw std::runtime_error("pgm: unsupported magic " + magic);
    int w = next_pgm_token(in);
    int h = next_pgm_token(in);
    int maxval = next_pgm_token(in);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 255)
        throw std::runtime_error("pgm: bad dimensions or maxval");
    Eigen::MatrixXd img(h, w);
    if (magic == "P5") {
        in.get();  // single whitespace after maxval
        std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h);
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size()));
        if (!in) throw std::runtime_error("pgm: truncated pixel data");
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                img(r, c) = buf[static_cast<std::size_t>(r) * w + c];
    } else {
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                int v;
                if (!(in >> v)) throw std::runtime_error("pgm: truncated data");
                img(r, c) = v;
            }
    }
    return img / static_cast<double>(maxval) * 255.0;
}

bool looks_like_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    return in && magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5');
}

}  // namespace

TargetPattern load_pattern(const std::string& path, int rows, int cols,
                           bool allow_all_zero) {
    TargetPattern p;
    p.rows = rows;
    p.cols = cols;
    p.bits.resize(static_cast<Eigen::Index>(rows) * cols);

    if (looks_like_pgm(path)) {
        Eigen::MatrixXd img = read_pgm(path);
        if (img.rows() != rows || img.cols() != cols)
            throw std::runtime_error("load_pattern: shape mismatch in " + path);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                p.bits(static_cast<Eigen::Index>(r) * cols + c) =
                    img(r, c) >= 128.0 ? 1.0 : 0.0;
    } else {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("load_pattern: cannot open " + path);
        for (Eigen::Index i = 0; i < p.bits.size(); ++i) {
            int v;
            if (!(in >> v) || (v != 0 && v != 1))
                throw std::runtime_error("load_pattern: malformed 0/1 grid in " +
                                         path);
            p.bits(i) = v;
        }
        int extra;
        if (in >> extra)
            throw std::runtime_error("load_pattern: shape mismatch in " + path);
    }
    check_pattern_not_empty(p, allow_all_zero, "load_pattern");
    return p;
}

GrayImage load_pgm(const std::string& path) {
    return GrayImage{read_pgm(path) / 255.0};
}

TargetPattern edge_detect(const GrayImage& img, double threshold) {
    const auto& px = img.pixels;
    const int h = static_cast<int>(px.rows());
    const int w = static_cast<int>(px.cols());
    if (h < 3 || w < 3)
        throw std::invalid_argument("edge_detect: image must be at least 3x3");
    if (!(threshold > 0.0) || !(threshold < 1.0))
        throw std::invalid_argument("edge_detect: threshold must be in (0,1)");
    if (px.maxCoeff() == px.minCoeff())
        throw std::runtime_error("edge_detect: constant image has no edges");

    auto at = [&](int r, int c) {
        r = std::clamp(r, 0, h - 1);  // replicate padding
        c = std::clamp(c, 0, w - 1);
        return px(r, c);
    };

    Eigen::MatrixXd mag(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double gx = -at(r - 1, c - 1) + at(r - 1, c + 1)
                        - 2.0 * at(r, c - 1) + 2.0 * at(r, c + 1)
                        - at(r + 1, c - 1) + at(r + 1, c + 1);
            double gy = -at(r - 1, c - 1) - 2.0 * at(r - 1, c) - at(r - 1, c + 1)
                        + at(r + 1, c - 1) + 2.0 * at(r + 1, c) + at(r + 1, c + 1);
            mag(r, c) = std::sqrt(gx * gx + gy * gy);
        }
    }
    double peak = mag.maxCoeff();
    if (!(peak > 0.0))
        throw std::runtime_error("edge_detect: constant image has no edges");

    TargetPattern p;
    p.rows = h;
    p.cols = w;
    p.bits.resize(static_cast<Eigen::Index>(h) * w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            p.bits(static_cast<Eigen::Index>(r) * w + c) =
                mag(r, c) / peak >= threshold ? 1.0 : 0.0;
    return p;
}

void save_pattern_pgm(const Eigen::VectorXd& values, int rows, int cols,
                      const std::string& path) {
    if (static_cast<Eigen::Index>(rows) * cols != values.size())
        throw std::invalid_argument("save_pattern_pgm: shape mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_pattern_pgm: cannot open " + path);
    out << "P5\n" << cols << " " << rows << "\n255\n";
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        double v = std::clamp(values(i), 0.0, 1.0);
        out.put(static_cast<char>(
            static_cast<unsigned char>(std::lround(255.0 * v))));
    }
    if (!out) throw std::runtime_error("save_pattern_pgm: write failed");
}

TargetPattern make_glyph(const std::string& name, int rows, int cols) {
    TargetPattern p;
    p.rows = rows;
    p.cols = cols;
    p.bits = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows) * cols);
    auto set = [&](int r, int c) {
        if (r >= 0 && r < rows && c >= 0 && c < cols)
            p.bits(static_cast<Eigen::Index>(r) * cols + c) = 1.0;
    };
    const int thick = std::max(1, std::min(rows, cols) / 14);
    const int cr = rows / 2;
    const int cc = cols / 2;

    if (name == "cross") {
        for (int t = 0; t < thick; ++t) {
            for (int c = 0; c < cols; ++c) set(cr - thick / 2 + t, c);
            for (int r = 0; r < rows; ++r) set(r, cc - thick / 2 + t);
        }
    } else if (name == "ring") {
        double radius = 0.35 * std::min(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                double dr = r - (rows - 1) / 2.0;
                double dc = c - (cols - 1) / 2.0;
                double dist = std::sqrt(dr * dr + dc * dc);
                if (std::abs(dist - radius) <= std::max(0.75, 0.5 * thick))
                    set(r, c);
            }
    } else if (name == "square") {
        int m = std::max(1, std::min(rows, cols) / 5);
        for (int t = 0; t < thick; ++t) {
            for (int c = m; c < cols - m; ++c) {
                set(m + t, c);
                set(rows - 1 - m - t, c);
            }
            for (int r = m; r < rows - m; ++r) {
                set(r, m + t);
                set(r, cols - 1 - m - t);
            }
        }
    } else if (name == "tee") {
        for (int t = 0; t < thick; ++t) {
            for (int c = cols / 6; c < cols - cols / 6; ++c) set(rows / 6 + t, c);
            for (int r = rows / 6; r < rows - rows / 6; ++r)
                set(r, cc - thick / 2 + t);
        }
    } else {
        throw std::invalid_argument("make_glyph: unknown glyph '" + name + "'");
    }
    check_pattern_not_empty(p, false, "make_glyph");
    return p;
}

}  // namespace simstack
