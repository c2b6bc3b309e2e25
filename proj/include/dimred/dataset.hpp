#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimred/error.hpp"
#include "dimred/rng.hpp"

namespace dimred {

/// Row-major n×d matrix; rows are points.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// An n×d set of points with optional non-negative integer labels.
/// Immutable after construction; the constructor validates finiteness and
/// label length.
class PointCloud {
public:
    PointCloud(Matrix coords, std::optional<std::vector<int>> labels = std::nullopt,
               std::string name = "");

    const Matrix& coords() const { return coords_; }
    const std::optional<std::vector<int>>& labels() const { return labels_; }
    const std::string& name() const { return name_; }
    Eigen::Index n() const { return coords_.rows(); }
    Eigen::Index dim() const { return coords_.cols(); }

private:
    Matrix coords_;
    std::optional<std::vector<int>> labels_;
    std::string name_;
};

/// Loads a delimiter-separated file into a PointCloud. A single header row
/// is auto-detected (non-numeric first row). `label_column`, when set, names
/// the header column holding integer labels; with a headerless file it may
/// be a 0-based column index.
PointCloud load_csv(const std::string& path, const std::optional<std::string>& label_column = std::nullopt,
                    char delimiter = ',');

/// Writes a PointCloud as CSV with a header row (x0..x{d-1}[,label]) at full
/// precision (17 significant digits).
void save_csv(const PointCloud& cloud, const std::string& path, char delimiter = ',');

/// Column-wise z-scoring with the population standard deviation. Columns
/// with zero variance are mean-centered only. Labels pass through.
PointCloud standardize(const PointCloud& cloud);

/// Isotropic Gaussian clusters around centers drawn uniformly in
/// [-box_scale, box_scale]^dim. Point p belongs to blob p % n_blobs, so
/// cluster sizes differ by at most one.
PointCloud generate_blobs(int n_points, int n_blobs, int dim, double blob_std, double box_scale,
                          Seed seed);

/// 2D points uniform by area in the disk of the given radius. Unlabeled.
PointCloud generate_disk_uniform(int n_points, double radius, Seed seed);

/// Two interleaving half-circles (upper arc centered at the origin, lower
/// arc offset by (1, -0.5)) with per-coordinate Gaussian noise. Labels 0/1
/// by arc; arc 0 holds ceil(n/2) points.
PointCloud generate_half_moons(int n_points, double noise_std, Seed seed);

} // namespace dimred
