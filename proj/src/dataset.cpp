#include "dimred/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace dimred {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == delimiter) {
            cells.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(trim(cur));
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, out, std::chars_format::general);
    return ec == std::errc() && ptr == last;
}

bool parse_int(const std::string& cell, long& out) {
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

} // namespace

PointCloud::PointCloud(Matrix coords, std::optional<std::vector<int>> labels, std::string name)
    : coords_(std::move(coords)), labels_(std::move(labels)), name_(std::move(name)) {
    if (coords_.rows() < 1) throw Error(ErrorCode::empty_dataset, "point cloud has no rows");
    if (coords_.cols() < 1) throw Error(ErrorCode::empty_dataset, "point cloud has no columns");
    if (!coords_.allFinite())
        throw Error(ErrorCode::non_finite_value, "point cloud contains a non-finite coordinate");
    if (labels_ && static_cast<Eigen::Index>(labels_->size()) != coords_.rows())
        throw Error(ErrorCode::invalid_param, "label count does not match row count");
}

PointCloud load_csv(const std::string& path, const std::optional<std::string>& label_column,
                    char delimiter) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::missing_file, "cannot open " + path);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        rows.push_back(split_line(line, delimiter));
    }
    if (rows.empty()) throw Error(ErrorCode::empty_dataset, path + " has no rows");

    // A row is a header iff some cell does not parse as a real number.
    bool has_header = false;
    for (const std::string& cell : rows.front()) {
        double v;
        if (!parse_double(cell, v)) {
            has_header = true;
            break;
        }
    }
    std::vector<std::string> header;
    std::size_t first_data = 0;
    if (has_header) {
        header = rows.front();
        first_data = 1;
    }
    if (first_data >= rows.size()) throw Error(ErrorCode::empty_dataset, path + " has no data rows");

    const std::size_t n_cols = rows[first_data].size();
    long label_idx = -1;
    if (label_column) {
        if (has_header) {
            auto it = std::find(header.begin(), header.end(), *label_column);
            if (it == header.end())
                throw Error(ErrorCode::invalid_param, "no column named '" + *label_column + "'");
            label_idx = static_cast<long>(it - header.begin());
        } else {
            if (!parse_int(*label_column, label_idx) || label_idx < 0 ||
                label_idx >= static_cast<long>(n_cols))
                throw Error(ErrorCode::invalid_param,
                            "label column '" + *label_column + "' is not a valid column index");
        }
    }
    if (has_header && header.size() != n_cols)
        throw Error(ErrorCode::parse_error, "header and first row disagree on column count");
    const std::size_t coord_cols = n_cols - (label_idx >= 0 ? 1 : 0);
    if (coord_cols == 0) throw Error(ErrorCode::empty_dataset, path + " has no coordinate columns");

    const std::size_t n = rows.size() - first_data;
    Matrix coords(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(coord_cols));
    std::vector<int> labels;
    if (label_idx >= 0) labels.reserve(n);

    for (std::size_t r = 0; r < n; ++r) {
        const auto& cells = rows[first_data + r];
        if (cells.size() != n_cols)
            throw Error(ErrorCode::parse_error, "row " + std::to_string(r) + " has " +
                                                    std::to_string(cells.size()) +
                                                    " cells, expected " + std::to_string(n_cols));
        Eigen::Index out_col = 0;
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (static_cast<long>(c) == label_idx) {
                long lbl;
                if (!parse_int(cells[c], lbl))
                    throw Error(ErrorCode::parse_error,
                                "cell (" + std::to_string(r) + "," + std::to_string(c) +
                                    ") is not an integer label: '" + cells[c] + "'");
                labels.push_back(static_cast<int>(lbl));
                continue;
            }
            double v;
            if (!parse_double(cells[c], v))
                throw Error(ErrorCode::parse_error, "cell (" + std::to_string(r) + "," +
                                                        std::to_string(c) + ") is not a number: '" +
                                                        cells[c] + "'");
            if (!std::isfinite(v))
                throw Error(ErrorCode::non_finite_value, "cell (" + std::to_string(r) + "," +
                                                             std::to_string(c) + ") is not finite");
            coords(static_cast<Eigen::Index>(r), out_col++) = v;
        }
    }

    std::optional<std::vector<int>> opt_labels;
    if (label_idx >= 0) opt_labels = std::move(labels);
    return PointCloud(std::move(coords), std::move(opt_labels), path);
}

void save_csv(const PointCloud& cloud, const std::string& path, char delimiter) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
    const bool with_labels = cloud.labels().has_value();
    for (Eigen::Index j = 0; j < cloud.dim(); ++j) {
        if (j > 0) out << delimiter;
        out << 'x' << j;
    }
    if (with_labels) out << delimiter << "label";
    out << '\n';
    char buf[64];
    for (Eigen::Index i = 0; i < cloud.n(); ++i) {
        for (Eigen::Index j = 0; j < cloud.dim(); ++j) {
            if (j > 0) out << delimiter;
            std::snprintf(buf, sizeof(buf), "%.17g", cloud.coords()(i, j));
            out << buf;
        }
        if (with_labels) out << delimiter << (*cloud.labels())[static_cast<std::size_t>(i)];
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::io_error, "failed while writing " + path);
}

PointCloud standardize(const PointCloud& cloud) {
    if (cloud.n() < 2) throw Error(ErrorCode::empty_dataset, "standardize needs at least 2 points");
    Matrix out = cloud.coords();
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        const double mean = out.col(j).mean();
        out.col(j).array() -= mean;
        const double var = out.col(j).squaredNorm() / static_cast<double>(out.rows());
        const double sd = std::sqrt(var);
        if (sd > 0.0) out.col(j) /= sd;
    }
    return PointCloud(std::move(out), cloud.labels(), cloud.name());
}

PointCloud generate_blobs(int n_points, int n_blobs, int dim, double blob_std, double box_scale,
                          Seed seed) {
    if (n_blobs < 1 || n_points < n_blobs)
        throw Error(ErrorCode::invalid_param, "need n_points >= n_blobs >= 1");
    if (dim < 1) throw Error(ErrorCode::invalid_param, "dim must be >= 1");
    if (!(blob_std > 0.0)) throw Error(ErrorCode::invalid_param, "blob_std must be > 0");
    if (!(box_scale >= 0.0)) throw Error(ErrorCode::invalid_param, "box_scale must be >= 0");

    auto rng = make_engine(seed);
    std::uniform_real_distribution<double> box(-box_scale, box_scale);
    Matrix centers(n_blobs, dim);
    for (int c = 0; c < n_blobs; ++c)
        for (int j = 0; j < dim; ++j) centers(c, j) = box(rng);

    std::normal_distribution<double> gauss(0.0, blob_std);
    Matrix coords(n_points, dim);
    std::vector<int> labels(static_cast<std::size_t>(n_points));
    for (int p = 0; p < n_points; ++p) {
        const int c = p % n_blobs;
        labels[static_cast<std::size_t>(p)] = c;
        for (int j = 0; j < dim; ++j) coords(p, j) = centers(c, j) + gauss(rng);
    }
    return PointCloud(std::move(coords), std::move(labels), "blobs");
}

PointCloud generate_disk_uniform(int n_points, double radius, Seed seed) {
    if (n_points < 1) throw Error(ErrorCode::invalid_param, "n_points must be >= 1");
    if (!(radius > 0.0)) throw Error(ErrorCode::invalid_param, "radius must be > 0");

    auto rng = make_engine(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    Matrix coords(n_points, 2);
    for (int p = 0; p < n_points; ++p) {
        const double r = radius * std::sqrt(unit(rng));
        const double t = angle(rng);
        coords(p, 0) = r * std::cos(t);
        coords(p, 1) = r * std::sin(t);
    }
    return PointCloud(std::move(coords), std::nullopt, "disk");
}

PointCloud generate_half_moons(int n_points, double noise_std, Seed seed) {
    if (n_points < 2) throw Error(ErrorCode::invalid_param, "n_points must be >= 2");
    if (!(noise_std >= 0.0)) throw Error(ErrorCode::invalid_param, "noise_std must be >= 0");

    const int n0 = (n_points + 1) / 2;
    const int n1 = n_points - n0;
    auto rng = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, noise_std > 0.0 ? noise_std : 1.0);

    Matrix coords(n_points, 2);
    std::vector<int> labels(static_cast<std::size_t>(n_points));
    auto arc_param = [](int i, int count) {
        return count > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1)
                         : 0.0;
    };
    for (int i = 0; i < n0; ++i) {
        const double t = arc_param(i, n0);
        coords(i, 0) = std::cos(t);
        coords(i, 1) = std::sin(t);
        labels[static_cast<std::size_t>(i)] = 0;
    }
    for (int i = 0; i < n1; ++i) {
        const double t = arc_param(i, n1);
        coords(n0 + i, 0) = 1.0 - std::cos(t);
        coords(n0 + i, 1) = 0.5 - std::sin(t);
        labels[static_cast<std::size_t>(n0 + i)] = 1;
    }
    if (noise_std > 0.0) {
        for (int i = 0; i < n_points; ++i) {
            coords(i, 0) += gauss(rng);
            coords(i, 1) += gauss(rng);
        }
    }
    return PointCloud(std::move(coords), std::move(labels), "half_moons");
}

} // namespace dimred
