#include "dimred/embed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dimred/error.hpp"

namespace dimred {

namespace {

// Union-find component count over the directed kNN relation.
int count_components(const KnnGraph& graph) {
    const int n = static_cast<int>(graph.indices.rows());
    std::vector<int> parent(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    };
    int components = n;
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < graph.k; ++t) {
            const int a = find(i);
            const int b = find(graph.indices(i, t));
            if (a != b) {
                parent[static_cast<std::size_t>(a)] = b;
                --components;
            }
        }
    return components;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

const char* embed_method_name(EmbedMethod m) {
    switch (m) {
        case EmbedMethod::random: return "random";
        case EmbedMethod::pca: return "pca";
        case EmbedMethod::spectral: return "spectral";
        case EmbedMethod::layout: return "layout";
    }
    return "unknown";
}

Embedding random_projection(const PointCloud& cloud, int target_dim, Seed seed) {
    const Eigen::Index d = cloud.dim();
    if (target_dim < 1 || target_dim > d)
        throw Error(ErrorCode::invalid_dim,
                    "target_dim must be in [1, " + std::to_string(d) + "]");

    auto rng = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(target_dim)));
    Matrix r(d, target_dim);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < target_dim; ++j) r(i, j) = gauss(rng);

    Embedding out;
    out.coords = cloud.coords() * r;
    out.method = EmbedMethod::random;
    out.source_n = static_cast<int>(cloud.n());
    out.params["target_dim"] = std::to_string(target_dim);
    out.params["seed"] = std::to_string(seed.value);
    return out;
}

std::pair<Embedding, PcaInfo> pca_embedding(const PointCloud& cloud, int target_dim) {
    const Eigen::Index n = cloud.n();
    const Eigen::Index d = cloud.dim();
    if (target_dim < 1 || target_dim > std::min(n, d))
        throw Error(ErrorCode::invalid_dim,
                    "target_dim must be in [1, min(n,d)=" + std::to_string(std::min(n, d)) + "]");

    Eigen::MatrixXd xc = cloud.coords();
    xc.rowwise() -= xc.colwise().mean();
    const double frob2 = xc.squaredNorm();

    Eigen::VectorXd sigma;
    Eigen::MatrixXd projected;
    if (d <= 2000) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(xc, Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success)
            throw Error(ErrorCode::svd_failure, "SVD did not converge");
        sigma = svd.singularValues();
        projected = xc * svd.matrixV().leftCols(target_dim);
    } else {
        // Gram-side spectrum: X Xᵀ shares nonzero singular values with X and
        // n < d here, so the n×n problem is the cheap side.
        Eigen::MatrixXd gram = xc * xc.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        if (eig.info() != Eigen::Success)
            throw Error(ErrorCode::svd_failure, "Gram eigendecomposition did not converge");
        sigma.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double lambda = eig.eigenvalues()(n - 1 - i);
            sigma(i) = std::sqrt(std::max(lambda, 0.0));
        }
        // X Wk = Uk Σk, and the Gram eigenvectors are the left singular
        // vectors, so the projection needs no d-sized factor.
        projected.resize(n, target_dim);
        for (int j = 0; j < target_dim; ++j)
            projected.col(j) = eig.eigenvectors().col(n - 1 - j) * sigma(j);
    }

    PcaInfo info;
    info.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
    info.frobenius_norm = std::sqrt(frob2);
    double retained = 0.0;
    for (int i = 0; i < target_dim && i < static_cast<int>(info.singular_values.size()); ++i)
        retained += info.singular_values[static_cast<std::size_t>(i)] *
                    info.singular_values[static_cast<std::size_t>(i)];
    info.epsilon =
        frob2 > 0.0 ? 1.0 - std::sqrt(std::clamp(retained / frob2, 0.0, 1.0)) : 0.0;

    Embedding out;
    out.coords = projected;
    out.method = EmbedMethod::pca;
    out.source_n = static_cast<int>(n);
    out.params["target_dim"] = std::to_string(target_dim);
    out.params["epsilon"] = format_double(info.epsilon);
    return {std::move(out), std::move(info)};
}

Embedding spectral_embedding(const PointCloud& cloud, const KnnGraph& graph, int target_dim,
                             std::optional<double> kernel_bandwidth) {
    const Eigen::Index n = cloud.n();
    if (graph.indices.rows() != n)
        throw Error(ErrorCode::dimension_mismatch, "graph and cloud row counts differ");
    if (target_dim < 1 || target_dim > n - 1)
        throw Error(ErrorCode::invalid_dim, "target_dim must be in [1, n-1]");
    if (kernel_bandwidth && !(*kernel_bandwidth > 0.0))
        throw Error(ErrorCode::invalid_param, "kernel_bandwidth must be > 0");

    const int components = count_components(graph);
    if (components + target_dim > n)
        throw Error(ErrorCode::invalid_dim,
                    "graph has " + std::to_string(components) +
                        " components; not enough nonzero eigenvalues for target_dim");

    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int t = 0; t < graph.k; ++t) {
            const Eigen::Index j = graph.indices(i, t);
            const double dist = graph.distances(i, t);
            const double w =
                kernel_bandwidth
                    ? std::exp(-(dist * dist) / (*kernel_bandwidth * *kernel_bandwidth))
                    : 1.0;
            adj(i, j) = w;
            adj(j, i) = w;
        }
    }
    Eigen::VectorXd deg = adj.rowwise().sum();
    Eigen::VectorXd inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i)
        inv_sqrt(i) = deg(i) > 0.0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
    Eigen::MatrixXd lap = -(inv_sqrt.asDiagonal() * adj * inv_sqrt.asDiagonal());
    lap.diagonal().array() += 1.0;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap);
    if (eig.info() != Eigen::Success)
        throw Error(ErrorCode::eigen_failure, "Laplacian eigendecomposition did not converge");

    // The Laplacian has exactly one zero eigenvalue per connected component;
    // skipping by count avoids thresholding near-zero eigenvalues.
    Matrix coords(n, target_dim);
    for (int j = 0; j < target_dim; ++j) {
        Eigen::VectorXd v = eig.eigenvectors().col(components + j);
        Eigen::Index arg_max = 0;
        v.cwiseAbs().maxCoeff(&arg_max);
        if (v(arg_max) < 0.0) v = -v;
        coords.col(j) = v;
    }

    if (components > 1)
        std::cerr << "warning: kNN graph has " << components
                  << " connected components; embedding them jointly\n";

    Embedding out;
    out.coords = std::move(coords);
    out.method = EmbedMethod::spectral;
    out.source_n = static_cast<int>(n);
    out.params["target_dim"] = std::to_string(target_dim);
    out.params["n_components"] = std::to_string(components);
    out.params["bandwidth"] =
        kernel_bandwidth ? format_double(*kernel_bandwidth) : std::string("none");
    return out;
}

DistortionStats distortion_stats(const PointCloud& cloud, const Embedding& embedding, int n_pairs,
                                 Seed seed) {
    const Eigen::Index n = cloud.n();
    if (embedding.coords.rows() != n)
        throw Error(ErrorCode::dimension_mismatch, "embedding and cloud row counts differ");
    if (n < 2) throw Error(ErrorCode::empty_dataset, "need at least 2 points");
    if (n_pairs < 1) throw Error(ErrorCode::invalid_param, "n_pairs must be >= 1");

    auto rng = make_engine(seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    std::vector<double> ratios;
    ratios.reserve(static_cast<std::size_t>(n_pairs));
    long attempts = 0;
    const long max_attempts = 1000L * n_pairs;
    while (static_cast<int>(ratios.size()) < n_pairs) {
        if (++attempts > max_attempts)
            throw Error(ErrorCode::all_pairs_degenerate,
                        "could not sample pairs with distinct source points");
        const Eigen::Index i = pick(rng);
        const Eigen::Index j = pick(rng);
        if (i == j) continue;
        const double src = (cloud.coords().row(i) - cloud.coords().row(j)).norm();
        if (src == 0.0) continue;
        const double dst = (embedding.coords.row(i) - embedding.coords.row(j)).norm();
        ratios.push_back(dst / src);
    }

    DistortionStats stats;
    stats.n_pairs = n_pairs;
    stats.min = *std::min_element(ratios.begin(), ratios.end());
    stats.max = *std::max_element(ratios.begin(), ratios.end());
    double sum = 0.0;
    for (double r : ratios) sum += r;
    stats.mean = sum / static_cast<double>(n_pairs);
    double var = 0.0;
    for (double r : ratios) var += (r - stats.mean) * (r - stats.mean);
    stats.std = std::sqrt(var / static_cast<double>(n_pairs));
    return stats;
}

void save_embedding_csv(const Embedding& embedding, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
    for (Eigen::Index j = 0; j < embedding.dim(); ++j) {
        if (j > 0) out << ',';
        out << 'y' << j;
    }
    out << '\n';
    char buf[64];
    for (Eigen::Index i = 0; i < embedding.n(); ++i) {
        for (Eigen::Index j = 0; j < embedding.dim(); ++j) {
            if (j > 0) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", embedding.coords(i, j));
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::io_error, "failed while writing " + path);
}

} // namespace dimred
