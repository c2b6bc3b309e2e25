#include "dimred/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "dimred/error.hpp"

namespace dimred {

namespace {

constexpr double kEmbeddedDistanceFloor = 1e-12;

struct ColumnScaler {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd inv_std;
};

// Train-split standardization; zero-variance columns are centered only.
ColumnScaler fit_scaler(const Matrix& data, const std::vector<int>& rows) {
    const Eigen::Index d = data.cols();
    ColumnScaler s;
    s.mean = Eigen::RowVectorXd::Zero(d);
    s.inv_std = Eigen::RowVectorXd::Ones(d);
    for (int r : rows) s.mean += data.row(r);
    s.mean /= static_cast<double>(rows.size());
    Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(d);
    for (int r : rows) {
        const Eigen::RowVectorXd c = data.row(r) - s.mean;
        var += c.cwiseProduct(c);
    }
    var /= static_cast<double>(rows.size());
    for (Eigen::Index j = 0; j < d; ++j)
        s.inv_std(j) = var(j) > 0.0 ? 1.0 / std::sqrt(var(j)) : 1.0;
    return s;
}

std::vector<int> sorted_classes(const std::vector<int>& labels, const std::vector<int>& rows) {
    std::set<int> classes;
    for (int r : rows) classes.insert(labels[static_cast<std::size_t>(r)]);
    return {classes.begin(), classes.end()};
}

} // namespace

StressReport embedding_stress(const PointCloud& cloud, const Embedding& embedding,
                              const KnnGraph& graph) {
    if (embedding.coords.rows() != cloud.n() || graph.indices.rows() != cloud.n())
        throw Error(ErrorCode::dimension_mismatch, "cloud, embedding, and graph row counts differ");

    const EdgeSet edges = symmetrize(graph);
    StressReport report;
    report.n_edges = static_cast<int>(edges.edges.size());

    std::vector<double> stresses;
    stresses.reserve(edges.edges.size());
    for (const auto& [i, j] : edges.edges) {
        const double dx = (cloud.coords().row(i) - cloud.coords().row(j)).norm();
        double dy = (embedding.coords.row(i) - embedding.coords.row(j)).norm();
        if (dy < kEmbeddedDistanceFloor) {
            dy = kEmbeddedDistanceFloor;
            ++report.n_clamped;
        }
        stresses.push_back(std::abs(1.0 - dx / dy));
    }

    double sum = 0.0;
    for (double s : stresses) {
        sum += s;
        report.max = std::max(report.max, s);
    }
    report.mean = sum / static_cast<double>(stresses.size());
    double var = 0.0;
    for (double s : stresses) var += (s - report.mean) * (s - report.mean);
    report.std = std::sqrt(var / static_cast<double>(stresses.size()));
    report.sigma = report.mean > 0.0 ? report.std / report.mean : 0.0;
    return report;
}

NeighborhoodReport neighborhood_preservation(const PointCloud& cloud, const Embedding& embedding,
                                             int k) {
    if (embedding.coords.rows() != cloud.n())
        throw Error(ErrorCode::dimension_mismatch, "cloud and embedding row counts differ");
    const KnnGraph gx = build_knn(cloud, k);
    const KnnGraph gy = build_knn(PointCloud(embedding.coords), k);

    const Eigen::Index n = cloud.n();
    std::vector<double> scores(static_cast<std::size_t>(n));
    std::vector<int> nx(static_cast<std::size_t>(k)), ny(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int t = 0; t < k; ++t) {
            nx[static_cast<std::size_t>(t)] = gx.indices(i, t);
            ny[static_cast<std::size_t>(t)] = gy.indices(i, t);
        }
        std::sort(nx.begin(), nx.end());
        std::sort(ny.begin(), ny.end());
        std::vector<int> common;
        std::set_intersection(nx.begin(), nx.end(), ny.begin(), ny.end(),
                              std::back_inserter(common));
        scores[static_cast<std::size_t>(i)] =
            static_cast<double>(common.size()) / static_cast<double>(k);
    }

    NeighborhoodReport report;
    report.k = k;
    double sum = 0.0;
    for (double s : scores) sum += s;
    report.mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (double s : scores) var += (s - report.mean) * (s - report.mean);
    report.std = std::sqrt(var / static_cast<double>(n));
    return report;
}

double train_linear_svm(const Matrix& data, const std::vector<int>& labels,
                        const std::vector<int>& train_idx, const std::vector<int>& test_idx,
                        double reg, int epochs, Seed seed) {
    if (train_idx.empty() || test_idx.empty())
        throw Error(ErrorCode::invalid_param, "train and test splits must be non-empty");
    if (!(reg > 0.0)) throw Error(ErrorCode::invalid_param, "reg must be > 0");
    const std::vector<int> classes = sorted_classes(labels, train_idx);
    if (classes.size() < 2)
        throw Error(ErrorCode::single_class, "train split contains a single class");

    const ColumnScaler scaler = fit_scaler(data, train_idx);
    const Eigen::Index d = data.cols();
    auto scaled = [&](int row) {
        Eigen::RowVectorXd v(d + 1);
        v.head(d) = (data.row(row) - scaler.mean).cwiseProduct(scaler.inv_std);
        v(d) = 1.0;
        return v;
    };

    // Pegasos-style primal subgradient descent, one weight vector per class,
    // each class on its own derived RNG stream for determinism.
    std::vector<Eigen::RowVectorXd> weights;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(d + 1);
        auto rng = make_engine(derive_seed(seed.value, static_cast<std::uint64_t>(c)));
        std::vector<int> order = train_idx;
        long t = 0;
        for (int epoch = 0; epoch < epochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);
            for (int row : order) {
                ++t;
                const double eta = 1.0 / (reg * static_cast<double>(t));
                const double y =
                    labels[static_cast<std::size_t>(row)] == classes[c] ? 1.0 : -1.0;
                const Eigen::RowVectorXd x = scaled(row);
                const double margin = y * w.dot(x);
                w *= (1.0 - eta * reg);
                if (margin < 1.0) w += (eta * y) * x;
            }
        }
        weights.push_back(std::move(w));
    }

    int correct = 0;
    for (int row : test_idx) {
        const Eigen::RowVectorXd x = scaled(row);
        double best_score = -std::numeric_limits<double>::infinity();
        int best_class = classes.front();
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const double score = weights[c].dot(x);
            if (score > best_score) {
                best_score = score;
                best_class = classes[c];
            }
        }
        if (best_class == labels[static_cast<std::size_t>(row)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test_idx.size());
}

double knn_classifier_accuracy(const Matrix& data, const std::vector<int>& labels, int k,
                               const std::vector<int>& train_idx, const std::vector<int>& test_idx) {
    if (train_idx.empty() || test_idx.empty())
        throw Error(ErrorCode::invalid_param, "train and test splits must be non-empty");
    if (k < 1 || k > static_cast<int>(train_idx.size()))
        throw Error(ErrorCode::k_too_large, "k must be in [1, |train|]");

    int correct = 0;
    std::vector<std::pair<double, int>> cand(train_idx.size());
    for (int row : test_idx) {
        for (std::size_t t = 0; t < train_idx.size(); ++t) {
            const int tr = train_idx[t];
            cand[t] = {(data.row(row) - data.row(tr)).squaredNorm(), tr};
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        std::map<int, int> votes;
        for (int t = 0; t < k; ++t) ++votes[labels[static_cast<std::size_t>(cand[static_cast<std::size_t>(t)].second)]];
        int best_class = votes.begin()->first;
        int best_count = votes.begin()->second;
        for (const auto& [cls, count] : votes) {
            if (count > best_count) {
                best_class = cls;
                best_count = count;
            }
        }
        if (best_class == labels[static_cast<std::size_t>(row)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test_idx.size());
}

double kappa_svm(double alpha_x, double alpha_y) {
    return std::log(std::min(alpha_x / alpha_y, alpha_y / alpha_x));
}

double kappa_knn(double alpha_x, double alpha_y) { return std::log(alpha_y / alpha_x); }

std::pair<std::vector<int>, std::vector<int>> stratified_split(const std::vector<int>& labels,
                                                               double test_fraction, Seed seed) {
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
        throw Error(ErrorCode::invalid_param, "test_fraction must be in (0, 1)");
    std::map<int, std::vector<int>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_class[labels[i]].push_back(static_cast<int>(i));

    std::vector<int> train, test;
    for (auto& [cls, rows] : by_class) {
        auto rng = make_engine(derive_seed(seed.value, static_cast<std::uint64_t>(
                                                           static_cast<std::int64_t>(cls))));
        std::shuffle(rows.begin(), rows.end(), rng);
        const int count = static_cast<int>(rows.size());
        int n_test = static_cast<int>(std::lround(test_fraction * count));
        n_test = std::min(n_test, count - 1);
        n_test = std::max(n_test, count >= 2 ? 1 : 0);
        for (int i = 0; i < count; ++i)
            (i < n_test ? test : train).push_back(rows[static_cast<std::size_t>(i)]);
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    if (test.empty()) throw Error(ErrorCode::invalid_param, "test split is empty");
    return {std::move(train), std::move(test)};
}

ContextReport context_loss(const PointCloud& x, const Embedding& y, double test_fraction, int k,
                           Seed seed) {
    if (!x.labels()) throw Error(ErrorCode::unlabeled_data, "context loss needs labeled data");
    if (y.coords.rows() != x.n())
        throw Error(ErrorCode::dimension_mismatch, "cloud and embedding row counts differ");

    const std::vector<int>& labels = *x.labels();
    auto [train, test] = stratified_split(labels, test_fraction, seed);

    ContextReport report;
    report.split_seed = seed;
    report.test_fraction = test_fraction;

    const Seed svm_seed{derive_seed(seed.value, 0x53564dULL)};
    report.alpha_x = train_linear_svm(x.coords(), labels, train, test, 1e-4, 50, svm_seed);
    report.alpha_y = train_linear_svm(y.coords, labels, train, test, 1e-4, 50, svm_seed);
    report.alpha_x_knn = knn_classifier_accuracy(x.coords(), labels, k, train, test);
    report.alpha_y_knn = knn_classifier_accuracy(y.coords, labels, k, train, test);

    const double floor = 1.0 / (2.0 * static_cast<double>(test.size()));
    auto clamp_zero = [&](double a) {
        if (a == 0.0) {
            report.clamped = true;
            return floor;
        }
        return a;
    };
    report.kappa_svm = kappa_svm(clamp_zero(report.alpha_x), clamp_zero(report.alpha_y));
    report.kappa_knn = kappa_knn(clamp_zero(report.alpha_x_knn), clamp_zero(report.alpha_y_knn));
    return report;
}

} // namespace dimred
