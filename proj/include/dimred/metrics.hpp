#pragma once

#include <utility>
#include <vector>

#include "dimred/dataset.hpp"
#include "dimred/embed.hpp"
#include "dimred/knn.hpp"

namespace dimred {

/// Per-edge stress lambda(e) = |1 - d_X(e) / d_Y(e)| summarized over the
/// symmetrized kNN edges. sigma is the coefficient of variation of the
/// stress sample: 0 for every similarity transform.
struct StressReport {
    double sigma = 0.0;
    double mean = 0.0;
    double std = 0.0;
    double max = 0.0;
    int n_edges = 0;
    int n_clamped = 0;
};

/// Mean/std of the per-point kNN overlap |N_X(x) ∩ N_Y(f(x))| / k.
struct NeighborhoodReport {
    double mean = 0.0;
    double std = 0.0;
    int k = 0;
};

/// Classifier-accuracy comparison between the original data and its
/// embedding on a shared train/test split. alpha_* are the linear SVM
/// accuracies, alpha_*_knn the kNN-classifier accuracies.
struct ContextReport {
    double alpha_x = 0.0;
    double alpha_y = 0.0;
    double alpha_x_knn = 0.0;
    double alpha_y_knn = 0.0;
    double kappa_svm = 0.0;
    double kappa_knn = 0.0;
    Seed split_seed;
    double test_fraction = 0.3;
    bool clamped = false;
};

StressReport embedding_stress(const PointCloud& cloud, const Embedding& embedding,
                              const KnnGraph& graph);

NeighborhoodReport neighborhood_preservation(const PointCloud& cloud, const Embedding& embedding,
                                             int k);

/// One-vs-rest linear SVMs trained by stochastic subgradient descent on the
/// hinge loss with L2 regularization; features standardized on the train
/// split; bias handled via an augmented constant feature. Returns test
/// accuracy. Deterministic given the seed.
double train_linear_svm(const Matrix& data, const std::vector<int>& labels,
                        const std::vector<int>& train_idx, const std::vector<int>& test_idx,
                        double reg = 1e-4, int epochs = 50, Seed seed = {});

/// Majority vote among the k nearest train points; vote ties broken by the
/// smallest class index. Returns test accuracy.
double knn_classifier_accuracy(const Matrix& data, const std::vector<int>& labels, int k,
                               const std::vector<int>& train_idx, const std::vector<int>& test_idx);

/// kappa_svm = log min{ax/ay, ay/ax} (always <= 0);
/// kappa_knn = log(ay/ax) (signed).
double kappa_svm(double alpha_x, double alpha_y);
double kappa_knn(double alpha_x, double alpha_y);

/// Seed-controlled stratified split: per class, round(test_fraction *
/// count) points go to test (never all of a class). Returns (train, test)
/// index lists.
std::pair<std::vector<int>, std::vector<int>> stratified_split(const std::vector<int>& labels,
                                                               double test_fraction, Seed seed);

/// Trains both classifier families on X and on Y with one shared stratified
/// split so the kappa values measure the embedding, not split noise.
/// Accuracies of exactly 0 are clamped to 1/(2|test|) before the log
/// ratios (reported via `clamped`).
ContextReport context_loss(const PointCloud& x, const Embedding& y, double test_fraction, int k,
                           Seed seed);

} // namespace dimred
