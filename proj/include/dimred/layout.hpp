#pragma once

#include <string>

#include "dimred/embed.hpp"
#include "dimred/knn.hpp"

namespace dimred {

/// Parameters of the decay kernel phi(x) = 1 / (1 + a * x^(2b)).
/// phi(0) = 1 by the functional form; a > 0 and b >= 0.5 keep it strictly
/// decreasing and smooth at the scale of interest.
struct KernelParams {
    double a = 1.0;
    double b = 1.0;
    double min_dist = 0.1;
    double spread = 1.0;
};

/// Least-squares fit of (a, b) so that phi approximates the target curve
/// g(r) = 1 for r <= min_dist, exp(-(r - min_dist)/spread) beyond it,
/// sampled at 300 uniform points on (0, 3*(min_dist + spread)].
KernelParams fit_kernel(double min_dist, double spread);

/// phi(r) = 1 / (1 + a * r^(2b)); strictly decreasing, phi(0) = 1.
double kernel_eval(const KernelParams& params, double r);

struct LayoutParams {
    int n_iters = 128;
    double learning_rate_initial = 1.0;
    int neg_samples_per_point = 5;
    KernelParams kernel;
    Seed seed;
    // All-pairs repulsion instead of negative sampling; exact but O(n^2)
    // per iteration, intended for small-n verification runs.
    bool exact_repulsion = false;
    int n_threads = 0;
    // When > 0, writes the positions every `trajectory_every` iterations to
    // trajectory_dir/layout_iter_<it>.csv.
    int trajectory_every = 0;
    std::string trajectory_dir;
};

/// Force-directed refinement. Per iteration, every point accumulates
/// attraction of magnitude phi(1 / |y_i - y_j|) toward each kNN-edge
/// neighbor and repulsion of magnitude phi(|y_i - y_j|) away from sampled
/// non-neighbors; displacements are scaled by a learning rate that decays
/// linearly to zero and applied synchronously. n_iters = 0 returns the
/// input unchanged. Deterministic for any thread count.
Embedding do_layout(const Embedding& init, const EdgeSet& edges, const LayoutParams& params);

} // namespace dimred
