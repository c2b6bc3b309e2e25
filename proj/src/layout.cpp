#include "dimred/layout.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dimred/error.hpp"
#include "dimred/parallel.hpp"

namespace dimred {

namespace {

constexpr double kDistanceFloor = 1e-8;

double target_curve(double r, double min_dist, double spread) {
    return r <= min_dist ? 1.0 : std::exp(-(r - min_dist) / spread);
}

double phi(double a, double b, double r) { return 1.0 / (1.0 + a * std::pow(r, 2.0 * b)); }

double fit_rms(const std::vector<double>& r, const std::vector<double>& g, double a, double b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double e = phi(a, b, r[i]) - g[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(r.size()));
}

} // namespace

KernelParams fit_kernel(double min_dist, double spread) {
    if (!(min_dist > 0.0) || !(spread > 0.0))
        throw Error(ErrorCode::invalid_param, "min_dist and spread must be > 0");

    const int n_samples = 300;
    const double r_max = 3.0 * (min_dist + spread);
    std::vector<double> r(n_samples), g(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        r[static_cast<std::size_t>(i)] =
            r_max * static_cast<double>(i + 1) / static_cast<double>(n_samples);
        g[static_cast<std::size_t>(i)] = target_curve(r[static_cast<std::size_t>(i)], min_dist, spread);
    }

    // Levenberg-Marquardt on (a, b); the problem is tiny (2 parameters, 300
    // residuals) and well-conditioned for any positive (min_dist, spread).
    double a = 1.0;
    double b = 1.0;
    double damping = 1e-3;
    double best = fit_rms(r, g, a, b);
    for (int iter = 0; iter < 200; ++iter) {
        double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jte0 = 0.0, jte1 = 0.0;
        for (int i = 0; i < n_samples; ++i) {
            const double ri = r[static_cast<std::size_t>(i)];
            const double pw = std::pow(ri, 2.0 * b);
            const double denom = 1.0 + a * pw;
            const double f = 1.0 / denom;
            const double e = f - g[static_cast<std::size_t>(i)];
            const double da = -pw / (denom * denom);
            const double db = -a * pw * 2.0 * std::log(ri) / (denom * denom);
            jtj00 += da * da;
            jtj01 += da * db;
            jtj11 += db * db;
            jte0 += da * e;
            jte1 += db * e;
        }
        const double m00 = jtj00 * (1.0 + damping);
        const double m11 = jtj11 * (1.0 + damping);
        const double det = m00 * m11 - jtj01 * jtj01;
        if (det == 0.0) break;
        const double step_a = (-jte0 * m11 + jte1 * jtj01) / det;
        const double step_b = (-jte1 * m00 + jte0 * jtj01) / det;
        const double trial_a = std::max(a + step_a, 1e-8);
        const double trial_b = std::max(b + step_b, 0.5);
        const double trial = fit_rms(r, g, trial_a, trial_b);
        if (trial < best) {
            a = trial_a;
            b = trial_b;
            best = trial;
            damping = std::max(damping * 0.5, 1e-12);
            if (std::abs(step_a) < 1e-12 && std::abs(step_b) < 1e-12) break;
        } else {
            damping *= 4.0;
            if (damping > 1e12) break;
        }
    }
    if (best > 0.2)
        throw Error(ErrorCode::fit_diverged,
                    "kernel fit residual " + std::to_string(best) + " exceeds 0.2");
    return {a, b, min_dist, spread};
}

double kernel_eval(const KernelParams& params, double r) {
    return phi(params.a, params.b, r);
}

Embedding do_layout(const Embedding& init, const EdgeSet& edges, const LayoutParams& params) {
    if (params.n_iters < 0) throw Error(ErrorCode::invalid_param, "n_iters must be >= 0");
    if (params.neg_samples_per_point < 1)
        throw Error(ErrorCode::invalid_param, "neg_samples_per_point must be >= 1");
    const int n = static_cast<int>(init.coords.rows());
    const Eigen::Index m = init.coords.cols();
    for (const auto& [i, j] : edges.edges)
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw Error(ErrorCode::dimension_mismatch, "edge references a point outside the embedding");

    if (params.n_iters == 0) return init;

    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& [i, j] : edges.edges) {
        adj[static_cast<std::size_t>(i)].push_back(j);
        adj[static_cast<std::size_t>(j)].push_back(i);
    }
    for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());

    Matrix y = init.coords;
    Matrix disp(n, m);
    for (int it = 0; it < params.n_iters; ++it) {
        const double lr = params.learning_rate_initial *
                          (1.0 - static_cast<double>(it) / static_cast<double>(params.n_iters));
        disp.setZero();
        // Forces read the iteration-start positions and write disjoint disp
        // rows; the per-(iteration, point) RNG streams make the result
        // independent of the thread count.
        parallel_for(static_cast<std::size_t>(n), params.n_threads, [&](std::size_t pb, std::size_t pe) {
            Eigen::RowVectorXd acc(m);
            for (std::size_t ui = pb; ui < pe; ++ui) {
                const int i = static_cast<int>(ui);
                acc.setZero();
                const auto& nbrs = adj[ui];
                for (int j : nbrs) {
                    const Eigen::RowVectorXd delta = y.row(j) - y.row(i);
                    const double r = std::max(delta.norm(), kDistanceFloor);
                    const double mag = kernel_eval(params.kernel, 1.0 / r);
                    acc += (mag / r) * delta;
                }
                if (params.exact_repulsion) {
                    for (int j = 0; j < n; ++j) {
                        if (j == i || std::binary_search(nbrs.begin(), nbrs.end(), j)) continue;
                        const Eigen::RowVectorXd delta = y.row(i) - y.row(j);
                        const double dist = delta.norm();
                        const double r = std::max(dist, kDistanceFloor);
                        acc += (kernel_eval(params.kernel, dist) / r) * delta;
                    }
                } else if (static_cast<int>(nbrs.size()) < n - 1) {
                    auto rng = make_engine(derive_seed(params.seed.value,
                                                       static_cast<std::uint64_t>(it),
                                                       static_cast<std::uint64_t>(i)));
                    std::uniform_int_distribution<int> pick(0, n - 1);
                    int got = 0;
                    long attempts = 0;
                    const long max_attempts = 1000L * params.neg_samples_per_point;
                    while (got < params.neg_samples_per_point && attempts < max_attempts) {
                        ++attempts;
                        const int j = pick(rng);
                        if (j == i || std::binary_search(nbrs.begin(), nbrs.end(), j)) continue;
                        const Eigen::RowVectorXd delta = y.row(i) - y.row(j);
                        const double dist = delta.norm();
                        const double r = std::max(dist, kDistanceFloor);
                        acc += (kernel_eval(params.kernel, dist) / r) * delta;
                        ++got;
                    }
                }
                disp.row(i) = lr * acc;
            }
        });
        y += disp;
        if (params.trajectory_every > 0 && (it + 1) % params.trajectory_every == 0) {
            Embedding snapshot;
            snapshot.coords = y;
            snapshot.method = EmbedMethod::layout;
            snapshot.source_n = init.source_n;
            save_embedding_csv(snapshot,
                               params.trajectory_dir + "/layout_iter_" + std::to_string(it + 1) +
                                   ".csv");
        }
    }

    Embedding out;
    out.coords = std::move(y);
    out.method = EmbedMethod::layout;
    out.source_n = init.source_n;
    out.params = init.params;
    out.params["init_method"] = embed_method_name(init.method);
    out.params["n_iters"] = std::to_string(params.n_iters);
    out.params["neg_samples"] = std::to_string(params.neg_samples_per_point);
    out.params["layout_seed"] = std::to_string(params.seed.value);
    return out;
}

} // namespace dimred
