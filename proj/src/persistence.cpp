#include "dimred/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

#include "dimred/error.hpp"
#include "dimred/parallel.hpp"

namespace dimred {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct UnionFind {
    std::vector<int> parent;
    std::vector<int> size;

    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)), size(static_cast<std::size_t>(n), 1) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    }
    // Returns false when a and b were already connected.
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
        return true;
    }
};

struct Edge {
    double len;
    int i;
    int j;
    bool operator<(const Edge& o) const {
        if (len != o.len) return len < o.len;
        if (i != o.i) return i < o.i;
        return j < o.j;
    }
};

// Z/2 column addition over sorted rank vectors.
void add_column(std::vector<int>& col, const std::vector<int>& other, std::vector<int>& tmp) {
    tmp.clear();
    std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                  std::back_inserter(tmp));
    col.swap(tmp);
}

// Hopcroft-Karp maximum bipartite matching.
class Matcher {
public:
    Matcher(int n_left, int n_right)
        : nl_(n_left), nr_(n_right), adj_(static_cast<std::size_t>(n_left)) {}

    void add_edge(int l, int r) { adj_[static_cast<std::size_t>(l)].push_back(r); }

    int max_matching() {
        match_l_.assign(static_cast<std::size_t>(nl_), -1);
        match_r_.assign(static_cast<std::size_t>(nr_), -1);
        int matched = 0;
        while (bfs()) {
            for (int u = 0; u < nl_; ++u)
                if (match_l_[static_cast<std::size_t>(u)] < 0 && dfs(u)) ++matched;
        }
        return matched;
    }

private:
    bool bfs() {
        std::queue<int> q;
        dist_.assign(static_cast<std::size_t>(nl_), -1);
        for (int u = 0; u < nl_; ++u)
            if (match_l_[static_cast<std::size_t>(u)] < 0) {
                dist_[static_cast<std::size_t>(u)] = 0;
                q.push(u);
            }
        bool found = false;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int v : adj_[static_cast<std::size_t>(u)]) {
                const int w = match_r_[static_cast<std::size_t>(v)];
                if (w < 0) {
                    found = true;
                } else if (dist_[static_cast<std::size_t>(w)] < 0) {
                    dist_[static_cast<std::size_t>(w)] = dist_[static_cast<std::size_t>(u)] + 1;
                    q.push(w);
                }
            }
        }
        return found;
    }

    bool dfs(int u) {
        for (int v : adj_[static_cast<std::size_t>(u)]) {
            const int w = match_r_[static_cast<std::size_t>(v)];
            if (w < 0 || (dist_[static_cast<std::size_t>(w)] ==
                              dist_[static_cast<std::size_t>(u)] + 1 &&
                          dfs(w))) {
                match_l_[static_cast<std::size_t>(u)] = v;
                match_r_[static_cast<std::size_t>(v)] = u;
                return true;
            }
        }
        dist_[static_cast<std::size_t>(u)] = -2;
        return false;
    }

    int nl_;
    int nr_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> match_l_, match_r_, dist_;
};

double linf(const DiagramPoint& a, const DiagramPoint& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double diag_cost(const DiagramPoint& p) { return (p.death - p.birth) / 2.0; }

void split_diagram(const std::vector<DiagramPoint>& pts, std::vector<DiagramPoint>& fin,
                   std::vector<double>& inf_births) {
    for (const auto& p : pts) {
        if (std::isinf(p.death))
            inf_births.push_back(p.birth);
        else
            fin.push_back(p);
    }
    std::sort(inf_births.begin(), inf_births.end());
}

// Infinite classes pair greedily by sorted birth; differing counts make the
// distance infinite. Returns false on the count mismatch.
bool infinite_part(const std::vector<double>& b1, const std::vector<double>& b2, double& max_gap,
                   double& sum_gap) {
    max_gap = 0.0;
    sum_gap = 0.0;
    if (b1.size() != b2.size()) return false;
    for (std::size_t i = 0; i < b1.size(); ++i) {
        const double g = std::abs(b1[i] - b2[i]);
        max_gap = std::max(max_gap, g);
        sum_gap += g;
    }
    return true;
}

// Exact min-cost perfect matching (Jonker-Volgenant style potentials),
// O(n^3). cost is square.
double hungarian(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) return 0.0;
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                                   u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j)
        total += cost[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)]
                     [static_cast<std::size_t>(j - 1)];
    return total;
}

// Canonical order on finite diagram parts so that distance(d1,d2) and
// distance(d2,d1) run the identical computation.
bool canonical_before(const std::vector<DiagramPoint>& a, const std::vector<DiagramPoint>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].birth != b[i].birth) return a[i].birth < b[i].birth;
        if (a[i].death != b[i].death) return a[i].death < b[i].death;
    }
    return false;
}

double curve_spacing(const BettiCurve& c) {
    return c.grid.size() >= 2 ? c.grid[1] - c.grid[0] : 1.0;
}

double curve_mass(const BettiCurve& c) {
    double m = 0.0;
    for (double v : c.values) m += v;
    return m * curve_spacing(c);
}

} // namespace

std::vector<DiagramPoint> PersistenceDiagram::in_dim(int dim) const {
    std::vector<DiagramPoint> out;
    for (const auto& p : points)
        if (p.dim == dim) out.push_back(p);
    return out;
}

PersistenceDiagram rips_persistence(const PointCloud& points, int max_dim,
                                    std::optional<double> max_filtration) {
    if (max_dim < 0 || max_dim > 1)
        throw Error(ErrorCode::invalid_dim, "max_dim must be 0 or 1");
    const int n = static_cast<int>(points.n());

    PersistenceDiagram diagram;
    diagram.n_source_points = n;
    if (n == 1) {
        diagram.points.push_back({0.0, kInf, 0});
        return diagram;
    }

    // Dense distance matrix; desk-scale inputs keep n small enough.
    const Matrix& x = points.coords();
    std::vector<double> dist(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    parallel_for(static_cast<std::size_t>(n), 0, [&](std::size_t ib, std::size_t ie) {
        for (std::size_t i = ib; i < ie; ++i)
            for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
                if (j == i) continue;
                dist[i * static_cast<std::size_t>(n) + j] =
                    (x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j)))
                        .norm();
            }
    });
    auto d_at = [&](int i, int j) {
        return dist[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(j)];
    };

    double enclosing = kInf;
    for (int i = 0; i < n; ++i) {
        double row_max = 0.0;
        for (int j = 0; j < n; ++j) row_max = std::max(row_max, d_at(i, j));
        enclosing = std::min(enclosing, row_max);
    }
    const double cap = max_filtration.value_or(enclosing);

    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = d_at(i, j);
            if (d <= cap) edges.push_back({d, i, j});
        }
    std::sort(edges.begin(), edges.end());
    const int n_edges = static_cast<int>(edges.size());

    // Dimension 0: merges of the union-find are exactly the MST edges.
    UnionFind uf(n);
    std::vector<char> positive(static_cast<std::size_t>(n_edges), 0);
    for (int e = 0; e < n_edges; ++e) {
        if (uf.unite(edges[static_cast<std::size_t>(e)].i, edges[static_cast<std::size_t>(e)].j)) {
            if (edges[static_cast<std::size_t>(e)].len > 0.0)
                diagram.points.push_back({0.0, edges[static_cast<std::size_t>(e)].len, 0});
        } else {
            positive[static_cast<std::size_t>(e)] = 1;
        }
    }
    int n_components = 0;
    for (int i = 0; i < n; ++i)
        if (uf.find(i) == i) ++n_components;
    for (int c = 0; c < n_components; ++c) diagram.points.push_back({0.0, kInf, 0});

    if (max_dim >= 1 && n >= 3) {
        // Rank of each capped edge in the (length, i, j) total order.
        std::vector<int> rank(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
        for (int e = 0; e < n_edges; ++e) {
            const auto& ed = edges[static_cast<std::size_t>(e)];
            rank[static_cast<std::size_t>(ed.i) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(ed.j)] = e;
            rank[static_cast<std::size_t>(ed.j) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(ed.i)] = e;
        }
        auto rank_at = [&](int i, int j) {
            return rank[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                        static_cast<std::size_t>(j)];
        };

        // Column reduction of the triangle boundary matrix. Triangles are
        // visited grouped by their maximal edge (then by third vertex), so
        // the triangle value is the group edge's length and no triangle list
        // is ever stored. Pivots of the reduced matrix land on
        // cycle-creating edges only, so every claimed pivot is a
        // dimension-1 pair.
        std::vector<int> pivot_owner(static_cast<std::size_t>(n_edges), -1);
        std::vector<std::vector<int>> stored;
        stored.reserve(static_cast<std::size_t>(n_edges) / 4);
        std::vector<int> col, tmp;
        for (int re = 0; re < n_edges; ++re) {
            const auto& ed = edges[static_cast<std::size_t>(re)];
            for (int k = 0; k < n; ++k) {
                if (k == ed.i || k == ed.j) continue;
                const int ra = rank_at(ed.i, k);
                if (ra < 0 || ra >= re) continue;
                const int rb = rank_at(ed.j, k);
                if (rb < 0 || rb >= re) continue;
                col.clear();
                col.push_back(std::min(ra, rb));
                col.push_back(std::max(ra, rb));
                col.push_back(re);
                while (!col.empty()) {
                    const int p = col.back();
                    const int owner = pivot_owner[static_cast<std::size_t>(p)];
                    if (owner < 0) {
                        pivot_owner[static_cast<std::size_t>(p)] = static_cast<int>(stored.size());
                        const double birth = edges[static_cast<std::size_t>(p)].len;
                        if (birth < ed.len) diagram.points.push_back({birth, ed.len, 1});
                        stored.push_back(col);
                        break;
                    }
                    add_column(col, stored[static_cast<std::size_t>(owner)], tmp);
                }
            }
        }
        // Cycle edges never killed by a triangle within the cap are
        // essential at this truncation.
        for (int e = 0; e < n_edges; ++e)
            if (positive[static_cast<std::size_t>(e)] && pivot_owner[static_cast<std::size_t>(e)] < 0)
                diagram.points.push_back({edges[static_cast<std::size_t>(e)].len, kInf, 1});
    }

    std::sort(diagram.points.begin(), diagram.points.end(), [](const DiagramPoint& a, const DiagramPoint& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        if (a.birth != b.birth) return a.birth < b.birth;
        return a.death < b.death;
    });
    return diagram;
}

double bottleneck_distance(const PersistenceDiagram& d1, const PersistenceDiagram& d2, int dim) {
    std::vector<DiagramPoint> f1, f2;
    std::vector<double> i1, i2;
    split_diagram(d1.in_dim(dim), f1, i1);
    split_diagram(d2.in_dim(dim), f2, i2);

    double inf_max, inf_sum;
    if (!infinite_part(i1, i2, inf_max, inf_sum)) {
        std::cerr << "warning: diagrams have " << i1.size() << " vs " << i2.size()
                  << " infinite classes in dim " << dim << "; bottleneck distance is infinite\n";
        return kInf;
    }

    const int n1 = static_cast<int>(f1.size());
    const int n2 = static_cast<int>(f2.size());
    if (n1 == 0 && n2 == 0) return inf_max;

    std::vector<double> candidates;
    candidates.reserve(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2) +
                       static_cast<std::size_t>(n1 + n2) + 1);
    candidates.push_back(0.0);
    for (const auto& p : f1) candidates.push_back(diag_cost(p));
    for (const auto& q : f2) candidates.push_back(diag_cost(q));
    for (const auto& p : f1)
        for (const auto& q : f2) candidates.push_back(linf(p, q));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Feasible at threshold c iff the diagonal-augmented bipartite graph has
    // a perfect matching using only edges of cost <= c.
    auto feasible = [&](double c) {
        Matcher m(n1 + n2, n2 + n1);
        for (int i = 0; i < n1; ++i) {
            for (int j = 0; j < n2; ++j)
                if (linf(f1[static_cast<std::size_t>(i)], f2[static_cast<std::size_t>(j)]) <= c)
                    m.add_edge(i, j);
            if (diag_cost(f1[static_cast<std::size_t>(i)]) <= c) m.add_edge(i, n2 + i);
        }
        for (int j = 0; j < n2; ++j) {
            if (diag_cost(f2[static_cast<std::size_t>(j)]) <= c) m.add_edge(n1 + j, j);
            for (int t = 0; t < n1; ++t) m.add_edge(n1 + j, n2 + t);
        }
        return m.max_matching() == n1 + n2;
    };

    std::size_t lo = 0;
    std::size_t hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (feasible(candidates[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return std::max(inf_max, candidates[lo]);
}

double wasserstein_distance(const PersistenceDiagram& d1, const PersistenceDiagram& d2, int dim) {
    std::vector<DiagramPoint> f1, f2;
    std::vector<double> i1, i2;
    split_diagram(d1.in_dim(dim), f1, i1);
    split_diagram(d2.in_dim(dim), f2, i2);

    double inf_max, inf_sum;
    if (!infinite_part(i1, i2, inf_max, inf_sum)) {
        std::cerr << "warning: diagrams have " << i1.size() << " vs " << i2.size()
                  << " infinite classes in dim " << dim << "; Wasserstein distance is infinite\n";
        return kInf;
    }

    if (canonical_before(f2, f1)) std::swap(f1, f2);
    const int n1 = static_cast<int>(f1.size());
    const int n2 = static_cast<int>(f2.size());
    const int total = n1 + n2;
    if (total == 0) return inf_sum;

    std::vector<std::vector<double>> cost(static_cast<std::size_t>(total),
                                          std::vector<double>(static_cast<std::size_t>(total), 0.0));
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                linf(f1[static_cast<std::size_t>(i)], f2[static_cast<std::size_t>(j)]);
    for (int i = 0; i < n1; ++i)
        for (int t = 0; t < n1; ++t)
            cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(n2 + t)] =
                diag_cost(f1[static_cast<std::size_t>(i)]);
    for (int s = 0; s < n2; ++s)
        for (int j = 0; j < n2; ++j)
            cost[static_cast<std::size_t>(n1 + s)][static_cast<std::size_t>(j)] =
                diag_cost(f2[static_cast<std::size_t>(j)]);
    return inf_sum + hungarian(cost);
}

BettiCurve betti_curve(const PersistenceDiagram& diagram, int dim, int n_grid,
                       std::optional<double> t_max) {
    if (n_grid < 2) throw Error(ErrorCode::invalid_param, "n_grid must be >= 2");
    const auto pts = diagram.in_dim(dim);

    double top = 0.0;
    if (t_max) {
        top = *t_max;
        if (!(top > 0.0)) throw Error(ErrorCode::invalid_param, "t_max must be > 0");
    } else {
        double largest_finite = 0.0;
        for (const auto& p : pts)
            if (!std::isinf(p.death)) largest_finite = std::max(largest_finite, p.death);
        top = largest_finite > 0.0 ? largest_finite * 1.05 : 1.0;
    }

    BettiCurve curve;
    curve.dim = dim;
    curve.empty_diagram = pts.empty();
    curve.grid.resize(static_cast<std::size_t>(n_grid));
    curve.values.assign(static_cast<std::size_t>(n_grid), 0.0);
    for (int g = 0; g < n_grid; ++g) {
        const double t = top * static_cast<double>(g) / static_cast<double>(n_grid - 1);
        curve.grid[static_cast<std::size_t>(g)] = t;
        double alive = 0.0;
        for (const auto& p : pts)
            if (p.birth <= t && t < p.death) alive += 1.0;
        curve.values[static_cast<std::size_t>(g)] = alive;
    }
    return curve;
}

double dtw_distance(const BettiCurve& c1, const BettiCurve& c2) {
    const std::size_t m = c1.values.size();
    const std::size_t n = c2.values.size();
    if (m == 0 || n == 0) throw Error(ErrorCode::invalid_param, "DTW needs non-empty curves");
    std::vector<double> prev(n, 0.0), cur(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double c = std::abs(c1.values[0] - c2.values[j]);
        prev[j] = c + (j > 0 ? prev[j - 1] : 0.0);
    }
    for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double c = std::abs(c1.values[i] - c2.values[j]);
            double best = prev[j];
            if (j > 0) {
                best = std::min(best, cur[j - 1]);
                best = std::min(best, prev[j - 1]);
            }
            cur[j] = c + best;
        }
        prev.swap(cur);
    }
    return prev[n - 1];
}

double twed_distance(const BettiCurve& c1, const BettiCurve& c2, double stiffness, double penalty) {
    if (stiffness < 0.0 || penalty < 0.0)
        throw Error(ErrorCode::invalid_param, "stiffness and penalty must be >= 0");
    const std::size_t m = c1.values.size();
    const std::size_t n = c2.values.size();
    if (m == 0 || n == 0) throw Error(ErrorCode::invalid_param, "TWED needs non-empty curves");

    // 1-based series with a zero-padded element at index 0.
    auto a = [&](std::size_t i) { return i == 0 ? 0.0 : c1.values[i - 1]; };
    auto ta = [&](std::size_t i) { return i == 0 ? 0.0 : c1.grid[i - 1]; };
    auto b = [&](std::size_t j) { return j == 0 ? 0.0 : c2.values[j - 1]; };
    auto tb = [&](std::size_t j) { return j == 0 ? 0.0 : c2.grid[j - 1]; };

    std::vector<std::vector<double>> dp(m + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 1; i <= m; ++i)
        dp[i][0] = dp[i - 1][0] + std::abs(a(i) - a(i - 1)) + stiffness * (ta(i) - ta(i - 1)) + penalty;
    for (std::size_t j = 1; j <= n; ++j)
        dp[0][j] = dp[0][j - 1] + std::abs(b(j) - b(j - 1)) + stiffness * (tb(j) - tb(j - 1)) + penalty;
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            const double match = dp[i - 1][j - 1] + std::abs(a(i) - b(j)) +
                                 std::abs(a(i - 1) - b(j - 1)) +
                                 stiffness * (std::abs(ta(i) - tb(j)) + std::abs(ta(i - 1) - tb(j - 1)));
            const double del_a = dp[i - 1][j] + std::abs(a(i) - a(i - 1)) +
                                 stiffness * (ta(i) - ta(i - 1)) + penalty;
            const double del_b = dp[i][j - 1] + std::abs(b(j) - b(j - 1)) +
                                 stiffness * (tb(j) - tb(j - 1)) + penalty;
            dp[i][j] = std::min({match, del_a, del_b});
        }
    }
    return dp[m][n];
}

double emd_rescaled(const BettiCurve& c_high, const BettiCurve& c_low) {
    const double mass_h = curve_mass(c_high);
    const double mass_l = curve_mass(c_low);
    if (!(mass_h > 0.0) || !(mass_l > 0.0))
        throw Error(ErrorCode::zero_mass_curve, "EMD needs curves with positive total mass");
    const double tau = mass_h / mass_l;

    // Unit-mass point distributions on the two grids; EMD in 1D is the L1
    // distance between the CDFs, integrated over the union of grid points.
    struct Atom {
        double t;
        double w;
        int side;
    };
    std::vector<Atom> atoms;
    atoms.reserve(c_high.grid.size() + c_low.grid.size());
    const double dth = curve_spacing(c_high);
    const double dtl = curve_spacing(c_low);
    for (std::size_t i = 0; i < c_high.grid.size(); ++i)
        atoms.push_back({c_high.grid[i], c_high.values[i] * dth / mass_h, 0});
    for (std::size_t i = 0; i < c_low.grid.size(); ++i)
        atoms.push_back({c_low.grid[i], c_low.values[i] * dtl / mass_l, 1});
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.t < y.t; });

    double emd = 0.0;
    double cdf_h = 0.0;
    double cdf_l = 0.0;
    for (std::size_t s = 0; s < atoms.size(); ++s) {
        if (atoms[s].side == 0)
            cdf_h += atoms[s].w;
        else
            cdf_l += atoms[s].w;
        if (s + 1 < atoms.size() && atoms[s + 1].t > atoms[s].t)
            emd += std::abs(cdf_h - cdf_l) * (atoms[s + 1].t - atoms[s].t);
    }
    return emd * std::max(tau, 1.0 / tau);
}

GlobalReport global_structure_report(const PointCloud& x, const Embedding& y, int subsample,
                                     int n_grid, Seed seed) {
    const int n = static_cast<int>(x.n());
    if (y.coords.rows() != x.n())
        throw Error(ErrorCode::row_count_mismatch, "cloud and embedding row counts differ");
    if (subsample < 8) throw Error(ErrorCode::subsample_too_small, "subsample must be >= 8");
    subsample = std::min(subsample, n);

    // Same indices on both sides: the comparison must see the same points.
    auto rng = make_engine(seed);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < subsample; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
    }
    std::vector<int> idx(order.begin(), order.begin() + subsample);
    std::sort(idx.begin(), idx.end());

    Matrix sub_x(subsample, x.dim());
    Matrix sub_y(subsample, y.coords.cols());
    for (int r = 0; r < subsample; ++r) {
        sub_x.row(r) = x.coords().row(idx[static_cast<std::size_t>(r)]);
        sub_y.row(r) = y.coords.row(idx[static_cast<std::size_t>(r)]);
    }
    const PersistenceDiagram dx = rips_persistence(PointCloud(std::move(sub_x)), 1);
    const PersistenceDiagram dy = rips_persistence(PointCloud(std::move(sub_y)), 1);

    GlobalReport report;
    report.subsample_size = subsample;
    report.seed = seed;
    const double norm = static_cast<double>(subsample);
    for (int dim = 0; dim <= 1; ++dim) {
        GlobalDimReport& r = report.dims[dim];
        r.bottleneck = bottleneck_distance(dx, dy, dim) / norm;
        r.wasserstein = wasserstein_distance(dx, dy, dim) / norm;

        double largest_finite = 0.0;
        for (const auto& p : dx.in_dim(dim))
            if (!std::isinf(p.death)) largest_finite = std::max(largest_finite, p.death);
        for (const auto& p : dy.in_dim(dim))
            if (!std::isinf(p.death)) largest_finite = std::max(largest_finite, p.death);
        const double t_max = largest_finite > 0.0 ? largest_finite * 1.05 : 1.0;
        const BettiCurve cx = betti_curve(dx, dim, n_grid, t_max);
        const BettiCurve cy = betti_curve(dy, dim, n_grid, t_max);

        r.dtw = dtw_distance(cx, cy) / norm;
        r.twed = twed_distance(cx, cy) / norm;
        const double mass_x = curve_mass(cx);
        const double mass_y = curve_mass(cy);
        if (mass_x > 0.0 && mass_y > 0.0) {
            r.emd = emd_rescaled(cx, cy) / norm;
        } else if (mass_x == 0.0 && mass_y == 0.0) {
            r.emd = 0.0;
        } else {
            std::cerr << "warning: dim " << dim
                      << " Betti curve has zero mass on one side only; EMD reported infinite\n";
            r.emd = kInf;
        }
    }
    return report;
}

void save_diagram_csv(const PersistenceDiagram& diagram, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
    out << "birth,death,dim\n";
    char buf[64];
    for (const auto& p : diagram.points) {
        std::snprintf(buf, sizeof(buf), "%.17g", p.birth);
        out << buf << ',';
        if (std::isinf(p.death)) {
            out << "inf";
        } else {
            std::snprintf(buf, sizeof(buf), "%.17g", p.death);
            out << buf;
        }
        out << ',' << p.dim << '\n';
    }
    if (!out) throw Error(ErrorCode::io_error, "failed while writing " + path);
}

} // namespace dimred
