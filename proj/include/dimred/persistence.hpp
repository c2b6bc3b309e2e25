#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dimred/dataset.hpp"
#include "dimred/embed.hpp"

namespace dimred {

/// One homology class: born at `birth`, dead at `death` (+infinity for
/// essential classes), in homology dimension `dim`.
struct DiagramPoint {
    double birth = 0.0;
    double death = 0.0;
    int dim = 0;
};

/// Multiset of (birth, death, dim) classes of a Rips filtration. Points are
/// sorted by (dim, birth, death) for reproducible serialization.
struct PersistenceDiagram {
    std::vector<DiagramPoint> points;
    int n_source_points = 0;

    std::vector<DiagramPoint> in_dim(int dim) const;
};

/// beta_dim sampled on a uniform grid: values[i] counts classes with
/// birth <= grid[i] < death. `empty_diagram` marks the all-zeros curve
/// produced from a diagram with no classes in this dimension.
struct BettiCurve {
    std::vector<double> grid;
    std::vector<double> values;
    int dim = 0;
    bool empty_diagram = false;
};

/// Per-dimension diagram and curve distances between a cloud and its
/// embedding, each normalized by the subsample size.
struct GlobalDimReport {
    double bottleneck = 0.0;
    double wasserstein = 0.0;
    double dtw = 0.0;
    double twed = 0.0;
    double emd = 0.0;
};

struct GlobalReport {
    GlobalDimReport dims[2];
    int subsample_size = 0;
    Seed seed;
};

/// Vietoris-Rips persistence with Z/2 coefficients, dimensions 0 and 1.
/// Dimension 0 comes from union-find over ascending edges (deaths are the
/// minimum spanning tree edge lengths); dimension 1 from column reduction of
/// the triangle boundary matrix. Triangles above max_filtration are ignored;
/// the default cap is the enclosing radius min_i max_j d(i,j), past which
/// dimension-1 homology is trivial. Zero-persistence classes are dropped.
PersistenceDiagram rips_persistence(const PointCloud& points, int max_dim = 1,
                                    std::optional<double> max_filtration = std::nullopt);

/// Exact bottleneck distance in one dimension: binary search over candidate
/// costs with a bipartite matching feasibility test; diagonal projections
/// allowed. Infinite classes are matched separately by birth; a count
/// mismatch yields +infinity.
double bottleneck_distance(const PersistenceDiagram& d1, const PersistenceDiagram& d2, int dim);

/// Exact order-1 Wasserstein distance with L-infinity ground metric:
/// min-cost perfect matching on the diagonal-augmented diagrams. Infinite
/// classes contribute |birth difference| under the same pairing rule as
/// bottleneck.
double wasserstein_distance(const PersistenceDiagram& d1, const PersistenceDiagram& d2, int dim);

/// Betti curve on a uniform grid over [0, t_max]; t_max defaults to the
/// largest finite death times 1.05 (1.0 when no finite class exists).
BettiCurve betti_curve(const PersistenceDiagram& diagram, int dim, int n_grid = 200,
                       std::optional<double> t_max = std::nullopt);

/// Dynamic time warping over the value sequences, |a-b| local cost,
/// endpoints anchored.
double dtw_distance(const BettiCurve& c1, const BettiCurve& c2);

/// Time warp edit distance over (timestamp, value) pairs with the
/// zero-padded initial element convention.
double twed_distance(const BettiCurve& c1, const BettiCurve& c2, double stiffness = 1.0,
                     double penalty = 0.0);

/// Mass-ratio-corrected earth mover's distance: tau equalizes the two curve
/// masses, both are normalized to unit mass, the 1D EMD is the L1 distance
/// between CDFs on the union grid, and the result is scaled by
/// max(tau, 1/tau).
double emd_rescaled(const BettiCurve& c_high, const BettiCurve& c_low);

/// Subsampled global-structure comparison between a cloud and its
/// embedding: identical subsample indices on both sides, diagram distances
/// and Betti-curve distances per dimension, all divided by the subsample
/// size. Betti curves share one grid so curve distances are comparable.
GlobalReport global_structure_report(const PointCloud& x, const Embedding& y, int subsample,
                                     int n_grid, Seed seed);

/// Diagram CSV: "birth,death,dim" rows, "inf" for infinite deaths.
void save_diagram_csv(const PersistenceDiagram& diagram, const std::string& path);

} // namespace dimred
