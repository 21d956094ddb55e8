#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "itgc/concepts.hpp"
#include "itgc/encoding.hpp"

namespace itgc {

struct KMeansConfig {
    int k = 2;
    int restarts = 10;
    int max_iters = 300;
    double tol = 1e-4;  // relative center-shift threshold
    std::uint64_t seed = 0;
};

struct DensityConfig {
    double eps = 0.5;
    int min_pts = 5;
    std::optional<std::vector<double>> eps_grid;  // ascending; hierarchical variant
};

struct KMeansRun {
    Assignment assignment;
    std::vector<double> centers;        // k * m, row-major
    double inertia = 0.0;
    std::vector<double> inertia_trace;  // per Lloyd iteration of the winning restart
};

/// Lloyd iterations with k-means++ seeding, best of cfg.restarts by
/// (inertia, restart index). Deterministic given cfg.seed. Empty clusters are
/// re-seeded to the point farthest from its assigned center.
KMeansRun kmeans_detailed(const ConceptMatrix& z, const KMeansConfig& cfg);
Assignment kmeans(const ConceptMatrix& z, const KMeansConfig& cfg);

/// Classic density clustering over Euclidean distance. Non-core unreachable
/// points get label -1; cluster labels follow core-point discovery order.
Assignment dbscan(const ConceptMatrix& z, const DensityConfig& cfg);

/// Runs dbscan for every eps in cfg.eps_grid and keeps the labeling with the
/// best silhouette over non-noise points; ties go to the smaller eps.
/// Throws NoValidLabeling when no eps yields >= 2 clusters.
Assignment hdbscan_lite(const ConceptMatrix& z, const DensityConfig& cfg);

/// Mean silhouette over non-noise points (singleton clusters contribute 0).
/// Throws DegenerateClustering with fewer than 2 non-noise clusters.
double silhouette(const ConceptMatrix& z, const Assignment& a);

}  // namespace itgc
