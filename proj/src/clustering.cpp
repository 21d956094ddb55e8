#include "itgc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include "itgc/errors.hpp"
#include "itgc/rng.hpp"

namespace itgc {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

double sq_dist_row_center(const ConceptMatrix& z, std::size_t i,
                          const std::vector<double>& centers, int c) {
    double s = 0.0;
    const double* row = z.scores.data() + i * z.m;
    const double* ctr = centers.data() + static_cast<std::size_t>(c) * z.m;
    for (std::size_t j = 0; j < z.m; ++j) {
        double d = row[j] - ctr[j];
        s += d * d;
    }
    return s;
}

// k-means++: first center uniform, the rest sampled proportionally to the
// squared distance from the nearest chosen center.
std::vector<double> kmeanspp_centers(const ConceptMatrix& z, int k, SplitMix64& rng) {
    const std::size_t n = z.n;
    std::vector<double> centers(static_cast<std::size_t>(k) * z.m);
    std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());

    std::size_t first = rng.next_below(n);
    std::copy_n(z.scores.begin() + first * z.m, z.m, centers.begin());

    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = sq_dist_row_center(z, i, centers, c - 1);
            min_sq[i] = std::min(min_sq[i], d);
            total += min_sq[i];
        }
        std::size_t chosen = 0;
        if (total > 0.0) {
            double threshold = rng.next_double() * total;
            double cumulative = 0.0;
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                cumulative += min_sq[i];
                if (cumulative >= threshold) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = rng.next_below(n);  // all points coincide with a center
        }
        std::copy_n(z.scores.begin() + chosen * z.m, z.m,
                    centers.begin() + static_cast<std::size_t>(c) * z.m);
    }
    return centers;
}

struct LloydResult {
    std::vector<int> labels;
    std::vector<double> centers;
    double inertia = 0.0;
    std::vector<double> inertia_trace;
};

LloydResult lloyd(const ConceptMatrix& z, const KMeansConfig& cfg, SplitMix64& rng) {
    const std::size_t n = z.n;
    const int k = cfg.k;

    LloydResult res;
    res.centers = kmeanspp_centers(z, k, rng);
    res.labels.assign(n, -1);
    std::vector<double> point_sq(n, 0.0);

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        // assign, nearest center, lower index wins ties
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (int c = 0; c < k; ++c) {
                double d = sq_dist_row_center(z, i, res.centers, c);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            res.labels[i] = best_c;
            point_sq[i] = best;
            inertia += best;
        }

        // any empty cluster grabs the point farthest from its current center
        std::vector<std::size_t> counts(k, 0);
        for (int label : res.labels) ++counts[label];
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t farthest = 0;
            double worst = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[res.labels[i]] <= 1) continue;  // keep donors non-empty
                if (point_sq[i] > worst) {
                    worst = point_sq[i];
                    farthest = i;
                }
            }
            --counts[res.labels[farthest]];
            inertia -= point_sq[farthest];
            res.labels[farthest] = c;
            counts[c] = 1;
            std::copy_n(z.scores.begin() + farthest * z.m, z.m,
                        res.centers.begin() + static_cast<std::size_t>(c) * z.m);
            point_sq[farthest] = 0.0;
        }
        res.inertia = inertia;
        res.inertia_trace.push_back(inertia);

        // update step
        std::vector<double> new_centers(static_cast<std::size_t>(k) * z.m, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = z.scores.data() + i * z.m;
            double* ctr = new_centers.data() + static_cast<std::size_t>(res.labels[i]) * z.m;
            for (std::size_t j = 0; j < z.m; ++j) ctr[j] += row[j];
        }
        for (int c = 0; c < k; ++c) {
            double* ctr = new_centers.data() + static_cast<std::size_t>(c) * z.m;
            for (std::size_t j = 0; j < z.m; ++j) ctr[j] /= static_cast<double>(counts[c]);
        }

        double shift_sq = 0.0;
        double scale_sq = 0.0;
        for (std::size_t v = 0; v < new_centers.size(); ++v) {
            double d = new_centers[v] - res.centers[v];
            shift_sq += d * d;
            scale_sq += res.centers[v] * res.centers[v];
        }
        res.centers = std::move(new_centers);
        if (std::sqrt(shift_sq) <= cfg.tol * (1.0 + std::sqrt(scale_sq))) break;
    }

    // final assignment against the settled centers
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (int c = 0; c < k; ++c) {
            double d = sq_dist_row_center(z, i, res.centers, c);
            if (d < best) {
                best = d;
                best_c = c;
            }
        }
        res.labels[i] = best_c;
        inertia += best;
    }
    res.inertia = inertia;
    res.inertia_trace.push_back(inertia);
    return res;
}

}  // namespace

KMeansRun kmeans_detailed(const ConceptMatrix& z, const KMeansConfig& cfg) {
    if (z.n < static_cast<std::size_t>(cfg.k)) throw TooFewItems(z.n, cfg.k);

    LloydResult best;
    int best_restart = -1;
    for (int r = 0; r < cfg.restarts; ++r) {
        SplitMix64 rng(fnv1a64_mix(cfg.seed, static_cast<std::uint64_t>(r) + 1));
        LloydResult run = lloyd(z, cfg, rng);
        if (best_restart < 0 || run.inertia < best.inertia) {
            best = std::move(run);
            best_restart = r;
        }
    }

    KMeansRun out;
    out.assignment = Assignment::from_labels(std::move(best.labels));
    out.centers = std::move(best.centers);
    out.inertia = best.inertia;
    out.inertia_trace = std::move(best.inertia_trace);
    return out;
}

Assignment kmeans(const ConceptMatrix& z, const KMeansConfig& cfg) {
    return kmeans_detailed(z, cfg).assignment;
}

Assignment dbscan(const ConceptMatrix& z, const DensityConfig& cfg) {
    const std::size_t n = z.n;
    const double eps_sq = cfg.eps * cfg.eps;

    std::vector<std::vector<std::size_t>> neighbors(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (sq_dist(z.row(i), z.row(j)) <= eps_sq) neighbors[i].push_back(j);
        }
    }
    // the eps-neighborhood includes the point itself
    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) {
        core[i] = neighbors[i].size() >= static_cast<std::size_t>(cfg.min_pts);
    }

    std::vector<int> labels(n, -1);
    int next_label = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i] || labels[i] != -1) continue;
        int label = next_label++;
        labels[i] = label;
        std::deque<std::size_t> frontier{i};
        while (!frontier.empty()) {
            std::size_t p = frontier.front();
            frontier.pop_front();
            for (std::size_t q : neighbors[p]) {
                if (labels[q] != -1) continue;
                labels[q] = label;
                if (core[q]) frontier.push_back(q);
            }
        }
    }
    return Assignment::from_labels(std::move(labels));
}

Assignment hdbscan_lite(const ConceptMatrix& z, const DensityConfig& cfg) {
    if (!cfg.eps_grid || cfg.eps_grid->size() < 2)
        throw InvalidTask("hdbscan_lite requires an eps_grid with >= 2 entries");

    std::optional<Assignment> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (double eps : *cfg.eps_grid) {
        DensityConfig step = cfg;
        step.eps = eps;
        Assignment a = dbscan(z, step);
        if (a.k_effective < 2) continue;
        // selection scales the non-noise silhouette by coverage; otherwise a
        // labeling that calls almost everything noise and keeps two tiny
        // perfect clusters would always win the grid
        std::size_t clustered = 0;
        for (int label : a.labels) {
            if (label >= 0) ++clustered;
        }
        double s = silhouette(z, a) * static_cast<double>(clustered) /
                   static_cast<double>(a.labels.size());
        if (s > best_score) {  // strict: ties keep the smaller eps seen first
            best_score = s;
            best = std::move(a);
        }
    }
    if (!best) throw NoValidLabeling();
    return *best;
}

double silhouette(const ConceptMatrix& z, const Assignment& a) {
    if (a.labels.size() != z.n) throw LengthMismatch(a.labels.size(), z.n);
    if (a.k_effective < 2) throw DegenerateClustering(a.k_effective);

    const std::size_t n = z.n;
    int k = 0;  // size arrays by max label, labels need not be contiguous here
    for (int label : a.labels) k = std::max(k, label + 1);
    std::vector<std::size_t> cluster_size(k, 0);
    for (int label : a.labels) {
        if (label >= 0) ++cluster_size[label];
    }

    double total = 0.0;
    std::size_t counted = 0;
    std::vector<double> mean_dist(k);
    for (std::size_t i = 0; i < n; ++i) {
        int own = a.labels[i];
        if (own < 0) continue;
        std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            int other = a.labels[j];
            if (other < 0 || j == i) continue;
            mean_dist[other] += std::sqrt(sq_dist(z.row(i), z.row(j)));
        }

        double s = 0.0;
        if (cluster_size[own] > 1) {
            double cohesion = mean_dist[own] / static_cast<double>(cluster_size[own] - 1);
            double separation = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                if (c == own || cluster_size[c] == 0) continue;
                separation =
                    std::min(separation, mean_dist[c] / static_cast<double>(cluster_size[c]));
            }
            double denom = std::max(cohesion, separation);
            s = denom > 0.0 ? (separation - cohesion) / denom : 0.0;
        }
        total += s;
        ++counted;
    }
    return total / static_cast<double>(counted);
}

}  // namespace itgc
