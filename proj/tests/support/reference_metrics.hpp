#pragma once

// Test-only reference implementations. These stay on the definition-level
// path (full pairwise distances, exhaustive enumeration) and share no code
// with the library implementations they check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "itgc/eval.hpp"

namespace itgc_testing {

// Rousseeuw silhouette straight from the definition.
inline double silhouette_reference(const std::vector<std::vector<double>>& points,
                                   const std::vector<int>& labels) {
    auto dist = [&](std::size_t a, std::size_t b) {
        double s = 0;
        for (std::size_t j = 0; j < points[a].size(); ++j) {
            double d = points[a][j] - points[b][j];
            s += d * d;
        }
        return std::sqrt(s);
    };
    std::set<int> clusters;
    for (int l : labels)
        if (l >= 0) clusters.insert(l);

    double total = 0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (labels[i] < 0) continue;
        std::size_t own_size = 0;
        for (std::size_t j = 0; j < points.size(); ++j)
            if (labels[j] == labels[i]) ++own_size;

        double s = 0;
        if (own_size > 1) {
            double a = 0;
            for (std::size_t j = 0; j < points.size(); ++j) {
                if (j != i && labels[j] == labels[i]) a += dist(i, j);
            }
            a /= static_cast<double>(own_size - 1);

            double b = std::numeric_limits<double>::infinity();
            for (int c : clusters) {
                if (c == labels[i]) continue;
                double sum = 0;
                std::size_t count = 0;
                for (std::size_t j = 0; j < points.size(); ++j) {
                    if (labels[j] == c) {
                        sum += dist(i, j);
                        ++count;
                    }
                }
                if (count > 0) b = std::min(b, sum / static_cast<double>(count));
            }
            double denom = std::max(a, b);
            s = denom > 0 ? (b - a) / denom : 0;
        }
        total += s;
        ++counted;
    }
    return total / static_cast<double>(counted);
}

// Maximum matched count over every injective pred->true mapping, by trying
// all permutations of the zero-padded square table. k <= 6 only.
inline long long brute_force_matched(const std::vector<int>& y_true,
                                     const std::vector<int>& y_pred) {
    itgc::Contingency c = itgc::contingency(y_true, y_pred);
    std::size_t s = std::max(c.t_classes, c.p_clusters);
    std::vector<std::vector<long long>> profit(s, std::vector<long long>(s, 0));
    for (std::size_t t = 0; t < c.t_classes; ++t) {
        for (std::size_t p = 0; p < c.p_clusters; ++p) profit[p][t] = c.matrix[t][p];
    }
    std::vector<std::size_t> perm(s);
    std::iota(perm.begin(), perm.end(), 0);
    long long best = 0;
    do {
        long long total = 0;
        for (std::size_t p = 0; p < s; ++p) total += profit[p][perm[p]];
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace itgc_testing
