#pragma once

#include <cstdint>
#include <vector>

namespace itgc {

/// Cross-tabulation of true classes (rows) against predicted clusters
/// (columns), with the original label values recorded per compact index.
struct Contingency {
    std::vector<std::vector<long long>> matrix;  // matrix[t][p]
    std::vector<int> true_values;                // compact row index -> original label
    std::vector<int> pred_values;                // compact col index -> original label
    std::size_t t_classes = 0;
    std::size_t p_clusters = 0;
    long long total = 0;
};

/// Builds the contingency table. Label values are compacted in ascending
/// order; a noise label (-1) in y_pred becomes an ordinary column.
Contingency contingency(const std::vector<int>& y_true, const std::vector<int>& y_pred);

struct PermutationResult {
    std::vector<int> pred_to_true;  // compact pred index -> compact true index, -1 = no class
    long long matched = 0;
};

/// The injective pred->true mapping maximizing matched count (Hungarian
/// assignment, rectangular tables zero-padded). Among optima, returns the
/// lexicographically smallest mapping with unmatched treated as largest.
PermutationResult optimal_permutation(const Contingency& c);

/// Clustering accuracy: fraction of items whose true class equals the
/// optimal-permutation image of their predicted cluster.
double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

}  // namespace itgc
