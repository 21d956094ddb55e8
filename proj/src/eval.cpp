#include "itgc/eval.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "itgc/errors.hpp"

namespace itgc {

Contingency contingency(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) throw LengthMismatch(y_true.size(), y_pred.size());

    std::map<int, std::size_t> true_index;
    std::map<int, std::size_t> pred_index;
    for (int v : y_true) true_index.emplace(v, 0);
    for (int v : y_pred) pred_index.emplace(v, 0);

    Contingency c;
    for (auto& [value, index] : true_index) {
        index = c.true_values.size();
        c.true_values.push_back(value);
    }
    for (auto& [value, index] : pred_index) {
        index = c.pred_values.size();
        c.pred_values.push_back(value);
    }
    c.t_classes = c.true_values.size();
    c.p_clusters = c.pred_values.size();
    c.matrix.assign(c.t_classes, std::vector<long long>(c.p_clusters, 0));
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ++c.matrix[true_index[y_true[i]]][pred_index[y_pred[i]]];
        ++c.total;
    }
    return c;
}

namespace {

constexpr long long kInf = std::numeric_limits<long long>::max() / 4;

// Shortest-augmenting-path Hungarian on a square cost matrix (minimization).
// Returns the column matched to each row.
std::vector<int> hungarian_min(const std::vector<std::vector<long long>>& cost) {
    const int n = static_cast<int>(cost.size());
    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<long long> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = match[j0], j1 = 0;
            long long delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
    }
    return row_to_col;
}

// Maximum total profit over perfect matchings of a square profit matrix.
long long max_profit(const std::vector<std::vector<long long>>& profit) {
    const int n = static_cast<int>(profit.size());
    if (n == 0) return 0;
    long long top = 0;
    for (const auto& row : profit) {
        for (long long p : row) top = std::max(top, p);
    }
    std::vector<std::vector<long long>> cost(n, std::vector<long long>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) cost[i][j] = top - profit[i][j];
    }
    std::vector<int> cols = hungarian_min(cost);
    long long total = 0;
    for (int i = 0; i < n; ++i) total += profit[i][cols[i]];
    return total;
}

}  // namespace

PermutationResult optimal_permutation(const Contingency& c) {
    const int P = static_cast<int>(c.p_clusters);
    const int T = static_cast<int>(c.t_classes);
    const int s = std::max(P, T);

    // square profit matrix, rows = pred clusters, cols = true classes,
    // zero-padded so unmatched clusters/classes cost nothing
    std::vector<std::vector<long long>> profit(s, std::vector<long long>(s, 0));
    for (int p = 0; p < P; ++p) {
        for (int t = 0; t < T; ++t) profit[p][t] = c.matrix[t][p];
    }

    const long long best_total = max_profit(profit);

    // Fix pred clusters one by one to the smallest class index that still
    // admits an optimal completion; this yields the lexicographically
    // smallest optimal mapping (padding columns, i.e. "no class", last).
    PermutationResult result;
    result.pred_to_true.assign(P, -1);
    result.matched = best_total;

    std::vector<int> free_cols(s);
    for (int j = 0; j < s; ++j) free_cols[j] = j;
    long long fixed_profit = 0;

    for (int p = 0; p < P; ++p) {
        int chosen = -1;
        for (std::size_t ci = 0; ci < free_cols.size(); ++ci) {
            int t = free_cols[ci];
            // residual problem: rows p+1..s-1 over the remaining columns
            std::vector<std::vector<long long>> rest;
            rest.reserve(s - p - 1);
            for (int r = p + 1; r < s; ++r) {
                std::vector<long long> row;
                row.reserve(free_cols.size() - 1);
                for (int t2 : free_cols) {
                    if (t2 != t) row.push_back(profit[r][t2]);
                }
                rest.push_back(std::move(row));
            }
            if (fixed_profit + profit[p][t] + max_profit(rest) == best_total) {
                chosen = t;
                fixed_profit += profit[p][t];
                free_cols.erase(free_cols.begin() + static_cast<std::ptrdiff_t>(ci));
                break;
            }
        }
        result.pred_to_true[p] = chosen < T ? chosen : -1;  // padding column = no class
    }
    return result;
}

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) throw LengthMismatch(y_true.size(), y_pred.size());
    if (y_true.empty()) throw EmptyInput("accuracy over zero items");

    Contingency c = contingency(y_true, y_pred);
    PermutationResult perm = optimal_permutation(c);
    return static_cast<double>(perm.matched) / static_cast<double>(c.total);
}

}  // namespace itgc
