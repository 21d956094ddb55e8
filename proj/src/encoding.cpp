#include "itgc/encoding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "itgc/errors.hpp"

namespace itgc {

void EmbeddingMatrix::validate() const {
    if (data.size() != rows * cols)
        throw DimensionMismatch(data.size(), rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (!std::isfinite(at(i, j))) throw NonFiniteValue(i, j);
        }
    }
    if (ids && ids->size() != rows) throw ManifestLengthMismatch(ids->size(), rows);
}

namespace {

// Unit-normalizes every row in place; reports the offending row when a norm
// vanishes.
void normalize_rows(EmbeddingMatrix& m) {
    for (std::size_t i = 0; i < m.rows; ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) sq += m.at(i, j) * m.at(i, j);
        double norm = std::sqrt(sq);
        if (norm == 0.0) throw ZeroNormRow(i);
        for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) /= norm;
    }
}

}  // namespace

ConceptMatrix project(const EmbeddingMatrix& images, const EmbeddingMatrix& concepts_emb,
                      const ConceptSet& cs, bool normalize) {
    if (images.cols != concepts_emb.cols)
        throw DimensionMismatch(images.cols, concepts_emb.cols);
    if (concepts_emb.rows != cs.size())
        throw DimensionMismatch(concepts_emb.rows, cs.size());
    if (cs.size() == 0) throw EmptyConceptSet();

    EmbeddingMatrix img = images;
    EmbeddingMatrix txt = concepts_emb;
    if (normalize) {
        normalize_rows(img);
        normalize_rows(txt);
    }

    ConceptMatrix z;
    z.n = img.rows;
    z.m = txt.rows;
    z.concept_set = cs;
    z.scores.resize(z.n * z.m);
    for (std::size_t i = 0; i < z.n; ++i) {
        for (std::size_t c = 0; c < z.m; ++c) {
            double dot = 0.0;
            for (std::size_t j = 0; j < img.cols; ++j) dot += img.at(i, j) * txt.at(c, j);
            z.at(i, c) = dot;
        }
    }
    return z;
}

ConceptMatrix score_by_query(const std::vector<std::string>& item_ids, const ConceptSet& cs,
                             PairScorer& scorer, ScoreMode mode) {
    ConceptMatrix z;
    z.n = item_ids.size();
    z.m = cs.size();
    z.concept_set = cs;
    z.scores.assign(z.n * z.m, 0.0);

    const std::size_t total = z.n * z.m;
    const int workers =
        std::max(1, std::min<int>(scorer.max_in_flight(), static_cast<int>(total)));

    std::atomic<std::size_t> cursor{0};
    std::mutex error_mutex;
    std::size_t error_index = total;  // lowest failing pair index wins
    std::exception_ptr error;

    auto work = [&] {
        for (;;) {
            std::size_t idx = cursor.fetch_add(1);
            if (idx >= total) return;
            std::size_t i = idx / z.m;
            std::size_t c = idx % z.m;
            try {
                double value = scorer.score(item_ids[i], cs.concepts[c]);
                if (mode == ScoreMode::text_score) {
                    if (value < 0.0 || value > 10.0)
                        throw ScoreOutOfRange(item_ids[i], cs.concepts[c], value);
                    value /= 10.0;
                }
                z.scores[idx] = value;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (idx < error_index) {
                    error_index = idx;
                    error = std::current_exception();
                }
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return z;
}

std::vector<std::pair<std::string, double>> top_activations(const ConceptMatrix& z,
                                                            std::size_t item,
                                                            std::size_t top_k) {
    if (item >= z.n) throw IndexOutOfRange(item, z.n);
    if (top_k < 1 || top_k > z.m) throw IndexOutOfRange(top_k, z.m);

    std::vector<std::size_t> order(z.m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return z.at(item, a) > z.at(item, b);
    });

    std::vector<std::pair<std::string, double>> out;
    out.reserve(top_k);
    for (std::size_t r = 0; r < top_k; ++r) {
        out.emplace_back(z.concept_set.concepts[order[r]], z.at(item, order[r]));
    }
    return out;
}

ConceptMatrix standardize_columns(ConceptMatrix z) {
    if (z.n < 2) throw TooFewItems(z.n, 2);
    for (std::size_t c = 0; c < z.m; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < z.n; ++i) mean += z.at(i, c);
        mean /= static_cast<double>(z.n);
        double var = 0.0;
        for (std::size_t i = 0; i < z.n; ++i) {
            double d = z.at(i, c) - mean;
            var += d * d;
        }
        var /= static_cast<double>(z.n);  // population variance
        double std_dev = std::sqrt(var);
        if (std_dev == 0.0) {
            for (std::size_t i = 0; i < z.n; ++i) z.at(i, c) = 0.0;
        } else {
            for (std::size_t i = 0; i < z.n; ++i) z.at(i, c) = (z.at(i, c) - mean) / std_dev;
        }
    }
    return z;
}

}  // namespace itgc
