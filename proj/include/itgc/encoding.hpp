#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "itgc/concepts.hpp"

namespace itgc {

/// Dense row-major matrix of d-dimensional embeddings with optional row ids.
struct EmbeddingMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;                      // rows * cols, row-major
    std::optional<std::vector<std::string>> ids;   // per-row, when known

    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    /// Throws on size mismatch or non-finite values.
    void validate() const;
};

/// n x m concept-presence scores; the clustering feature space. Column order
/// matches the concept set that defined it.
struct ConceptMatrix {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<double> scores;  // n * m, row-major
    ConceptSet concept_set;

    std::span<const double> row(std::size_t i) const {
        return {scores.data() + i * m, m};
    }
    double& at(std::size_t i, std::size_t j) { return scores[i * m + j]; }
    double at(std::size_t i, std::size_t j) const { return scores[i * m + j]; }
};

/// Maps texts to embedding rows in input order.
class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    virtual EmbeddingMatrix embed(const std::vector<std::string>& texts) = 0;
};

/// Answers (item, concept) presence queries. Implementations: HTTP scoring
/// backend, synthetic oracle, scripted test doubles.
class PairScorer {
public:
    virtual ~PairScorer() = default;
    virtual double score(const std::string& item_id, const std::string& concept_text) = 0;
    /// Upper bound on concurrent score() calls the implementation tolerates.
    virtual int max_in_flight() const { return 1; }
};

enum class ScoreMode {
    text_score,  // backend returns a value in [0,10]; stored as value/10
    logit,       // backend returns a raw logit; stored as-is
};

/// z[i][m] = image_i . concept_m. With normalize on (the default), rows of
/// both matrices are unit-normalized first, making each entry a cosine.
ConceptMatrix project(const EmbeddingMatrix& images, const EmbeddingMatrix& concepts_emb,
                      const ConceptSet& cs, bool normalize = true);

/// Queries the scorer for every (item, concept) pair exactly once, possibly
/// concurrently; results land by index so completion order is irrelevant.
ConceptMatrix score_by_query(const std::vector<std::string>& item_ids, const ConceptSet& cs,
                             PairScorer& scorer, ScoreMode mode = ScoreMode::text_score);

/// Top concepts for one item by descending score, ties to the lower column.
std::vector<std::pair<std::string, double>> top_activations(const ConceptMatrix& z,
                                                            std::size_t item,
                                                            std::size_t top_k);

/// Shifts each column to mean 0 / population std 1. Constant columns become
/// all-zero. Requires n >= 2.
ConceptMatrix standardize_columns(ConceptMatrix z);

}  // namespace itgc
