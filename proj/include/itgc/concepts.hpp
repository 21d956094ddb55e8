#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace itgc {

/// The clustering problem: a user criterion over a set of item ids.
struct ClusteringTask {
    std::string criteria;                  // the user query T
    std::optional<int> num_clusters;       // k, when known a-priori
    std::vector<std::string> item_ids;     // the dataset index

    /// Throws InvalidTask when the invariants do not hold
    /// (non-empty distinct ids; 2 <= k <= n when k is given).
    void validate() const;
};

/// An ordered set of "attribute: value" concept strings with the search
/// iteration that produced it.
struct ConceptSet {
    std::vector<std::string> concepts;
    int iteration = 0;

    std::size_t size() const { return concepts.size(); }
};

/// Per-item cluster labels. -1 marks noise (density methods only).
struct Assignment {
    std::vector<int> labels;
    int k_effective = 0;  // distinct non-noise labels

    static Assignment from_labels(std::vector<int> labels);
};

struct HistoryRecord {
    ConceptSet concept_set;
    double silhouette = 0.0;
    std::optional<double> aux_acc;
};

/// Ordered search history. best_index tracks the maximal-silhouette record,
/// earliest record winning ties.
class SearchHistory {
public:
    void append(HistoryRecord record);

    const std::vector<HistoryRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    std::size_t best_index() const { return best_index_; }
    const HistoryRecord& best() const { return records_.at(best_index_); }

private:
    std::vector<HistoryRecord> records_;
    std::size_t best_index_ = 0;
};

/// Extracts concepts from generator output: every line whose first
/// non-whitespace character is '-' contributes one concept, dash and
/// surrounding whitespace stripped. Case-insensitive duplicates are dropped,
/// first occurrence kept. Throws EmptyConceptSet when nothing survives.
ConceptSet parse_concept_list(const std::string& raw, int iteration = 0);

/// Trims trailing punctuation from each concept, re-deduplicates, and checks
/// the set still has at least min_m concepts. Throws TooFewConcepts otherwise.
ConceptSet validate_concept_set(ConceptSet cs, std::size_t min_m);

/// Renders a concept set as "- {concept}\n" lines, the inverse of
/// parse_concept_list on well-formed sets.
std::string render_concept_list(const ConceptSet& cs);

/// Case-insensitive, whitespace-normalized key used for deduplication.
std::string concept_dedupe_key(const std::string& concept_text);

// JSON wire forms. Concept sets serialize as
// {"iteration": j, "concepts": [...]}; histories as an array of
// {"iteration", "concepts", "silhouette", "aux_acc"}.
std::string concept_set_to_json(const ConceptSet& cs);
ConceptSet concept_set_from_json(const std::string& text);
std::string history_to_json(const SearchHistory& history);
SearchHistory history_from_json(const std::string& text);

}  // namespace itgc
