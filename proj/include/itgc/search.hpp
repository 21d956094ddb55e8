#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "itgc/clustering.hpp"
#include "itgc/concepts.hpp"
#include "itgc/encoding.hpp"

namespace itgc {

/// Proposes concept sets from a prompt. Implementations: HTTP chat backend,
/// synthetic oracle, scripted test doubles.
class ConceptGenerator {
public:
    virtual ~ConceptGenerator() = default;
    virtual std::string generate(const std::string& prompt) = 0;
};

/// Maps (items, concept set) to the concept-score matrix.
class ConceptEncoderBackend {
public:
    virtual ~ConceptEncoderBackend() = default;
    virtual ConceptMatrix encode(const std::vector<std::string>& item_ids,
                                 const ConceptSet& cs) = 0;
};

enum class EncoderMode { projection, query_score };

/// Fixed image embeddings, concept texts embedded per iteration and
/// projected in.
class ProjectionEncoder : public ConceptEncoderBackend {
public:
    ProjectionEncoder(EmbeddingMatrix images, TextEmbedder& embedder, bool normalize = true);
    ConceptMatrix encode(const std::vector<std::string>& item_ids,
                         const ConceptSet& cs) override;

private:
    EmbeddingMatrix images_;
    TextEmbedder& embedder_;
    bool normalize_;
};

/// Per-pair question scoring through a PairScorer.
class QueryScoreEncoder : public ConceptEncoderBackend {
public:
    QueryScoreEncoder(PairScorer& scorer, ScoreMode mode);
    ConceptMatrix encode(const std::vector<std::string>& item_ids,
                         const ConceptSet& cs) override;

private:
    PairScorer& scorer_;
    ScoreMode mode_;
};

struct SearchConfig {
    int max_iterations = 15;
    int patience = 3;              // P
    double min_improvement = 1e-3; // epsilon on the best silhouette
    std::size_t min_concepts = 3;
    std::size_t max_concepts = 64;
    int reprompt_retries = 2;
    std::variant<KMeansConfig, DensityConfig> clustering = KMeansConfig{};
    EncoderMode encoder_mode = EncoderMode::projection;
    bool standardize = true;
    std::uint64_t seed = 0;
};

struct AuxiliaryInfo {
    std::optional<std::map<std::string, int>> partial_labels;  // item id -> class
    std::optional<std::vector<std::string>> example_class_names;
};

enum class StopReason { converged, max_iterations, backend_failure };

std::string to_string(StopReason reason);

struct SearchResult {
    ConceptSet best_concepts;
    Assignment best_assignment;
    double best_silhouette = 0.0;
    ConceptMatrix best_matrix;  // concept space of the best record
    SearchHistory history;
    int iterations_run = 0;
    StopReason stop_reason = StopReason::max_iterations;
    std::vector<std::string> warnings;
};

/// The task prompt with {CRITERIA} substituted; when example class names are
/// given, one sentence listing them is appended.
std::string initial_prompt(const std::string& criteria, const AuxiliaryInfo& aux = {});

/// The mutate-and-evolve prompt: {CRITERIA} substituted and {HISTORY}
/// expanded to one attributes-plus-score block per record, scores with four
/// decimals, labeled-subset accuracy appended where present.
std::string mutation_prompt(const std::string& criteria, const SearchHistory& history);

/// The per-concept scoring question used by the query-score encoder.
std::string score_question(const std::string& concept_text, ScoreMode mode);

/// True when the best silhouette improved by no more than cfg.min_improvement
/// over each of the last cfg.patience records.
bool converged(const SearchHistory& history, const SearchConfig& cfg);

/// The full iterative search: prompt, generate, parse, encode, cluster,
/// score with silhouette, feed history back, stop on convergence or the
/// iteration cap. A backend failure after at least one good iteration
/// returns best-so-far with stop_reason=backend_failure.
SearchResult run_search(const ClusteringTask& task, const SearchConfig& cfg,
                        const AuxiliaryInfo& aux, ConceptGenerator& generator,
                        ConceptEncoderBackend& encoder,
                        const std::function<void(const std::string&)>& log = {});

}  // namespace itgc
