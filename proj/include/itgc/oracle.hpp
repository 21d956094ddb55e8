#pragma once

#include <cstdint>
#include <string>

#include "itgc/encoding.hpp"
#include "itgc/search.hpp"
#include "itgc/synthworld.hpp"

namespace itgc {

/// Behavioral knobs of the synthetic generator/encoder pair.
struct SynthOraclePolicy {
    double relevance_bias = 0.5;     // P(a proposed concept targets the true criterion)
    double pool_mutation_rate = 0.5; // P(a best-record concept is dropped when mutating)
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Deterministic LLM stand-in: proposes "attribute: value" concepts from the
/// world's vocabularies, biased toward the true criterion, keeping concepts
/// shared with the best record after the first iteration. The output always
/// covers every value of at least one attribute. sample_index selects the
/// sampling stream (0 = derive from history length); distinct indices model
/// fresh temperature-1 samples of the same prompt.
ConceptSet oracle_generate(const SynthWorld& world, const std::string& criterion,
                           const SearchHistory& history, const SynthOraclePolicy& policy,
                           std::uint64_t sample_index = 0);

/// Deterministic VLM stand-in: score 1 when the item's latent attribute
/// matches the concept's value, 0 when it does not, 0.5 for concepts outside
/// the vocabularies; plus Gaussian noise seeded per (item, concept).
double oracle_score(const SynthWorld& world, const std::string& item_id,
                    const std::string& concept_text, const SynthOraclePolicy& policy);

ConceptMatrix oracle_encode(const SynthWorld& world, const std::vector<std::string>& item_ids,
                            const ConceptSet& cs, const SynthOraclePolicy& policy);

/// ConceptGenerator adapter for run_search. It reads the history back out of
/// the mutation prompt, the same view a real LLM would get.
class OracleGenerator : public ConceptGenerator {
public:
    OracleGenerator(const SynthWorld& world, std::string criterion, SynthOraclePolicy policy);
    std::string generate(const std::string& prompt) override;

private:
    const SynthWorld& world_;
    std::string criterion_;
    SynthOraclePolicy policy_;
    std::uint64_t calls_ = 0;  // fresh sampling stream per call
};

class OracleEncoder : public ConceptEncoderBackend {
public:
    OracleEncoder(const SynthWorld& world, SynthOraclePolicy policy);
    ConceptMatrix encode(const std::vector<std::string>& item_ids,
                         const ConceptSet& cs) override;

private:
    const SynthWorld& world_;
    SynthOraclePolicy policy_;
};

/// PairScorer view of the oracle, for the /score endpoint fixtures and the
/// query-score path. Scores land in [0,10] text-score range.
class OracleScorer : public PairScorer {
public:
    OracleScorer(const SynthWorld& world, SynthOraclePolicy policy);
    double score(const std::string& item_id, const std::string& concept_text) override;

private:
    const SynthWorld& world_;
    SynthOraclePolicy policy_;
};

}  // namespace itgc
