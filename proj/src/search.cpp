#include "itgc/search.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "itgc/errors.hpp"
#include "itgc/eval.hpp"
#include "itgc/rng.hpp"

namespace itgc {

namespace {

constexpr const char* kInitialTemplate =
    "You are an expert in generating visual concepts that can be used to classify visual "
    "categories.\n"
    "Now you have a dataset and you want to generate visual concepts that are useful for "
    "classifying the {CRITERIA} of the given dataset.\n"
    "Please start each line of attributes with `-` and only one attribute per line.\n"
    "Please generate statements containing specified values for the attribute, for example, "
    "generate \"color: red\", instead of \"color\".";

constexpr const char* kMutationTemplate =
    "Here are sets of attributes that is used as sets of descriptors for classifying a set of "
    "images into different classes.\n"
    "These attributes are used for the classification on the class criteria of {CRITERIA}.\n"
    "Each sets of attributes are ranked according to the silhouette score for clustering the "
    "data.\n"
    "Based on what you've seen below, propose a new set of visual attributes, that you think "
    "might achieve an even higher score.\n"
    "Please start each line of attributes with `-` and only one attribute per line.\n"
    "Please generate statements containing specified values for the attribute, for example, "
    "generate \"color: red\", instead of \"color\".\n"
    "The following lines contains the previously used sets of attributes and their score, "
    "mutate and evolve upon them to generate a new set of attributes to achieve a higher "
    "score:\n"
    "{HISTORY}\n"
    "Now please generate a new set of attributes based on the previous instructions.";

constexpr const char* kTextScoreQuestion =
    "Please indicate the level of the presence of {concept} in the given image in a number "
    "between 0-10.";

constexpr const char* kLogitQuestion =
    "Does the image contains the concept of {concept}? A. Yes, B. No";

std::string replace_all(std::string text, const std::string& placeholder,
                        const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(placeholder, pos)) != std::string::npos) {
        text.replace(pos, placeholder.size(), value);
        pos += value.size();
    }
    return text;
}

std::string format_fixed4(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

std::string history_block(const HistoryRecord& record) {
    std::string block = render_concept_list(record.concept_set);
    block += format_fixed4(record.silhouette);
    if (record.aux_acc) {
        block += " labeled-subset accuracy: " + format_fixed4(*record.aux_acc);
    }
    return block;
}

// Bounds the prompt: the most recent 8 records plus the best one, in
// iteration order.
std::vector<std::size_t> prompt_record_indices(const SearchHistory& history) {
    constexpr std::size_t kWindow = 8;
    std::set<std::size_t> keep;
    keep.insert(history.best_index());
    std::size_t n = history.size();
    for (std::size_t i = n > kWindow ? n - kWindow : 0; i < n; ++i) keep.insert(i);
    return {keep.begin(), keep.end()};
}

}  // namespace

ProjectionEncoder::ProjectionEncoder(EmbeddingMatrix images, TextEmbedder& embedder,
                                     bool normalize)
    : images_(std::move(images)), embedder_(embedder), normalize_(normalize) {}

ConceptMatrix ProjectionEncoder::encode(const std::vector<std::string>& item_ids,
                                        const ConceptSet& cs) {
    if (item_ids.size() != images_.rows) throw DimensionMismatch(item_ids.size(), images_.rows);
    EmbeddingMatrix texts = embedder_.embed(cs.concepts);
    return project(images_, texts, cs, normalize_);
}

QueryScoreEncoder::QueryScoreEncoder(PairScorer& scorer, ScoreMode mode)
    : scorer_(scorer), mode_(mode) {}

ConceptMatrix QueryScoreEncoder::encode(const std::vector<std::string>& item_ids,
                                        const ConceptSet& cs) {
    return score_by_query(item_ids, cs, scorer_, mode_);
}

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::converged: return "converged";
        case StopReason::max_iterations: return "max_iterations";
        case StopReason::backend_failure: return "backend_failure";
    }
    return "unknown";
}

std::string initial_prompt(const std::string& criteria, const AuxiliaryInfo& aux) {
    if (criteria.empty()) throw InvalidTask("criteria is empty");
    std::string prompt = replace_all(kInitialTemplate, "{CRITERIA}", criteria);
    if (aux.example_class_names && !aux.example_class_names->empty()) {
        prompt += "\nExample classes of the " + criteria + " include: ";
        const auto& names = *aux.example_class_names;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i > 0) prompt += ", ";
            prompt += names[i];
        }
        prompt += ".";
    }
    return prompt;
}

std::string mutation_prompt(const std::string& criteria, const SearchHistory& history) {
    if (history.empty()) throw InvalidTask("mutation prompt needs a non-empty history");
    std::string blocks;
    bool first = true;
    for (std::size_t index : prompt_record_indices(history)) {
        if (!first) blocks += '\n';
        blocks += history_block(history.records()[index]);
        first = false;
    }
    std::string prompt = replace_all(kMutationTemplate, "{CRITERIA}", criteria);
    return replace_all(std::move(prompt), "{HISTORY}", blocks);
}

std::string score_question(const std::string& concept_text, ScoreMode mode) {
    const char* tmpl = mode == ScoreMode::text_score ? kTextScoreQuestion : kLogitQuestion;
    return replace_all(tmpl, "{concept}", concept_text);
}

bool converged(const SearchHistory& history, const SearchConfig& cfg) {
    const std::size_t n = history.size();
    const std::size_t window = static_cast<std::size_t>(cfg.patience);
    // record 1 always counts as an improvement (it sets the baseline)
    if (n < window + 1) return false;
    double best = history.records()[0].silhouette;
    std::vector<double> gains;
    gains.reserve(n);
    for (std::size_t i = 1; i < n; ++i) {
        double s = history.records()[i].silhouette;
        gains.push_back(std::max(0.0, s - best));
        best = std::max(best, s);
    }
    for (std::size_t i = gains.size() - window; i < gains.size(); ++i) {
        if (gains[i] > cfg.min_improvement) return false;
    }
    return true;
}

SearchResult run_search(const ClusteringTask& task, const SearchConfig& cfg,
                        const AuxiliaryInfo& aux, ConceptGenerator& generator,
                        ConceptEncoderBackend& encoder,
                        const std::function<void(const std::string&)>& log) {
    task.validate();

    SearchResult result;
    auto warn = [&](const std::string& message) {
        result.warnings.push_back(message);
        if (log) log(message);
    };

    // the task's k wins over whatever the clustering config carries
    std::variant<KMeansConfig, DensityConfig> clustering = cfg.clustering;
    if (auto* km = std::get_if<KMeansConfig>(&clustering); km && task.num_clusters) {
        km->k = *task.num_clusters;
    }

    bool new_best = false;
    auto record_iteration = [&](ConceptSet cs, ConceptMatrix z, Assignment a, double s) {
        HistoryRecord record;
        record.concept_set = std::move(cs);
        record.silhouette = s;
        if (aux.partial_labels && !aux.partial_labels->empty()) {
            std::vector<int> y_true;
            std::vector<int> y_pred;
            for (std::size_t i = 0; i < task.item_ids.size(); ++i) {
                auto it = aux.partial_labels->find(task.item_ids[i]);
                if (it == aux.partial_labels->end()) continue;
                y_true.push_back(it->second);
                y_pred.push_back(a.labels[i]);
            }
            if (!y_true.empty()) record.aux_acc = accuracy(y_true, y_pred);
        }
        std::size_t previous_best = result.history.empty() ? 0 : result.history.best_index();
        result.history.append(record);
        new_best = result.history.best_index() != previous_best || result.history.size() == 1;
        if (new_best) {
            result.best_concepts = record.concept_set;
            result.best_assignment = std::move(a);
            result.best_silhouette = s;
            result.best_matrix = std::move(z);
        }
        ++result.iterations_run;
    };

    result.stop_reason = StopReason::max_iterations;
    try {
        for (int attempt = 1; attempt <= cfg.max_iterations; ++attempt) {
            std::string prompt = result.history.empty()
                                     ? initial_prompt(task.criteria, aux)
                                     : mutation_prompt(task.criteria, result.history);

            // parse failures get fresh samples of the same prompt
            std::optional<ConceptSet> concepts;
            for (int try_index = 0; try_index <= cfg.reprompt_retries; ++try_index) {
                std::string raw = generator.generate(prompt);
                try {
                    ConceptSet cs = parse_concept_list(raw, attempt);
                    cs = validate_concept_set(std::move(cs), cfg.min_concepts);
                    if (cs.size() > cfg.max_concepts) cs.concepts.resize(cfg.max_concepts);
                    concepts = std::move(cs);
                    break;
                } catch (const Error& e) {
                    warn("iteration " + std::to_string(attempt) + ": " + e.what());
                }
            }
            if (!concepts) {
                warn("iteration " + std::to_string(attempt) +
                     " skipped: generator kept returning too few concepts");
                continue;
            }

            ConceptMatrix z = encoder.encode(task.item_ids, *concepts);
            if (cfg.standardize) z = standardize_columns(std::move(z));

            Assignment assignment;
            double score = 0.0;
            try {
                if (const auto* km = std::get_if<KMeansConfig>(&clustering)) {
                    KMeansConfig iter_cfg = *km;
                    iter_cfg.seed = fnv1a64_mix(cfg.seed, static_cast<std::uint64_t>(attempt));
                    assignment = kmeans(z, iter_cfg);
                } else {
                    const auto& density = std::get<DensityConfig>(clustering);
                    assignment = density.eps_grid ? hdbscan_lite(z, density) : dbscan(z, density);
                }
                score = silhouette(z, assignment);
            } catch (const Error& e) {
                warn("iteration " + std::to_string(attempt) +
                     " skipped: clustering failed: " + e.what());
                continue;
            }

            record_iteration(std::move(*concepts), std::move(z), std::move(assignment), score);
            if (converged(result.history, cfg)) {
                result.stop_reason = StopReason::converged;
                break;
            }
        }
    } catch (const BackendError& e) {
        if (result.history.empty()) throw;
        warn(std::string("backend failure, returning best so far: ") + e.what());
        result.stop_reason = StopReason::backend_failure;
    }

    if (result.history.empty()) {
        throw Error("search produced no usable iterations");
    }
    return result;
}

}  // namespace itgc
