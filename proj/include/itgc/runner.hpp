#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "itgc/backends.hpp"
#include "itgc/oracle.hpp"
#include "itgc/search.hpp"
#include "itgc/synthworld.hpp"

namespace itgc {

/// Everything a run needs, loaded from a JSON manifest. Exactly one input
/// source is allowed: an embedding file, a scoring backend plus item
/// manifest, or a synthetic world spec.
struct RunManifest {
    enum class InputKind { embedding_file, scoring, synthetic };

    std::string criteria;
    std::optional<int> num_clusters;
    std::uint64_t seed = 0;
    std::string output_dir = "itgc-out";

    SearchConfig search;
    AuxiliaryInfo aux;
    double partial_labels_fraction = 0.0;  // synthetic input only

    InputKind input = InputKind::synthetic;
    std::string embedding_path;                     // embedding_file
    std::string item_manifest_path;                 // scoring
    BackendConfig scoring_backend;                  // scoring
    ScoreMode score_mode = ScoreMode::text_score;   // scoring
    std::size_t synth_n = 0;                        // synthetic
    std::map<std::string, std::size_t> synth_attributes;
    std::uint64_t synth_seed = 0;
    SynthOraclePolicy policy;

    bool use_oracle_generator = false;  // otherwise chat_backend
    BackendConfig chat_backend;
    BackendConfig embeddings_backend;   // concept texts, embedding_file input
};

RunManifest load_manifest(const std::string& path);
RunManifest manifest_from_json(const std::string& text);

struct RunOutcome {
    SearchResult result;
    std::vector<std::string> item_ids;
    int exit_code = 0;  // 0 ok, 2 backend failure with partial results
};

/// Executes the search described by the manifest.
RunOutcome execute_run(const RunManifest& manifest);

/// Writes report.json, assignments.csv, history.csv, concepts.txt and
/// activations.json under out_dir.
void write_run_artifacts(const RunManifest& manifest, const RunOutcome& outcome,
                         const std::string& out_dir);

/// The report document alone (also embedded in report.json).
std::string report_json(const RunManifest& manifest, const RunOutcome& outcome);

// csv helpers shared by the run and eval commands
std::map<std::string, int> read_label_csv(const std::string& path);
void write_label_csv(const std::string& path, const std::vector<std::string>& ids,
                     const std::vector<int>& labels);

/// ACC between two id->label CSVs over the shared id set; throws IdMismatch
/// when the sets differ.
double eval_label_files(const std::string& pred_path, const std::string& truth_path);

}  // namespace itgc
