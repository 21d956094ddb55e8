#include "itgc/runner.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "itgc/errors.hpp"
#include "itgc/eval.hpp"
#include "itgc/rng.hpp"

namespace itgc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

BackendConfig backend_from_json(const json& j) {
    BackendConfig cfg;
    cfg.base_url = j.value("base_url", "");
    cfg.model_name = j.value("model", j.value("model_name", ""));
    cfg.api_key = j.value("api_key", "");
    cfg.timeout_s = j.value("timeout_s", 60.0);
    cfg.retries = j.value("retries", 3);
    cfg.backoff_ms = j.value("backoff_ms", 1000);
    cfg.max_in_flight = j.value("max_in_flight", 8);
    cfg.temperature = j.value("temperature", 1.0);
    cfg.replay_dir = j.value("replay_dir", "");
    cfg.record = j.value("record", false);
    return cfg;
}

std::variant<KMeansConfig, DensityConfig> clustering_from_json(const json& j) {
    std::string algorithm = j.value("algorithm", "kmeans");
    if (algorithm == "kmeans") {
        KMeansConfig km;
        km.k = j.value("k", 2);
        km.restarts = j.value("restarts", 10);
        km.max_iters = j.value("max_iters", 300);
        km.tol = j.value("tol", 1e-4);
        return km;
    }
    DensityConfig density;
    density.min_pts = j.value("min_pts", 5);
    if (algorithm == "dbscan") {
        density.eps = j.at("eps").get<double>();
        return density;
    }
    if (algorithm == "hdbscan") {
        density.eps_grid = j.at("eps_grid").get<std::vector<double>>();
        density.eps = density.eps_grid->front();
        return density;
    }
    throw InvalidTask("unknown clustering algorithm: " + algorithm);
}

SynthOraclePolicy policy_from_json(const json& j) {
    SynthOraclePolicy policy;
    policy.relevance_bias = j.value("relevance_bias", 0.5);
    policy.pool_mutation_rate = j.value("pool_mutation_rate", 0.3);
    policy.noise_sigma = j.value("noise_sigma", 0.0);
    policy.seed = j.value("seed", 0ull);
    return policy;
}

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string format_fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

RunManifest manifest_from_json(const std::string& text) {
    json j = json::parse(text);
    RunManifest m;
    m.criteria = j.at("criteria").get<std::string>();
    if (j.contains("num_clusters") && !j.at("num_clusters").is_null()) {
        m.num_clusters = j.at("num_clusters").get<int>();
    }
    m.seed = j.value("seed", 0ull);
    m.output_dir = j.value("output_dir", "itgc-out");

    if (j.contains("search")) {
        const json& s = j.at("search");
        m.search.max_iterations = s.value("max_iterations", 15);
        m.search.patience = s.value("patience", 3);
        m.search.min_improvement = s.value("min_improvement", 1e-3);
        m.search.min_concepts = s.value("min_concepts", std::size_t{3});
        m.search.max_concepts = s.value("max_concepts", std::size_t{64});
        m.search.reprompt_retries = s.value("reprompt_retries", 2);
        m.search.standardize = s.value("standardize", true);
    }
    m.search.seed = m.seed;
    if (j.contains("clustering")) {
        m.search.clustering = clustering_from_json(j.at("clustering"));
    }

    const json& input = j.at("input");
    std::string type = input.at("type").get<std::string>();
    if (type == "embedding_file") {
        m.input = RunManifest::InputKind::embedding_file;
        m.embedding_path = input.at("path").get<std::string>();
        m.search.encoder_mode = EncoderMode::projection;
        if (!j.contains("concept_embeddings"))
            throw InvalidTask("embedding_file input needs a concept_embeddings backend");
        m.embeddings_backend = backend_from_json(j.at("concept_embeddings"));
    } else if (type == "scoring") {
        m.input = RunManifest::InputKind::scoring;
        m.item_manifest_path = input.at("item_manifest").get<std::string>();
        m.scoring_backend = backend_from_json(input.at("backend"));
        m.score_mode =
            input.value("mode", "text_score") == "logit" ? ScoreMode::logit
                                                         : ScoreMode::text_score;
        m.search.encoder_mode = EncoderMode::query_score;
    } else if (type == "synthetic") {
        m.input = RunManifest::InputKind::synthetic;
        const json& world = input.at("world");
        m.synth_n = world.at("n_items").get<std::size_t>();
        for (const auto& [name, size] : world.at("attributes").items()) {
            m.synth_attributes[name] = size.get<std::size_t>();
        }
        m.synth_seed = world.value("seed", m.seed);
        if (input.contains("policy")) m.policy = policy_from_json(input.at("policy"));
        m.search.encoder_mode = EncoderMode::query_score;
        m.partial_labels_fraction = input.value("partial_labels_fraction", 0.0);
    } else {
        throw InvalidTask("unknown input type: " + type);
    }

    if (j.contains("generator")) {
        const json& g = j.at("generator");
        std::string gtype = g.value("type", "oracle");
        if (gtype == "oracle") {
            m.use_oracle_generator = true;
        } else if (gtype == "chat") {
            m.use_oracle_generator = false;
            m.chat_backend = backend_from_json(g.at("backend"));
        } else {
            throw InvalidTask("unknown generator type: " + gtype);
        }
    } else {
        m.use_oracle_generator = m.input == RunManifest::InputKind::synthetic;
    }
    if (m.use_oracle_generator && m.input != RunManifest::InputKind::synthetic) {
        throw InvalidTask("the oracle generator needs a synthetic input world");
    }

    if (j.contains("aux")) {
        const json& aux = j.at("aux");
        if (aux.contains("example_class_names")) {
            m.aux.example_class_names =
                aux.at("example_class_names").get<std::vector<std::string>>();
        }
        if (aux.contains("partial_labels")) {
            std::map<std::string, int> labels;
            for (const auto& [id, label] : aux.at("partial_labels").items()) {
                labels[id] = label.get<int>();
            }
            m.aux.partial_labels = std::move(labels);
        }
    }
    return m;
}

RunManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read manifest: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return manifest_from_json(buffer.str());
}

namespace {

std::vector<std::string> ids_from_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read item manifest: " + path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        ids.push_back(j.is_string() ? j.get<std::string>()
                                    : j.at("id").get<std::string>());
    }
    return ids;
}

// Deterministically labels a fraction of the world's items with the
// ground-truth criterion classes.
std::map<std::string, int> sample_partial_labels(const SynthWorld& world,
                                                 const std::string& criterion, double fraction,
                                                 std::uint64_t seed) {
    std::vector<int> truth = labels_for(world, criterion);
    std::vector<std::size_t> order(world.items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    SplitMix64 rng(fnv1a64_mix(seed, 0xa0761d6478bd642full));
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.next_below(i)]);
    }
    std::size_t count = static_cast<std::size_t>(fraction * static_cast<double>(order.size()));
    std::map<std::string, int> labels;
    for (std::size_t i = 0; i < count; ++i) {
        labels[world.items[order[i]].id] = truth[order[i]];
    }
    return labels;
}

}  // namespace

RunOutcome execute_run(const RunManifest& manifest) {
    RunOutcome outcome;

    std::unique_ptr<SynthWorld> world;
    std::unique_ptr<ConceptGenerator> generator;
    std::unique_ptr<ConceptEncoderBackend> encoder;
    std::unique_ptr<TextEmbedder> embedder;
    std::unique_ptr<PairScorer> scorer;
    EmbeddingMatrix images;
    AuxiliaryInfo aux = manifest.aux;

    switch (manifest.input) {
        case RunManifest::InputKind::embedding_file: {
            images = load_embedding_matrix(manifest.embedding_path);
            images.validate();
            if (images.ids) {
                outcome.item_ids = *images.ids;
            } else {
                for (std::size_t i = 0; i < images.rows; ++i)
                    outcome.item_ids.push_back(std::to_string(i));
            }
            embedder = std::make_unique<EmbeddingClient>(manifest.embeddings_backend);
            encoder = std::make_unique<ProjectionEncoder>(std::move(images), *embedder);
            break;
        }
        case RunManifest::InputKind::scoring: {
            outcome.item_ids = ids_from_jsonl(manifest.item_manifest_path);
            scorer = std::make_unique<ScoreClient>(manifest.scoring_backend,
                                                   manifest.score_mode);
            encoder = std::make_unique<QueryScoreEncoder>(*scorer, manifest.score_mode);
            break;
        }
        case RunManifest::InputKind::synthetic: {
            world = std::make_unique<SynthWorld>(
                generate_world(manifest.synth_n, manifest.synth_attributes,
                               manifest.synth_seed));
            outcome.item_ids = world->item_ids();
            encoder = std::make_unique<OracleEncoder>(*world, manifest.policy);
            if (manifest.partial_labels_fraction > 0.0 && !aux.partial_labels) {
                aux.partial_labels = sample_partial_labels(
                    *world, manifest.criteria, manifest.partial_labels_fraction, manifest.seed);
            }
            break;
        }
    }

    if (manifest.use_oracle_generator) {
        generator =
            std::make_unique<OracleGenerator>(*world, manifest.criteria, manifest.policy);
    } else {
        generator = std::make_unique<ChatClient>(manifest.chat_backend);
    }

    ClusteringTask task;
    task.criteria = manifest.criteria;
    task.num_clusters = manifest.num_clusters;
    task.item_ids = outcome.item_ids;

    auto log = [](const std::string& message) { std::cerr << message << '\n'; };
    outcome.result = run_search(task, manifest.search, aux, *generator, *encoder, log);
    outcome.exit_code = outcome.result.stop_reason == StopReason::backend_failure ? 2 : 0;
    return outcome;
}

namespace {

json history_json(const SearchHistory& history) {
    json arr = json::array();
    for (const auto& r : history.records()) {
        json rec;
        rec["iteration"] = r.concept_set.iteration;
        rec["concepts"] = r.concept_set.concepts;
        rec["silhouette"] = r.silhouette;
        rec["aux_acc"] = r.aux_acc ? json(*r.aux_acc) : json(nullptr);
        arr.push_back(std::move(rec));
    }
    return arr;
}

json activations_json(const RunOutcome& outcome) {
    const ConceptMatrix& z = outcome.result.best_matrix;
    json out = json::object();
    std::size_t top_k = std::min<std::size_t>(4, z.m);
    for (std::size_t i = 0; i < z.n; ++i) {
        json list = json::array();
        for (const auto& [concept_text, score] : top_activations(z, i, top_k)) {
            list.push_back(json::array({concept_text, score}));
        }
        out[outcome.item_ids[i]] = std::move(list);
    }
    return out;
}

}  // namespace

std::string report_json(const RunManifest& manifest, const RunOutcome& outcome) {
    const SearchResult& r = outcome.result;
    json j;
    j["schema"] = "itgc-report/1";
    j["criteria"] = manifest.criteria;
    j["seed"] = manifest.seed;
    j["timestamp"] = iso_timestamp();
    j["stop_reason"] = to_string(r.stop_reason);
    j["iterations_run"] = r.iterations_run;

    json cfg;
    cfg["max_iterations"] = manifest.search.max_iterations;
    cfg["patience"] = manifest.search.patience;
    cfg["min_improvement"] = manifest.search.min_improvement;
    cfg["min_concepts"] = manifest.search.min_concepts;
    cfg["max_concepts"] = manifest.search.max_concepts;
    cfg["reprompt_retries"] = manifest.search.reprompt_retries;
    cfg["standardize"] = manifest.search.standardize;
    cfg["encoder_mode"] = manifest.search.encoder_mode == EncoderMode::projection
                              ? "projection"
                              : "query_score";
    if (const auto* km = std::get_if<KMeansConfig>(&manifest.search.clustering)) {
        cfg["clustering"] = {{"algorithm", "kmeans"},
                             {"k", manifest.num_clusters ? *manifest.num_clusters : km->k},
                             {"restarts", km->restarts},
                             {"max_iters", km->max_iters},
                             {"tol", km->tol}};
    } else {
        const auto& density = std::get<DensityConfig>(manifest.search.clustering);
        json c = {{"algorithm", density.eps_grid ? "hdbscan" : "dbscan"},
                  {"min_pts", density.min_pts}};
        if (density.eps_grid) {
            c["eps_grid"] = *density.eps_grid;
        } else {
            c["eps"] = density.eps;
        }
        cfg["clustering"] = std::move(c);
    }
    j["config"] = std::move(cfg);

    j["best"] = {{"iteration", r.best_concepts.iteration},
                 {"silhouette", r.best_silhouette},
                 {"concepts", r.best_concepts.concepts}};
    j["history"] = history_json(r.history);

    json assignments = json::array();
    for (std::size_t i = 0; i < outcome.item_ids.size(); ++i) {
        assignments.push_back(
            json::array({outcome.item_ids[i], r.best_assignment.labels[i]}));
    }
    j["assignments"] = std::move(assignments);
    j["activations"] = activations_json(outcome);
    j["warnings"] = r.warnings;
    return j.dump(2);
}

void write_run_artifacts(const RunManifest& manifest, const RunOutcome& outcome,
                         const std::string& out_dir) {
    fs::create_directories(out_dir);
    const SearchResult& r = outcome.result;

    std::ofstream(fs::path(out_dir) / "report.json") << report_json(manifest, outcome) << '\n';

    write_label_csv((fs::path(out_dir) / "assignments.csv").string(), outcome.item_ids,
                    r.best_assignment.labels);

    {
        std::ofstream out(fs::path(out_dir) / "history.csv");
        out << "iteration,silhouette,aux_acc,num_concepts\n";
        for (const auto& rec : r.history.records()) {
            out << rec.concept_set.iteration << ',' << format_fixed4(rec.silhouette) << ',';
            if (rec.aux_acc) out << format_fixed4(*rec.aux_acc);
            out << ',' << rec.concept_set.size() << '\n';
        }
    }

    std::ofstream(fs::path(out_dir) / "concepts.txt") << render_concept_list(r.best_concepts);

    std::ofstream(fs::path(out_dir) / "activations.json")
        << activations_json(outcome).dump(2) << '\n';
}

std::map<std::string, int> read_label_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read labels: " + path);
    std::map<std::string, int> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t comma = line.rfind(',');
        if (comma == std::string::npos) throw Error("bad label row: " + line);
        std::string id = line.substr(0, comma);
        if (id == "item_id" || id == "id") continue;  // tolerate a header
        labels[id] = std::stoi(line.substr(comma + 1));
    }
    if (labels.empty()) throw EmptyInput("label file " + path);
    return labels;
}

void write_label_csv(const std::string& path, const std::vector<std::string>& ids,
                     const std::vector<int>& labels) {
    std::ofstream out(path);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i] << ',' << labels[i] << '\n';
    }
}

double eval_label_files(const std::string& pred_path, const std::string& truth_path) {
    std::map<std::string, int> pred = read_label_csv(pred_path);
    std::map<std::string, int> truth = read_label_csv(truth_path);

    std::vector<std::string> offenders;
    for (const auto& [id, label] : pred) {
        if (!truth.count(id) && offenders.size() < 10) offenders.push_back(id);
    }
    for (const auto& [id, label] : truth) {
        if (!pred.count(id) && offenders.size() < 10) offenders.push_back(id);
    }
    if (!offenders.empty()) {
        std::string detail;
        for (const auto& id : offenders) detail += (detail.empty() ? "" : ", ") + id;
        throw IdMismatch(detail);
    }

    std::vector<int> y_pred;
    std::vector<int> y_true;
    for (const auto& [id, label] : pred) {
        y_pred.push_back(label);
        y_true.push_back(truth.at(id));
    }
    return accuracy(y_true, y_pred);
}

}  // namespace itgc
