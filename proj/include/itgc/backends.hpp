#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "itgc/encoding.hpp"
#include "itgc/search.hpp"

namespace itgc {

struct BackendConfig {
    std::string base_url;
    std::string model_name;
    std::string api_key;     // falls back to the ITGC_API_KEY environment variable
    double timeout_s = 60.0;
    int retries = 3;
    int backoff_ms = 1000;   // exponential, doubling per retry
    int max_in_flight = 8;
    double temperature = 1.0;
    std::string replay_dir;  // when set, requests resolve from recorded fixtures
    bool record = false;     // with replay_dir: capture live responses into it
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// One POST against the backend. Swappable so recorded sessions replay
/// byte-identically without a server.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const std::string& path, const std::string& body) = 0;
};

std::unique_ptr<Transport> make_http_transport(const BackendConfig& cfg);
std::unique_ptr<Transport> make_replay_transport(const std::string& fixture_dir);
std::unique_ptr<Transport> make_recording_transport(std::unique_ptr<Transport> inner,
                                                    const std::string& fixture_dir);
/// Picks live / recording / replay per cfg.
std::unique_ptr<Transport> make_transport(const BackendConfig& cfg);

/// Stable fixture key for a request, shared by recorder and replayer.
std::string request_fixture_key(const std::string& path, const std::string& body);

/// POST with the configured retry budget; 5xx and connection errors back off
/// exponentially, other statuses fail fast.
HttpResponse post_with_retries(Transport& transport, const BackendConfig& cfg,
                               const std::string& path, const std::string& body);

/// Chat-completions client: the prompt goes out as a single user message and
/// the first choice's content comes back.
class ChatClient : public ConceptGenerator {
public:
    explicit ChatClient(BackendConfig cfg);
    std::string generate(const std::string& prompt) override;

private:
    BackendConfig cfg_;
    std::unique_ptr<Transport> transport_;
};

/// Embeddings client with a (model, text) response cache; requests are
/// batched at up to 128 texts.
class EmbeddingClient : public TextEmbedder {
public:
    explicit EmbeddingClient(BackendConfig cfg);
    EmbeddingMatrix embed(const std::vector<std::string>& texts) override;

private:
    BackendConfig cfg_;
    std::unique_ptr<Transport> transport_;
    std::mutex cache_mutex_;
    std::map<std::string, std::vector<double>> cache_;  // key: model \x1f text
};

/// Per-pair scoring client for query-score encoding; safe to call from
/// cfg.max_in_flight workers.
class ScoreClient : public PairScorer {
public:
    ScoreClient(BackendConfig cfg, ScoreMode mode);
    double score(const std::string& item_id, const std::string& concept_text) override;
    int max_in_flight() const override;

private:
    BackendConfig cfg_;
    ScoreMode mode_;
    std::unique_ptr<Transport> transport_;
};

/// Reads an embedding matrix from disk. Files ending in ".csv" parse as
/// headerless comma-separated rows; anything else must carry the ITGCEMB1
/// binary layout. A "{path}.ids.jsonl" sidecar supplies row ids.
EmbeddingMatrix load_embedding_matrix(const std::string& path);

/// Writes the binary format (plus the ids sidecar when ids are present).
void save_embedding_matrix(const EmbeddingMatrix& m, const std::string& path);

}  // namespace itgc
