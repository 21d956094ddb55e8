#include "itgc/backends.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "itgc/errors.hpp"
#include "itgc/rng.hpp"

namespace itgc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string resolve_api_key(const BackendConfig& cfg) {
    if (!cfg.api_key.empty()) return cfg.api_key;
    const char* env = std::getenv("ITGC_API_KEY");
    return env ? env : "";
}

class HttpTransport : public Transport {
public:
    explicit HttpTransport(const BackendConfig& cfg)
        : base_url_(cfg.base_url), timeout_s_(cfg.timeout_s), api_key_(resolve_api_key(cfg)) {}

    HttpResponse post(const std::string& path, const std::string& body) override {
        // one client per call keeps this safe under concurrent scoring workers
        httplib::Client client(base_url_);
        client.set_connection_timeout(std::chrono::duration<double>(timeout_s_));
        client.set_read_timeout(std::chrono::duration<double>(timeout_s_));
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            throw BackendError("connection to " + base_url_ + path +
                               " failed: " + httplib::to_string(res.error()));
        }
        return {res->status, res->body};
    }

private:
    std::string base_url_;
    double timeout_s_;
    std::string api_key_;
};

class ReplayTransport : public Transport {
public:
    explicit ReplayTransport(std::string dir) : dir_(std::move(dir)) {}

    HttpResponse post(const std::string& path, const std::string& body) override {
        std::string key = request_fixture_key(path, body);
        fs::path file = fs::path(dir_) / (key + ".json");
        std::ifstream in(file);
        if (!in) throw ReplayMiss(key);
        json j = json::parse(in);
        return {j.at("status").get<int>(), j.at("body").get<std::string>()};
    }

private:
    std::string dir_;
};

class RecordingTransport : public Transport {
public:
    RecordingTransport(std::unique_ptr<Transport> inner, std::string dir)
        : inner_(std::move(inner)), dir_(std::move(dir)) {
        fs::create_directories(dir_);
    }

    HttpResponse post(const std::string& path, const std::string& body) override {
        HttpResponse res = inner_->post(path, body);
        json j;
        j["path"] = path;
        j["request"] = body;
        j["status"] = res.status;
        j["body"] = res.body;
        std::lock_guard<std::mutex> lock(mutex_);
        std::ofstream out(fs::path(dir_) / (request_fixture_key(path, body) + ".json"));
        out << j.dump(2) << '\n';
        return res;
    }

private:
    std::unique_ptr<Transport> inner_;
    std::string dir_;
    std::mutex mutex_;
};

}  // namespace

std::string request_fixture_key(const std::string& path, const std::string& body) {
    std::uint64_t h = fnv1a64(path);
    h = fnv1a64("\n", h);
    h = fnv1a64(body, h);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::unique_ptr<Transport> make_http_transport(const BackendConfig& cfg) {
    return std::make_unique<HttpTransport>(cfg);
}

std::unique_ptr<Transport> make_replay_transport(const std::string& fixture_dir) {
    return std::make_unique<ReplayTransport>(fixture_dir);
}

std::unique_ptr<Transport> make_recording_transport(std::unique_ptr<Transport> inner,
                                                    const std::string& fixture_dir) {
    return std::make_unique<RecordingTransport>(std::move(inner), fixture_dir);
}

std::unique_ptr<Transport> make_transport(const BackendConfig& cfg) {
    if (cfg.replay_dir.empty()) return make_http_transport(cfg);
    if (cfg.record) return make_recording_transport(make_http_transport(cfg), cfg.replay_dir);
    return make_replay_transport(cfg.replay_dir);
}

HttpResponse post_with_retries(Transport& transport, const BackendConfig& cfg,
                               const std::string& path, const std::string& body) {
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        if (attempt > 0) {
            auto delay = std::chrono::milliseconds(cfg.backoff_ms) * (1 << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        try {
            HttpResponse res = transport.post(path, body);
            if (res.status >= 200 && res.status < 300) return res;
            if (res.status < 500) throw HttpError(res.status, res.body);
            last_error = "http status " + std::to_string(res.status);
        } catch (const HttpError&) {
            throw;  // 4xx: retrying cannot help
        } catch (const ReplayMiss&) {
            throw;
        } catch (const BackendError& e) {
            last_error = e.what();
        }
    }
    throw RetriesExhausted(path + " after " + std::to_string(cfg.retries + 1) +
                           " attempts: " + last_error);
}

// --- chat ---

ChatClient::ChatClient(BackendConfig cfg)
    : cfg_(std::move(cfg)), transport_(make_transport(cfg_)) {}

std::string ChatClient::generate(const std::string& prompt) {
    json body;
    body["model"] = cfg_.model_name;
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = cfg_.temperature;
    HttpResponse res = post_with_retries(*transport_, cfg_, "/chat/completions", body.dump());
    try {
        json j = json::parse(res.body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(std::string("malformed chat response: ") + e.what());
    }
}

// --- embeddings ---

EmbeddingClient::EmbeddingClient(BackendConfig cfg)
    : cfg_(std::move(cfg)), transport_(make_transport(cfg_)) {}

EmbeddingMatrix EmbeddingClient::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw EmptyInput("embed_texts with no texts");

    std::vector<std::vector<double>> rows(texts.size());
    std::vector<std::size_t> missing;
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            auto it = cache_.find(cfg_.model_name + '\x1f' + texts[i]);
            if (it != cache_.end()) {
                rows[i] = it->second;
            } else {
                missing.push_back(i);
            }
        }
    }

    constexpr std::size_t kBatch = 128;
    for (std::size_t start = 0; start < missing.size(); start += kBatch) {
        std::size_t end = std::min(missing.size(), start + kBatch);
        json body;
        body["model"] = cfg_.model_name;
        json input = json::array();
        for (std::size_t b = start; b < end; ++b) input.push_back(texts[missing[b]]);
        body["input"] = std::move(input);

        HttpResponse res = post_with_retries(*transport_, cfg_, "/embeddings", body.dump());
        try {
            json j = json::parse(res.body);
            const auto& data = j.at("data");
            if (data.size() != end - start)
                throw BackendError("embeddings response size mismatch");
            for (std::size_t e = 0; e < data.size(); ++e) {
                const auto& entry = data[e];
                std::size_t pos = start + e;  // response order unless index says otherwise
                if (entry.contains("index")) pos = start + entry.at("index").get<std::size_t>();
                rows[missing[pos]] = entry.at("embedding").get<std::vector<double>>();
            }
        } catch (const json::exception& e) {
            throw BackendError(std::string("malformed embeddings response: ") + e.what());
        }
    }

    EmbeddingMatrix m;
    m.rows = texts.size();
    m.cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols) throw DimensionInconsistent(i, rows[i].size(), m.cols);
        m.data.insert(m.data.end(), rows[i].begin(), rows[i].end());
    }
    m.validate();

    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        for (std::size_t i : missing) {
            cache_[cfg_.model_name + '\x1f' + texts[i]] = rows[i];
        }
    }
    return m;
}

// --- scoring ---

ScoreClient::ScoreClient(BackendConfig cfg, ScoreMode mode)
    : cfg_(std::move(cfg)), mode_(mode), transport_(make_transport(cfg_)) {}

int ScoreClient::max_in_flight() const { return cfg_.max_in_flight; }

double ScoreClient::score(const std::string& item_id, const std::string& concept_text) {
    json body;
    body["model"] = cfg_.model_name;
    body["item_id"] = item_id;
    body["question"] = score_question(concept_text, mode_);
    try {
        HttpResponse res = post_with_retries(*transport_, cfg_, "/score", body.dump());
        json j = json::parse(res.body);
        return j.at("score").get<double>();
    } catch (const json::exception& e) {
        throw BackendError(item_id, concept_text, e.what());
    } catch (const BackendError& e) {
        throw BackendError(item_id, concept_text, e.what());
    }
}

// --- embedding files ---

namespace {

constexpr char kMagic[8] = {'I', 'T', 'G', 'C', 'E', 'M', 'B', '1'};

std::uint32_t read_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void write_u32_le(std::ofstream& out, std::uint32_t v) {
    char buf[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                   static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(buf, 4);
}

bool ends_with_csv(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

EmbeddingMatrix load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TruncatedFile(path);
    EmbeddingMatrix m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw NonFiniteValue(m.rows, row.size());
            }
        }
        if (m.rows == 0) {
            m.cols = row.size();
        } else if (row.size() != m.cols) {
            throw DimensionInconsistent(m.rows, row.size(), m.cols);
        }
        m.data.insert(m.data.end(), row.begin(), row.end());
        ++m.rows;
    }
    if (m.rows == 0) throw TruncatedFile(path);
    return m;
}

EmbeddingMatrix load_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TruncatedFile(path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 16) throw TruncatedFile(path);
    if (std::memcmp(bytes.data(), kMagic, 8) != 0) throw BadMagic(path);

    EmbeddingMatrix m;
    m.rows = read_u32_le(bytes.data() + 8);
    m.cols = read_u32_le(bytes.data() + 12);
    std::size_t need = 16 + m.rows * m.cols * 4;
    if (bytes.size() < need) throw TruncatedFile(path);

    m.data.resize(m.rows * m.cols);
    for (std::size_t v = 0; v < m.data.size(); ++v) {
        std::uint32_t word = read_u32_le(bytes.data() + 16 + v * 4);
        m.data[v] = static_cast<double>(std::bit_cast<float>(word));
    }
    return m;
}

std::optional<std::vector<std::string>> load_ids_sidecar(const std::string& path) {
    std::ifstream in(path + ".ids.jsonl");
    if (!in) return std::nullopt;
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ids.push_back(json::parse(line).get<std::string>());
    }
    return ids;
}

}  // namespace

EmbeddingMatrix load_embedding_matrix(const std::string& path) {
    EmbeddingMatrix m = ends_with_csv(path) ? load_csv(path) : load_binary(path);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (!std::isfinite(m.at(i, j))) throw NonFiniteValue(i, j);
        }
    }
    if (auto ids = load_ids_sidecar(path)) {
        if (ids->size() != m.rows) throw ManifestLengthMismatch(ids->size(), m.rows);
        m.ids = std::move(ids);
    }
    return m;
}

void save_embedding_matrix(const EmbeddingMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    out.write(kMagic, 8);
    write_u32_le(out, static_cast<std::uint32_t>(m.rows));
    write_u32_le(out, static_cast<std::uint32_t>(m.cols));
    for (double v : m.data) {
        write_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    out.close();
    if (m.ids) {
        std::ofstream ids(path + ".ids.jsonl");
        for (const auto& id : *m.ids) ids << json(id).dump() << '\n';
    }
}

}  // namespace itgc
