#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace testsum::llmgw {

struct ProviderError : std::runtime_error {
    int status;
    std::string body;
    ProviderError(int status_, std::string body_)
        : std::runtime_error("provider error " + std::to_string(status_) +
                             ": " + body_),
          status(status_),
          body(std::move(body_)) {}
};

struct AuthMissing : std::runtime_error {
    explicit AuthMissing(const std::string& var)
        : std::runtime_error("credential env var not set: " + var) {}
};

struct ChatRequest {
    std::string model_id;
    std::string system_text;
    std::string user_text;
    double temperature = 0.2;
    int max_output_tokens = 128;
};

struct ChatReply {
    std::string text;
    long prompt_tokens = 0;
    long output_tokens = 0;
    std::string provider;
    bool cached = false;
};

struct EmbeddingRequest {
    std::string model_id;
    std::vector<std::string> tokens;
};

struct EmbeddingReply {
    std::vector<std::vector<double>> vectors;
    bool cached = false;
};

/// Content-hash over a canonical serialization of the request.
std::string cache_key(const ChatRequest& request);
std::string cache_key(const EmbeddingRequest& request);

class Provider {
  public:
    virtual ~Provider() = default;
    virtual std::string name() const = 0;
    virtual ChatReply complete(const ChatRequest& request) = 0;
    virtual EmbeddingReply embed(const EmbeddingRequest& request) = 0;
};

struct MockOptions {
    uint64_t seed = 0;
    std::optional<double> fixed_judge_score;
    int embedding_dim = 16;
};

/// Fully deterministic offline provider keyed on (seed, request digest).
std::unique_ptr<Provider> make_mock_provider(const MockOptions& options);

struct HttpProviderConfig {
    std::string name;
    std::string base_url;        // e.g. https://api.example.com/v1
    std::string model_id;
    std::string credential_env_var;
    std::string kind = "chat";   // chat | embedding
};

/// OpenAI-style chat/embeddings adapter over HTTP.
std::unique_ptr<Provider> make_http_provider(const HttpProviderConfig& config);

/// Loads provider entries from a JSON config file.
std::vector<HttpProviderConfig> load_provider_config(const std::string& path);

struct GatewayConfig {
    std::string cache_dir;
    int max_in_flight = 4;
    int retries = 3;
    int backoff_ms = 1000;  // doubled per attempt
};

struct GatewayStats {
    long provider_calls = 0;
    long cache_hits = 0;
};

/// Shareable front end adding write-once caching, retries, and a
/// concurrency bound to any provider.
class Gateway {
  public:
    Gateway(std::shared_ptr<Provider> provider, GatewayConfig config);

    ChatReply complete(const ChatRequest& request);
    EmbeddingReply embed(const EmbeddingRequest& request);

    GatewayStats stats() const;

  private:
    struct Slot;
    std::string cached_path(const std::string& key) const;
    std::optional<std::string> read_cache(const std::string& key) const;
    void write_cache(const std::string& key, const std::string& payload) const;
    void note_provider_call();

    std::shared_ptr<Provider> provider_;
    GatewayConfig config_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    int in_flight_ = 0;
    GatewayStats stats_;
    long abort_after_calls_ = -1;  // test hook, from env
};

}  // namespace testsum::llmgw
