#include "testsum/llmgw.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "testsum/sha256.hpp"

namespace testsum::llmgw {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string canonical(const ChatRequest& r) {
    json j = json::array(
        {"chat", r.model_id, r.system_text, r.user_text, r.temperature,
         r.max_output_tokens});
    return j.dump();
}

std::string canonical(const EmbeddingRequest& r) {
    json j = json::array({"embedding", r.model_id, r.tokens});
    return j.dump();
}

}  // namespace

std::string cache_key(const ChatRequest& request) {
    return sha256_hex(canonical(request));
}

std::string cache_key(const EmbeddingRequest& request) {
    return sha256_hex(canonical(request));
}

// ---------------------------------------------------------------------------
// Mock provider
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string>& mock_vocab() {
    static const std::vector<std::string> words = {
        "verifies", "checks",   "ensures",  "that",    "the",      "method",
        "returns",  "expected", "value",    "result",  "handles",  "input",
        "state",    "object",   "correct",  "list",    "empty",    "valid",
        "boundary", "case",     "behavior", "output",  "field",    "update",
        "matches",  "stored",   "computed", "given",   "request",  "response",
        "properly", "exactly"};
    return words;
}

class MockProvider final : public Provider {
  public:
    explicit MockProvider(const MockOptions& options) : options_(options) {}

    std::string name() const override { return "mock"; }

    ChatReply complete(const ChatRequest& request) override {
        uint64_t digest = sha256_prefix64(std::to_string(options_.seed) +
                                          "|" + canonical(request));
        ChatReply reply;
        reply.provider = name();
        if (request.user_text.find(
                "rate the comment on a scale from 1 to 5") !=
            std::string::npos) {
            double score =
                options_.fixed_judge_score
                    ? *options_.fixed_judge_score
                    : 1.0 + 4.0 * static_cast<double>(digest % 1000) / 999.0;
            score = std::round(score * 10.0) / 10.0;
            std::ostringstream out;
            out << "Score: " << score;
            reply.text = out.str();
        } else if (request.user_text.find(
                       "assertion statement and describe its intent") !=
                   std::string::npos) {
            reply.text = "Checks that " + sentence(digest, 5) + ".";
        } else {
            std::string body = sentence(digest, 6 + digest % 9);
            body[0] = static_cast<char>(std::toupper(body[0]));
            reply.text = body + ".";
        }
        reply.prompt_tokens = static_cast<long>(request.user_text.size() / 4);
        reply.output_tokens = static_cast<long>(reply.text.size() / 4);
        return reply;
    }

    EmbeddingReply embed(const EmbeddingRequest& request) override {
        EmbeddingReply reply;
        for (const auto& token : request.tokens)
            reply.vectors.push_back(token_vector(token));
        return reply;
    }

  private:
    std::string sentence(uint64_t digest, uint64_t length) const {
        const auto& vocab = mock_vocab();
        std::ostringstream out;
        uint64_t x = digest;
        for (uint64_t i = 0; i < length; ++i) {
            x = x * 6364136223846793005ULL + 1442695040888963407ULL;
            if (i) out << ' ';
            out << vocab[(x >> 33) % vocab.size()];
        }
        return out.str();
    }

    std::vector<double> token_vector(const std::string& token) const {
        std::string material =
            std::to_string(options_.seed) + "|tok|" + token;
        std::vector<double> v(options_.embedding_dim);
        double norm = 0.0;
        for (int i = 0; i < options_.embedding_dim; ++i) {
            uint64_t h =
                sha256_prefix64(material + "#" + std::to_string(i));
            v[i] = static_cast<double>(h % 2001) / 1000.0 - 1.0;
            norm += v[i] * v[i];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            v[0] = 1.0;
        } else {
            for (auto& x : v) x /= norm;
        }
        return v;
    }

    MockOptions options_;
};

}  // namespace

std::unique_ptr<Provider> make_mock_provider(const MockOptions& options) {
    return std::make_unique<MockProvider>(options);
}

// ---------------------------------------------------------------------------
// HTTP provider (OpenAI-style schema)
// ---------------------------------------------------------------------------

namespace http_detail {
// Defined in llmgw_http.cpp to keep httplib out of this translation unit.
std::string post_json(const std::string& base_url, const std::string& path,
                      const std::string& bearer, const std::string& body);
}  // namespace http_detail

namespace {

class HttpProvider final : public Provider {
  public:
    explicit HttpProvider(HttpProviderConfig config)
        : config_(std::move(config)) {}

    std::string name() const override { return config_.name; }

    ChatReply complete(const ChatRequest& request) override {
        json body = {
            {"model",
             request.model_id.empty() ? config_.model_id : request.model_id},
            {"temperature", request.temperature},
            {"max_tokens", request.max_output_tokens},
        };
        body["messages"] = json::array();
        if (!request.system_text.empty())
            body["messages"].push_back(
                {{"role", "system"}, {"content", request.system_text}});
        body["messages"].push_back(
            {{"role", "user"}, {"content", request.user_text}});

        json resp = json::parse(http_detail::post_json(
            config_.base_url, "/chat/completions", credential(), body.dump()));
        ChatReply reply;
        reply.provider = config_.name;
        reply.text = resp.at("choices").at(0).at("message").at("content");
        if (resp.contains("usage")) {
            reply.prompt_tokens = resp["usage"].value("prompt_tokens", 0);
            reply.output_tokens = resp["usage"].value("completion_tokens", 0);
        }
        return reply;
    }

    EmbeddingReply embed(const EmbeddingRequest& request) override {
        json body = {
            {"model",
             request.model_id.empty() ? config_.model_id : request.model_id},
            {"input", request.tokens},
        };
        json resp = json::parse(http_detail::post_json(
            config_.base_url, "/embeddings", credential(), body.dump()));
        EmbeddingReply reply;
        for (const auto& item : resp.at("data"))
            reply.vectors.push_back(
                item.at("embedding").get<std::vector<double>>());
        return reply;
    }

  private:
    std::string credential() const {
        const char* value = std::getenv(config_.credential_env_var.c_str());
        if (!value || !*value) throw AuthMissing(config_.credential_env_var);
        return value;
    }

    HttpProviderConfig config_;
};

}  // namespace

std::unique_ptr<Provider> make_http_provider(const HttpProviderConfig& config) {
    return std::make_unique<HttpProvider>(config);
}

std::vector<HttpProviderConfig> load_provider_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open provider config: " + path);
    json j = json::parse(in);
    std::vector<HttpProviderConfig> out;
    for (const auto& entry : j.at("providers")) {
        HttpProviderConfig cfg;
        cfg.name = entry.at("name");
        cfg.base_url = entry.at("base_url");
        cfg.model_id = entry.at("model_id");
        cfg.credential_env_var = entry.at("credential_env_var");
        cfg.kind = entry.value("kind", "chat");
        out.push_back(std::move(cfg));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

Gateway::Gateway(std::shared_ptr<Provider> provider, GatewayConfig config)
    : provider_(std::move(provider)), config_(std::move(config)) {
    fs::create_directories(config_.cache_dir);
    if (const char* hook = std::getenv("TESTSUM_ABORT_AFTER_CALLS"))
        abort_after_calls_ = std::atol(hook);
}

std::string Gateway::cached_path(const std::string& key) const {
    return (fs::path(config_.cache_dir) / (key + ".json")).string();
}

std::optional<std::string> Gateway::read_cache(const std::string& key) const {
    std::ifstream in(cached_path(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void Gateway::write_cache(const std::string& key,
                          const std::string& payload) const {
    fs::path final_path = cached_path(key);
    if (fs::exists(final_path)) return;  // write-once
    std::ostringstream tmp_name;
    tmp_name << key << ".tmp." << std::this_thread::get_id();
    fs::path tmp_path = fs::path(config_.cache_dir) / tmp_name.str();
    {
        std::ofstream out(tmp_path, std::ios::binary);
        out << payload;
    }
    std::error_code ec;
    fs::rename(tmp_path, final_path, ec);
    if (ec) fs::remove(tmp_path, ec);
}

void Gateway::note_provider_call() {
    std::lock_guard lock(mutex_);
    ++stats_.provider_calls;
    if (abort_after_calls_ >= 0 && stats_.provider_calls > abort_after_calls_)
        std::_Exit(99);  // simulated crash for resume tests
}

GatewayStats Gateway::stats() const {
    std::lock_guard lock(mutex_);
    return stats_;
}

namespace {

bool transient(const ProviderError& e) {
    return e.status == 0 || e.status == 408 || e.status == 429 ||
           e.status >= 500;
}

struct SemaphoreGuard {
    std::mutex& m;
    std::condition_variable& cv;
    int& in_flight;

    SemaphoreGuard(std::mutex& m_, std::condition_variable& cv_,
                   int& in_flight_, int limit)
        : m(m_), cv(cv_), in_flight(in_flight_) {
        std::unique_lock lock(m);
        cv.wait(lock, [&] { return in_flight < limit; });
        ++in_flight;
    }
    ~SemaphoreGuard() {
        {
            std::lock_guard lock(m);
            --in_flight;
        }
        cv.notify_one();
    }
};

template <typename Call>
auto with_retries(Call&& call, int retries, int backoff_ms) {
    int attempt = 0;
    for (;;) {
        try {
            return call();
        } catch (const ProviderError& e) {
            ++attempt;
            if (attempt >= retries || !transient(e)) throw;
            std::this_thread::sleep_for(
                std::chrono::milliseconds(backoff_ms << (attempt - 1)));
        }
    }
}

}  // namespace

ChatReply Gateway::complete(const ChatRequest& request) {
    std::string key = cache_key(request);
    if (auto payload = read_cache(key)) {
        json j = json::parse(*payload);
        ChatReply reply;
        reply.text = j.at("text");
        reply.prompt_tokens = j.value("prompt_tokens", 0L);
        reply.output_tokens = j.value("output_tokens", 0L);
        reply.provider = j.value("provider", "");
        reply.cached = true;
        {
            std::lock_guard lock(mutex_);
            ++stats_.cache_hits;
        }
        return reply;
    }

    SemaphoreGuard guard(mutex_, cv_, in_flight_, config_.max_in_flight);
    ChatReply reply = with_retries(
        [&] {
            note_provider_call();
            return provider_->complete(request);
        },
        config_.retries, config_.backoff_ms);

    json j = {{"text", reply.text},
              {"prompt_tokens", reply.prompt_tokens},
              {"output_tokens", reply.output_tokens},
              {"provider", reply.provider}};
    write_cache(key, j.dump());
    reply.cached = false;
    return reply;
}

EmbeddingReply Gateway::embed(const EmbeddingRequest& request) {
    std::string key = cache_key(request);
    if (auto payload = read_cache(key)) {
        json j = json::parse(*payload);
        EmbeddingReply reply;
        reply.vectors =
            j.at("vectors").get<std::vector<std::vector<double>>>();
        reply.cached = true;
        {
            std::lock_guard lock(mutex_);
            ++stats_.cache_hits;
        }
        return reply;
    }

    SemaphoreGuard guard(mutex_, cv_, in_flight_, config_.max_in_flight);
    EmbeddingReply reply = with_retries(
        [&] {
            note_provider_call();
            return provider_->embed(request);
        },
        config_.retries, config_.backoff_ms);

    json j = {{"vectors", reply.vectors}};
    write_cache(key, j.dump());
    reply.cached = false;
    return reply;
}

}  // namespace testsum::llmgw
