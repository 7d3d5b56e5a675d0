#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jsonio.hpp"

namespace seoe {

struct ChatMessage {
    std::string role;  // "system" | "user"
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::optional<int> max_tokens;
    // Stage tag, e.g. "propose.v1/r3". Part of the cache key, so repeated
    // annotation rounds and judge replicates get distinct cache entries.
    std::string template_version;
};

struct EmbeddingRequest {
    std::string model;
    std::vector<std::string> texts;
};

struct CacheKey {
    std::string digest;  // 64 hex chars
};

CacheKey make_cache_key(const std::string& provider_id, const json& body,
                        const std::string& template_version);

struct UsageTotals {
    std::uint64_t requests = 0;
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
    std::uint64_t cache_hits = 0;
};

class UsageLedger {
public:
    void record_request(const std::string& stage, std::uint64_t input_tokens,
                        std::uint64_t output_tokens);
    void record_cache_hit(const std::string& stage);

    UsageTotals stage(const std::string& stage) const;
    UsageTotals total() const;
    json to_json() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, UsageTotals> stages_;
};

// A chat/embedding provider. Both calls take an OpenAI-shaped request body
// and return the OpenAI-shaped response object.
class Backend {
public:
    virtual ~Backend() = default;
    virtual json chat(const json& body) = 0;
    virtual json embed(const json& body) = 0;
    virtual std::string id() const = 0;
};

// Scripted backend for tests and offline runs. Script file format:
//   {
//     "embedding_dim": 8,
//     "embeddings": {"<exact text>": [numbers...]},
//     "chat": [{"template": "<stage or stage/sub>",
//               "contains": "<optional substring of the user message>",
//               "reply": <string or JSON value>}]
//   }
// Rules are tried in order; texts without a scripted embedding get a
// deterministic hash-derived unit vector.
class MockBackend : public Backend {
public:
    explicit MockBackend(const std::filesystem::path& script_path);
    explicit MockBackend(const json& script);

    json chat(const json& body) override;
    json embed(const json& body) override;
    std::string id() const override { return "mock"; }

private:
    struct ChatRule {
        std::string template_tag;
        std::optional<std::string> contains;
        std::string reply;
    };
    std::vector<ChatRule> chat_rules_;
    std::map<std::string, std::vector<double>> scripted_embeddings_;
    std::size_t embedding_dim_ = 8;
};

struct GatewayOptions {
    std::string chat_base_url;
    std::string embed_base_url;  // falls back to chat_base_url when empty
    std::string api_key;
    std::filesystem::path cache_dir;            // empty disables caching
    std::optional<std::filesystem::path> mock_script;
    int max_attempts = 3;
    int initial_backoff_ms = 1000;
    int max_concurrency = 8;
};

// Reads SEOE_BASE_URL, SEOE_EMBED_BASE_URL, SEOE_API_KEY.
GatewayOptions gateway_options_from_env();

// Uniform cached access to chat and embedding backends. Identical in-flight
// requests are coalesced into a single provider call, so request counts are
// reproducible under concurrency.
class ProviderGateway {
public:
    explicit ProviderGateway(GatewayOptions options);
    ~ProviderGateway();

    ProviderGateway(const ProviderGateway&) = delete;
    ProviderGateway& operator=(const ProviderGateway&) = delete;

    // Returns the assistant message content.
    std::string chat(const ChatRequest& request);

    // One unit-norm vector per input text.
    std::vector<std::vector<double>> embed(const EmbeddingRequest& request);

    UsageLedger& ledger() { return ledger_; }
    const GatewayOptions& options() const { return options_; }
    int max_concurrency() const { return options_.max_concurrency; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    GatewayOptions options_;
    UsageLedger ledger_;
};

double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace seoe
