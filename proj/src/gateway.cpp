#include "gateway.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <future>
#include <thread>
#include <unordered_map>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "errors.hpp"
#include "log.hpp"
#include "sha256.hpp"
#include "text.hpp"

namespace seoe {

namespace {

std::string stage_of(const std::string& template_version) {
    auto slash = template_version.find('/');
    std::string stage = template_version.substr(0, slash);
    return stage.empty() ? "untagged" : stage;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Semaphore {
public:
    explicit Semaphore(int slots) : slots_(slots > 0 ? slots : 1) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return slots_ > 0; });
        --slots_;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            ++slots_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int slots_;
};

struct SlotGuard {
    Semaphore& sem;
    explicit SlotGuard(Semaphore& s) : sem(s) { sem.acquire(); }
    ~SlotGuard() { sem.release(); }
};

std::uint64_t estimate_tokens(const json& body) {
    std::uint64_t tokens = 0;
    if (body.contains("messages")) {
        for (const auto& m : body.at("messages")) {
            tokens += whitespace_token_count(m.value("content", std::string()));
        }
    } else if (body.contains("input")) {
        for (const auto& t : body.at("input")) {
            tokens += whitespace_token_count(t.get<std::string>());
        }
    }
    return tokens;
}

}  // namespace

CacheKey make_cache_key(const std::string& provider_id, const json& body,
                        const std::string& template_version) {
    json envelope{{"provider", provider_id},
                  {"body", body},
                  {"template_version", template_version}};
    return CacheKey{sha256_hex(canonical_dump(envelope))};
}

void UsageLedger::record_request(const std::string& stage, std::uint64_t input_tokens,
                                 std::uint64_t output_tokens) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& entry = stages_[stage];
    entry.requests += 1;
    entry.input_tokens += input_tokens;
    entry.output_tokens += output_tokens;
}

void UsageLedger::record_cache_hit(const std::string& stage) {
    std::lock_guard<std::mutex> lock(mutex_);
    stages_[stage].cache_hits += 1;
}

UsageTotals UsageLedger::stage(const std::string& stage) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = stages_.find(stage);
    return it == stages_.end() ? UsageTotals{} : it->second;
}

UsageTotals UsageLedger::total() const {
    std::lock_guard<std::mutex> lock(mutex_);
    UsageTotals sum;
    for (const auto& [_, entry] : stages_) {
        sum.requests += entry.requests;
        sum.input_tokens += entry.input_tokens;
        sum.output_tokens += entry.output_tokens;
        sum.cache_hits += entry.cache_hits;
    }
    return sum;
}

json UsageLedger::to_json() const {
    std::lock_guard<std::mutex> lock(mutex_);
    json stages = json::object();
    UsageTotals sum;
    for (const auto& [name, entry] : stages_) {
        stages[name] = json{{"requests", entry.requests},
                            {"input_tokens", entry.input_tokens},
                            {"output_tokens", entry.output_tokens},
                            {"cache_hits", entry.cache_hits}};
        sum.requests += entry.requests;
        sum.input_tokens += entry.input_tokens;
        sum.output_tokens += entry.output_tokens;
        sum.cache_hits += entry.cache_hits;
    }
    return json{{"stages", std::move(stages)},
                {"total", json{{"requests", sum.requests},
                               {"input_tokens", sum.input_tokens},
                               {"output_tokens", sum.output_tokens},
                               {"cache_hits", sum.cache_hits}}}};
}

// ---------------------------------------------------------------------------
// Mock backend

MockBackend::MockBackend(const std::filesystem::path& script_path)
    : MockBackend(parse_json(read_file(script_path), script_path.string())) {}

MockBackend::MockBackend(const json& script) {
    if (script.contains("embedding_dim")) {
        embedding_dim_ = script.at("embedding_dim").get<std::size_t>();
        if (embedding_dim_ == 0) throw ConfigError("mock embedding_dim must be positive");
    }
    if (script.contains("embeddings")) {
        for (const auto& [text, vec] : script.at("embeddings").items()) {
            scripted_embeddings_[text] = vec.get<std::vector<double>>();
        }
    }
    if (script.contains("chat")) {
        for (const auto& rule : script.at("chat")) {
            ChatRule r;
            r.template_tag = rule.value("template", std::string());
            if (rule.contains("contains")) {
                r.contains = rule.at("contains").get<std::string>();
            }
            const json& reply = rule.at("reply");
            r.reply = reply.is_string() ? reply.get<std::string>() : canonical_dump(reply);
            chat_rules_.push_back(std::move(r));
        }
    }
}

json MockBackend::chat(const json& body) {
    const std::string tv = body.value("seoe_template_version", std::string());
    const std::string stage = stage_of(tv);
    std::string user_content;
    for (const auto& m : body.at("messages")) {
        if (m.value("role", std::string()) == "user") {
            user_content = m.value("content", std::string());
        }
    }
    for (const auto& rule : chat_rules_) {
        bool tag_ok = rule.template_tag.empty() || rule.template_tag == tv ||
                      rule.template_tag == stage ||
                      tv.rfind(rule.template_tag + "/", 0) == 0;
        if (!tag_ok) continue;
        if (rule.contains && user_content.find(*rule.contains) == std::string::npos) {
            continue;
        }
        return json{{"model", body.value("model", std::string("mock"))},
                    {"choices",
                     json::array({json{{"message", json{{"role", "assistant"},
                                                        {"content", rule.reply}}}}})}};
    }
    throw ProviderError("mock script has no chat reply for template \"" + tv + "\"");
}

json MockBackend::embed(const json& body) {
    json data = json::array();
    std::size_t index = 0;
    for (const auto& item : body.at("input")) {
        const std::string text = item.get<std::string>();
        std::vector<double> vec;
        auto it = scripted_embeddings_.find(text);
        if (it != scripted_embeddings_.end()) {
            vec = it->second;
        } else {
            // Deterministic pseudo-embedding: splitmix64 stream seeded by an
            // FNV-1a hash of the text, components in [-1, 1).
            std::uint64_t state = fnv1a64(text);
            vec.resize(embedding_dim_);
            double norm_sq = 0.0;
            for (auto& component : vec) {
                std::uint64_t bits = splitmix64(state);
                component = static_cast<double>(bits >> 11) /
                                static_cast<double>(1ULL << 52) -
                            1.0;
                norm_sq += component * component;
            }
            if (norm_sq < 1e-24) {
                vec.assign(embedding_dim_, 0.0);
                vec[fnv1a64(text) % embedding_dim_] = 1.0;
            }
        }
        data.push_back(json{{"index", index}, {"embedding", vec}});
        ++index;
    }
    return json{{"model", body.value("model", std::string("mock"))},
                {"data", std::move(data)}};
}

// ---------------------------------------------------------------------------
// HTTP backend (OpenAI-compatible)

namespace {

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // optional path prefix, no trailing slash
};

UrlParts split_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("base URL must include a scheme: " + base_url);
    }
    auto path_start = base_url.find('/', scheme_end + 3);
    UrlParts parts;
    if (path_start == std::string::npos) {
        parts.origin = base_url;
    } else {
        parts.origin = base_url.substr(0, path_start);
        parts.prefix = base_url.substr(path_start);
        while (!parts.prefix.empty() && parts.prefix.back() == '/') {
            parts.prefix.pop_back();
        }
    }
    return parts;
}

class HttpBackend : public Backend {
public:
    HttpBackend(std::string chat_base, std::string embed_base, std::string api_key,
                int max_attempts, int initial_backoff_ms)
        : chat_base_(std::move(chat_base)),
          embed_base_(std::move(embed_base)),
          api_key_(std::move(api_key)),
          max_attempts_(max_attempts),
          initial_backoff_ms_(initial_backoff_ms) {
        if (embed_base_.empty()) embed_base_ = chat_base_;
    }

    json chat(const json& body) override {
        json wire = body;
        wire.erase("seoe_template_version");
        return post_with_retries(chat_base_, "/v1/chat/completions", wire);
    }

    json embed(const json& body) override {
        return post_with_retries(embed_base_, "/v1/embeddings", body);
    }

    std::string id() const override { return "openai-compatible:" + chat_base_; }

private:
    json post_with_retries(const std::string& base, const std::string& path,
                           const json& body) {
        UrlParts parts = split_url(base);
        const std::string payload = canonical_dump(body);
        std::string last_error;
        for (int attempt = 1; attempt <= max_attempts_; ++attempt) {
            if (attempt > 1) {
                auto delay = std::chrono::milliseconds(
                    initial_backoff_ms_ << (attempt - 2));
                std::this_thread::sleep_for(delay);
            }
            httplib::Client client(parts.origin);
            client.set_connection_timeout(10, 0);
            client.set_read_timeout(300, 0);
            if (!api_key_.empty()) client.set_bearer_token_auth(api_key_);
            auto res = client.Post(parts.prefix + path, payload, "application/json");
            if (!res) {
                last_error = httplib::to_string(res.error());
                log::warn("provider transport error (attempt ", attempt, "/",
                          max_attempts_, "): ", last_error);
                continue;
            }
            if (res->status >= 400 && res->status < 500) {
                throw ConfigError("provider rejected request (HTTP " +
                                  std::to_string(res->status) + "): " + res->body);
            }
            if (res->status != 200) {
                last_error = "HTTP " + std::to_string(res->status);
                log::warn("provider error (attempt ", attempt, "/", max_attempts_,
                          "): ", last_error);
                continue;
            }
            json parsed = json::parse(res->body, nullptr, false);
            if (parsed.is_discarded()) {
                last_error = "unparseable response body";
                continue;
            }
            return parsed;
        }
        throw ProviderError("provider unreachable after " +
                            std::to_string(max_attempts_) + " attempts: " + last_error);
    }

    std::string chat_base_;
    std::string embed_base_;
    std::string api_key_;
    int max_attempts_;
    int initial_backoff_ms_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Gateway

GatewayOptions gateway_options_from_env() {
    GatewayOptions options;
    if (const char* v = std::getenv("SEOE_BASE_URL")) options.chat_base_url = v;
    if (const char* v = std::getenv("SEOE_EMBED_BASE_URL")) options.embed_base_url = v;
    if (const char* v = std::getenv("SEOE_API_KEY")) options.api_key = v;
    return options;
}

struct ProviderGateway::Impl {
    std::unique_ptr<Backend> backend;
    Semaphore semaphore;
    std::mutex flight_mutex;
    std::unordered_map<std::string, std::shared_future<json>> in_flight;

    explicit Impl(const GatewayOptions& options) : semaphore(options.max_concurrency) {
        if (options.mock_script) {
            backend = std::make_unique<MockBackend>(*options.mock_script);
        } else if (!options.chat_base_url.empty()) {
            backend = std::make_unique<HttpBackend>(
                options.chat_base_url, options.embed_base_url, options.api_key,
                options.max_attempts, options.initial_backoff_ms);
        } else {
            throw ConfigError(
                "no provider configured: set SEOE_BASE_URL or supply a mock script");
        }
    }

    std::filesystem::path cache_path(const std::filesystem::path& dir,
                                     const CacheKey& key) const {
        return dir / key.digest.substr(0, 2) / (key.digest + ".json");
    }

    std::optional<json> cache_lookup(const std::filesystem::path& dir,
                                     const CacheKey& key) const {
        auto path = cache_path(dir, key);
        std::ifstream in(path);
        if (!in) return std::nullopt;
        json entry = json::parse(in, nullptr, false);
        if (entry.is_discarded() || !entry.contains("response")) {
            log::warn("discarding corrupt cache entry ", path.string());
            return std::nullopt;
        }
        return entry.at("response");
    }

    void cache_store(const std::filesystem::path& dir, const CacheKey& key,
                     const json& request_envelope, const json& response) const {
        json entry{{"request", request_envelope},
                   {"response", response},
                   {"timestamp", std::chrono::duration_cast<std::chrono::seconds>(
                                     std::chrono::system_clock::now().time_since_epoch())
                                     .count()}};
        write_file_atomic(cache_path(dir, key), canonical_dump(entry));
    }

    // Cache + single-flight wrapper around one backend call.
    json perform(const GatewayOptions& options, UsageLedger& ledger,
                 const std::string& stage, const json& body,
                 const std::string& template_version, bool is_chat) {
        CacheKey key = make_cache_key(backend->id(), body, template_version);
        const bool cached = !options.cache_dir.empty();

        std::shared_future<json> waiting;
        std::promise<json> promise;
        {
            std::unique_lock<std::mutex> lock(flight_mutex);
            auto it = in_flight.find(key.digest);
            if (it != in_flight.end()) {
                waiting = it->second;
            } else {
                if (cached) {
                    if (auto hit = cache_lookup(options.cache_dir, key)) {
                        lock.unlock();
                        ledger.record_cache_hit(stage);
                        return *hit;
                    }
                }
                in_flight.emplace(key.digest, promise.get_future().share());
            }
        }
        if (waiting.valid()) {
            json response = waiting.get();  // rethrows the leader's failure
            ledger.record_cache_hit(stage);
            return response;
        }

        try {
            json response;
            {
                SlotGuard slot(semaphore);
                response = is_chat ? backend->chat(body) : backend->embed(body);
            }
            if (cached) {
                json envelope{{"provider", backend->id()},
                              {"template_version", template_version},
                              {"body", body}};
                cache_store(options.cache_dir, key, envelope, response);
            }
            std::uint64_t in_tokens = estimate_tokens(body);
            std::uint64_t out_tokens = 0;
            if (response.contains("usage")) {
                const json& usage = response.at("usage");
                in_tokens = usage.value("prompt_tokens", in_tokens);
                out_tokens = usage.value("completion_tokens", std::uint64_t{0});
            } else if (is_chat && response.contains("choices")) {
                for (const auto& choice : response.at("choices")) {
                    if (choice.contains("message")) {
                        out_tokens += whitespace_token_count(
                            choice.at("message").value("content", std::string()));
                    }
                }
            }
            ledger.record_request(stage, in_tokens, out_tokens);
            promise.set_value(response);
            std::lock_guard<std::mutex> lock(flight_mutex);
            in_flight.erase(key.digest);
            return response;
        } catch (...) {
            promise.set_exception(std::current_exception());
            std::lock_guard<std::mutex> lock(flight_mutex);
            in_flight.erase(key.digest);
            throw;
        }
    }
};

ProviderGateway::ProviderGateway(GatewayOptions options)
    : impl_(std::make_unique<Impl>(options)), options_(std::move(options)) {}

ProviderGateway::~ProviderGateway() = default;

std::string ProviderGateway::chat(const ChatRequest& request) {
    if (request.messages.empty()) {
        throw ValidationError("chat request has no messages");
    }
    for (const auto& m : request.messages) {
        if (m.role != "system" && m.role != "user") {
            throw ValidationError("chat message role must be system or user");
        }
    }
    if (request.temperature < 0.0) {
        throw ValidationError("temperature must be >= 0");
    }
    if (request.max_tokens && *request.max_tokens <= 0) {
        throw ValidationError("max_tokens must be positive");
    }

    json messages = json::array();
    for (const auto& m : request.messages) {
        messages.push_back(json{{"role", m.role}, {"content", m.content}});
    }
    json body{{"model", request.model},
              {"messages", std::move(messages)},
              {"temperature", request.temperature},
              {"seoe_template_version", request.template_version}};
    if (request.max_tokens) body["max_tokens"] = *request.max_tokens;

    const std::string stage = stage_of(request.template_version);
    json response = impl_->perform(options_, ledger_, stage, body,
                                   request.template_version, /*is_chat=*/true);
    try {
        return response.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw ProviderError("malformed chat response: " + canonical_dump(response));
    }
}

std::vector<std::vector<double>> ProviderGateway::embed(const EmbeddingRequest& request) {
    if (request.texts.empty()) {
        throw ValidationError("embedding request has no texts");
    }
    for (const auto& t : request.texts) {
        if (t.empty()) throw ValidationError("embedding request contains an empty text");
    }
    json body{{"model", request.model}, {"input", request.texts}};
    json response = impl_->perform(options_, ledger_, "embeddings", body,
                                   "embeddings.v1", /*is_chat=*/false);

    std::vector<std::vector<double>> vectors(request.texts.size());
    std::size_t filled = 0;
    try {
        for (const auto& item : response.at("data")) {
            std::size_t index = item.at("index").get<std::size_t>();
            if (index >= vectors.size()) throw ProviderError("embedding index out of range");
            vectors[index] = item.at("embedding").get<std::vector<double>>();
            ++filled;
        }
    } catch (const json::exception&) {
        throw ProviderError("malformed embeddings response");
    }
    if (filled != vectors.size()) {
        throw ProviderError("embeddings response is missing vectors");
    }
    const std::size_t dim = vectors.front().size();
    for (auto& vec : vectors) {
        if (vec.size() != dim) {
            throw ProviderError("embedding dimension mismatch within batch");
        }
        double norm = 0.0;
        for (double x : vec) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-12) throw ProviderError("zero-norm embedding returned");
        for (double& x : vec) x /= norm;
    }
    return vectors;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ValidationError("cosine: dimension mismatch (" + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()) + ")");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
}

}  // namespace seoe
