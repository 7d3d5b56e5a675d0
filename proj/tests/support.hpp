#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>

#include "gateway.hpp"
#include "jsonio.hpp"
#include "records.hpp"
#include "text.hpp"

namespace seoe::test {

// Unique temp directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("seoe_test_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string slurp(const std::filesystem::path& path) { return read_file(path); }

inline DocumentRecord make_doc(const std::string& doc_id, const std::string& text,
                               std::vector<TriggerAnnotation> gold = {}) {
    DocumentRecord doc;
    doc.doc_id = doc_id;
    doc.text = text;
    doc.token_count = whitespace_token_count(text);
    doc.source_dataset = "test";
    doc.domain = "news";
    doc.gold_events = std::move(gold);
    return doc;
}

inline EventTypeRecord make_type(const std::string& type_id, const std::string& display_name,
                                 const std::string& definition = "",
                                 std::vector<std::string> roles = {},
                                 std::optional<int> serial = std::nullopt) {
    EventTypeRecord type;
    type.type_id = type_id;
    type.display_name = display_name;
    type.source_dataset = "test";
    type.serial_suffix = serial;
    type.roles = std::move(roles);
    if (!definition.empty()) {
        FineGrainedDefinition def;
        def.text = definition;
        def.word_count = whitespace_token_count(definition);
        def.generator = "human";
        type.definition = def;
    }
    return type;
}

// Gateway backed by an in-memory mock script, cache optional.
inline ProviderGateway make_mock_gateway(const TempDir& dir, const json& script,
                                         bool with_cache = true, int concurrency = 4) {
    auto script_path = dir / "mock_script.json";
    write_text(script_path, script.dump());
    GatewayOptions options;
    options.mock_script = script_path;
    if (with_cache) options.cache_dir = dir / "cache";
    options.max_concurrency = concurrency;
    options.initial_backoff_ms = 1;
    return ProviderGateway(std::move(options));
}

}  // namespace seoe::test
