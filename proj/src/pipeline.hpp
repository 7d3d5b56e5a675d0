#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jsonio.hpp"
#include "ops.hpp"

namespace seoe {

struct PipelineConfig {
    std::filesystem::path config_dir;  // source paths resolve against this
    std::string config_digest;

    std::vector<std::filesystem::path> source_manifest_sources;  // resolved below
    json sources;  // [{"name","ontology","corpus"}]
    int quota = 10;
    std::uint64_t seed = 1;

    std::string annotate_model = "gpt-4o";
    std::string judge_model = "gpt-4o";
    std::string embed_model = "bge-m3";
    std::vector<std::string> infer_models;

    int k = 5;
    double tau = 0.8;
    int rounds = 10;
    double annotate_temperature = 0.7;
    std::vector<double> p_values{0.3, 0.5, 0.7};
    double evaluate_p = 0.5;
    double group_threshold = 0.8;
    int replicates = 3;
    int max_tokens = 2048;
    double max_error_fraction = 0.10;
    bool evaluate = true;
};

// Parses and validates; throws ConfigError before any stage can run.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct StageResult {
    std::string name;
    std::string status;  // "ok" | "resumed" | "failed"
    std::vector<std::pair<std::string, std::string>> outputs;  // rel path -> digest
    std::string error;
};

struct RunManifest {
    bool ok = false;
    std::string config_digest;
    std::vector<StageResult> stages;
    json ledger;
};

json to_json(const RunManifest& manifest);

// integrate -> define -> group -> annotate xR -> sample/release per p, then
// infer -> evaluate -> stats. Stages whose outputs already match the previous
// manifest's digests are resumed without running. The manifest is written to
// out_dir/manifest.json; the first failing stage aborts the run.
RunManifest run_pipeline(const PipelineConfig& config, const ops::SessionOptions& session,
                         const std::filesystem::path& out_dir);

}  // namespace seoe
