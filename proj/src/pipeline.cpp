#include "pipeline.hpp"

#include <functional>
#include <map>

#include "errors.hpp"
#include "log.hpp"
#include "sha256.hpp"

namespace seoe {

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    const std::string raw = read_file(path);
    json j = parse_json(raw, path.string());
    PipelineConfig config;
    config.config_dir = path.parent_path();
    config.config_digest = sha256_hex(raw);

    if (!j.contains("sources") || !j.at("sources").is_array() || j.at("sources").empty()) {
        throw ConfigError("pipeline config needs a non-empty \"sources\" array");
    }
    config.sources = j.at("sources");
    config.quota = j.value("quota", config.quota);
    config.seed = j.value("seed", config.seed);
    if (j.contains("models")) {
        const json& models = j.at("models");
        config.annotate_model = models.value("annotate", config.annotate_model);
        config.judge_model = models.value("judge", config.judge_model);
        config.embed_model = models.value("embed", config.embed_model);
        if (models.contains("infer")) {
            config.infer_models = models.at("infer").get<std::vector<std::string>>();
        }
    }
    config.k = j.value("k", config.k);
    config.tau = j.value("tau", config.tau);
    config.rounds = j.value("rounds", config.rounds);
    config.annotate_temperature =
        j.value("annotate_temperature", config.annotate_temperature);
    if (j.contains("p_values")) {
        config.p_values = j.at("p_values").get<std::vector<double>>();
    }
    config.evaluate_p = j.value("evaluate_p", config.p_values.front());
    config.group_threshold = j.value("group_threshold", config.group_threshold);
    config.replicates = j.value("replicates", config.replicates);
    config.max_tokens = j.value("max_tokens", config.max_tokens);
    config.max_error_fraction = j.value("max_error_fraction", config.max_error_fraction);
    config.evaluate = j.value("evaluate", config.evaluate);

    if (config.quota < 1) throw ConfigError("quota must be >= 1");
    if (config.k < 0) throw ConfigError("k must be >= 0");
    if (config.rounds < 1) throw ConfigError("rounds must be >= 1");
    if (config.annotate_temperature < 0.0) {
        throw ConfigError("annotate_temperature must be >= 0");
    }
    if (config.replicates < 1) throw ConfigError("replicates must be >= 1");
    if (config.max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
    if (config.p_values.empty()) throw ConfigError("p_values must be non-empty");
    for (double p : config.p_values) {
        if (!(p > 0.0 && p <= 1.0)) throw ConfigError("p values must be in (0, 1]");
    }
    bool found = false;
    for (double p : config.p_values) {
        if (p == config.evaluate_p) found = true;
    }
    if (!found) throw ConfigError("evaluate_p must be one of p_values");
    if (!(config.max_error_fraction >= 0.0 && config.max_error_fraction <= 1.0)) {
        throw ConfigError("max_error_fraction must be in [0, 1]");
    }
    return config;
}

json to_json(const RunManifest& manifest) {
    json stages = json::array();
    for (const auto& stage : manifest.stages) {
        json outputs = json::array();
        for (const auto& [path, digest] : stage.outputs) {
            outputs.push_back(json{{"path", path}, {"sha256", digest}});
        }
        json entry{{"name", stage.name},
                   {"status", stage.status},
                   {"outputs", std::move(outputs)}};
        if (!stage.error.empty()) entry["error"] = stage.error;
        stages.push_back(std::move(entry));
    }
    return json{{"ok", manifest.ok},
                {"config_digest", manifest.config_digest},
                {"stages", std::move(stages)},
                {"ledger", manifest.ledger}};
}

namespace {

struct StageSpec {
    std::string name;
    std::vector<std::string> outputs;  // paths relative to out_dir
    std::function<void()> run;
};

// Digest map of the previous manifest, if it matches this config.
std::map<std::string, std::map<std::string, std::string>> previous_digests(
    const std::filesystem::path& out_dir, const std::string& config_digest) {
    std::map<std::string, std::map<std::string, std::string>> by_stage;
    auto manifest_path = out_dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path)) return by_stage;
    json parsed = json::parse(read_file(manifest_path), nullptr, false);
    if (parsed.is_discarded() || parsed.value("config_digest", std::string()) != config_digest) {
        return by_stage;
    }
    for (const auto& stage : parsed.value("stages", json::array())) {
        if (stage.value("status", std::string()) == "failed") continue;
        auto& outputs = by_stage[stage.value("name", std::string())];
        for (const auto& output : stage.value("outputs", json::array())) {
            outputs[output.value("path", std::string())] =
                output.value("sha256", std::string());
        }
    }
    return by_stage;
}

}  // namespace

RunManifest run_pipeline(const PipelineConfig& config, const ops::SessionOptions& session,
                         const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    // Source paths in the config resolve against the config file location;
    // write a resolved manifest the integrate op can consume.
    json resolved_sources = json::array();
    for (const auto& source : config.sources) {
        auto resolve = [&](const std::string& p) {
            std::filesystem::path path(p);
            if (!path.is_absolute()) path = config.config_dir / path;
            return std::filesystem::absolute(path).lexically_normal().string();
        };
        resolved_sources.push_back(
            json{{"name", source.at("name").get<std::string>()},
                 {"ontology", resolve(source.at("ontology").get<std::string>())},
                 {"corpus", resolve(source.at("corpus").get<std::string>())}});
    }
    auto sources_path = out_dir / "sources.resolved.json";
    write_file_atomic(sources_path, canonical_dump(json{{"sources", resolved_sources}}) + "\n");

    ProviderGateway gateway = ops::make_gateway(session, out_dir / "cache");

    const auto ontology_path = out_dir / "ontology.json";
    const auto corpus_path = out_dir / "corpus.jsonl";
    const auto defs_path = out_dir / "ontology.defs.json";
    const auto groups_path = out_dir / "groups.json";
    const auto rounds_dir = out_dir / "rounds";

    std::vector<StageSpec> stages;
    stages.push_back({"integrate",
                      {"ontology.json", "corpus.jsonl"},
                      [&] {
                          ops::integrate_to_files(sources_path, config.quota, config.seed,
                                                  ontology_path, corpus_path);
                      }});
    stages.push_back({"define",
                      {"ontology.defs.json"},
                      [&] {
                          ops::define_to_file(ontology_path, corpus_path,
                                              config.annotate_model, gateway, defs_path);
                      }});
    stages.push_back({"group",
                      {"groups.json"},
                      [&] {
                          ops::group_to_file(defs_path, config.group_threshold,
                                             config.embed_model, gateway, groups_path,
                                             std::nullopt);
                      }});
    {
        std::vector<std::string> round_outputs;
        for (int i = 1; i <= config.rounds; ++i) {
            round_outputs.push_back("rounds/round_" + std::to_string(i) + ".jsonl");
        }
        stages.push_back({"annotate", std::move(round_outputs), [&] {
                              ops::annotate_to_dir(corpus_path, defs_path, config.k,
                                                   config.tau, config.rounds,
                                                   config.annotate_temperature,
                                                   config.annotate_model,
                                                   config.embed_model, gateway, rounds_dir);
                          }});
    }
    for (double p : config.p_values) {
        const std::string tag = ops::p_tag(p);
        stages.push_back({"sample." + tag,
                          {"selected." + tag + ".jsonl"},
                          [&, p, tag] {
                              ops::sample_to_file(rounds_dir, p,
                                                  out_dir / ("selected." + tag + ".jsonl"));
                          }});
        stages.push_back({"release." + tag,
                          {"release." + tag + ".jsonl"},
                          [&, tag] {
                              std::map<std::string, std::string> extras{
                                  {"define", config.annotate_model + "/define.v1"},
                                  {"propose", config.annotate_model + "/propose.v1"},
                                  {"supplement", config.annotate_model + "/supplement.v1"},
                                  {"embed", config.embed_model},
                                  {"provider", session.mock_script ? "mock"
                                                                    : "openai-compatible"}};
                              ops::merge_to_file(out_dir / ("selected." + tag + ".jsonl"),
                                                 corpus_path, defs_path, groups_path,
                                                 config.annotate_model, gateway,
                                                 out_dir / ("release." + tag + ".jsonl"),
                                                 std::move(extras));
                          }});
        stages.push_back({"stats." + tag,
                          {"stats." + tag + ".json"},
                          [&, tag] {
                              ops::stats_to_file(out_dir / ("release." + tag + ".jsonl"),
                                                 out_dir / ("stats." + tag + ".json"));
                          }});
    }
    const std::string eval_tag = ops::p_tag(config.evaluate_p);
    for (const auto& model : config.infer_models) {
        const std::string safe = ops::sanitize_model_name(model);
        stages.push_back({"infer." + safe,
                          {"preds/" + safe + ".jsonl", "preds/" + safe + ".jsonl.summary.json"},
                          [&, model, safe] {
                              ops::infer_to_file(out_dir / ("release." + eval_tag + ".jsonl"),
                                                 model, config.max_tokens, gateway,
                                                 out_dir / "preds" / (safe + ".jsonl"));
                          }});
        if (config.evaluate) {
            stages.push_back(
                {"evaluate." + safe,
                 {"reports/" + safe + ".json"},
                 [&, model, safe] {
                     ops::evaluate_to_file(out_dir / ("release." + eval_tag + ".jsonl"),
                                           out_dir / "preds" / (safe + ".jsonl"),
                                           groups_path, config.judge_model,
                                           config.replicates, gateway,
                                           out_dir / "reports" / (safe + ".json"));
                 }});
        }
    }

    auto resumable = previous_digests(out_dir, config.config_digest);

    RunManifest manifest;
    manifest.config_digest = config.config_digest;
    bool failed = false;
    for (const auto& stage : stages) {
        StageResult result;
        result.name = stage.name;

        bool resume = false;
        if (auto it = resumable.find(stage.name); it != resumable.end()) {
            resume = !stage.outputs.empty() && it->second.size() == stage.outputs.size();
            for (const auto& output : stage.outputs) {
                auto recorded = it->second.find(output);
                if (recorded == it->second.end() ||
                    !std::filesystem::exists(out_dir / output) ||
                    sha256_file_hex(out_dir / output) != recorded->second) {
                    resume = false;
                    break;
                }
            }
        }

        if (resume) {
            result.status = "resumed";
            for (const auto& output : stage.outputs) {
                result.outputs.emplace_back(output, resumable[stage.name][output]);
            }
        } else {
            try {
                log::info("stage ", stage.name);
                stage.run();
                result.status = "ok";
                for (const auto& output : stage.outputs) {
                    auto path = out_dir / output;
                    if (!std::filesystem::exists(path)) {
                        throw IoError("stage " + stage.name +
                                      " did not produce " + output);
                    }
                    result.outputs.emplace_back(output, sha256_file_hex(path));
                }
            } catch (const std::exception& e) {
                result.status = "failed";
                result.error = e.what();
                failed = true;
            }
        }
        manifest.stages.push_back(std::move(result));
        if (failed) break;
    }

    manifest.ok = !failed;
    manifest.ledger = gateway.ledger().to_json();
    write_file_atomic(out_dir / "manifest.json", canonical_dump(to_json(manifest)) + "\n");
    return manifest;
}

}  // namespace seoe
