#include "ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "analytics.hpp"
#include "consolidator.hpp"
#include "errors.hpp"
#include "evaluator.hpp"
#include "groups.hpp"
#include "inference.hpp"
#include "integrator.hpp"
#include "log.hpp"
#include "parallel.hpp"

namespace seoe::ops {

ProviderGateway make_gateway(const SessionOptions& session,
                             const std::filesystem::path& default_cache_dir) {
    GatewayOptions options = gateway_options_from_env();
    if (!session.chat_base_url.empty()) options.chat_base_url = session.chat_base_url;
    if (!session.embed_base_url.empty()) options.embed_base_url = session.embed_base_url;
    if (!session.api_key.empty()) options.api_key = session.api_key;
    options.cache_dir = session.cache_dir.value_or(default_cache_dir);
    options.mock_script = session.mock_script;
    options.max_concurrency = session.max_concurrency;
    options.max_attempts = session.max_attempts;
    options.initial_backoff_ms = session.initial_backoff_ms;
    return ProviderGateway(std::move(options));
}

std::string p_tag(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", p);
    std::string tag = "p";
    for (const char* c = buf; *c; ++c) {
        if (*c != '.') tag.push_back(*c);
    }
    return tag;
}

std::string sanitize_model_name(const std::string& model) {
    std::string out = model;
    for (char& c : out) {
        if (c == '/' || c == '\\' || c == ' ' || c == ':') c = '-';
    }
    return out.empty() ? std::string("model") : out;
}

void integrate_to_files(const std::filesystem::path& sources_manifest, int quota,
                        std::uint64_t seed, const std::filesystem::path& out_ontology,
                        const std::filesystem::path& out_corpus) {
    IntegrationPlan plan = load_integration_plan(sources_manifest, quota);
    IntegrationResult merged = integrate(plan);
    std::vector<std::string> warnings;
    auto sampled = sample_corpus(merged.corpus, plan.quota, seed, &warnings);
    for (const auto& w : warnings) log::warn("sample: ", w);
    save_ontology(out_ontology, merged.ontology);
    save_corpus(out_corpus, sampled);
    log::info("integrated ", merged.ontology.size(), " types, sampled ", sampled.size(),
              " of ", merged.corpus.size(), " documents");
}

void define_to_file(const std::filesystem::path& ontology_path,
                    const std::filesystem::path& corpus_path, const std::string& model,
                    ProviderGateway& gateway, const std::filesystem::path& out_ontology) {
    auto ontology = load_ontology(ontology_path);
    auto corpus = load_corpus(corpus_path);
    generate_definitions(ontology, collect_examples(corpus), gateway, model);
    save_ontology(out_ontology, ontology);
}

void group_to_file(const std::filesystem::path& ontology_path, double threshold,
                   const std::string& embed_model, ProviderGateway& gateway,
                   const std::filesystem::path& out_groups,
                   const std::optional<std::filesystem::path>& export_embeddings) {
    auto ontology = load_ontology(ontology_path);
    if (export_embeddings) {
        auto embeddings = embed_definitions(ontology, gateway, embed_model);
        export_embedding_matrix(*export_embeddings, ontology, embeddings);
    }
    GroupSet groups = build_groups(ontology, threshold, gateway, embed_model);
    save_groups(out_groups, groups);
}

void annotate_to_dir(const std::filesystem::path& corpus_path,
                     const std::filesystem::path& ontology_path, int k, double tau,
                     int rounds, double temperature, const std::string& model,
                     const std::string& embed_model, ProviderGateway& gateway,
                     const std::filesystem::path& out_dir) {
    if (rounds < 1) throw ValidationError("rounds must be >= 1");
    if (temperature < 0.0) throw ValidationError("temperature must be >= 0");
    auto corpus = load_corpus(corpus_path);
    auto ontology_records = load_ontology(ontology_path);
    OntologyIndex ontology(ontology_records);
    auto embeddings = embed_definitions(ontology_records, gateway, embed_model);

    AnnotatorConfig config;
    config.model = model;
    config.embed_model = embed_model;
    config.k = k;
    config.tau = tau;
    config.temperature = temperature;
    for (int round_index = 1; round_index <= rounds; ++round_index) {
        AnnotationRound round =
            run_round(corpus, ontology, embeddings, round_index, gateway, config);
        save_round(out_dir / ("round_" + std::to_string(round_index) + ".jsonl"), round);
    }
}

std::vector<AnnotationRound> load_rounds_dir(const std::filesystem::path& rounds_dir) {
    std::vector<std::pair<int, std::filesystem::path>> files;
    if (!std::filesystem::is_directory(rounds_dir)) {
        throw IoError("rounds directory not found: " + rounds_dir.string());
    }
    for (const auto& entry : std::filesystem::directory_iterator(rounds_dir)) {
        const std::string name = entry.path().filename().string();
        int index = 0;
        if (std::sscanf(name.c_str(), "round_%d.jsonl", &index) == 1) {
            files.emplace_back(index, entry.path());
        }
    }
    if (files.empty()) {
        throw IoError("no round_*.jsonl files in " + rounds_dir.string());
    }
    std::sort(files.begin(), files.end());
    std::vector<AnnotationRound> rounds;
    rounds.reserve(files.size());
    for (const auto& [index, path] : files) rounds.push_back(load_round(path, index));
    return rounds;
}

void sample_to_file(const std::filesystem::path& rounds_dir, double p,
                    const std::filesystem::path& out_selected) {
    auto rounds = load_rounds_dir(rounds_dir);
    auto table = tally(rounds);
    auto selection = nucleus_select(table, p);
    save_selection(out_selected, selection, table.rounds, p);
}

void merge_to_file(const std::filesystem::path& selected_path,
                   const std::filesystem::path& corpus_path,
                   const std::filesystem::path& ontology_path,
                   const std::optional<std::filesystem::path>& groups_path,
                   const std::string& model, ProviderGateway& gateway,
                   const std::filesystem::path& out_release,
                   std::map<std::string, std::string> manifest_extras) {
    auto corpus = load_corpus(corpus_path);
    auto ontology = load_ontology(ontology_path);
    SavedSelection selection = load_selection(selected_path);
    GroupSet groups;
    if (groups_path) groups = load_groups(*groups_path);

    MergeConfig config{model};
    BenchmarkRelease release = assemble_release_from_selection(
        corpus, ontology, selection.per_doc, selection.rounds, selection.p,
        groups_path ? &groups : nullptr, gateway, config, std::move(manifest_extras));
    save_release(out_release, release);
}

std::vector<std::string> release_all(const std::filesystem::path& rounds_dir,
                                     const std::filesystem::path& corpus_path,
                                     const std::filesystem::path& ontology_path,
                                     const std::optional<std::filesystem::path>& groups_path,
                                     const std::vector<double>& p_values,
                                     const std::string& model, ProviderGateway& gateway,
                                     const std::filesystem::path& out_dir,
                                     const std::map<std::string, std::string>& manifest_extras) {
    auto corpus = load_corpus(corpus_path);
    auto ontology = load_ontology(ontology_path);
    auto rounds = load_rounds_dir(rounds_dir);
    GroupSet groups;
    if (groups_path) groups = load_groups(*groups_path);

    std::vector<std::string> names;
    for (double p : p_values) {
        ReleaseInputs inputs;
        inputs.corpus = corpus;
        inputs.ontology = ontology;
        inputs.rounds = rounds;
        inputs.groups = groups_path ? &groups : nullptr;
        inputs.nucleus_p = p;
        inputs.manifest_extras = manifest_extras;
        BenchmarkRelease release = assemble_release(inputs, gateway, MergeConfig{model});
        std::string name = "release." + p_tag(p) + ".jsonl";
        save_release(out_dir / name, release);
        names.push_back(std::move(name));
    }
    return names;
}

void infer_to_file(const std::filesystem::path& release_path, const std::string& model,
                   int max_tokens, ProviderGateway& gateway,
                   const std::filesystem::path& out_predictions) {
    BenchmarkRelease release = load_release(release_path);
    InferenceOptions options{model, max_tokens};
    std::vector<InferenceFailure> failures;
    auto predictions = run_inference(release, options, gateway, &failures);
    std::sort(predictions.begin(), predictions.end(),
              [](const PredictionRecord& a, const PredictionRecord& b) {
                  return a.doc_id < b.doc_id;
              });
    save_predictions(out_predictions, predictions);

    json failure_list = json::array();
    for (const auto& f : failures) {
        failure_list.push_back(json{{"doc_id", f.doc_id}, {"reason", f.reason}});
    }
    json summary{{"model", model},
                 {"stats", to_json(prediction_stats(predictions))},
                 {"failures", std::move(failure_list)}};
    std::filesystem::path summary_path = out_predictions;
    summary_path += ".summary.json";
    write_file_atomic(summary_path, canonical_dump(summary) + "\n");
}

json evaluate_release(const BenchmarkRelease& release,
                      std::span<const PredictionRecord> predictions,
                      const GroupSet& groups, const std::string& judge_model,
                      int replicates, ProviderGateway& gateway) {
    if (replicates < 1) throw ValidationError("replicates must be >= 1");
    OntologyIndex index(release.ontology);
    std::map<std::string, const PredictionRecord*> by_id;
    for (const auto& p : predictions) by_id[p.doc_id] = &p;
    for (const auto& doc : release.documents) {
        if (!by_id.count(doc.doc_id)) {
            throw ValidationError("no prediction for doc " + doc.doc_id);
        }
    }

    std::vector<MatchReport> reports;
    for (int replicate = 1; replicate <= replicates; ++replicate) {
        std::vector<JudgeVerdict> verdicts(release.documents.size());
        JudgeConfig config{judge_model, replicate};
        parallel_for(release.documents.size(), gateway.max_concurrency(), [&](std::size_t i) {
            const DocumentRecord& doc = release.documents[i];
            verdicts[i] = judge_document(doc, *by_id.at(doc.doc_id), index, groups,
                                         gateway, config);
        });
        reports.push_back(score_corpus(verdicts, predictions, release));
    }

    auto micro = [](const MatchReport& r) {
        return json{{"precision", r.micro_precision},
                    {"recall", r.micro_recall},
                    {"f1", r.micro_f1}};
    };
    json replicate_scores = json::array();
    for (const auto& r : reports) {
        replicate_scores.push_back(json{
            {"micro", micro(r)},
            {"macro", json{{"precision", r.macro_precision},
                           {"recall", r.macro_recall},
                           {"f1", r.macro_f1}}}});
    }
    auto mean_std = [&](auto getter) {
        double mean = 0.0;
        for (const auto& r : reports) mean += getter(r);
        mean /= static_cast<double>(reports.size());
        double ss = 0.0;
        for (const auto& r : reports) ss += (getter(r) - mean) * (getter(r) - mean);
        double stddev = reports.size() > 1
                            ? std::sqrt(ss / static_cast<double>(reports.size() - 1))
                            : 0.0;
        return std::make_pair(mean, stddev);
    };
    auto [p_mean, p_std] = mean_std([](const MatchReport& r) { return r.micro_precision; });
    auto [r_mean, r_std] = mean_std([](const MatchReport& r) { return r.micro_recall; });
    auto [f1_mean, f1_std] = mean_std([](const MatchReport& r) { return r.micro_f1; });

    return json{{"judge_model", judge_model},
                {"replicates", replicates},
                {"report", to_json(reports.front())},
                {"replicate_scores", std::move(replicate_scores)},
                {"micro_mean", json{{"precision", p_mean}, {"recall", r_mean}, {"f1", f1_mean}}},
                {"micro_std", json{{"precision", p_std}, {"recall", r_std}, {"f1", f1_std}}}};
}

json evaluate_to_file(const std::filesystem::path& release_path,
                      const std::filesystem::path& predictions_path,
                      const std::optional<std::filesystem::path>& groups_path,
                      const std::string& judge_model, int replicates,
                      ProviderGateway& gateway, const std::filesystem::path& out_report) {
    BenchmarkRelease release = load_release(release_path);
    auto predictions = load_predictions(predictions_path);
    GroupSet groups;
    if (groups_path) groups = load_groups(*groups_path);
    json report = evaluate_release(release, predictions, groups, judge_model, replicates,
                                   gateway);
    write_file_atomic(out_report, canonical_dump(report) + "\n");
    return report;
}

void stats_to_file(const std::filesystem::path& release_path,
                   const std::filesystem::path& out_stats) {
    BenchmarkRelease release = load_release(release_path);
    write_file_atomic(out_stats, canonical_dump(to_json(benchmark_stats(release))) + "\n");
}

void cost_to_file(const std::filesystem::path& params_path,
                  const std::filesystem::path& out_report) {
    CostParameters params =
        cost_parameters_from_json(parse_json(read_file(params_path), params_path.string()));
    PipelineCost pipeline = pipeline_cost(params);
    IncrementalCost incremental = incremental_cost(params);
    json report{{"naive", naive_cost(params)},
                {"pipeline", json{{"exact", pipeline.exact}, {"approx", pipeline.approx}}},
                {"incremental", json{{"definitions", incremental.definitions},
                                     {"new_texts", incremental.new_texts},
                                     {"back_fill", incremental.back_fill},
                                     {"total", incremental.total}}}};
    write_file_atomic(out_report, canonical_dump(report) + "\n");
}

void subset_to_files(const std::filesystem::path& release_path, double fraction,
                     std::uint64_t seed, const std::filesystem::path& out_subset,
                     const std::optional<std::filesystem::path>& out_complement) {
    BenchmarkRelease release = load_release(release_path);
    auto [subset, complement] = subset_split(release, fraction, seed);
    save_release(out_subset, subset);
    if (out_complement) save_release(*out_complement, complement);
}

void density_to_file(const std::filesystem::path& release_path,
                     const std::filesystem::path& errors_path,
                     const std::filesystem::path& out_curves) {
    BenchmarkRelease release = load_release(release_path);
    auto labels = load_error_labels(errors_path);
    auto curves = density_curves(release, labels);
    write_file_atomic(out_curves, canonical_dump(to_json(curves)) + "\n");
}

void iaa_to_file(const std::vector<std::filesystem::path>& label_files,
                 const std::vector<std::string>& human_ids,
                 const std::filesystem::path& out_report) {
    auto vectors = load_judgment_vectors(label_files);
    std::set<std::string> humans(human_ids.begin(), human_ids.end());
    std::vector<JudgmentVector> human_vectors;
    std::vector<JudgmentVector> llm_vectors;
    for (auto& v : vectors) {
        (humans.count(v.rater_id) ? human_vectors : llm_vectors).push_back(std::move(v));
    }
    if (human_vectors.size() != humans.size()) {
        throw ValidationError("some --human rater ids were not found in the label files");
    }
    IaaPanel panel = iaa_panel(llm_vectors, human_vectors);
    write_file_atomic(out_report, canonical_dump(to_json(panel)) + "\n");
}

}  // namespace seoe::ops
