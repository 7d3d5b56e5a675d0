// seoe command-line interface. All functionality lives in libseoe behind the
// C API; this binary only parses arguments and forwards.

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seoe/seoe.h"

namespace {

struct SessionDeleter {
    void operator()(seoe_session* s) const { seoe_session_free(s); }
};
using SessionPtr = std::unique_ptr<seoe_session, SessionDeleter>;

int finish(seoe_session* session, seoe_status status) {
    if (status != SEOE_OK) {
        std::cerr << "error: " << seoe_session_last_error(session) << "\n";
    }
    return static_cast<int>(status);
}

// Stage commands that default to stdout write through a temp file.
class OutOrStdout {
public:
    explicit OutOrStdout(std::string out) : out_(std::move(out)) {
        if (out_.empty()) {
            temp_ = std::filesystem::temp_directory_path() /
                    ("seoe_out_" + std::to_string(::getpid()) + ".json");
        }
    }
    const char* path() const { return out_.empty() ? temp_.c_str() : out_.c_str(); }
    ~OutOrStdout() {
        if (out_.empty() && std::filesystem::exists(temp_)) {
            std::ifstream in(temp_);
            std::cout << in.rdbuf();
            std::error_code ec;
            std::filesystem::remove(temp_, ec);
        }
    }

private:
    std::string out_;
    std::filesystem::path temp_;
};

std::vector<const char*> c_strings(const std::vector<std::string>& values) {
    std::vector<const char*> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v.c_str());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seoe - benchmark construction and semantic evaluation for "
                 "open-domain event detection"};
    app.require_subcommand(1);

    SessionPtr session(seoe_session_new());
    if (!session) {
        std::cerr << "error: cannot create session\n";
        return 1;
    }

    std::string mock_script, log_level, cache_dir, base_url, embed_base_url, api_key;
    int max_concurrency = 0, retries = 0, backoff_ms = -1;
    app.add_option("--mock", mock_script, "Route all provider traffic to a scripted mock");
    app.add_option("--log-level", log_level, "debug|info|warn|error|off");
    app.add_option("--cache-dir", cache_dir, "Response cache directory");
    app.add_option("--base-url", base_url, "Chat provider base URL (or SEOE_BASE_URL)");
    app.add_option("--embed-base-url", embed_base_url,
                   "Embedding provider base URL (or SEOE_EMBED_BASE_URL)");
    app.add_option("--api-key", api_key, "Bearer token (or SEOE_API_KEY)");
    app.add_option("--max-concurrency", max_concurrency, "Max in-flight provider requests");
    app.add_option("--retries", retries, "Provider attempts before failing");
    app.add_option("--backoff-ms", backoff_ms, "Initial retry backoff in milliseconds");

    // integrate
    auto* integrate = app.add_subcommand("integrate", "Merge source ontologies and sample "
                                                      "a coverage-complete corpus");
    std::string sources;
    int quota = 10;
    std::uint64_t seed = 1;
    std::vector<std::string> integrate_out;
    integrate->add_option("--sources", sources, "Sources manifest JSON")->required();
    integrate->add_option("--quota", quota, "Target documents per type");
    integrate->add_option("--seed", seed, "Sampling seed");
    integrate->add_option("--out", integrate_out, "Output: ontology.json corpus.jsonl")
        ->expected(2)
        ->required();

    // define
    auto* define = app.add_subcommand("define", "Generate fine-grained type definitions");
    std::string def_ontology, def_corpus, def_model = "gpt-4o", def_out;
    define->add_option("--ontology", def_ontology)->required();
    define->add_option("--corpus", def_corpus)->required();
    define->add_option("--model", def_model, "Annotation model");
    define->add_option("--out", def_out)->required();

    // group
    auto* group = app.add_subcommand("group", "Build similarity groups over definitions");
    std::string grp_ontology, grp_out, grp_export, grp_embed_model = "bge-m3";
    double grp_threshold = 0.8;
    group->add_option("--ontology", grp_ontology)->required();
    group->add_option("--threshold", grp_threshold);
    group->add_option("--embed-model", grp_embed_model);
    group->add_option("--out", grp_out)->required();
    group->add_option("--export-embeddings", grp_export, "Write type embedding matrix");

    // annotate
    auto* annotate = app.add_subcommand("annotate", "Run supplementary annotation rounds");
    std::string ann_corpus, ann_ontology, ann_model = "gpt-4o", ann_embed = "bge-m3", ann_out;
    int ann_k = 5, ann_rounds = 10;
    double ann_tau = 0.8, ann_temperature = 0.7;
    annotate->add_option("--corpus", ann_corpus)->required();
    annotate->add_option("--ontology", ann_ontology)->required();
    annotate->add_option("--k", ann_k, "Top-k latent filter");
    annotate->add_option("--tau", ann_tau, "Similarity threshold");
    annotate->add_option("--rounds", ann_rounds);
    annotate->add_option("--temperature", ann_temperature, "Annotation sampling temperature");
    annotate->add_option("--model", ann_model);
    annotate->add_option("--embed-model", ann_embed);
    annotate->add_option("--out", ann_out, "Rounds output directory")->required();

    // sample
    auto* sample = app.add_subcommand("sample", "Nucleus-select triggers over rounds");
    std::string smp_rounds, smp_out;
    double smp_p = 0.5;
    sample->add_option("--rounds", smp_rounds, "Rounds directory")->required();
    sample->add_option("--p", smp_p, "Cumulative frequency threshold");
    sample->add_option("--out", smp_out)->required();

    // merge
    auto* merge = app.add_subcommand("merge", "Merge redundant triggers into a release");
    std::string mrg_selected, mrg_corpus, mrg_ontology, mrg_groups, mrg_model = "gpt-4o",
                mrg_out;
    merge->add_option("--selected", mrg_selected)->required();
    merge->add_option("--corpus", mrg_corpus)->required();
    merge->add_option("--ontology", mrg_ontology)->required();
    merge->add_option("--groups", mrg_groups);
    merge->add_option("--model", mrg_model);
    merge->add_option("--out", mrg_out, "Release file")->required();

    // release
    auto* release = app.add_subcommand("release", "Emit one release per p value");
    std::string rel_rounds, rel_corpus, rel_ontology, rel_groups, rel_model = "gpt-4o",
                rel_out_dir = ".";
    std::vector<double> rel_p{0.3, 0.5, 0.7};
    release->add_option("--rounds", rel_rounds)->required();
    release->add_option("--corpus", rel_corpus)->required();
    release->add_option("--ontology", rel_ontology)->required();
    release->add_option("--groups", rel_groups);
    release->add_option("--p", rel_p, "p values")->expected(-1);
    release->add_option("--model", rel_model);
    release->add_option("--out-dir", rel_out_dir);

    // infer
    auto* infer = app.add_subcommand("infer", "Run an ODED model over a release");
    std::string inf_release, inf_model, inf_out;
    int inf_max_tokens = 2048;
    infer->add_option("--release", inf_release)->required();
    infer->add_option("--model", inf_model)->required();
    infer->add_option("--max-tokens", inf_max_tokens);
    infer->add_option("--out", inf_out, "Predictions JSONL")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Judge predictions semantically");
    std::string eva_release, eva_preds, eva_groups, eva_judge = "gpt-4o", eva_out;
    int eva_replicates = 3;
    evaluate->add_option("--release", eva_release)->required();
    evaluate->add_option("--preds", eva_preds)->required();
    evaluate->add_option("--groups", eva_groups);
    evaluate->add_option("--judge", eva_judge);
    evaluate->add_option("--replicates", eva_replicates);
    evaluate->add_option("--out", eva_out, "Report JSON")->required();

    // iaa
    auto* iaa = app.add_subcommand("iaa", "Inter-annotator agreement panel");
    std::vector<std::string> iaa_labels, iaa_humans;
    std::string iaa_out;
    iaa->add_option("--labels", iaa_labels, "Label JSONL files")->expected(-1)->required();
    iaa->add_option("--human", iaa_humans, "Rater ids forming the human reference")
        ->expected(-1);
    iaa->add_option("--out", iaa_out);

    // stats
    auto* stats = app.add_subcommand("stats", "Benchmark statistics");
    std::string sts_release, sts_out;
    stats->add_option("--release", sts_release)->required();
    stats->add_option("--out", sts_out, "Default: stdout");

    // cost
    auto* cost = app.add_subcommand("cost", "Cost model report");
    std::string cst_params, cst_out;
    cost->add_option("--params", cst_params, "Cost parameters JSON")->required();
    cost->add_option("--out", cst_out, "Default: stdout");

    // subset
    auto* subset = app.add_subcommand("subset", "Random document subset of a release");
    std::string sub_release, sub_out, sub_complement;
    double sub_fraction = 0.25;
    std::uint64_t sub_seed = 7;
    subset->add_option("--release", sub_release)->required();
    subset->add_option("--fraction", sub_fraction);
    subset->add_option("--seed", sub_seed);
    subset->add_option("--out", sub_out)->required();
    subset->add_option("--complement-out", sub_complement);

    // density
    auto* density = app.add_subcommand("density", "Error distribution across event density");
    std::string den_release, den_errors, den_out;
    density->add_option("--release", den_release)->required();
    density->add_option("--errors", den_errors, "Error labels JSONL")->required();
    density->add_option("--out", den_out, "Default: stdout");

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "Run the full pipeline with resume");
    std::string pipe_config, pipe_out;
    pipeline->add_option("--config", pipe_config, "Pipeline config JSON")->required();
    pipeline->add_option("--out", pipe_out, "Run output directory")->required();

    CLI11_PARSE(app, argc, argv);

    seoe_session* s = session.get();
    auto check = [&](seoe_status status) {
        if (status != SEOE_OK) {
            std::cerr << "error: " << seoe_session_last_error(s) << "\n";
            std::exit(static_cast<int>(status));
        }
    };
    if (!log_level.empty()) check(seoe_session_set_log_level(s, log_level.c_str()));
    if (!mock_script.empty()) check(seoe_session_set_mock_script(s, mock_script.c_str()));
    if (!cache_dir.empty()) check(seoe_session_set_cache_dir(s, cache_dir.c_str()));
    if (!base_url.empty() || !embed_base_url.empty() || !api_key.empty()) {
        check(seoe_session_set_provider(s, base_url.empty() ? nullptr : base_url.c_str(),
                                        embed_base_url.empty() ? nullptr : embed_base_url.c_str(),
                                        api_key.empty() ? nullptr : api_key.c_str()));
    }
    if (max_concurrency > 0) check(seoe_session_set_max_concurrency(s, max_concurrency));
    if (retries > 0) check(seoe_session_set_retry(s, retries, backoff_ms >= 0 ? backoff_ms : 1000));
    else if (backoff_ms >= 0) check(seoe_session_set_retry(s, 3, backoff_ms));

    if (integrate->parsed()) {
        return finish(s, seoe_integrate(s, sources.c_str(), quota, seed,
                                        integrate_out[0].c_str(), integrate_out[1].c_str()));
    }
    if (define->parsed()) {
        return finish(s, seoe_define(s, def_ontology.c_str(), def_corpus.c_str(),
                                     def_model.c_str(), def_out.c_str()));
    }
    if (group->parsed()) {
        return finish(s, seoe_group(s, grp_ontology.c_str(), grp_threshold,
                                    grp_embed_model.c_str(), grp_out.c_str(),
                                    grp_export.empty() ? nullptr : grp_export.c_str()));
    }
    if (annotate->parsed()) {
        return finish(s, seoe_annotate(s, ann_corpus.c_str(), ann_ontology.c_str(), ann_k,
                                       ann_tau, ann_rounds, ann_temperature,
                                       ann_model.c_str(), ann_embed.c_str(),
                                       ann_out.c_str()));
    }
    if (sample->parsed()) {
        return finish(s, seoe_sample(s, smp_rounds.c_str(), smp_p, smp_out.c_str()));
    }
    if (merge->parsed()) {
        return finish(s, seoe_merge(s, mrg_selected.c_str(), mrg_corpus.c_str(),
                                    mrg_ontology.c_str(),
                                    mrg_groups.empty() ? nullptr : mrg_groups.c_str(),
                                    mrg_model.c_str(), mrg_out.c_str()));
    }
    if (release->parsed()) {
        return finish(s, seoe_release_all(s, rel_rounds.c_str(), rel_corpus.c_str(),
                                          rel_ontology.c_str(),
                                          rel_groups.empty() ? nullptr : rel_groups.c_str(),
                                          rel_p.data(), rel_p.size(), rel_model.c_str(),
                                          rel_out_dir.c_str()));
    }
    if (infer->parsed()) {
        return finish(s, seoe_infer(s, inf_release.c_str(), inf_model.c_str(),
                                    inf_max_tokens, inf_out.c_str()));
    }
    if (evaluate->parsed()) {
        return finish(s, seoe_evaluate(s, eva_release.c_str(), eva_preds.c_str(),
                                       eva_groups.empty() ? nullptr : eva_groups.c_str(),
                                       eva_judge.c_str(), eva_replicates, eva_out.c_str()));
    }
    if (iaa->parsed()) {
        OutOrStdout out(iaa_out);
        auto files = c_strings(iaa_labels);
        auto humans = c_strings(iaa_humans);
        return finish(s, seoe_iaa(s, files.data(), files.size(), humans.data(),
                                  humans.size(), out.path()));
    }
    if (stats->parsed()) {
        OutOrStdout out(sts_out);
        return finish(s, seoe_stats(s, sts_release.c_str(), out.path()));
    }
    if (cost->parsed()) {
        OutOrStdout out(cst_out);
        return finish(s, seoe_cost(s, cst_params.c_str(), out.path()));
    }
    if (subset->parsed()) {
        return finish(s, seoe_subset(s, sub_release.c_str(), sub_fraction, sub_seed,
                                     sub_out.c_str(),
                                     sub_complement.empty() ? nullptr : sub_complement.c_str()));
    }
    if (density->parsed()) {
        OutOrStdout out(den_out);
        return finish(s, seoe_density(s, den_release.c_str(), den_errors.c_str(), out.path()));
    }
    if (pipeline->parsed()) {
        return finish(s, seoe_pipeline(s, pipe_config.c_str(), pipe_out.c_str()));
    }
    return 0;
}
