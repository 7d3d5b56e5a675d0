#include "analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "errors.hpp"
#include "shuffle.hpp"
#include "text.hpp"

namespace seoe {

namespace {

void check_lengths(const JudgmentVector& a, const JudgmentVector& b, std::size_t min_len) {
    if (a.labels.size() != b.labels.size()) {
        throw ValidationError("judgment vectors have different lengths (" +
                              std::to_string(a.labels.size()) + " vs " +
                              std::to_string(b.labels.size()) + ")");
    }
    if (a.labels.size() < min_len) {
        throw ValidationError("judgment vectors must have length >= " +
                              std::to_string(min_len));
    }
}

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const int> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

// Pearson correlation; nullopt when either side has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

// Regularized incomplete beta via Lentz's continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kEps = 3e-12;
    constexpr double kTiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h;
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
    double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - bt * beta_continued_fraction(b, a, 1.0 - x) / b;
}

// Two-sided p-value of a t statistic with dof degrees of freedom.
double t_two_sided_p(double t, double dof) {
    return incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

double sample_stddev(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                  static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace

double percent_agreement(const JudgmentVector& a, const JudgmentVector& b) {
    check_lengths(a, b, 1);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        if (a.labels[i] == b.labels[i]) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(a.labels.size());
}

double cohens_kappa(const JudgmentVector& a, const JudgmentVector& b) {
    check_lengths(a, b, 1);
    const double n = static_cast<double>(a.labels.size());
    std::map<int, std::size_t> count_a, count_b;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        ++count_a[a.labels[i]];
        ++count_b[b.labels[i]];
        if (a.labels[i] == b.labels[i]) ++agree;
    }
    double p_observed = static_cast<double>(agree) / n;
    double p_expected = 0.0;
    for (const auto& [category, count] : count_a) {
        auto it = count_b.find(category);
        if (it != count_b.end()) {
            p_expected += (static_cast<double>(count) / n) *
                          (static_cast<double>(it->second) / n);
        }
    }
    if (std::fabs(1.0 - p_expected) < 1e-12) {
        return a.labels == b.labels ? 1.0 : 0.0;
    }
    return (p_observed - p_expected) / (1.0 - p_expected);
}

SpearmanResult spearman(const JudgmentVector& a, const JudgmentVector& b) {
    check_lengths(a, b, 3);
    const std::size_t n = a.labels.size();
    auto ranks_a = average_ranks(a.labels);
    auto ranks_b = average_ranks(b.labels);

    SpearmanResult result;
    auto rho = pearson(ranks_a, ranks_b);
    if (!rho) return result;  // zero variance: undefined, not an error
    result.defined = true;
    result.rho = *rho;

    if (n <= 10) {
        // Exact permutation test over distinct arrangements of one rank
        // vector; with ties every distinct arrangement is equally likely.
        std::vector<double> perm = ranks_b;
        std::sort(perm.begin(), perm.end());
        std::size_t total = 0, extreme = 0;
        const double observed = std::fabs(result.rho);
        do {
            ++total;
            auto r = pearson(ranks_a, perm);
            if (r && std::fabs(*r) >= observed - 1e-12) ++extreme;
        } while (std::next_permutation(perm.begin(), perm.end()));
        result.p_value = static_cast<double>(extreme) / static_cast<double>(total);
    } else {
        double r2 = result.rho * result.rho;
        if (r2 >= 1.0 - 1e-15) {
            result.p_value = 0.0;
        } else {
            double dof = static_cast<double>(n - 2);
            double t = result.rho * std::sqrt(dof / (1.0 - r2));
            result.p_value = t_two_sided_p(t, dof);
        }
    }
    return result;
}

IaaPanel iaa_panel(std::span<const JudgmentVector> llm_replicates,
                   std::span<const JudgmentVector> humans) {
    if (llm_replicates.empty()) throw ValidationError("iaa_panel requires >= 1 replicate");
    if (humans.empty()) throw ValidationError("iaa_panel requires >= 1 human");
    const std::size_t length = humans.front().labels.size();
    for (const auto& v : humans) check_lengths(humans.front(), v, 1);
    for (const auto& v : llm_replicates) check_lengths(humans.front(), v, 1);

    IaaPanel panel;
    panel.replicates = llm_replicates.size();
    panel.humans = humans.size();
    panel.pairs = length;

    for (const auto& replicate : llm_replicates) {
        double percent_sum = 0.0, kappa_sum = 0.0, rho_sum = 0.0;
        bool rho_defined = true;
        for (const auto& human : humans) {
            percent_sum += percent_agreement(replicate, human);
            kappa_sum += cohens_kappa(replicate, human);
            auto s = spearman(replicate, human);
            if (s.defined) {
                rho_sum += s.rho;
            } else {
                rho_defined = false;
            }
        }
        const double h = static_cast<double>(humans.size());
        panel.percent_per_replicate.push_back(percent_sum / h);
        panel.kappa_per_replicate.push_back(kappa_sum / h);
        panel.spearman_per_replicate.push_back(
            rho_defined ? std::optional<double>(rho_sum / h) : std::nullopt);
    }

    panel.percent.mean = std::accumulate(panel.percent_per_replicate.begin(),
                                         panel.percent_per_replicate.end(), 0.0) /
                         static_cast<double>(panel.replicates);
    panel.percent.stddev = sample_stddev(panel.percent_per_replicate);
    panel.kappa.mean = std::accumulate(panel.kappa_per_replicate.begin(),
                                       panel.kappa_per_replicate.end(), 0.0) /
                       static_cast<double>(panel.replicates);
    panel.kappa.stddev = sample_stddev(panel.kappa_per_replicate);

    std::vector<double> rhos;
    for (const auto& r : panel.spearman_per_replicate) {
        if (r) rhos.push_back(*r);
    }
    if (rhos.size() == panel.replicates) {
        panel.spearman_rho.mean =
            std::accumulate(rhos.begin(), rhos.end(), 0.0) / static_cast<double>(rhos.size());
        panel.spearman_rho.stddev = sample_stddev(rhos);
    } else {
        panel.spearman_rho.defined = false;
    }

    if (humans.size() >= 2) {
        double percent_sum = 0.0, kappa_sum = 0.0, rho_sum = 0.0;
        std::size_t pairs = 0;
        bool rho_defined = true;
        for (std::size_t i = 0; i < humans.size(); ++i) {
            for (std::size_t j = i + 1; j < humans.size(); ++j) {
                percent_sum += percent_agreement(humans[i], humans[j]);
                kappa_sum += cohens_kappa(humans[i], humans[j]);
                auto s = spearman(humans[i], humans[j]);
                if (s.defined) {
                    rho_sum += s.rho;
                } else {
                    rho_defined = false;
                }
                ++pairs;
            }
        }
        panel.human_percent = percent_sum / static_cast<double>(pairs);
        panel.human_kappa = kappa_sum / static_cast<double>(pairs);
        if (rho_defined) panel.human_spearman = rho_sum / static_cast<double>(pairs);
    }
    return panel;
}

json to_json(const IaaPanel& panel) {
    auto opt = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };
    json spearman_reps = json::array();
    for (const auto& r : panel.spearman_per_replicate) spearman_reps.push_back(opt(r));
    return json{
        {"replicates", panel.replicates},
        {"humans", panel.humans},
        {"pairs", panel.pairs},
        {"per_replicate", json{{"percent", panel.percent_per_replicate},
                               {"kappa", panel.kappa_per_replicate},
                               {"spearman", std::move(spearman_reps)}}},
        {"percent", json{{"mean", panel.percent.mean}, {"std", panel.percent.stddev}}},
        {"kappa", json{{"mean", panel.kappa.mean}, {"std", panel.kappa.stddev}}},
        {"spearman", panel.spearman_rho.defined
                         ? json{{"mean", panel.spearman_rho.mean},
                                {"std", panel.spearman_rho.stddev}}
                         : json(nullptr)},
        {"humans_reference", json{{"percent", panel.human_percent},
                                  {"kappa", panel.human_kappa},
                                  {"spearman", opt(panel.human_spearman)}}}};
}

std::vector<JudgmentVector> load_judgment_vectors(
    const std::vector<std::filesystem::path>& label_files) {
    struct RaterPairs {
        std::string rater_id;
        std::map<std::tuple<std::string, int, int>, int> labels;
    };
    std::vector<RaterPairs> raters;

    for (const auto& path : label_files) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open labels file: " + path.string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded()) {
                throw ParseError("malformed JSON at " + path.string() + ":" +
                                 std::to_string(lineno));
            }
            RaterPairs rater;
            rater.rater_id = j.at("rater_id").get<std::string>();
            for (const auto& pair : j.at("pairs")) {
                auto key = std::make_tuple(pair.at("doc_id").get<std::string>(),
                                           pair.at("pred_index").get<int>(),
                                           pair.at("gold_index").get<int>());
                int match = pair.at("match").get<int>();
                if (match != 0 && match != 1) {
                    throw ValidationError("match label must be 0 or 1 in " + path.string());
                }
                if (!rater.labels.emplace(key, match).second) {
                    throw ValidationError("rater " + rater.rater_id +
                                          " labels a pair twice in " + path.string());
                }
            }
            raters.push_back(std::move(rater));
        }
    }
    if (raters.empty()) throw ValidationError("no judgment vectors loaded");

    const auto& reference = raters.front().labels;
    std::vector<JudgmentVector> vectors;
    for (const auto& rater : raters) {
        if (rater.labels.size() != reference.size()) {
            throw ValidationError("rater " + rater.rater_id +
                                  " labels a different pair set");
        }
        JudgmentVector vec;
        vec.rater_id = rater.rater_id;
        for (const auto& [key, _] : reference) {
            auto it = rater.labels.find(key);
            if (it == rater.labels.end()) {
                throw ValidationError("rater " + rater.rater_id +
                                      " labels a different pair set");
            }
            vec.labels.push_back(it->second);
        }
        vectors.push_back(std::move(vec));
    }
    return vectors;
}

// ---------------------------------------------------------------------------

BenchmarkStats benchmark_stats(const BenchmarkRelease& release) {
    BenchmarkStats stats;
    stats.documents = release.documents.size();
    stats.event_types = release.ontology.size();

    std::size_t definition_words = 0, defined_types = 0;
    for (const auto& type : release.ontology) {
        if (type.definition) {
            definition_words += type.definition->word_count;
            ++defined_types;
        }
    }
    if (defined_types) {
        stats.avg_definition_length =
            static_cast<double>(definition_words) / static_cast<double>(defined_types);
    }

    std::map<std::string, std::size_t> type_frequency;
    for (const auto& type : release.ontology) type_frequency[type.type_id] = 0;
    std::size_t trigger_tokens = 0;
    for (const auto& doc : release.documents) {
        stats.sentences += sentence_count(doc.text);
        stats.tokens += doc.token_count;
        stats.events += doc.gold_events.size();
        for (const auto& trigger : doc.gold_events) {
            trigger_tokens += whitespace_token_count(trigger.mention);
            ++type_frequency[trigger.type_id];
        }
    }
    if (stats.events) {
        stats.avg_trigger_length =
            static_cast<double>(trigger_tokens) / static_cast<double>(stats.events);
    }
    if (stats.documents) {
        stats.avg_events_per_doc =
            static_cast<double>(stats.events) / static_cast<double>(stats.documents);
    }
    if (stats.event_types) {
        stats.type_avg_frequency =
            static_cast<double>(stats.events) / static_cast<double>(stats.event_types);
    }

    if (stats.events && stats.event_types) {
        std::vector<std::pair<std::string, std::size_t>> ranked(type_frequency.begin(),
                                                                type_frequency.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        auto share = [&](double fraction, bool top) {
            auto count = static_cast<std::size_t>(
                std::llround(fraction * static_cast<double>(ranked.size())));
            count = std::min(count, ranked.size());
            std::size_t events = 0;
            for (std::size_t i = 0; i < count; ++i) {
                std::size_t index = top ? i : ranked.size() - 1 - i;
                events += ranked[index].second;
            }
            return static_cast<double>(events) / static_cast<double>(stats.events);
        };
        stats.top10_share = share(0.10, true);
        stats.top25_share = share(0.25, true);
        stats.bottom50_share = share(0.50, false);
        stats.bottom25_share = share(0.25, false);
        stats.bottom10_share = share(0.10, false);
    }
    return stats;
}

json to_json(const BenchmarkStats& stats) {
    return json{{"documents", stats.documents},
                {"sentences", stats.sentences},
                {"tokens", stats.tokens},
                {"event_types", stats.event_types},
                {"events", stats.events},
                {"avg_definition_length", stats.avg_definition_length},
                {"avg_trigger_length", stats.avg_trigger_length},
                {"avg_events_per_doc", stats.avg_events_per_doc},
                {"type_avg_frequency", stats.type_avg_frequency},
                {"cumulative_shares", json{{"top_10", stats.top10_share},
                                           {"top_25", stats.top25_share},
                                           {"bottom_50", stats.bottom50_share},
                                           {"bottom_25", stats.bottom25_share},
                                           {"bottom_10", stats.bottom10_share}}}};
}

// ---------------------------------------------------------------------------

std::string to_string(ErrorPattern pattern) {
    switch (pattern) {
        case ErrorPattern::AmbiguousMention: return "ambiguous_mention";
        case ErrorPattern::LengthyMention: return "lengthy_mention";
        case ErrorPattern::InconsistentTypeDefinition: return "inconsistent_type_definition";
        case ErrorPattern::ConflictingTypeDefinition: return "conflicting_type_definition";
        case ErrorPattern::ReasonablePredictionNoMatch: return "reasonable_prediction_no_match";
    }
    throw ValidationError("invalid error pattern");
}

ErrorPattern error_pattern_from_string(const std::string& name) {
    if (name == "ambiguous_mention") return ErrorPattern::AmbiguousMention;
    if (name == "lengthy_mention") return ErrorPattern::LengthyMention;
    if (name == "inconsistent_type_definition") return ErrorPattern::InconsistentTypeDefinition;
    if (name == "conflicting_type_definition") return ErrorPattern::ConflictingTypeDefinition;
    if (name == "reasonable_prediction_no_match") {
        return ErrorPattern::ReasonablePredictionNoMatch;
    }
    throw ValidationError("unknown error pattern: " + name);
}

std::string to_string(ReliabilitySubtype subtype) {
    switch (subtype) {
        case ReliabilitySubtype::C1: return "C1";
        case ReliabilitySubtype::C2: return "C2";
        case ReliabilitySubtype::C3: return "C3";
        case ReliabilitySubtype::C4: return "C4";
        case ReliabilitySubtype::IC1: return "IC1";
        case ReliabilitySubtype::IC2: return "IC2";
        case ReliabilitySubtype::IC3: return "IC3";
    }
    throw ValidationError("invalid reliability subtype");
}

ReliabilitySubtype reliability_subtype_from_string(const std::string& name) {
    if (name == "C1") return ReliabilitySubtype::C1;
    if (name == "C2") return ReliabilitySubtype::C2;
    if (name == "C3") return ReliabilitySubtype::C3;
    if (name == "C4") return ReliabilitySubtype::C4;
    if (name == "IC1") return ReliabilitySubtype::IC1;
    if (name == "IC2") return ReliabilitySubtype::IC2;
    if (name == "IC3") return ReliabilitySubtype::IC3;
    throw ValidationError("unknown reliability subtype: " + name);
}

std::vector<ErrorPatternLabel> load_error_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open errors file: " + path.string());
    std::vector<ErrorPatternLabel> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ParseError("malformed JSON at " + path.string() + ":" +
                             std::to_string(lineno));
        }
        ErrorPatternLabel label;
        label.doc_id = j.at("doc_id").get<std::string>();
        label.pred_index = j.at("pred_index").get<int>();
        label.pattern = error_pattern_from_string(j.at("pattern").get<std::string>());
        if (j.contains("subtype") && !j.at("subtype").is_null()) {
            label.subtype = reliability_subtype_from_string(j.at("subtype").get<std::string>());
        }
        labels.push_back(std::move(label));
    }
    return labels;
}

std::vector<DensityCutPoint> density_curves(const BenchmarkRelease& release,
                                            std::span<const ErrorPatternLabel> labels) {
    if (labels.empty()) return {};

    std::set<std::string> doc_ids;
    for (const auto& doc : release.documents) doc_ids.insert(doc.doc_id);
    for (const auto& label : labels) {
        if (!doc_ids.count(label.doc_id)) {
            throw ValidationError("error label references unknown doc " + label.doc_id);
        }
    }

    struct Ranked {
        std::string doc_id;
        double density;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(release.documents.size());
    for (const auto& doc : release.documents) {
        ranked.push_back({doc.doc_id,
                          static_cast<double>(doc.gold_events.size()) /
                              static_cast<double>(doc.token_count)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.density != b.density) return a.density > b.density;
        return a.doc_id < b.doc_id;
    });

    std::map<std::string, std::vector<const ErrorPatternLabel*>> labels_by_doc;
    for (const auto& label : labels) labels_by_doc[label.doc_id].push_back(&label);

    const double cuts[] = {0.10, 0.25, 0.50, 0.75, 1.00};
    std::vector<DensityCutPoint> curves;
    for (double fraction : cuts) {
        DensityCutPoint point;
        point.fraction = fraction;
        point.documents = std::min<std::size_t>(
            ranked.size(),
            static_cast<std::size_t>(
                std::ceil(fraction * static_cast<double>(ranked.size()))));
        for (std::size_t i = 0; i < point.documents; ++i) {
            auto it = labels_by_doc.find(ranked[i].doc_id);
            if (it == labels_by_doc.end()) continue;
            for (const auto* label : it->second) {
                ++point.counts[to_string(label->pattern)];
                ++point.labeled_errors;
            }
        }
        for (const auto& [pattern, count] : point.counts) {
            point.shares[pattern] =
                static_cast<double>(count) / static_cast<double>(point.labeled_errors);
        }
        curves.push_back(std::move(point));
    }
    return curves;
}

json to_json(std::span<const DensityCutPoint> curves) {
    json out = json::array();
    for (const auto& point : curves) {
        out.push_back(json{{"fraction", point.fraction},
                           {"documents", point.documents},
                           {"labeled_errors", point.labeled_errors},
                           {"counts", point.counts},
                           {"shares", point.shares}});
    }
    return out;
}

// ---------------------------------------------------------------------------

void validate(const CostParameters& params) {
    const double values[] = {params.texts,           params.types,
                             params.new_texts,       params.new_types,
                             params.annotation_cost, params.embedding_cost,
                             params.definition_cost, params.avg_latent_types,
                             params.avg_new_latent_types, params.avg_possible_types};
    for (double v : values) {
        if (v < 0.0 || !std::isfinite(v)) {
            throw ValidationError("cost parameters must be finite and >= 0");
        }
    }
    if (params.avg_latent_types > params.types) {
        throw ValidationError("avg latent types cannot exceed the type count");
    }
    if (params.new_types > 0.0 && params.avg_new_latent_types > params.new_types) {
        throw ValidationError("avg new latent types cannot exceed the new type count");
    }
}

CostParameters cost_parameters_from_json(const json& j) {
    CostParameters params;
    params.texts = j.value("texts", 0.0);
    params.types = j.value("types", 0.0);
    params.new_texts = j.value("new_texts", 0.0);
    params.new_types = j.value("new_types", 0.0);
    params.annotation_cost = j.value("annotation_cost", 0.0);
    params.embedding_cost = j.value("embedding_cost", 0.0);
    params.definition_cost = j.value("definition_cost", 0.0);
    params.avg_latent_types = j.value("avg_latent_types", 0.0);
    params.avg_new_latent_types = j.value("avg_new_latent_types", 0.0);
    params.avg_possible_types = j.value("avg_possible_types", 0.0);
    validate(params);
    return params;
}

double naive_cost(const CostParameters& params) {
    validate(params);
    return params.texts * params.types * params.annotation_cost;
}

PipelineCost pipeline_cost(const CostParameters& params) {
    validate(params);
    PipelineCost cost;
    cost.approx = params.texts * params.avg_latent_types * params.annotation_cost;
    cost.exact = cost.approx + params.texts * params.annotation_cost +
                 (params.texts * params.avg_possible_types + params.types) *
                     params.embedding_cost;
    return cost;
}

IncrementalCost incremental_cost(const CostParameters& params) {
    validate(params);
    IncrementalCost cost;
    cost.definitions = params.new_types * params.definition_cost;
    cost.new_texts =
        params.new_texts *
            (params.avg_latent_types + params.avg_new_latent_types + 1.0) *
            params.annotation_cost +
        (params.new_texts * params.avg_possible_types + params.new_types) *
            params.embedding_cost;
    cost.back_fill = params.texts * params.avg_new_latent_types * params.annotation_cost;
    cost.total = cost.definitions + cost.new_texts + cost.back_fill;
    return cost;
}

// ---------------------------------------------------------------------------

std::pair<BenchmarkRelease, BenchmarkRelease> subset_split(const BenchmarkRelease& release,
                                                           double fraction,
                                                           std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ValidationError("fraction must be in (0, 1]");
    }
    const std::size_t n = release.documents.size();
    auto m = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (m == 0) throw ValidationError("fraction selects zero documents");
    if (m > n) m = n;

    auto order = shuffled_indices(n, seed);
    std::vector<bool> selected(n, false);
    for (std::size_t i = 0; i < m; ++i) selected[order[i]] = true;

    BenchmarkRelease subset;
    BenchmarkRelease complement;
    subset.ontology = complement.ontology = release.ontology;
    subset.nucleus_p = complement.nucleus_p = release.nucleus_p;
    subset.rounds = complement.rounds = release.rounds;
    subset.build_manifest = complement.build_manifest = release.build_manifest;
    subset.build_manifest["subset"] =
        "fraction=" + std::to_string(fraction) + ";seed=" + std::to_string(seed);
    complement.build_manifest["subset"] =
        "complement;fraction=" + std::to_string(fraction) + ";seed=" + std::to_string(seed);
    for (std::size_t i = 0; i < n; ++i) {
        (selected[i] ? subset : complement).documents.push_back(release.documents[i]);
    }
    return {std::move(subset), std::move(complement)};
}

BenchmarkRelease subset_sample(const BenchmarkRelease& release, double fraction,
                               std::uint64_t seed) {
    return subset_split(release, fraction, seed).first;
}

}  // namespace seoe
