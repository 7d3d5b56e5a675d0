#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jsonio.hpp"
#include "records.hpp"

// Stage prompt templates and reply parsers. Every renderer produces the full
// user-message text (Background / Task Description / Output Format / Data);
// every parser accepts the raw assistant reply, tolerating markdown fences
// around the JSON object.
namespace seoe::prompts {

inline constexpr const char* kDefineVersion = "define.v1";
inline constexpr const char* kProposeVersion = "propose.v1";
inline constexpr const char* kSupplementVersion = "supplement.v1";
inline constexpr const char* kMergeVersion = "merge.v1";
inline constexpr const char* kInferVersion = "infer.v1";
inline constexpr const char* kJudgeVersion = "judge.v1";

struct NamedDefinition {
    std::string name;
    std::string definition;
};

struct DefinitionExample {
    std::string text;
    std::string mention;
};

struct TriggerView {
    std::string mention;
    std::string type_name;
};

std::string render_definition_prompt(const std::string& display_name,
                                     std::span<const std::string> roles,
                                     std::span<const DefinitionExample> examples);

std::string render_possible_types_prompt(const std::string& text,
                                         std::span<const TriggerView> gold,
                                         std::span<const NamedDefinition> gold_definitions);

std::string render_supplement_prompt(const std::string& text,
                                     std::span<const TriggerView> gold,
                                     std::span<const NamedDefinition> gold_definitions,
                                     std::span<const NamedDefinition> latent_definitions);

struct MergeGroupView {
    std::vector<TriggerView> members;
};

std::string render_merge_prompt(const std::string& text,
                                std::span<const MergeGroupView> groups,
                                std::span<const NamedDefinition> definitions);

std::string render_inference_prompt(const std::string& text);

std::string render_judge_prompt(const std::string& text,
                                std::span<const TriggerView> gold,
                                std::span<const TriggerView> predicted,
                                std::span<const NamedDefinition> definitions,
                                std::span<const NamedDefinition> similar_definitions);

// Locates and parses the outermost JSON object of a reply.
json extract_json_object(std::string_view reply);

struct DefinitionReply {
    std::string event_type;
    std::string detailed_definition;
};
DefinitionReply parse_definition_reply(std::string_view reply);

// (event_type, detailed_definition) pairs from "possible_event_types".
std::vector<NamedDefinition> parse_possible_types_reply(std::string_view reply);

// (event_type, trigger_word) pairs from "supplemented_annotations".
std::vector<std::pair<std::string, std::string>> parse_supplement_reply(std::string_view reply);

// (trigger span, event type) pairs from "Merged Triggers".
std::vector<std::pair<std::string, std::string>> parse_merge_reply(std::string_view reply);

struct InferenceReply {
    std::map<std::string, std::string> definitions;          // Event Type Generation
    std::vector<std::pair<std::string, std::string>> extractions;  // (span, type)
};
InferenceReply parse_inference_reply(std::string_view reply);

// (pred_index, gold_index) pairs from "final_output".
std::vector<std::pair<int, int>> parse_judge_reply(std::string_view reply);

}  // namespace seoe::prompts
