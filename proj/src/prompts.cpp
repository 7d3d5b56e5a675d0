#include "prompts.hpp"

#include <cctype>
#include <sstream>

#include "errors.hpp"

namespace seoe::prompts {

namespace {

// --- template texts -------------------------------------------------------

constexpr const char* kDefineBackground =
    "In the context of open domain event extraction, we aim to enhance our "
    "understanding of various event types by generating more detailed and "
    "fine-grained definitions. This will aid in better classification and "
    "recognition of events in text.";

constexpr const char* kDefineTask =
    "You are a knowledgeable event extraction specialist tasked with generating a "
    "more detailed definition for a specified event type based on its name, "
    "ontology, and provided examples of this event type. Your definition should "
    "capture the nuances and variations of the event type to facilitate its "
    "application in natural language processing tasks. Input: You will receive an "
    "event type along with its ontology. Some examples of this event type are "
    "provided.";

constexpr const char* kDefineFormat =
    "Please provide the output in the following Python dictionary format: "
    "{\"event_type\": <str: given_event_type_name>, \"detailed_definition\": "
    "<str: your_generated_definition>}";

constexpr const char* kProposeBackground =
    "In the context of open-domain event extraction, we aim to enhance the "
    "comprehensiveness of event annotations by supplementing existing annotations "
    "with additional potential event types. You are provided with a piece of text "
    "and its associated gold annotations, and the goal is to identify potential "
    "event types that may not have been annotated but could still exist within "
    "the text. This will help ensure that all relevant event types are captured "
    "in future analyses.";

constexpr const char* kProposeTask =
    "You are tasked with analyzing the provided text and its gold annotations. "
    "Your goal is to identify any additional event types that might be present in "
    "the text but are not explicitly annotated. For each event type you identify, "
    "provide a fine-grained definition that captures the specific nuances of that "
    "event type. Before identifying event types, analyze the text to understand "
    "it.";

constexpr const char* kProposeFormat =
    "Provide your answer in the following Python dictionary format: "
    "{\"text_analysis\": \"<your_analysis>\", \"possible_event_types\": "
    "[{\"event_type\": \"<event_type_name>\", \"detailed_definition\": "
    "\"<fine_grained_definition>\"}, ...]}";

constexpr const char* kSupplementBackground =
    "In the context of open-domain event extraction, we are supplementing "
    "existing annotations in text to ensure that all relevant event types are "
    "fully captured. You are provided with a piece of text, its associated gold "
    "annotations, and a list of possible event types with detailed definitions. "
    "Your task is to supplement the existing annotations by identifying "
    "additional event types that may be present in the text but not originally "
    "annotated.";

constexpr const char* kSupplementTask =
    "You are tasked with analyzing the provided text and its existing gold "
    "annotations. Based on the list of possible event types and their detailed "
    "descriptions, you need to supplement the annotations by identifying which of "
    "these additional event types are present in the text. Add these event types "
    "where appropriate, considering their triggers in the text.";

constexpr const char* kSupplementFormat =
    "Please provide your answer in the following Python dictionary format: "
    "{\"text_analysis\": \"<your_analysis>\", \"supplemented_annotations\": "
    "[{\"event_type\": \"<event_type_name>\", \"trigger_word\": "
    "\"<word_or_phrase_in_text>\"}, ...]}";

constexpr const char* kMergeBackground =
    "In the open-domain event extraction task, you are tasked with assisting in "
    "the process of merging duplicate event triggers within a dataset. The "
    "dataset has undergone multiple rounds of supplementation, resulting in "
    "multiple versions of triggers per data point. To ensure robustness and "
    "reliability, you have already performed a resampling process to select "
    "representative data points. However, during the event extraction task, "
    "subtle differences may occur in the mentions and event type definitions "
    "across repeated annotations. These differences need to be merged, reducing "
    "redundant information. Your job is to assist in merging similar event "
    "triggers that refer to the same event, based on their mention and event type "
    "definition. The triggers are divided into groups, and each group may contain "
    "multiple triggers that describe similar but not identical events. Your goal "
    "is to analyze and select the most appropriate trigger for a certain event, "
    "ensuring that only one trigger per event is retained.";

constexpr const char* kMergeTask =
    "Given the original text and the resampled set of triggers with their "
    "corresponding fine-grained event type definitions, you are to perform the "
    "following steps: (1) Analyze the original text to understand the overall "
    "context and what events it discusses. (2) Analyze each group of triggers. "
    "Each group contains multiple triggers that potentially describe similar or "
    "related events, but they may not all refer to exactly the same thing. (3) "
    "For each group, assess the triggers based on their mentions and event type "
    "definitions. You need to determine which trigger best represents the event "
    "described and merge the similar triggers by selecting the most appropriate "
    "one. Output the merged triggers, ensuring that only the most relevant "
    "trigger for each event is retained.";

constexpr const char* kMergeFormat =
    "{\"Text Analysis\": \"<str: your analysis of the text>\", \"Group "
    "Analysis\": [\"<str: your analysis of the first group>\", \"<str: your "
    "analysis of the second group>\", ...], \"Merged Triggers\": [{\"Trigger "
    "Span\": \"<str: the selected span in the text>\", \"Event Type\": \"<str: "
    "the event type corresponding to this trigger>\"}, ...]}";

constexpr const char* kInferBackground =
    "You are an event extractor designed to identify the presence of specific "
    "events in a given piece of text and to locate the corresponding event "
    "triggers in an open-domain setting. Open domain means there are no "
    "predefined constraints on the extraction process, and the text may originate "
    "from diverse sources and domains. This task requires comprehensive analysis "
    "and understanding of the text, as well as the ability to identify and "
    "classify events flexibly without reliance on a fixed ontology.";

constexpr const char* kInferTask =
    "In an open-domain setting, your task is to identify all possible triggers "
    "and their corresponding event types in the given text. A trigger is the key "
    "word or phrase in the text that most explicitly conveys the occurrence of an "
    "event. The process includes the following steps: (1) Analyze the text to "
    "understand its content and context. (2) Recognize potential event types that "
    "may be implied in the text. For each event type, generate a summarized name "
    "and provide a detailed description based on your cross-domain knowledge. (3) "
    "Extract triggers by identifying their spans in the text and linking them to "
    "their respective event types. Note that the text may contain zero, one, or "
    "multiple event triggers.";

constexpr const char* kInferFormat =
    "Please provide your response in the following Python dictionary format: "
    "{\"Text Analysis\": \"<str: your analysis of the text>\", \"Event Type "
    "Generation\": {\"<event_type_name_1>\": \"<str: detailed_description>\", "
    "\"<event_type_name_2>\": \"<str: detailed_description>\", ...}, \"Extraction "
    "Results\": [{\"Trigger Span\": \"<str: a span in the text>\", \"Event "
    "Type\": \"<str: a specific event type from your generation>\"}, ...]}";

constexpr const char* kJudgeBackground =
    "You are an evaluation master designed to evaluate an open event detection "
    "model. In the open-domain event detection task, you aim to evaluate model "
    "performance at a semantic level. The evaluation target in open-domain event "
    "detection focuses on finding matching pairs of event triggers in the gold "
    "annotation set and the prediction set. A trigger refers to the key word or "
    "phrase that signals the occurrence of a specific event. Given an original "
    "text, a set of golden annotated triggers with event types, and a set of "
    "predicted triggers with event types, your goal is to match triggers with "
    "similar event types from both sets based on semantic equivalence. This "
    "evaluation does not require exact matches in trigger mention or event type "
    "definitions; rather, it focuses on identifying pairs of triggers that refer "
    "to the same event in the text and have semantically similar event type "
    "definitions.";

constexpr const char* kJudgeTask =
    "You are provided with an original text, a set of golden annotated triggers "
    "(with corresponding event types and definitions), a set of predicted "
    "triggers (also with event types and definitions), and a set of similar event "
    "type definitions used to assist in distinguishing event definitions. Your "
    "task is to: (1) Analyze the main event or events discussed in the original "
    "text. (2) Try to understand each golden trigger and each predicted trigger, "
    "along with their corresponding event type definitions. (3) Find several "
    "possible matching pairs of triggers that refer to the same event and have "
    "event type definitions that refer to the same event type. Then, analyze the "
    "event type definitions of two triggers' event types for each pair, and judge "
    "whether each pair can be regarded as a matching pair or not. (4) Provide the "
    "matching pairs of triggers' index as your final output.";

constexpr const char* kJudgeFormat =
    "Please provide your response in the following Python dictionary format: "
    "{\"text_analysis\": \"<str: your analysis>\", "
    "\"golden_triggers_understanding\": [\"<str: understanding for golden trigger "
    "0>\", ...], \"predicted_triggers_understanding\": [\"<str: understanding for "
    "predicted trigger 0>\", ...], \"possible_matching_pairs\": "
    "[{\"golden_trigger\": \"<str: golden trigger mention # its event type>\", "
    "\"predicted_trigger\": \"<str: predicted trigger mention # its event "
    "type>\", \"analysis_and_judgment\": \"<str: your analysis and judgment>\"}, "
    "...], \"final_output\": [{\"Gold_trigger_index\": <int>, "
    "\"Pred_trigger_index\": <int>}, ...]}";

// --- rendering helpers ----------------------------------------------------

std::string assemble(const char* background, const char* task, const char* format,
                     const std::string& data) {
    std::ostringstream out;
    out << "Background: " << background << "\n\n"
        << "Task Description: " << task << "\n\n"
        << "Output Format: " << format << "\n\n"
        << "Data:\n"
        << data;
    return out.str();
}

std::string roles_list(std::span<const std::string> roles) {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < roles.size(); ++i) {
        if (i) out << ", ";
        out << "'" << roles[i] << "'";
    }
    out << "]";
    return out.str();
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Wraps the first case-insensitive occurrence of the mention in [t] markers.
std::string mark_trigger(const std::string& text, const std::string& mention) {
    if (mention.empty()) return text;
    auto pos = ascii_lower(text).find(ascii_lower(mention));
    if (pos == std::string::npos) return text;
    return text.substr(0, pos) + "[t] " + text.substr(pos, mention.size()) + " [/t]" +
           text.substr(pos + mention.size());
}

void append_definitions(std::ostringstream& out, std::span<const NamedDefinition> defs) {
    for (const auto& d : defs) {
        out << "    " << d.name << ": " << d.definition << "\n";
    }
}

// --- parsing helpers ------------------------------------------------------

std::string_view strip_fences(std::string_view reply) {
    auto open = reply.find("```");
    if (open == std::string_view::npos) return reply;
    auto body_start = reply.find('\n', open);
    if (body_start == std::string_view::npos) return reply;
    auto close = reply.find("```", body_start);
    if (close == std::string_view::npos) return reply;
    return reply.substr(body_start + 1, close - body_start - 1);
}

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ParseError("reply is missing key \"" + std::string(key) + "\"");
    }
    return *it;
}

std::string require_string(const json& j, const char* key) {
    const json& value = require(j, key);
    if (!value.is_string()) {
        throw ParseError("reply key \"" + std::string(key) + "\" is not a string");
    }
    return value.get<std::string>();
}

}  // namespace

json extract_json_object(std::string_view reply) {
    std::string_view body = strip_fences(reply);
    auto start = body.find('{');
    if (start == std::string_view::npos) {
        throw ParseError("reply contains no JSON object");
    }
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < body.size(); ++i) {
        char c = body[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) {
                return parse_json(body.substr(start, i - start + 1), "model reply");
            }
        }
    }
    throw ParseError("reply JSON object is unterminated");
}

std::string render_definition_prompt(const std::string& display_name,
                                     std::span<const std::string> roles,
                                     std::span<const DefinitionExample> examples) {
    std::ostringstream data;
    data << "Event Type Name: " << display_name << "\n"
         << "Ontology: The argument roles of this event type are "
         << roles_list(roles) << ".\n";
    for (std::size_t i = 0; i < examples.size(); ++i) {
        data << "Example " << i << ":\n"
             << "    Text: " << mark_trigger(examples[i].text, examples[i].mention) << "\n"
             << "    Trigger: " << examples[i].mention
             << " # event type: " << display_name << "\n";
    }
    return assemble(kDefineBackground, kDefineTask, kDefineFormat, data.str());
}

namespace {
void append_gold_block(std::ostringstream& data, const std::string& text,
                       std::span<const TriggerView> gold,
                       std::span<const NamedDefinition> gold_definitions) {
    data << "Text: " << text << "\n";
    for (std::size_t i = 0; i < gold.size(); ++i) {
        data << "Gold trigger " << i << ": " << gold[i].mention
             << " # event type: " << gold[i].type_name << "\n";
    }
    data << "Detailed definitions of gold event types:\n";
    append_definitions(data, gold_definitions);
}
}  // namespace

std::string render_possible_types_prompt(const std::string& text,
                                         std::span<const TriggerView> gold,
                                         std::span<const NamedDefinition> gold_definitions) {
    std::ostringstream data;
    append_gold_block(data, text, gold, gold_definitions);
    return assemble(kProposeBackground, kProposeTask, kProposeFormat, data.str());
}

std::string render_supplement_prompt(const std::string& text,
                                     std::span<const TriggerView> gold,
                                     std::span<const NamedDefinition> gold_definitions,
                                     std::span<const NamedDefinition> latent_definitions) {
    std::ostringstream data;
    append_gold_block(data, text, gold, gold_definitions);
    data << "Possible event types with their detailed definitions:\n";
    append_definitions(data, latent_definitions);
    return assemble(kSupplementBackground, kSupplementTask, kSupplementFormat, data.str());
}

std::string render_merge_prompt(const std::string& text,
                                std::span<const MergeGroupView> groups,
                                std::span<const NamedDefinition> definitions) {
    std::ostringstream data;
    data << "Text: " << text << "\n";
    for (std::size_t g = 0; g < groups.size(); ++g) {
        data << "Group " << g << ":\n";
        for (std::size_t j = 0; j < groups[g].members.size(); ++j) {
            data << "    Trigger " << j << ": " << groups[g].members[j].mention
                 << " # event_type: " << groups[g].members[j].type_name << "\n";
        }
    }
    data << "Fine-grained Event Type Definitions:\n";
    append_definitions(data, definitions);
    return assemble(kMergeBackground, kMergeTask, kMergeFormat, data.str());
}

std::string render_inference_prompt(const std::string& text) {
    return assemble(kInferBackground, kInferTask, kInferFormat, "Text: " + text + "\n");
}

std::string render_judge_prompt(const std::string& text,
                                std::span<const TriggerView> gold,
                                std::span<const TriggerView> predicted,
                                std::span<const NamedDefinition> definitions,
                                std::span<const NamedDefinition> similar_definitions) {
    std::ostringstream data;
    data << "Text: " << text << "\n";
    for (std::size_t i = 0; i < gold.size(); ++i) {
        data << "Gold_trigger_" << i << ": " << gold[i].mention
             << " # event_type: " << gold[i].type_name << "\n";
    }
    for (std::size_t j = 0; j < predicted.size(); ++j) {
        data << "Pred_trigger_" << j << ": " << predicted[j].mention
             << " # event_type: " << predicted[j].type_name << "\n";
    }
    data << "Detailed definition of the above event types:\n";
    append_definitions(data, definitions);
    data << "Similar event of the above event types:\n";
    append_definitions(data, similar_definitions);
    return assemble(kJudgeBackground, kJudgeTask, kJudgeFormat, data.str());
}

DefinitionReply parse_definition_reply(std::string_view reply) {
    json j = extract_json_object(reply);
    DefinitionReply out;
    out.event_type = require_string(j, "event_type");
    out.detailed_definition = require_string(j, "detailed_definition");
    if (out.detailed_definition.empty()) {
        throw ParseError("detailed_definition is empty");
    }
    return out;
}

std::vector<NamedDefinition> parse_possible_types_reply(std::string_view reply) {
    json j = extract_json_object(reply);
    const json& list = require(j, "possible_event_types");
    if (!list.is_array()) throw ParseError("possible_event_types is not an array");
    std::vector<NamedDefinition> out;
    for (const auto& item : list) {
        NamedDefinition d;
        d.name = require_string(item, "event_type");
        d.definition = require_string(item, "detailed_definition");
        if (d.name.empty() || d.definition.empty()) {
            throw ParseError("possible event type with empty name or definition");
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> parse_supplement_reply(std::string_view reply) {
    json j = extract_json_object(reply);
    const json& list = require(j, "supplemented_annotations");
    if (!list.is_array()) throw ParseError("supplemented_annotations is not an array");
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& item : list) {
        out.emplace_back(require_string(item, "event_type"),
                         require_string(item, "trigger_word"));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> parse_merge_reply(std::string_view reply) {
    json j = extract_json_object(reply);
    const json& list = require(j, "Merged Triggers");
    if (!list.is_array()) throw ParseError("Merged Triggers is not an array");
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& item : list) {
        out.emplace_back(require_string(item, "Trigger Span"),
                         require_string(item, "Event Type"));
    }
    return out;
}

InferenceReply parse_inference_reply(std::string_view reply) {
    json j = extract_json_object(reply);
    InferenceReply out;
    const json& generation = require(j, "Event Type Generation");
    if (!generation.is_object()) throw ParseError("Event Type Generation is not an object");
    for (const auto& [name, desc] : generation.items()) {
        out.definitions[name] = desc.is_string() ? desc.get<std::string>() : canonical_dump(desc);
    }
    const json& extractions = require(j, "Extraction Results");
    if (!extractions.is_array()) throw ParseError("Extraction Results is not an array");
    for (const auto& item : extractions) {
        out.extractions.emplace_back(require_string(item, "Trigger Span"),
                                     require_string(item, "Event Type"));
    }
    return out;
}

std::vector<std::pair<int, int>> parse_judge_reply(std::string_view reply) {
    json j = extract_json_object(reply);
    const json& list = require(j, "final_output");
    if (!list.is_array()) throw ParseError("final_output is not an array");
    std::vector<std::pair<int, int>> out;
    for (const auto& item : list) {
        const json& gold = require(item, "Gold_trigger_index");
        const json& pred = require(item, "Pred_trigger_index");
        if (!gold.is_number_integer() || !pred.is_number_integer()) {
            throw ParseError("final_output indices must be integers");
        }
        out.emplace_back(pred.get<int>(), gold.get<int>());
    }
    return out;
}

}  // namespace seoe::prompts
