#include "lcds/logic/engine.hpp"

#include "lcds/core/error.hpp"
#include "lcds/core/text.hpp"
#include "lcds/gateway/prompt_format.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace lcds::logic {

namespace prompt = gateway::prompt;

bool logic_plan::has(logic_type type) const {
    return std::any_of(structures.begin(), structures.end(), [&](const plan_structure& s) { return s.type == type; });
}

// =============================================================================
// Stage 1: task parsing
// =============================================================================

namespace {

struct cue_set {
    logic_type type;
    std::vector<std::string_view> cues;
};

const std::array<cue_set, 5>& cue_table() {
    static const std::array<cue_set, 5> table{{
        {logic_type::extraction, {"extract", "verbatim", "copy", "提取", "摘录", "抽取", "照录"}},
        {logic_type::summarization,
         {"summariz", "summaris", "summary", "overview", "总结", "概括", "汇总", "归纳", "简述"}},
        {logic_type::judgment, {"judge", "judgment", "flag", "abnormal", "assess", "判断", "异常", "评估"}},
        {logic_type::inference, {"infer", "deduce", "reason", "推断", "推理", "推算"}},
        {logic_type::knowledge, {"knowledge", "guideline", "recommend", "知识库", "建议", "随访"}},
    }};
    return table;
}

std::vector<logic_type> clamp_types(std::vector<logic_type> types, std::vector<std::string>& warnings,
                                    const std::string& what) {
    if (types.size() > max_structures) {
        warnings.push_back(what + " produced " + std::to_string(types.size()) + " logic types; kept the first " +
                           std::to_string(max_structures));
        types.resize(max_structures);
    }
    return types;
}

std::vector<logic_type> parse_type_list(std::string_view reply) {
    std::vector<logic_type> out;
    std::string word;
    auto flush = [&] {
        if (auto t = try_parse_logic_type(word); t && std::find(out.begin(), out.end(), *t) == out.end()) {
            out.push_back(*t);
        }
        word.clear();
    };
    for (const char c : reply) {
        if (std::isalpha(static_cast<unsigned char>(c)) != 0) {
            word += c;
        } else {
            flush();
        }
    }
    flush();
    return out;
}

}  // namespace

std::vector<logic_type> classify_logic_types(std::string_view rule_text) {
    const auto lowered = text::to_lower_ascii(rule_text);
    std::vector<std::pair<std::size_t, logic_type>> hits;
    for (const auto& [type, cues] : cue_table()) {
        auto first = std::string::npos;
        for (const auto cue : cues) first = std::min(first, lowered.find(cue));
        if (first != std::string::npos) hits.emplace_back(first, type);
    }
    std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<logic_type> out;
    for (const auto& [pos, type] : hits) out.push_back(type);
    return out;
}

task_parse parse_task(const generation_rule& rule, const gateway::completion_gateway* gateway) {
    task_parse out;
    if (gateway != nullptr && gateway->semantic_capable()) {
        gateway::completion_request request;
        request.prompt = prompt::heading(prompt::role) +
                         "Classify a discharge-summary generation rule by the logic it requires.\n\n" +
                         prompt::heading("Logic Types") + "extraction, summarization, judgment, inference, knowledge\n\n" +
                         prompt::heading("Rule") + rule.text + "\n\n" + prompt::heading(prompt::output_format) +
                         "Reply with the matching type names only, separated by commas, most important first.\n";
        request.max_tokens = 64;
        request.request_id = "parse-" + rule.rule_id;
        out.types = parse_type_list(gateway->complete(std::move(request)).text);
        if (out.types.empty()) out.warnings.push_back("rule " + rule.rule_id + ": provider gave no logic type");
    }
    if (out.types.empty()) out.types = classify_logic_types(rule.text);
    if (out.types.empty()) throw error(error_code::unparseable_rule, "UnparseableRule: " + rule.rule_id);
    out.types = clamp_types(std::move(out.types), out.warnings, "rule " + rule.rule_id);
    return out;
}

// =============================================================================
// Stage 2: rule matching
// =============================================================================

std::vector<generation_rule> apply_edits(const rulebook& book, source_map::ds_field field, const rule_edits& edits) {
    auto rules = book.for_field(field);
    for (const auto& [rule_id, replacement] : edits.replace) {
        auto it = std::find_if(rules.begin(), rules.end(), [&](const generation_rule& r) { return r.rule_id == rule_id; });
        if (it == rules.end()) throw error(error_code::invalid_argument, "no rule " + rule_id + " for this field");
        if (!it->editable) throw error(error_code::invalid_argument, "rule " + rule_id + " is not editable");
        if (text::trim(replacement).empty()) throw error(error_code::invalid_argument, "replacement text is blank");
        it->text = replacement;
    }
    std::size_t n = 0;
    for (const auto& [type, added] : edits.append) {
        if (text::trim(added).empty()) throw error(error_code::invalid_argument, "appended rule text is blank");
        generation_rule r;
        r.rule_id = std::string(source_map::to_string(field)) + "-edit-" + std::to_string(n++);
        r.field = field;
        r.department = book.department;
        r.declared_type = type;
        r.text = added;
        r.editable = true;
        r.appended = true;
        rules.push_back(std::move(r));
    }
    return rules;
}

logic_plan match_rules(const std::vector<logic_type>& structures, const std::vector<generation_rule>& field_rules,
                       source_map::ds_field field, const std::string& department,
                       const gateway::completion_gateway* gateway) {
    if (structures.empty() || structures.size() > max_structures) {
        throw error(error_code::invalid_argument, "a plan needs between 1 and 4 structures");
    }
    logic_plan plan;
    plan.plan_id = "plan-" + department + "-" + std::string(source_map::to_string(field));
    plan.department = department;
    plan.field = field;

    std::vector<std::vector<logic_type>> parsed;
    parsed.reserve(field_rules.size());
    for (const auto& rule : field_rules) {
        if (rule.appended) {
            parsed.push_back({rule.declared_type});
            continue;
        }
        auto p = parse_task(rule, gateway);
        std::move(p.warnings.begin(), p.warnings.end(), std::back_inserter(plan.warnings));
        parsed.push_back(std::move(p.types));
    }

    for (const auto type : structures) {
        plan_structure s{type, {}};
        for (std::size_t i = 0; i < field_rules.size(); ++i) {
            const auto& rule = field_rules[i];
            const bool declared = rule.declared_type == type;
            const bool inferred = !rule.appended && std::find(parsed[i].begin(), parsed[i].end(), type) != parsed[i].end();
            if (declared || inferred) s.rules.push_back(rule);
        }
        if (s.rules.empty()) {
            throw error(error_code::no_rule_for_type, "NoRuleForType: " + std::string(to_string(type)) + " for " +
                                                          std::string(source_map::to_string(field)));
        }
        plan.structures.push_back(std::move(s));
    }
    return plan;
}

logic_plan plan_field(const rulebook& book, source_map::ds_field field, const gateway::completion_gateway* gateway,
                      const rule_edits& edits) {
    const auto rules = apply_edits(book, field, edits);
    if (rules.empty()) {
        throw error(error_code::no_rule_for_type,
                    "NoRuleForType: no rules for " + std::string(source_map::to_string(field)));
    }
    std::vector<std::string> warnings;
    std::vector<logic_type> structures;
    for (const auto& rule : rules) {
        std::vector<logic_type> types{rule.declared_type};
        if (!rule.appended) {
            auto p = parse_task(rule, gateway);
            types = std::move(p.types);
        }
        for (const auto t : types) {
            if (std::find(structures.begin(), structures.end(), t) == structures.end()) structures.push_back(t);
        }
    }
    structures = clamp_types(std::move(structures), warnings, std::string(source_map::to_string(field)) + " rules");
    auto plan = match_rules(structures, rules, field, book.department, gateway);
    plan.warnings.insert(plan.warnings.begin(), warnings.begin(), warnings.end());
    return plan;
}

// =============================================================================
// Stage 3: orchestration
// =============================================================================

namespace {

std::string_view instruction(logic_type type) {
    switch (type) {
        case logic_type::extraction:
            return "Copy the requested facts exactly as they are written in the source content. Do not paraphrase "
                   "names, numbers, dates or identifiers.";
        case logic_type::summarization:
            return "Condense the relevant source content into a short, faithful overview without repetition.";
        case logic_type::judgment:
            return "Compare the source content with clinical reference standards and state the resulting "
                   "conclusions, for example which results are abnormal.";
        case logic_type::inference:
            return "Combine the listed facts to state what follows from them, such as disease course or treatment "
                   "outcome. State nothing the sources do not support.";
        case logic_type::knowledge:
            return "Write follow-up and medication advice from the knowledge-base entries that apply to this "
                   "patient.";
    }
    return "";
}

}  // namespace

std::string orchestrate(const logic_plan& plan, const std::vector<source_map::resolved_source>& sources,
                        const std::vector<std::string>& knowledge_hits) {
    const bool any_sentence = std::any_of(sources.begin(), sources.end(), [](const source_map::resolved_source& s) {
        return !s.field.sentences.empty();
    });
    if (!any_sentence && !plan.has(logic_type::knowledge)) {
        throw error(error_code::empty_sources, "EmptySources: " + plan.plan_id);
    }

    const auto field_name = std::string(source_map::display_name(plan.field));
    std::string out;
    out += prompt::heading(prompt::role);
    out += "You are a clinical documentation assistant in the " + plan.department +
           " department. You write the \"" + field_name + "\" section of a discharge summary.\n\n";

    for (std::size_t i = 0; i < plan.structures.size(); ++i) {
        const auto& s = plan.structures[i];
        out += prompt::heading("Logic " + std::to_string(i + 1) + ": " + std::string(display_name(s.type)));
        out += instruction(s.type);
        out += "\nRules:\n";
        for (const auto& rule : s.rules) out += "- " + rule.text + "\n";
        out += "\n";
    }

    out += prompt::heading(prompt::source_content);
    if (!any_sentence) out += "(none)\n";
    for (const auto& src : sources) {
        if (src.field.sentences.empty()) continue;
        out += "Field " + src.doc_id + " / " + src.field.field_name + " (" +
               std::string(ingest::to_string(src.source.type)) + ")\n";
        for (const auto& s : src.field.sentences) out += prompt::sentence_line(s.sid, s.text);
    }
    out += "\n";

    out += prompt::heading(prompt::knowledge_base);
    if (knowledge_hits.empty()) out += "(none)\n";
    for (const auto& hit : knowledge_hits) out += "- " + hit + "\n";
    out += "\n";

    out += prompt::heading(prompt::output_format);
    out += "Return only the final text of the \"" + field_name +
           "\" section as plain sentences. Do not include reasoning, headings, lists or sentence identifiers.\n";
    return out;
}

std::vector<std::string> apply_knowledge(const ingest::unified_record& record, const knowledge_base& kb) {
    std::vector<std::string> out;
    for (const auto& entry : kb.entries) {
        bool matched = false;
        for (const auto& doc : record.documents) {
            for (const auto& field : doc.fields) {
                if (entry.field_name != "*" && field.field_name != entry.field_name) continue;
                if (text::contains_ignoring_whitespace(field.content, entry.contains)) {
                    matched = true;
                    break;
                }
            }
            if (matched) break;
        }
        if (matched) out.push_back(entry.recommendation);
    }
    return out;
}

}  // namespace lcds::logic
