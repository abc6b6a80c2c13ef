#include "lcds/logic/rulebook.hpp"

#include "lcds/core/error.hpp"
#include "lcds/core/io.hpp"
#include "lcds/core/text.hpp"

#include <set>
#include <tuple>

namespace lcds::logic {

// =============================================================================
// logic_type
// =============================================================================

std::string_view to_string(logic_type type) noexcept {
    switch (type) {
        case logic_type::extraction: return "extraction";
        case logic_type::summarization: return "summarization";
        case logic_type::judgment: return "judgment";
        case logic_type::inference: return "inference";
        case logic_type::knowledge: return "knowledge";
    }
    return "extraction";
}

std::string_view display_name(logic_type type) noexcept {
    switch (type) {
        case logic_type::extraction: return "Extraction";
        case logic_type::summarization: return "Summarization";
        case logic_type::judgment: return "Judgment";
        case logic_type::inference: return "Inference";
        case logic_type::knowledge: return "Knowledge";
    }
    return "Extraction";
}

std::optional<logic_type> try_parse_logic_type(std::string_view name) noexcept {
    const auto lowered = text::to_lower_ascii(text::trim(name));
    if (lowered == "reasoning") return logic_type::inference;
    for (auto t : all_logic_types) {
        if (to_string(t) == lowered) return t;
    }
    return std::nullopt;
}

logic_type parse_logic_type(std::string_view name) {
    if (auto t = try_parse_logic_type(name)) return *t;
    throw error(error_code::invalid_argument, "unknown logic type '" + std::string(name) + "'");
}

// =============================================================================
// Rulebook
// =============================================================================

std::vector<generation_rule> rulebook::for_field(source_map::ds_field field) const {
    std::vector<generation_rule> out;
    for (const auto& r : rules) {
        if (r.field == field) out.push_back(r);
    }
    return out;
}

rulebook rulebook_from_json(const nlohmann::json& j) {
    rulebook book;
    try {
        book.department = j.at("department").get<std::string>();
        std::set<std::pair<source_map::ds_field, std::string>> seen;
        for (const auto& rj : j.at("rules")) {
            generation_rule r;
            r.rule_id = rj.at("rule_id").get<std::string>();
            r.field = source_map::parse_ds_field(rj.at("ds_field").get<std::string>());
            r.department = book.department;
            r.declared_type = parse_logic_type(rj.at("logic_type").get<std::string>());
            r.text = rj.at("text").get<std::string>();
            r.editable = rj.value("editable", true);
            if (r.rule_id.empty() || text::trim(r.text).empty()) {
                throw error(error_code::parse_failure, "rule needs an id and non-empty text");
            }
            if (!seen.emplace(r.field, r.rule_id).second) {
                throw error(error_code::parse_failure, "duplicate rule id " + r.rule_id);
            }
            book.rules.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::parse_failure, std::string("malformed rulebook: ") + e.what());
    } catch (const error& e) {
        if (e.code() == error_code::parse_failure) throw;
        throw error(error_code::parse_failure, std::string("malformed rulebook: ") + e.what());
    }
    return book;
}

nlohmann::ordered_json to_json(const rulebook& book) {
    nlohmann::ordered_json j;
    j["department"] = book.department;
    auto rules = nlohmann::ordered_json::array();
    for (const auto& r : book.rules) {
        nlohmann::ordered_json rj;
        rj["rule_id"] = r.rule_id;
        rj["ds_field"] = source_map::to_string(r.field);
        rj["logic_type"] = to_string(r.declared_type);
        rj["text"] = r.text;
        rj["editable"] = r.editable;
        rules.push_back(std::move(rj));
    }
    j["rules"] = std::move(rules);
    return j;
}

namespace {

nlohmann::json parse_json_file(const std::filesystem::path& path) {
    auto j = nlohmann::json::parse(io::read_file(path), nullptr, false);
    if (j.is_discarded()) throw error(error_code::parse_failure, path.string() + " is not valid JSON");
    return j;
}

}  // namespace

rulebook load_rulebook(const std::filesystem::path& path) { return rulebook_from_json(parse_json_file(path)); }

// =============================================================================
// Knowledge base
// =============================================================================

knowledge_base knowledge_from_json(const nlohmann::json& j) {
    knowledge_base kb;
    try {
        kb.department = j.at("department").get<std::string>();
        for (const auto& ej : j.at("entries")) {
            knowledge_entry e;
            e.department = kb.department;
            const auto& pattern = ej.at("pattern");
            e.field_name = pattern.at("field_name").get<std::string>();
            e.contains = pattern.at("contains").get<std::string>();
            e.recommendation = ej.at("recommendation").get<std::string>();
            if (e.field_name.empty() || text::trim(e.contains).empty()) {
                throw error(error_code::parse_failure, "knowledge pattern must be non-empty");
            }
            kb.entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::parse_failure, std::string("malformed knowledge base: ") + e.what());
    }
    return kb;
}

nlohmann::ordered_json to_json(const knowledge_base& kb) {
    nlohmann::ordered_json j;
    j["department"] = kb.department;
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : kb.entries) {
        nlohmann::ordered_json ej;
        ej["pattern"]["field_name"] = e.field_name;
        ej["pattern"]["contains"] = e.contains;
        ej["recommendation"] = e.recommendation;
        entries.push_back(std::move(ej));
    }
    j["entries"] = std::move(entries);
    return j;
}

knowledge_base load_knowledge_base(const std::filesystem::path& path) {
    return knowledge_from_json(parse_json_file(path));
}

department_config load_department(const std::filesystem::path& dir) {
    department_config config;
    config.rules = load_rulebook(dir / "rules.json");
    const auto kb_path = dir / "knowledge.json";
    if (std::filesystem::exists(kb_path)) {
        config.knowledge = load_knowledge_base(kb_path);
    } else {
        config.knowledge.department = config.rules.department;
    }
    return config;
}

}  // namespace lcds::logic
