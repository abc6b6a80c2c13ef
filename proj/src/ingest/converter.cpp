#include "lcds/ingest/converter.hpp"

#include "lcds/core/error.hpp"
#include "lcds/core/text.hpp"
#include "lcds/ingest/markup.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace lcds::ingest {

// =============================================================================
// type_map
// =============================================================================

type_map type_map::defaults() {
    type_map m;
    m.sections[doc_type::medical_records] = {
        {"主诉", "chief_complaint"},          {"Chief Complaint", "chief_complaint"},
        {"现病史", "present_illness"},        {"History of Present Illness", "present_illness"},
        {"既往史", "past_history"},           {"Past History", "past_history"},
        {"个人史", "personal_history"},       {"婚育史", "marital_history"},
        {"月经史", "menstrual_history"},      {"家族史", "family_history"},
        {"体格检查", "physical_exam"},        {"Physical Examination", "physical_exam"},
        {"专科检查", "specialty_exam"},       {"辅助检查", "auxiliary_exam"},
        {"入院诊断", "admission_diagnosis"},  {"初步诊断", "admission_diagnosis"},
        {"Admission Diagnosis", "admission_diagnosis"},
        {"诊疗计划", "treatment_plan"},       {"手术名称", "surgery_name"},
        {"麻醉方式", "anesthesia"},           {"手术经过", "surgery_procedure"},
        {"Operative Procedure", "surgery_procedure"},
        {"术后诊断", "postoperative_diagnosis"}, {"病程记录", "progress_note"},
        {"查房记录", "ward_round"},           {"化疗记录", "chemotherapy_record"},
        {"出院情况", "discharge_condition"},  {"出院医嘱", "discharge_orders"},
        {"患者信息", "patient_info"},         {"基本信息", "patient_info"},
    };
    m.sections[doc_type::nursing_records] = {
        {"出院小结", "discharge_note"}, {"discharge_note", "discharge_note"},
        {"护理记录", "nursing_note"},   {"nursing_note", "nursing_note"},
        {"健康宣教", "health_education"}, {"health_education", "health_education"},
        {"病情观察", "ward_note"},      {"ward_note", "ward_note"},
    };
    m.sections[doc_type::examination] = {
        {"检查项目", "exam_item"}, {"exam_item", "exam_item"},
        {"检查所见", "findings"},  {"findings", "findings"},
        {"检查结论", "conclusion"}, {"conclusion", "conclusion"},
    };
    m.sections[doc_type::laboratory_test] = {
        {"检验项目", "test_item"}, {"test_item", "test_item"},
        {"结果", "result"},        {"result", "result"},
        {"检验结果", "results"},   {"rows", "results"},
    };
    m.sections[doc_type::medical_orders] = {
        {"医嘱内容", "order_content"}, {"order_content", "order_content"},
        {"出院带药", "discharge_medication"}, {"discharge_medication", "discharge_medication"},
        {"rows", "orders"},
    };
    m.sections[doc_type::pathology_report] = {
        {"标本", "specimen"},         {"specimen", "specimen"},
        {"大体所见", "gross_description"}, {"病理诊断", "pathological_diagnosis"},
        {"pathological_diagnosis", "pathological_diagnosis"},
        {"免疫组化", "immunohistochemistry"},
    };
    m.sections[doc_type::diagnosis] = {
        {"诊断名称", "diagnosis_name"}, {"diagnosis_name", "diagnosis_name"},
        {"诊断类型", "diagnosis_category"}, {"rows", "diagnoses"},
    };
    m.sections[doc_type::vital_signs] = {
        {"体温", "temperature"}, {"temperature", "temperature"},
        {"脉搏", "pulse"},       {"pulse", "pulse"},
        {"呼吸", "respiration"}, {"血压", "blood_pressure"},
        {"rows", "measurements"},
    };
    m.signatures = {
        {doc_type::examination, {"exam_item", "findings"}},
        {doc_type::laboratory_test, {"test_item", "result"}},
        {doc_type::medical_orders, {"order_content"}},
        {doc_type::pathology_report, {"pathological_diagnosis"}},
        {doc_type::diagnosis, {"diagnosis_name"}},
        {doc_type::vital_signs, {"temperature", "pulse"}},
    };
    return m;
}

type_map type_map::from_json(const nlohmann::json& j) {
    type_map m;
    try {
        for (const auto& [type_name, table] : j.at("sections").items()) {
            auto& dest = m.sections[parse_doc_type(type_name)];
            for (const auto& [label, field] : table.items()) dest[label] = field.get<std::string>();
        }
        for (const auto& sig : j.at("signatures")) {
            m.signatures.emplace_back(parse_doc_type(sig.at("doc_type").get<std::string>()),
                                      sig.at("keys").get<std::vector<std::string>>());
        }
        if (j.contains("default_section")) m.default_section = j["default_section"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::parse_failure, std::string("malformed type map: ") + e.what());
    }
    return m;
}

nlohmann::ordered_json type_map::to_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json sections_json = nlohmann::ordered_json::object();
    for (const auto& [type, table] : sections) {
        nlohmann::ordered_json t = nlohmann::ordered_json::object();
        for (const auto& [label, field] : table) t[label] = field;
        sections_json[std::string(to_string(type))] = std::move(t);
    }
    j["sections"] = std::move(sections_json);
    auto sigs = nlohmann::ordered_json::array();
    for (const auto& [type, keys] : signatures) {
        sigs.push_back({{"doc_type", std::string(to_string(type))}, {"keys", keys}});
    }
    j["signatures"] = std::move(sigs);
    j["default_section"] = default_section;
    return j;
}

namespace {

std::string clean_label(std::string_view label) {
    auto s = text::collapse_whitespace(label);
    for (std::string_view colon : {"：", ":"}) {
        if (s.size() >= colon.size() && s.ends_with(colon)) s.resize(s.size() - colon.size());
    }
    s = text::trim(s);
    std::replace(s.begin(), s.end(), '#', '_');
    return s;
}

const std::string* lookup_label(const type_map& m, doc_type type, std::string_view label) {
    const auto it = m.sections.find(type);
    if (it == m.sections.end()) return nullptr;
    const auto cleaned = clean_label(label);
    if (const auto hit = it->second.find(cleaned); hit != it->second.end()) return &hit->second;
    const auto lowered = text::to_lower_ascii(cleaned);
    for (const auto& [key, field] : it->second) {
        if (text::to_lower_ascii(key) == lowered) return &field;
    }
    return nullptr;
}

}  // namespace

std::string type_map::canonical_field(doc_type type, std::string_view label) const {
    if (const auto* hit = lookup_label(*this, type, label)) return *hit;
    return clean_label(label);
}

bool type_map::is_known_label(doc_type type, std::string_view label) const {
    return lookup_label(*this, type, label) != nullptr;
}

// =============================================================================
// Detection
// =============================================================================

namespace {

constexpr std::array<std::string_view, 9> meta_keys{
    "doc_id", "doc_type", "title", "timestamp", "patient_id", "admission_id", "encoding", "department", "id"};

bool is_meta_key(std::string_view key) {
    return std::find(meta_keys.begin(), meta_keys.end(), key) != meta_keys.end();
}

void check_text_payload(const raw_document& raw) {
    const auto enc = text::to_lower_ascii(raw.encoding);
    if (!enc.empty() && enc != "utf-8" && enc != "utf8") {
        throw error(error_code::unrecognized_format,
                    raw.doc_id + ": unsupported encoding '" + raw.encoding + "'");
    }
    if (text::trim(raw.payload).empty()) {
        throw error(error_code::unrecognized_format, raw.doc_id + ": empty payload");
    }
    for (const auto& u : text::decode(raw.payload)) {
        if (u.cp == U'\uFFFD' && u.length == 1) {
            throw error(error_code::unrecognized_format, raw.doc_id + ": payload is not valid UTF-8");
        }
    }
}

std::string_view payload_body(const std::string& payload) {
    std::string_view body(payload);
    if (body.starts_with("\xEF\xBB\xBF")) body.remove_prefix(3);
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) body.remove_prefix(1);
    return body;
}

/// Keys of the object, plus the keys of the first row of any row array.
std::set<std::string> keyed_signature(const nlohmann::ordered_json& j) {
    std::set<std::string> keys;
    auto add_row = [&](const nlohmann::ordered_json& row) {
        if (!row.is_object()) return;
        for (const auto& [k, v] : row.items()) keys.insert(k);
    };
    if (j.is_array()) {
        if (!j.empty()) add_row(j.front());
        return keys;
    }
    for (const auto& [k, v] : j.items()) {
        keys.insert(k);
        if (v.is_array() && !v.empty()) add_row(v.front());
    }
    return keys;
}

std::optional<doc_type> match_signature(const type_map& map, const nlohmann::ordered_json& j) {
    const auto keys = keyed_signature(j);
    for (const auto& [type, required] : map.signatures) {
        const bool all = std::all_of(required.begin(), required.end(), [&](const std::string& want) {
            return std::any_of(keys.begin(), keys.end(), [&](const std::string& have) {
                return have == want || map.canonical_field(type, have) == want;
            });
        });
        if (all && !required.empty()) return type;
    }
    return std::nullopt;
}

constexpr std::array<std::string_view, 14> html_roots{
    "html", "body", "div", "p", "h1", "h2", "h3", "h4", "table", "section", "article", "span", "ul", "head"};

}  // namespace

doc_type detect_doc_type(const raw_document& raw, const type_map& map) {
    if (raw.declared_type) return *raw.declared_type;
    check_text_payload(raw);
    const auto body = payload_body(raw.payload);

    if (body.front() == '{' || body.front() == '[') {
        nlohmann::ordered_json j = nlohmann::ordered_json::parse(body, nullptr, false);
        if (j.is_discarded()) {
            throw error(error_code::unrecognized_format, raw.doc_id + ": payload looks keyed but is not valid JSON");
        }
        if (j.is_object() && j.contains("doc_type") && j["doc_type"].is_string()) {
            if (auto t = try_parse_doc_type(j["doc_type"].get<std::string>())) return *t;
        }
        if (auto t = match_signature(map, j)) return *t;
        throw error(error_code::unrecognized_format, raw.doc_id + ": no key signature matches");
    }

    if (body.front() == '<') {
        const auto lowered = text::to_lower_ascii(body.substr(0, std::min<std::size_t>(body.size(), 4096)));
        if (lowered.find("<!doctype html") != std::string::npos || lowered.find("<html") != std::string::npos) {
            return doc_type::medical_records;
        }
        try {
            const auto tree = markup::parse(body, markup::mode::html);
            for (const auto& child : tree.children) {
                if (child.is_text()) continue;
                if (std::find(html_roots.begin(), html_roots.end(), child.name) != html_roots.end()) {
                    return doc_type::medical_records;
                }
                return doc_type::nursing_records;
            }
        } catch (const error&) {
            // fall through to the format error below
        }
    }
    throw error(error_code::unrecognized_format, raw.doc_id + ": no format signature matches");
}

// =============================================================================
// Conversion
// =============================================================================

namespace {

/// Accumulates labelled sections, merging repeats of the same field.
class section_builder {
public:
    section_builder(const type_map& map, doc_type type) : map_(map), type_(type) {}

    void start(std::string_view label) { current_ = map_.canonical_field(type_, label); }

    void append(std::string_view text) {
        auto t = text::collapse_whitespace(text);
        if (t.empty()) return;
        const auto name = current_.empty() ? map_.default_section : current_;
        auto it = std::find_if(order_.begin(), order_.end(), [&](const auto& p) { return p.first == name; });
        if (it == order_.end()) {
            order_.emplace_back(name, std::move(t));
        } else {
            it->second += "\n" + t;
        }
    }

    std::vector<record_field> finish(const std::string& doc_id) const {
        std::vector<record_field> fields;
        for (const auto& [name, content] : order_) {
            if (name.empty()) continue;
            fields.push_back(make_field(doc_id, name, content));
        }
        return fields;
    }

private:
    const type_map& map_;
    doc_type type_;
    std::string current_;
    std::vector<std::pair<std::string, std::string>> order_;
};

struct html_block {
    std::string text;
    bool heading = false;
};

bool is_heading(std::string_view name) {
    return name.size() == 2 && name[0] == 'h' && name[1] >= '1' && name[1] <= '6';
}

void linearize(const markup::node& n, std::vector<html_block>& blocks, std::string& buffer) {
    auto flush = [&] {
        auto t = text::collapse_whitespace(buffer);
        if (!t.empty()) blocks.push_back({std::move(t), false});
        buffer.clear();
    };
    if (n.is_text()) {
        buffer += n.text;
        return;
    }
    if (n.name == "head" || n.name == "title" || n.name == "script" || n.name == "style") return;
    if (is_heading(n.name)) {
        flush();
        auto t = text::collapse_whitespace(n.inner_text());
        if (!t.empty()) blocks.push_back({std::move(t), true});
        return;
    }
    const bool block = markup::is_block_element(n.name);
    if (block) flush();
    for (const auto& c : n.children) linearize(c, blocks, buffer);
    if (block) flush();
}

/// Splits "label：rest" when label is a known section label.
std::optional<std::pair<std::string, std::string>> inline_header(const type_map& map, doc_type type,
                                                                 const std::string& block) {
    for (std::string_view colon : {"：", ":"}) {
        const auto at = block.find(colon);
        if (at == std::string::npos || at == 0) continue;
        const auto label = block.substr(0, at);
        if (map.is_known_label(type, label)) return std::pair{label, block.substr(at + colon.size())};
    }
    if (map.is_known_label(type, block)) return std::pair{block, std::string()};
    return std::nullopt;
}

unified_document convert_html(const raw_document& raw, doc_type type, const type_map& map) {
    const auto tree = markup::parse(payload_body(raw.payload), markup::mode::html);
    unified_document doc;
    doc.doc_id = raw.doc_id;
    doc.type = type;

    if (const auto* t = tree.find("title")) doc.title = text::collapse_whitespace(t->inner_text());
    if (const auto* head = tree.find("head")) {
        for (const auto& c : head->children) {
            if (c.name != "meta") continue;
            const auto* name = c.attribute("name");
            const auto* content = c.attribute("content");
            if (name && content && *name == "timestamp") doc.timestamp = *content;
        }
    }
    if (!doc.timestamp) {
        if (const auto* time = tree.find("time")) {
            if (const auto* dt = time->attribute("datetime")) doc.timestamp = *dt;
        }
    }

    std::vector<html_block> blocks;
    std::string buffer;
    linearize(tree, blocks, buffer);
    auto t = text::collapse_whitespace(buffer);
    if (!t.empty()) blocks.push_back({std::move(t), false});

    if (doc.title.empty()) {
        const auto it = std::find_if(blocks.begin(), blocks.end(), [](const auto& b) { return b.heading; });
        if (it != blocks.end() && !map.is_known_label(type, it->text)) {
            doc.title = it->text;
            blocks.erase(it);
        }
    } else if (!blocks.empty() && blocks.front().heading && blocks.front().text == doc.title) {
        blocks.erase(blocks.begin());
    }

    section_builder sections(map, type);
    for (const auto& b : blocks) {
        if (b.heading) {
            sections.start(b.text);
            continue;
        }
        if (auto header = inline_header(map, type, b.text)) {
            sections.start(header->first);
            sections.append(header->second);
            continue;
        }
        sections.append(b.text);
    }
    doc.fields = sections.finish(doc.doc_id);
    return doc;
}

unified_document convert_xml(const raw_document& raw, doc_type type, const type_map& map) {
    const auto tree = markup::parse(payload_body(raw.payload), markup::mode::xml);
    const markup::node* root = nullptr;
    for (const auto& c : tree.children) {
        if (c.is_text()) {
            if (!text::trim(c.text).empty()) throw error(error_code::parse_failure, "text outside the root element");
            continue;
        }
        if (root != nullptr) throw error(error_code::parse_failure, "more than one root element");
        root = &c;
    }
    if (root == nullptr) throw error(error_code::parse_failure, "no root element");

    unified_document doc;
    doc.doc_id = raw.doc_id;
    doc.type = type;
    if (const auto* t = root->attribute("title")) doc.title = *t;
    if (const auto* t = root->attribute("timestamp")) doc.timestamp = *t;

    section_builder sections(map, type);
    for (const auto& c : root->children) {
        if (c.is_text()) {
            sections.start("");
            sections.append(c.text);
            continue;
        }
        if (c.name == "title") {
            doc.title = text::collapse_whitespace(c.inner_text());
            continue;
        }
        if (c.name == "timestamp") {
            doc.timestamp = text::trim(c.inner_text());
            continue;
        }
        const std::string* label = c.attribute("name");
        if (label == nullptr) label = c.attribute("label");
        if (label == nullptr) label = c.attribute("title");
        sections.start(label != nullptr ? *label : c.name);
        sections.append(c.inner_text());
    }
    doc.fields = sections.finish(doc.doc_id);
    return doc;
}

std::string render_scalar(const nlohmann::ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return {};
    if (v.is_number() || v.is_boolean()) return v.dump();
    throw error(error_code::parse_failure, "expected a scalar value");
}

std::string terminate(std::string line) {
    line = text::trim(line);
    if (line.empty()) return line;
    static constexpr std::array<std::string_view, 6> ends{"。", "！", "？", ".", "!", "?"};
    for (auto e : ends) {
        if (line.ends_with(e)) return line;
    }
    return line + "。";
}

std::string render_row(const nlohmann::ordered_json& row) {
    std::string line;
    for (const auto& [k, v] : row.items()) {
        const auto value = render_scalar(v);
        if (value.empty()) continue;
        if (!line.empty()) line += "，";
        line += k + "：" + value;
    }
    return terminate(line);
}

std::string render_value(const nlohmann::ordered_json& v) {
    if (v.is_object()) return render_row(v);
    if (!v.is_array()) return render_scalar(v);
    std::string out;
    for (const auto& item : v) {
        const auto line = item.is_object() ? render_row(item) : terminate(render_scalar(item));
        if (line.empty()) continue;
        if (!out.empty()) out += "\n";
        out += line;
    }
    return out;
}

unified_document convert_keyed(const raw_document& raw, doc_type type, const type_map& map) {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(payload_body(raw.payload), nullptr, false);
    if (j.is_discarded()) throw error(error_code::parse_failure, "payload is not valid JSON");

    unified_document doc;
    doc.doc_id = raw.doc_id;
    doc.type = type;
    section_builder sections(map, type);

    if (j.is_array()) {
        sections.start("rows");
        sections.append(render_value(j));
    } else if (j.is_object()) {
        if (j.contains("title") && j["title"].is_string()) doc.title = j["title"].get<std::string>();
        if (j.contains("timestamp") && j["timestamp"].is_string()) doc.timestamp = j["timestamp"].get<std::string>();
        for (const auto& [key, value] : j.items()) {
            if (is_meta_key(key)) continue;
            try {
                sections.start(key);
                sections.append(render_value(value));
            } catch (const error& e) {
                throw error(error_code::parse_failure, "section '" + key + "': " + e.what());
            }
        }
    } else {
        throw error(error_code::parse_failure, "keyed payload must be an object or an array of rows");
    }
    doc.fields = sections.finish(doc.doc_id);
    return doc;
}

}  // namespace

conversion_result convert_document(const raw_document& raw, const type_map& map) {
    const auto type = detect_doc_type(raw, map);
    check_text_payload(raw);

    conversion_result result;
    try {
        const auto body = payload_body(raw.payload);
        const bool markup_payload = !body.empty() && body.front() == '<';
        if (type == doc_type::medical_records && markup_payload) {
            result.document = convert_html(raw, type, map);
        } else if (markup_payload) {
            result.document = convert_xml(raw, type, map);
        } else {
            result.document = convert_keyed(raw, type, map);
        }
    } catch (const error& e) {
        if (e.code() != error_code::parse_failure) throw;
        throw error(error_code::conversion_failure, "ConversionFailure(" + raw.doc_id + "): " + e.what());
    }
    if (result.document.title.empty()) result.document.title = std::string(to_string(type));
    if (result.document.fields.empty()) {
        result.warnings.push_back(raw.doc_id + ": document converted with zero fields");
    }
    return result;
}

}  // namespace lcds::ingest
