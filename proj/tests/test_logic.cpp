#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcds/core/error.hpp"
#include "lcds/logic/engine.hpp"
#include "support.hpp"

using namespace lcds;
using namespace lcds::logic;
using source_map::ds_field;
using types = std::vector<logic_type>;
using test::code_of;

namespace {

generation_rule rule(std::string id, logic_type declared, std::string text, bool editable = true) {
    generation_rule r;
    r.rule_id = std::move(id);
    r.field = ds_field::tests_examinations;
    r.department = "demo";
    r.declared_type = declared;
    r.text = std::move(text);
    r.editable = editable;
    return r;
}

source_map::resolved_source source(const std::string& doc_id, const std::string& name, const std::string& content) {
    return {{ingest::doc_type::examination, name}, doc_id, ingest::make_field(doc_id, name, content)};
}

std::vector<std::filesystem::path> department_dirs() {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(test::config_dir() / "departments")) {
        if (e.is_directory()) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_SUITE("types") {
    TEST_CASE("five logic types, reasoning is an alias of inference") {
        CHECK(all_logic_types.size() == 5);
        for (const auto t : all_logic_types) CHECK(parse_logic_type(to_string(t)) == t);
        CHECK(parse_logic_type("Reasoning") == logic_type::inference);
        CHECK(parse_logic_type("JUDGMENT") == logic_type::judgment);
        CHECK(display_name(logic_type::knowledge) == "Knowledge");
        CHECK_FALSE(try_parse_logic_type("planning").has_value());
        CHECK(code_of([] { (void)parse_logic_type("planning"); }) == error_code::invalid_argument);
    }
}

TEST_SUITE("stage 1") {
    TEST_CASE("documented rule examples") {
        const auto a = parse_task(rule("r1", logic_type::extraction, "extract name and hospitalization number verbatim"), nullptr);
        CHECK(a.types == types{logic_type::extraction});
        const auto b = parse_task(rule("r2", logic_type::summarization, "summarize history then flag abnormal tests"), nullptr);
        CHECK(b.types == types{logic_type::summarization, logic_type::judgment});
        CHECK(classify_logic_types("提取姓名") == types{logic_type::extraction});
        CHECK(classify_logic_types("根据病理结果推断预后并给出随访建议") ==
              types{logic_type::inference, logic_type::knowledge});
    }

    TEST_CASE("no cue and no provider answer is UnparseableRule") {
        CHECK(code_of([] { (void)parse_task(rule("r", logic_type::extraction, "写得好一点"), nullptr); }) ==
              error_code::unparseable_rule);
    }

    TEST_CASE("provider over-production is clamped to four with a warning") {
        auto gw = test::scripted_gateway(
            [](const auto&) { return std::string("knowledge, judgment, extraction, summarization, inference, reasoning"); });
        const auto p = parse_task(rule("r", logic_type::extraction, "anything"), &gw);
        CHECK(p.types == types{logic_type::knowledge, logic_type::judgment, logic_type::extraction,
                               logic_type::summarization});
        CHECK(p.warnings.size() == 1);
    }

    TEST_CASE("classifier over-production is clamped too") {
        const auto p = parse_task(rule("r", logic_type::extraction, "extract, summarize, judge, infer, recommend"), nullptr);
        CHECK(p.types.size() == 4);
        CHECK(p.warnings.size() == 1);
    }

    TEST_CASE("unusable provider answer falls back to the classifier") {
        auto gw = test::scripted_gateway([](const auto&) { return std::string("no idea"); });
        const auto p = parse_task(rule("r", logic_type::extraction, "提取诊断"), &gw);
        CHECK(p.types == types{logic_type::extraction});
        CHECK(p.warnings.size() == 1);
    }

    TEST_CASE("non-semantic providers are not asked") {
        auto provider = std::make_shared<test::scripted_provider>([](const auto&) { return std::string("judgment"); }, false);
        gateway::completion_gateway gw(provider, {});
        const auto p = parse_task(rule("r", logic_type::extraction, "提取诊断"), &gw);
        CHECK(p.types == types{logic_type::extraction});
        CHECK(provider->calls == 0);
    }

    TEST_CASE("property: classifier hits are cue order with no duplicates") {
        std::mt19937_64 rng(43);
        const std::vector<std::pair<std::string, logic_type>> cues{
            {"提取", logic_type::extraction}, {"总结", logic_type::summarization}, {"判断", logic_type::judgment},
            {"推断", logic_type::inference},  {"建议", logic_type::knowledge},     {"患者", logic_type::extraction}};
        for (int trial = 0; trial < 500; ++trial) {
            std::string s;
            types expected;
            for (std::size_t n = test::uniform(rng, 0, 6); n > 0; --n) {
                const auto& [cue, type] = test::pick(rng, cues);
                s += cue;
                if (cue == "患者") continue;
                if (std::find(expected.begin(), expected.end(), type) == expected.end()) expected.push_back(type);
            }
            CHECK(classify_logic_types(s) == expected);
        }
    }
}

TEST_SUITE("stage 2") {
    const std::vector<generation_rule> field_rules{
        rule("t1", logic_type::extraction, "提取检查结论"),
        rule("t2", logic_type::judgment, "判断检验结果是否异常", false),
    };

    TEST_CASE("one structure binds its rule") {
        const auto plan = match_rules({logic_type::extraction}, field_rules, ds_field::tests_examinations, "demo");
        REQUIRE(plan.structures.size() == 1);
        CHECK(plan.structures[0].rules.size() == 1);
        CHECK(plan.structures[0].rules[0].rule_id == "t1");
    }

    TEST_CASE("a structure with no rule is NoRuleForType") {
        CHECK(code_of([&] {
                  (void)match_rules({logic_type::knowledge}, field_rules, ds_field::tests_examinations, "demo");
              }) == error_code::no_rule_for_type);
        CHECK(code_of([&] { (void)match_rules({}, field_rules, ds_field::tests_examinations, "demo"); }) ==
              error_code::invalid_argument);
    }

    TEST_CASE("a physician-appended judgment rule shows up in the plan") {
        rulebook book{"demo", field_rules};
        rule_edits edits;
        edits.append.emplace_back(logic_type::judgment, "include intraocular pressure test results");
        const auto plan = plan_field(book, ds_field::tests_examinations, nullptr, edits);
        const auto it = std::find_if(plan.structures.begin(), plan.structures.end(),
                                     [](const plan_structure& s) { return s.type == logic_type::judgment; });
        REQUIRE(it != plan.structures.end());
        REQUIRE(it->rules.size() == 2);
        CHECK(it->rules[1].text == "include intraocular pressure test results");
        CHECK(it->rules[1].appended);
    }

    TEST_CASE("edits replace editable rules only") {
        rulebook book{"demo", field_rules};
        rule_edits ok;
        ok.replace["t1"] = "提取超声检查结论";
        CHECK(apply_edits(book, ds_field::tests_examinations, ok)[0].text == "提取超声检查结论");

        rule_edits locked;
        locked.replace["t2"] = "判断";
        CHECK(code_of([&] { (void)apply_edits(book, ds_field::tests_examinations, locked); }) ==
              error_code::invalid_argument);
        rule_edits unknown;
        unknown.replace["zz"] = "x";
        CHECK(code_of([&] { (void)apply_edits(book, ds_field::tests_examinations, unknown); }) ==
              error_code::invalid_argument);
        rule_edits blank;
        blank.replace["t1"] = "  ";
        CHECK(code_of([&] { (void)apply_edits(book, ds_field::tests_examinations, blank); }) ==
              error_code::invalid_argument);
        rule_edits blank_append;
        blank_append.append.emplace_back(logic_type::judgment, "");
        CHECK(code_of([&] { (void)apply_edits(book, ds_field::tests_examinations, blank_append); }) ==
              error_code::invalid_argument);
    }

    TEST_CASE("a field with no rules is NoRuleForType") {
        rulebook book{"demo", field_rules};
        CHECK(code_of([&] { (void)plan_field(book, ds_field::patient_info); }) == error_code::no_rule_for_type);
    }

    TEST_CASE("every shipped department plans every field") {
        const auto dirs = department_dirs();
        CHECK(dirs.size() == 15);
        for (const auto& dir : dirs) {
            CAPTURE(dir.string());
            const auto dept = load_department(dir);
            CHECK(dept.rules.department == dir.filename().string());
            for (const auto& r : dept.rules.rules) {
                const auto p = parse_task(r, nullptr);
                CHECK(p.types == parse_task(r, nullptr).types);
                CHECK_FALSE(p.types.empty());
                CHECK(p.types.size() <= max_structures);
            }
            for (const auto field : source_map::all_ds_fields) {
                const auto stage1_rules = dept.rules.for_field(field);
                const auto plan = plan_field(dept.rules, field);
                CHECK(plan.structures.size() >= 1);
                CHECK(plan.structures.size() <= max_structures);
                for (const auto& s : plan.structures) CHECK_FALSE(s.rules.empty());
                // Stage 2 keeps every structure stage 1 found (up to the clamp).
                types found;
                for (const auto& r : stage1_rules) {
                    for (const auto t : parse_task(r, nullptr).types) {
                        if (std::find(found.begin(), found.end(), t) == found.end()) found.push_back(t);
                    }
                }
                if (found.size() > max_structures) found.resize(max_structures);
                types planned;
                for (const auto& s : plan.structures) planned.push_back(s.type);
                CHECK(planned == found);
            }
        }
    }
}

TEST_SUITE("stage 3") {
    const auto src = source("d1", "conclusion", "右乳低回声结节。BI-RADS 4a类。");

    logic_plan plan_of(const types& ts) {
        std::vector<generation_rule> rules;
        for (const auto t : ts) rules.push_back(rule(std::string(to_string(t)), t, "rule for " + std::string(to_string(t))));
        return match_rules(ts, rules, ds_field::tests_examinations, "demo");
    }

    std::size_t count(const std::string& hay, const std::string& needle) {
        std::size_t n = 0;
        for (auto at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) ++n;
        return n;
    }

    TEST_CASE("extraction plan with one field") {
        const auto prompt = orchestrate(plan_of({logic_type::extraction}), {src}, {});
        CHECK(count(prompt, "### Logic ") == 1);
        CHECK(prompt.find("### Logic 1: Extraction") != std::string::npos);
        CHECK(prompt.find("[d1#conclusion#0] 右乳低回声结节。") != std::string::npos);
        CHECK(prompt.find("[d1#conclusion#1] BI-RADS 4a类。") != std::string::npos);
    }

    TEST_CASE("four structures render four blocks in plan order") {
        const types ts{logic_type::judgment, logic_type::extraction, logic_type::inference, logic_type::summarization};
        const auto prompt = orchestrate(plan_of(ts), {src}, {});
        CHECK(count(prompt, "### Logic ") == 4);
        std::size_t last = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const auto at = prompt.find("### Logic " + std::to_string(i + 1) + ": " + std::string(display_name(ts[i])));
            REQUIRE(at != std::string::npos);
            CHECK(at > last);
            last = at;
        }
    }

    TEST_CASE("sections appear in order and rendering is pure") {
        const auto plan = plan_of({logic_type::extraction});
        const auto prompt = orchestrate(plan, {src}, {"定期复查"});
        const auto role = prompt.find("### Role");
        const auto logic = prompt.find("### Logic 1");
        const auto content = prompt.find("### Source Content");
        const auto kb = prompt.find("### Knowledge Base");
        const auto fmt = prompt.find("### Output Format");
        CHECK(role < logic);
        CHECK(logic < content);
        CHECK(content < kb);
        CHECK(kb < fmt);
        CHECK(prompt == orchestrate(plan, {src}, {"定期复查"}));
    }

    TEST_CASE("no sources is EmptySources unless the plan has knowledge") {
        CHECK(code_of([&] { (void)orchestrate(plan_of({logic_type::extraction}), {}, {}); }) == error_code::empty_sources);
        const auto prompt = orchestrate(plan_of({logic_type::knowledge}), {}, {"建议随访"});
        CHECK(prompt.find("(none)") != std::string::npos);
        CHECK(prompt.find("- 建议随访") != std::string::npos);
    }

    TEST_CASE("every matched rule reaches the prompt on shipped rulebooks") {
        const auto dept = load_department(test::breast_dir());
        for (const auto field : source_map::all_ds_fields) {
            const auto plan = plan_field(dept.rules, field);
            const auto prompt = orchestrate(plan, {src}, {});
            for (const auto& s : plan.structures) {
                for (const auto& r : s.rules) CHECK(prompt.find("- " + r.text + "\n") != std::string::npos);
            }
        }
    }
}

TEST_SUITE("knowledge") {
    const auto record = [] {
        ingest::unified_document doc;
        doc.doc_id = "lab";
        doc.type = ingest::doc_type::laboratory_test;
        doc.fields.push_back(ingest::make_field("lab", "results", "乙肝表面抗原阳性，肝功能正常。"));
        doc.fields.push_back(ingest::make_field("lab", "immunohistochemistry", "ER(+) PR(+) HER2(3+)"));
        return ingest::build_record({doc}, "P", "A");
    }();

    TEST_CASE("pattern hits, misses and order") {
        knowledge_base kb{"demo",
                          {{"demo", "results", "乙肝表面抗原阳性", "定期复查肝功能"},
                           {"demo", "results", "HER2(3+)", "never"},
                           {"demo", "*", "HER2 (3+)", "靶向治疗"},
                           {"demo", "immunohistochemistry", "ER(+)", "内分泌治疗"}}};
        CHECK(apply_knowledge(record, kb) == std::vector<std::string>{"定期复查肝功能", "靶向治疗", "内分泌治疗"});
        CHECK(apply_knowledge(record, knowledge_base{}).empty());
    }

    TEST_CASE("breast knowledge fires on the corpus") {
        const auto dept = load_department(test::breast_dir());
        CHECK_FALSE(apply_knowledge(test::corpus_record("case_01"), dept.knowledge).empty());
    }

    TEST_CASE("config validation") {
        auto bad_rules = [](const char* s) {
            return code_of([&] { (void)rulebook_from_json(nlohmann::json::parse(s)); });
        };
        CHECK(bad_rules(R"({"department":"d","rules":[{"rule_id":"a","ds_field":"patient_info","logic_type":"extraction","text":" "}]})") ==
              error_code::parse_failure);
        CHECK(bad_rules(R"({"department":"d","rules":[{"rule_id":"a","ds_field":"patient_info","logic_type":"extraction","text":"x"},{"rule_id":"a","ds_field":"patient_info","logic_type":"judgment","text":"y"}]})") ==
              error_code::parse_failure);
        CHECK(bad_rules(R"({"department":"d","rules":[{"rule_id":"a","ds_field":"patient_info","logic_type":"planning","text":"x"}]})") ==
              error_code::parse_failure);
        CHECK(bad_rules(R"({"rules":[]})") == error_code::parse_failure);
        const auto ok = rulebook_from_json(nlohmann::json::parse(
            R"({"department":"d","rules":[{"rule_id":"a","ds_field":"patient_info","logic_type":"reasoning","text":"x"},{"rule_id":"a","ds_field":"discharge_condition","logic_type":"judgment","text":"y","editable":false}]})"));
        CHECK(ok.rules[0].declared_type == logic_type::inference);
        CHECK_FALSE(ok.rules[1].editable);
        CHECK(rulebook_from_json(to_json(ok)).rules == ok.rules);

        CHECK(code_of([] {
                  (void)knowledge_from_json(nlohmann::json::parse(
                      R"({"department":"d","entries":[{"pattern":{"field_name":"x","contains":""},"recommendation":"r"}]})"));
              }) == error_code::parse_failure);
        const auto kb = load_knowledge_base(test::breast_dir() / "knowledge.json");
        CHECK(knowledge_from_json(to_json(kb)).entries == kb.entries);
    }

    TEST_CASE("missing knowledge file is an empty base") {
        const auto dir = test::temp_dir("dept");
        std::filesystem::copy_file(test::breast_dir() / "rules.json", dir / "rules.json");
        CHECK(load_department(dir).knowledge.entries.empty());
        std::filesystem::remove_all(dir);
    }
}
