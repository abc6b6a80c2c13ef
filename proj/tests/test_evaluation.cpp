#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcds/core/io.hpp"
#include "lcds/evaluation/report.hpp"
#include "lcds/gateway/mock_provider.hpp"

#include "support.hpp"

#include <chrono>
#include <map>
#include <sstream>

using namespace lcds;
using namespace lcds::evaluation;
using namespace lcds::test;

namespace {

/// Longest common subsequence by enumerating every subsequence of a.
std::size_t brute_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::size_t best = 0;
    const std::size_t n = a.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const auto len = static_cast<std::size_t>(__builtin_popcount(mask));
        if (len <= best) continue;
        std::size_t j = 0;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            if ((mask & (1u << i)) == 0) continue;
            while (j < b.size() && b[j] != a[i]) ++j;
            if (j == b.size()) ok = false;
            else ++j;
        }
        if (ok) best = len;
    }
    return best;
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t max_len) {
    static const std::vector<std::string> alphabet{"a", "b", "c", "d"};
    std::vector<std::string> out(uniform(rng, 0, max_len));
    for (auto& t : out) t = pick(rng, alphabet);
    return out;
}

/// Memoised recursive LCS; independent of the library's rolling-row version.
std::size_t memo_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size() || j == b.size()) return 0;
        if (auto it = memo.find({i, j}); it != memo.end()) return it->second;
        const auto v = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
        memo[{i, j}] = v;
        return v;
    };
    return go(0, 0);
}

/// Non-space code points, split by UTF-8 lead bytes.
std::vector<std::string> utf8_chars(const std::string& s) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < s.size();) {
        const auto c = static_cast<unsigned char>(s[i]);
        const std::size_t len = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
        if (s[i] != ' ') out.push_back(s.substr(i, len));
        i += len;
    }
    return out;
}

std::vector<std::string> space_words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

gateway::judge_output raw_judge(double score, double a, double c, double s, double p) {
    return {score, a, c, s, p};
}

}  // namespace

// =============================================================================
// ROUGE-L
// =============================================================================

TEST_SUITE("rouge") {
    TEST_CASE("word example") {
        const auto r = rouge_l("the cat sat on the mat", "the cat lay on the mat", rouge_tokenizer::word);
        CHECK(r.lcs == 5);
        CHECK(r.precision == doctest::Approx(5.0 / 6.0));
        CHECK(r.recall == doctest::Approx(5.0 / 6.0));
        CHECK(r.f1 == doctest::Approx(5.0 / 6.0));
        CHECK(r.tokenizer == rouge_tokenizer::word);
    }

    TEST_CASE("identical and disjoint") {
        CHECK(rouge_l("a b c", "a b c").f1 == 1.0);
        CHECK(rouge_l("患者出院", "患者出院").f1 == 1.0);
        const auto disjoint = rouge_l("x y z", "a b c");
        CHECK(disjoint.f1 == 0.0);
        CHECK(disjoint.precision == 0.0);
        CHECK(disjoint.recall == 0.0);
    }

    TEST_CASE("empty inputs") {
        CHECK(code_of([] { (void)rouge_l("a b", ""); }) == error_code::empty_reference);
        CHECK(code_of([] { (void)rouge_l("a b", "  \n "); }) == error_code::empty_reference);
        CHECK(rouge_l("", "a b").f1 == 0.0);
        CHECK(rouge_l_tokens({}, {}).f1 == 0.0);
    }

    TEST_CASE("tokenizers") {
        CHECK(rouge_tokens("乳腺 手术", rouge_tokenizer::automatic) == std::vector<std::string>{"乳", "腺", "手", "术"});
        CHECK(rouge_tokens("breast  surgery\n", rouge_tokenizer::automatic) ==
              std::vector<std::string>{"breast", "surgery"});
        CHECK(rouge_tokens("ab c", rouge_tokenizer::character) == std::vector<std::string>{"a", "b", "c"});
        CHECK(rouge_tokens("乳腺 手术", rouge_tokenizer::word) == std::vector<std::string>{"乳腺", "手术"});
        // One CJK side switches the whole pair to characters.
        CHECK(rouge_l("ER阳性", "ER positive").tokenizer == rouge_tokenizer::character);
        CHECK(rouge_l("ER+", "ER positive").tokenizer == rouge_tokenizer::word);
        CHECK(parse_rouge_tokenizer("auto") == rouge_tokenizer::automatic);
        CHECK(parse_rouge_tokenizer("char") == rouge_tokenizer::character);
        CHECK(parse_rouge_tokenizer("word") == rouge_tokenizer::word);
        CHECK(code_of([] { (void)parse_rouge_tokenizer("bpe"); }) == error_code::invalid_argument);
        for (auto t : {rouge_tokenizer::automatic, rouge_tokenizer::character, rouge_tokenizer::word}) {
            CHECK(parse_rouge_tokenizer(to_string(t)) == t);
        }
    }

    TEST_CASE("lcs matches subsequence enumeration") {
        std::mt19937_64 rng(7);
        const auto start = std::chrono::steady_clock::now();
        for (int trial = 0; trial < 200; ++trial) {
            const auto a = random_tokens(rng, 12);
            const auto b = random_tokens(rng, 12);
            const auto expected = brute_lcs(a, b);
            REQUIRE(lcs_length(a, b) == expected);
            REQUIRE(lcs_length(b, a) == expected);
            const auto r = rouge_l_tokens(a, b);
            if (expected == 0) {
                CHECK(r.f1 == 0.0);
            } else {
                CHECK(r.f1 == doctest::Approx(2.0 * static_cast<double>(expected) /
                                              static_cast<double>(a.size() + b.size()))
                                  .epsilon(1e-12));
            }
        }
        CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
    }

    TEST_CASE("score properties") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 500; ++trial) {
            const auto a = random_tokens(rng, 20);
            auto b = random_tokens(rng, 20);
            if (b.empty()) b.push_back("a");
            const auto ab = rouge_l_tokens(a, b);
            const auto ba = rouge_l_tokens(b, a);
            CHECK(ab.f1 >= 0.0);
            CHECK(ab.f1 <= 1.0);
            CHECK(ab.f1 == doctest::Approx(ba.f1));
            CHECK(ab.precision == doctest::Approx(ba.recall));
            CHECK(rouge_l_tokens(b, b).f1 == 1.0);
        }
    }
}

// =============================================================================
// LLM judge
// =============================================================================

TEST_SUITE("judge") {
    TEST_CASE("maxima sum to the total") {
        CHECK(judge_max_accuracy + judge_max_completeness + judge_max_standardization + judge_max_practicality ==
              judge_max_total);
        const auto full = validate_judge(raw_judge(100, 40, 35, 15, 10));
        CHECK(full.total == 100.0);
        CHECK_FALSE(full.total_corrected);
    }

    TEST_CASE("range violations") {
        CHECK(code_of([] { (void)validate_judge(raw_judge(100, 45, 35, 15, 5)); }) ==
              error_code::judge_range_violation);
        CHECK(code_of([] { (void)validate_judge(raw_judge(80, 40, 36, 4, 0)); }) == error_code::judge_range_violation);
        CHECK(code_of([] { (void)validate_judge(raw_judge(10, 0, 0, 16, 0)); }) == error_code::judge_range_violation);
        CHECK(code_of([] { (void)validate_judge(raw_judge(10, 0, 0, 0, 11)); }) == error_code::judge_range_violation);
        CHECK(code_of([] { (void)validate_judge(raw_judge(-1, 0, 0, 0, 0)); }) == error_code::judge_range_violation);
        CHECK(code_of([] { (void)validate_judge(raw_judge(101, 40, 35, 15, 10)); }) ==
              error_code::judge_range_violation);
        CHECK(code_of([] { (void)validate_judge(raw_judge(0, std::nan(""), 0, 0, 0)); }) ==
              error_code::judge_range_violation);
    }

    TEST_CASE("inconsistent total is recomputed") {
        const auto j = validate_judge(raw_judge(90, 35, 30, 12, 8));
        CHECK(j.total == 85.0);
        CHECK(j.reported_total == 90.0);
        CHECK(j.total_corrected);
    }

    TEST_CASE("template") {
        CHECK(default_judge_template() == io::read_file(config_dir() / "prompts" / "judge_rubric.txt"));
        CHECK(load_judge_template(config_dir() / "prompts" / "judge_rubric.txt") == default_judge_template());
        const auto prompt = render_judge_prompt(default_judge_template(), "GEN-TEXT", "REF-TEXT");
        CHECK(prompt.find("GEN-TEXT") != std::string::npos);
        CHECK(prompt.find("REF-TEXT") != std::string::npos);
        CHECK(prompt.find("{generated}") == std::string::npos);
        CHECK(prompt.find("{reference}") == std::string::npos);
        CHECK(render_judge_prompt("R={reference} G={generated}", "g", "r") == "R=r G=g");
        CHECK(render_judge_prompt("G={generated} R={reference}", "g", "r") == "G=g R=r");
        CHECK(code_of([] { (void)render_judge_prompt("only {generated}", "g", "r"); }) ==
              error_code::invalid_argument);
        CHECK(code_of([] { (void)render_judge_prompt("only {reference}", "g", "r"); }) ==
              error_code::invalid_argument);
    }

    TEST_CASE("scores through the gateway") {
        const gateway::completion_gateway mock(std::make_shared<gateway::mock_provider>());
        const auto full = judge_score("患者今日出院。", "患者病情平稳，今日出院。", mock);
        CHECK(full.total == 100.0);
        CHECK(full.information_accuracy == 40.0);

        std::string seen;
        auto gw = scripted_gateway([&](const gateway::completion_request& r) {
            seen = r.prompt;
            return R"({"score": 90, "breakdown": {"Information Accuracy": 35, "Medical Completeness": 30,
                       "Professional Standardization": 12, "Clinical Practicality": 8}})";
        });
        const auto j = judge_score("GEN", "REF", gw, "ref {reference} gen {generated}");
        CHECK(seen.rfind("ref REF gen GEN", 0) == 0);
        CHECK(j.total == 85.0);
        CHECK(j.total_corrected);

        auto over = scripted_gateway([](const gateway::completion_request&) {
            return R"({"score": 100, "breakdown": {"Information Accuracy": 50, "Medical Completeness": 30,
                       "Professional Standardization": 12, "Clinical Practicality": 8}})";
        });
        CHECK(code_of([&] { (void)judge_score("g", "r", over); }) == error_code::judge_range_violation);

        auto prose = scripted_gateway([](const gateway::completion_request&) { return "looks fine to me"; });
        CHECK(code_of([&] { (void)judge_score("g", "r", prose); }) == error_code::malformed_structured_output);
    }
}

// =============================================================================
// Human score sheet
// =============================================================================

TEST_SUITE("human sheet") {
    TEST_CASE("maxima") {
        int sum = 0;
        for (auto d : all_human_dimensions) sum += dimension_max(d);
        CHECK(sum == 100);
        CHECK(dimension_max(human_dimension::accuracy) == 30);
        CHECK(dimension_max(human_dimension::completeness) == 30);
        CHECK(dimension_max(human_dimension::standardization) == 25);
        CHECK(dimension_max(human_dimension::utility) == 15);
        for (auto d : all_human_dimensions) CHECK(parse_human_dimension(to_string(d)) == d);
        CHECK(code_of([] { (void)parse_human_dimension("style"); }) == error_code::invalid_argument);
    }

    TEST_CASE("catalogue") {
        const std::map<std::string, std::pair<human_dimension, int>> expected{
            {"patient_identification", {human_dimension::accuracy, 3}},
            {"time_points", {human_dimension::accuracy, 3}},
            {"diagnostic_contradiction", {human_dimension::accuracy, 15}},
            {"diagnostic_omission", {human_dimension::accuracy, 10}},
            {"admission_history_error", {human_dimension::accuracy, 3}},
            {"treatment_element_missing", {human_dimension::completeness, 8}},
            {"key_exam_missing", {human_dimension::completeness, 5}},
            {"discharge_instruction_missing", {human_dimension::completeness, 6}},
            {"discharge_condition_discrepancy", {human_dimension::completeness, 5}},
            {"terminology_error", {human_dimension::standardization, 3}},
            {"logical_disorder", {human_dimension::standardization, 8}},
            {"redundant_content", {human_dimension::standardization, 5}},
            {"vague_advice", {human_dimension::utility, 5}},
            {"risk_mitigation_missing", {human_dimension::utility, 8}},
            {"individualized_followup", {human_dimension::utility, 2}},
        };
        REQUIRE(deduction_catalog().size() == expected.size());
        for (const auto& rule : deduction_catalog()) {
            const auto it = expected.find(std::string(rule.rule_id));
            REQUIRE(it != expected.end());
            CHECK(rule.dimension == it->second.first);
            CHECK(rule.points == it->second.second);
            CHECK(rule.adjustable == (rule.rule_id == "individualized_followup"));
        }
        CHECK(find_rule("time_points") != nullptr);
        CHECK(find_rule("nope") == nullptr);
    }

    TEST_CASE("totals") {
        const auto clean = apply_human_deductions({});
        CHECK(clean.total == 100);
        CHECK(clean.subtotals == std::array<int, 4>{30, 30, 25, 15});

        const auto one = apply_human_deductions({{human_dimension::accuracy, "diagnostic_contradiction", 15}});
        CHECK(one.total == 85);
        CHECK(one.subtotals[0] == 15);
        CHECK(one.items.size() == 1);

        // 15 + 10 + 15 = 40 against a maximum of 30.
        const auto floor = apply_human_deductions({{human_dimension::accuracy, "diagnostic_contradiction", 15},
                                                   {human_dimension::accuracy, "diagnostic_omission", 10},
                                                   {human_dimension::accuracy, "diagnostic_contradiction", 15}});
        CHECK(floor.subtotals[0] == 0);
        CHECK(floor.total == 70);
    }

    TEST_CASE("invalid items") {
        CHECK(code_of([] { (void)apply_human_deductions({{human_dimension::accuracy, "made_up", 3}}); }) ==
              error_code::unknown_rule_id);
        CHECK(code_of([] { (void)apply_human_deductions({{human_dimension::utility, "time_points", 3}}); }) ==
              error_code::invalid_deduction);
        CHECK(code_of([] { (void)apply_human_deductions({{human_dimension::accuracy, "time_points", 2}}); }) ==
              error_code::invalid_deduction);
        CHECK(code_of([] {
                  (void)apply_human_deductions({{human_dimension::utility, "individualized_followup", 3}});
              }) == error_code::invalid_deduction);
    }

    TEST_CASE("adjustable rule") {
        const auto minus = apply_human_deductions({{human_dimension::utility, "individualized_followup", 2}});
        CHECK(minus.subtotals[3] == 13);
        const auto bonus = apply_human_deductions({{human_dimension::utility, "vague_advice", 5},
                                                   {human_dimension::utility, "individualized_followup", -2}});
        CHECK(bonus.subtotals[3] == 12);
        // Never above the dimension maximum.
        const auto capped = apply_human_deductions({{human_dimension::utility, "individualized_followup", -2}});
        CHECK(capped.subtotals[3] == 15);
        CHECK(capped.total == 100);
        CHECK(apply_human_deductions({{human_dimension::utility, "individualized_followup", 0}}).total == 100);
    }

    TEST_CASE("random multisets stay in range") {
        std::mt19937_64 rng(23);
        const auto& catalog = deduction_catalog();
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<deduction_item> items(uniform(rng, 0, 25));
            std::array<int, 4> deducted{};
            for (auto& item : items) {
                const auto& rule = catalog[uniform(rng, 0, catalog.size() - 1)];
                item.dimension = rule.dimension;
                item.rule_id = std::string(rule.rule_id);
                item.points = rule.adjustable ? static_cast<int>(uniform(rng, 0, 2 * rule.points)) - rule.points
                                              : rule.points;
                deducted[static_cast<std::size_t>(rule.dimension)] += item.points;
            }
            const auto sheet = apply_human_deductions(items);
            int sum = 0;
            for (std::size_t d = 0; d < 4; ++d) {
                const int max = dimension_max(all_human_dimensions[d]);
                REQUIRE(sheet.subtotals[d] >= 0);
                REQUIRE(sheet.subtotals[d] <= max);
                CHECK(sheet.subtotals[d] == std::max(0, std::min(max, max - deducted[d])));
                sum += sheet.subtotals[d];
            }
            CHECK(sheet.total == sum);
        }
    }
}

// =============================================================================
// Reports
// =============================================================================

TEST_SUITE("report") {
    TEST_CASE("means") {
        std::vector<record_result> results(2);
        results[0].record_id = "a";
        results[0].judge = judge_breakdown{};
        results[0].judge->total = 60;
        results[1].record_id = "b";
        results[1].judge = judge_breakdown{};
        results[1].judge->total = 80;
        results[1].human = apply_human_deductions({{human_dimension::accuracy, "time_points", 3}});
        const auto report = aggregate_report(results, "Ours");
        CHECK(report.mean_judge == 70.0);
        CHECK(report.mean_human == 97.0);
        CHECK_FALSE(report.mean_rouge_l.has_value());
        CHECK(code_of([] { (void)aggregate_report({}, "x"); }) == error_code::empty_results);
    }

    TEST_CASE("table") {
        std::vector<record_result> results(1);
        results[0].record_id = "a";
        results[0].rouge = rouge_l("a b c d", "a b c d");
        auto r1 = aggregate_report(results, "Baseline");
        results[0].judge = validate_judge(raw_judge(77.5, 30, 30, 10, 7.5));
        auto r2 = aggregate_report(results, "Baseline+Map");
        const auto table = render_table({r1, r2});
        CHECK(table ==
              "Method       | ROUGE-L | LLM-as-a-Judge | Human\n"
              "-------------|---------|----------------|------\n"
              "Baseline     | 100.00  | -              | -\n"
              "Baseline+Map | 100.00  | 77.50          | -\n");
    }

    TEST_CASE("pair fixtures recomputed independently") {
        const auto pairs = load_pairs(fixtures() / "pairs");
        REQUIRE(pairs.size() == 10);
        CHECK(pairs.front().id == "pair_01");
        CHECK(pairs.back().id == "pair_10");  // from the file stem

        const auto report = evaluate_pairs(pairs, {}, nullptr, "fixture");
        REQUIRE(report.records.size() == 10);
        double sum = 0.0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto& p = pairs[i];
            const bool cjk = p.generated.find_first_of("\xE4\xE5\xE6\xE7\xE8\xE9") != std::string::npos ||
                             p.reference.find_first_of("\xE4\xE5\xE6\xE7\xE8\xE9") != std::string::npos;
            const auto g = cjk ? utf8_chars(p.generated) : space_words(p.generated);
            const auto r = cjk ? utf8_chars(p.reference) : space_words(p.reference);
            const auto l = static_cast<double>(memo_lcs(g, r));
            const double f1 = l == 0 ? 0.0 : 2.0 * l / static_cast<double>(g.size() + r.size());
            CAPTURE(p.id);
            REQUIRE(report.records[i].rouge.has_value());
            CHECK(report.records[i].rouge->f1 == doctest::Approx(f1).epsilon(1e-12));
            CHECK_FALSE(report.records[i].judge.has_value());
            sum += f1 * 100.0;
        }
        CHECK(*report.mean_rouge_l == doctest::Approx(sum / 10.0).epsilon(1e-12));

        const auto j = to_json(report);
        CHECK(j["method"] == "fixture");
        CHECK(j["records"].size() == 10);
        CHECK(j["means"]["llm_judge"].is_null());
        CHECK(j["records"][4]["rouge_l"]["tokenizer"] == "word");
        CHECK(j["records"][0]["rouge_l"]["tokenizer"] == "char");
    }

    TEST_CASE("judge failure leaves that record unscored") {
        const std::vector<eval_pair> pairs{{"ok", "a b", "a b"}, {"bad", "c d", "c d"}};
        auto gw = scripted_gateway([](const gateway::completion_request& r) -> std::string {
            if (r.prompt.find("c d") != std::string::npos) return "no idea";
            return R"({"score": 70, "breakdown": {"Information Accuracy": 30, "Medical Completeness": 25,
                       "Professional Standardization": 10, "Clinical Practicality": 5}})";
        });
        eval_options options;
        options.judge = true;
        const auto report = evaluate_pairs(pairs, options, &gw, "m");
        CHECK(report.records[0].judge->total == 70.0);
        CHECK_FALSE(report.records[1].judge.has_value());
        CHECK(report.mean_judge == 70.0);
        CHECK(report.mean_rouge_l == 100.0);
        CHECK(code_of([&] { (void)evaluate_pairs(pairs, options, nullptr, "m"); }) == error_code::invalid_argument);
    }

    TEST_CASE("bad pair files") {
        const auto dir = temp_dir("pairs_bad");
        io::write_file_atomic(dir / "x.json", R"({"generated": "a"})");
        CHECK(code_of([&] { (void)load_pairs(dir); }) == error_code::parse_failure);
        io::write_file_atomic(dir / "x.json", "not json");
        CHECK(code_of([&] { (void)load_pairs(dir); }) == error_code::parse_failure);
        CHECK(code_of([&] { (void)load_pairs(dir / "missing"); }) == error_code::io_failure);
    }
}
