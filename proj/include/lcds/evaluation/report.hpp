/**
 * @file report.hpp
 * @brief Per-record evaluation results and corpus means
 */

#pragma once

#include "lcds/evaluation/human_sheet.hpp"
#include "lcds/evaluation/judge.hpp"
#include "lcds/evaluation/rouge.hpp"

#include "lcds/gateway/completion.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

#include <optional>
#include <string>
#include <vector>

namespace lcds::evaluation {

struct record_result {
    std::string record_id;
    std::optional<rouge_score> rouge;
    std::optional<judge_breakdown> judge;
    std::optional<human_score_sheet> human;
};

struct eval_report {
    std::string method;
    std::vector<record_result> records;
    /// ROUGE-L F1 × 100, judge total, human total; absent when no record has the metric.
    std::optional<double> mean_rouge_l;
    std::optional<double> mean_judge;
    std::optional<double> mean_human;
};

/// @throws lcds::error empty_results
[[nodiscard]] eval_report aggregate_report(std::vector<record_result> results, std::string method);

/// Text table: Method | ROUGE-L | LLM-as-a-Judge | Human, two decimals, "-" for missing.
[[nodiscard]] std::string render_table(const std::vector<eval_report>& reports);

[[nodiscard]] nlohmann::ordered_json to_json(const eval_report& report);

// ─────────────────────────────────────────────────────
// Pair files
// ─────────────────────────────────────────────────────

/// One generated/reference pair. Files are `{"id","generated","reference"}` objects.
struct eval_pair {
    std::string id;
    std::string generated;
    std::string reference;
};

/// Every *.json in dir, sorted by file name. Missing ids default to the file stem.
[[nodiscard]] std::vector<eval_pair> load_pairs(const std::filesystem::path& dir);

struct eval_options {
    bool rouge = true;
    bool judge = false;
    rouge_tokenizer tokenizer = rouge_tokenizer::automatic;
    /// Empty means the built-in rubric.
    std::string judge_template;
};

/**
 * @brief Scores every pair
 *
 * A pair whose judge call fails keeps its ROUGE score and has no judge score.
 *
 * @param gateway required when options.judge is set
 */
[[nodiscard]] eval_report evaluate_pairs(const std::vector<eval_pair>& pairs, const eval_options& options,
                                         const gateway::completion_gateway* gateway, std::string method);

}  // namespace lcds::evaluation
