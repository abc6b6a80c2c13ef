/**
 * @file error.hpp
 * @brief Error codes and the exception type shared by every lcds module
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcds {

/**
 * @brief Failure categories raised across the pipeline
 *
 * Each module throws lcds::error with one of these codes. Callers that need
 * to branch on a failure inspect code() rather than parsing messages.
 */
enum class error_code {
    invalid_argument,
    // ingest
    unrecognized_format,
    conversion_failure,
    duplicate_doc_id,
    // segmentation
    segmentation_rejected,
    // retrieval
    duplicate_id,
    unknown_doc,
    // source map
    empty_observations,
    empty_corpus,
    no_entry,
    // logic engine
    unparseable_rule,
    no_rule_for_type,
    empty_sources,
    // gateway
    timeout,
    provider_error,
    retries_exhausted,
    malformed_structured_output,
    // summarizer
    generation_failed,
    // evaluation
    empty_reference,
    unknown_rule_id,
    invalid_deduction,
    judge_range_violation,
    empty_results,
    // review service
    unknown_sentence,
    not_generated,
    io_failure,
    parse_failure,
};

[[nodiscard]] std::string_view to_string(error_code code) noexcept;

class error : public std::runtime_error {
public:
    error(error_code code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] error_code code() const noexcept { return code_; }

private:
    error_code code_;
};

}  // namespace lcds
