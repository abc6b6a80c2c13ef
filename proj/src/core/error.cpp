#include "lcds/core/error.hpp"

namespace lcds {

std::string_view to_string(error_code code) noexcept {
    switch (code) {
        case error_code::invalid_argument: return "InvalidArgument";
        case error_code::unrecognized_format: return "UnrecognizedFormat";
        case error_code::conversion_failure: return "ConversionFailure";
        case error_code::duplicate_doc_id: return "DuplicateDocId";
        case error_code::segmentation_rejected: return "SegmentationRejected";
        case error_code::duplicate_id: return "DuplicateId";
        case error_code::unknown_doc: return "UnknownDoc";
        case error_code::empty_observations: return "EmptyObservations";
        case error_code::empty_corpus: return "EmptyCorpus";
        case error_code::no_entry: return "NoEntry";
        case error_code::unparseable_rule: return "UnparseableRule";
        case error_code::no_rule_for_type: return "NoRuleForType";
        case error_code::empty_sources: return "EmptySources";
        case error_code::timeout: return "Timeout";
        case error_code::provider_error: return "ProviderError";
        case error_code::retries_exhausted: return "RetriesExhausted";
        case error_code::malformed_structured_output: return "MalformedStructuredOutput";
        case error_code::generation_failed: return "GenerationFailed";
        case error_code::empty_reference: return "EmptyReference";
        case error_code::unknown_rule_id: return "UnknownRuleId";
        case error_code::invalid_deduction: return "InvalidDeduction";
        case error_code::judge_range_violation: return "JudgeRangeViolation";
        case error_code::empty_results: return "EmptyResults";
        case error_code::unknown_sentence: return "UnknownSentence";
        case error_code::not_generated: return "NotGenerated";
        case error_code::io_failure: return "IoFailure";
        case error_code::parse_failure: return "ParseFailure";
    }
    return "Unknown";
}

}  // namespace lcds
