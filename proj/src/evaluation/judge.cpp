#include "lcds/evaluation/judge.hpp"

#include "lcds/core/error.hpp"
#include "lcds/core/io.hpp"

#include <cmath>

namespace lcds::evaluation {

std::string default_judge_template() {
    return "You are reviewing a discharge summary produced by an automated system. Compare it with the reference "
           "summary written by the treating physician and score it out of 100.\n"
           "\n"
           "Dimensions and maximum points:\n"
           "1. Information Accuracy (40): patient identifiers, admission and discharge dates, the admission history "
           "and examination findings, and the diagnoses agree with the reference.\n"
           "2. Medical Completeness (35): every core section is present, and test values, imaging, operative details "
           "and follow-up items are reported without numeric errors.\n"
           "3. Professional Standardization (15): standard clinical terminology, chronological and coherent "
           "structure, no superfluous detail.\n"
           "4. Clinical Practicality (10): discharge instructions are specific enough to act on and complication "
           "warnings are given.\n"
           "\n"
           "### Reference Summary\n"
           "{reference}\n"
           "\n"
           "### Generated Summary\n"
           "{generated}\n"
           "\n"
           "### Output Format\n"
           "Reply with exactly this structure and nothing else, replacing each bracketed part with a number:\n"
           "{\n"
           "  \"score\" [overall score],\n"
           "  \"breakdown\" {\n"
           "    \"Information Accuracy\" [score]/40,\n"
           "    \"Medical Completeness\" [score]/35,\n"
           "    \"Professional Standardization\" [score]/15,\n"
           "    \"Clinical Practicality\" [score]/10\n"
           "  }\n"
           "}\n";
}

std::string load_judge_template(const std::filesystem::path& path) { return io::read_file(path); }

std::string render_judge_prompt(std::string_view judge_template, std::string_view generated,
                                std::string_view reference) {
    std::string out(judge_template);
    const auto ref_at = out.find("{reference}");
    const auto gen_at = out.find("{generated}");
    if (ref_at == std::string::npos || gen_at == std::string::npos) {
        throw error(error_code::invalid_argument, "judge template needs {reference} and {generated}");
    }
    // Replace the later placeholder first so the earlier offset stays valid.
    if (ref_at > gen_at) {
        out.replace(ref_at, 11, reference);
        out.replace(gen_at, 11, generated);
    } else {
        out.replace(gen_at, 11, generated);
        out.replace(ref_at, 11, reference);
    }
    return out;
}

namespace {

void check_range(double value, double max, const char* name) {
    if (!std::isfinite(value) || value < 0.0 || value > max) {
        throw error(error_code::judge_range_violation,
                    std::string(name) + " score " + std::to_string(value) + " outside [0, " + std::to_string(max) + "]");
    }
}

}  // namespace

judge_breakdown validate_judge(const gateway::judge_output& raw) {
    check_range(raw.information_accuracy, judge_max_accuracy, "Information Accuracy");
    check_range(raw.medical_completeness, judge_max_completeness, "Medical Completeness");
    check_range(raw.professional_standardization, judge_max_standardization, "Professional Standardization");
    check_range(raw.clinical_practicality, judge_max_practicality, "Clinical Practicality");
    check_range(raw.score, judge_max_total, "overall");

    judge_breakdown out;
    out.information_accuracy = raw.information_accuracy;
    out.medical_completeness = raw.medical_completeness;
    out.professional_standardization = raw.professional_standardization;
    out.clinical_practicality = raw.clinical_practicality;
    out.reported_total = raw.score;
    out.total = raw.score;
    const double sum = out.breakdown_sum();
    if (std::abs(sum - raw.score) > 1e-9) {
        out.total = sum;
        out.total_corrected = true;
    }
    return out;
}

judge_breakdown judge_score(std::string_view generated, std::string_view reference,
                            const gateway::completion_gateway& gateway, std::string_view judge_template) {
    const auto tmpl = judge_template.empty() ? default_judge_template() : std::string(judge_template);
    gateway::completion_request request;
    request.prompt = render_judge_prompt(tmpl, generated, reference);
    request.max_tokens = 256;
    request.request_id = "judge";
    return validate_judge(gateway.complete_judge(std::move(request)));
}

}  // namespace lcds::evaluation
