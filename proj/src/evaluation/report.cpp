#include "lcds/evaluation/report.hpp"

#include "lcds/core/error.hpp"
#include "lcds/core/io.hpp"

#include <algorithm>
#include <cstdio>

namespace lcds::evaluation {

namespace {

template <typename Get>
std::optional<double> mean_of(const std::vector<record_result>& records, Get get) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : records) {
        if (const auto v = get(r)) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::string cell(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json();
}

}  // namespace

eval_report aggregate_report(std::vector<record_result> results, std::string method) {
    if (results.empty()) throw error(error_code::empty_results, "EmptyResults");
    eval_report report;
    report.method = std::move(method);
    report.records = std::move(results);
    report.mean_rouge_l = mean_of(report.records, [](const record_result& r) -> std::optional<double> {
        if (!r.rouge) return std::nullopt;
        return r.rouge->f1 * 100.0;
    });
    report.mean_judge = mean_of(report.records, [](const record_result& r) -> std::optional<double> {
        if (!r.judge) return std::nullopt;
        return r.judge->total;
    });
    report.mean_human = mean_of(report.records, [](const record_result& r) -> std::optional<double> {
        if (!r.human) return std::nullopt;
        return static_cast<double>(r.human->total);
    });
    return report;
}

std::string render_table(const std::vector<eval_report>& reports) {
    std::size_t width = 6;
    for (const auto& r : reports) width = std::max(width, r.method.size());
    std::string out = pad("Method", width) + " | ROUGE-L | LLM-as-a-Judge | Human\n";
    out += std::string(width, '-') + "-|---------|----------------|------\n";
    for (const auto& r : reports) {
        out += pad(r.method, width) + " | " + pad(cell(r.mean_rouge_l), 7) + " | " + pad(cell(r.mean_judge), 14) +
               " | " + cell(r.mean_human) + "\n";
    }
    return out;
}

nlohmann::ordered_json to_json(const eval_report& report) {
    nlohmann::ordered_json j;
    j["method"] = report.method;
    auto records = nlohmann::ordered_json::array();
    for (const auto& r : report.records) {
        nlohmann::ordered_json rj;
        rj["record_id"] = r.record_id;
        if (r.rouge) {
            rj["rouge_l"] = {{"precision", r.rouge->precision},
                             {"recall", r.rouge->recall},
                             {"f1", r.rouge->f1},
                             {"lcs_length", r.rouge->lcs},
                             {"tokenizer", to_string(r.rouge->tokenizer)}};
        } else {
            rj["rouge_l"] = nullptr;
        }
        if (r.judge) {
            rj["judge"] = {{"total", r.judge->total},
                           {"information_accuracy", r.judge->information_accuracy},
                           {"medical_completeness", r.judge->medical_completeness},
                           {"professional_standardization", r.judge->professional_standardization},
                           {"clinical_practicality", r.judge->clinical_practicality},
                           {"total_corrected", r.judge->total_corrected}};
        } else {
            rj["judge"] = nullptr;
        }
        if (r.human) {
            nlohmann::ordered_json hj;
            for (std::size_t i = 0; i < all_human_dimensions.size(); ++i) {
                hj[std::string(to_string(all_human_dimensions[i]))] = r.human->subtotals[i];
            }
            hj["total"] = r.human->total;
            rj["human"] = std::move(hj);
        } else {
            rj["human"] = nullptr;
        }
        records.push_back(std::move(rj));
    }
    j["records"] = std::move(records);
    j["means"] = {{"rouge_l", optional_json(report.mean_rouge_l)},
                  {"llm_judge", optional_json(report.mean_judge)},
                  {"human", optional_json(report.mean_human)}};
    return j;
}

// =============================================================================
// Pair files
// =============================================================================

std::vector<eval_pair> load_pairs(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw error(error_code::io_failure, "not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<eval_pair> out;
    for (const auto& f : files) {
        const auto j = nlohmann::json::parse(io::read_file(f), nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw error(error_code::parse_failure, f.string() + ": not a JSON object");
        try {
            out.push_back({j.value("id", f.stem().string()), j.at("generated").get<std::string>(),
                           j.at("reference").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw error(error_code::parse_failure, f.string() + ": " + e.what());
        }
    }
    return out;
}

eval_report evaluate_pairs(const std::vector<eval_pair>& pairs, const eval_options& options,
                           const gateway::completion_gateway* gateway, std::string method) {
    if (options.judge && gateway == nullptr) {
        throw error(error_code::invalid_argument, "judge metric needs a completion gateway");
    }
    std::vector<record_result> results;
    for (const auto& p : pairs) {
        record_result r;
        r.record_id = p.id;
        if (options.rouge) r.rouge = rouge_l(p.generated, p.reference, options.tokenizer);
        if (options.judge) {
            try {
                r.judge = judge_score(p.generated, p.reference, *gateway, options.judge_template);
            } catch (const error&) {
                r.judge.reset();
            }
        }
        results.push_back(std::move(r));
    }
    return aggregate_report(std::move(results), std::move(method));
}

}  // namespace lcds::evaluation
