#include "lcds/source_map/builder.hpp"

#include "lcds/core/error.hpp"
#include "lcds/core/io.hpp"
#include "lcds/core/text.hpp"
#include "lcds/retrieval/tokenizer.hpp"

#include <algorithm>
#include <set>

namespace lcds::source_map {

// =============================================================================
// Short fields
// =============================================================================

std::vector<std::string> reference_keywords(std::string_view ground_truth) {
    static const std::u32string delimiters = U"。！？!?；;，,、\n";
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        auto kw = text::strip_whitespace(current);
        // Latin clauses may end in a full stop.
        while (!kw.empty() && kw.back() == '.') kw.pop_back();
        current.clear();
        if (text::decode(kw).size() < 2) return;
        if (std::find(out.begin(), out.end(), kw) == out.end()) out.push_back(std::move(kw));
    };
    for (const auto& u : text::decode(ground_truth)) {
        if (delimiters.find(u.cp) != std::u32string::npos) {
            flush();
        } else {
            current += ground_truth.substr(u.offset, u.length);
        }
    }
    flush();
    return out;
}

std::vector<source_ref> locate_short_field(const ingest::unified_record& record, std::string_view ground_truth) {
    const auto keywords = reference_keywords(ground_truth);
    std::vector<source_ref> out;
    if (keywords.empty()) return out;
    for (const auto& doc : record.documents) {
        for (const auto& field : doc.fields) {
            const bool hit = std::any_of(keywords.begin(), keywords.end(), [&](const std::string& kw) {
                return text::contains_ignoring_whitespace(field.content, kw);
            });
            if (!hit) continue;
            source_ref ref{doc.type, field.field_name};
            if (std::find(out.begin(), out.end(), ref) == out.end()) out.push_back(std::move(ref));
        }
    }
    return out;
}

// =============================================================================
// Long fields
// =============================================================================

std::vector<long_field_hit> locate_long_field(const ingest::unified_record& record, std::string_view ds_text,
                                              const gateway::completion_gateway* gateway,
                                              const locate_options& options, std::vector<std::string>* warnings) {
    const auto segments = segmentation::semantic_segment_text(ds_text, gateway, options.segmenter, warnings);

    std::vector<std::pair<std::string, std::string>> corpus;
    std::map<std::string, source_ref> by_key;
    for (const auto& doc : record.documents) {
        for (const auto& field : doc.fields) {
            auto key = ingest::field_key(doc, field);
            if (by_key.count(key) != 0) continue;
            by_key.emplace(key, source_ref{doc.type, field.field_name});
            corpus.emplace_back(std::move(key), field.content);
        }
    }
    const auto index = retrieval::bm25_index::build(corpus, options.bm25);

    std::vector<long_field_hit> hits;
    for (const auto& seg : segments) {
        const auto query = retrieval::tokenize(seg.text);
        for (const auto& ranked : index.rank_fields(query, index.ids(), options.threshold)) {
            hits.push_back({seg.label, by_key.at(ranked.id), ranked.score});
        }
    }
    return hits;
}

// =============================================================================
// Priorities
// =============================================================================

std::vector<ranked_source> compute_priorities(const std::vector<observation>& observations) {
    if (observations.empty()) throw error(error_code::empty_observations, "EmptyObservations");

    std::set<std::string> records;
    std::map<source_ref, std::map<std::string, double>> best;
    for (const auto& o : observations) {
        records.insert(o.record_id);
        auto [it, inserted] = best[o.source].try_emplace(o.record_id, o.similarity);
        if (!inserted) it->second = std::max(it->second, o.similarity);
    }

    const auto total = static_cast<std::int64_t>(records.size());
    std::vector<ranked_source> out;
    for (const auto& [source, per_record] : best) {
        double sum = 0.0;
        for (const auto& [record_id, sim] : per_record) sum += sim;
        const auto covered = static_cast<std::int64_t>(per_record.size());
        out.push_back({source, {covered, total}, sum / static_cast<double>(covered)});
    }
    std::sort(out.begin(), out.end(), [](const ranked_source& a, const ranked_source& b) {
        if (a.priority != b.priority) return a.priority > b.priority;
        if (a.mean_similarity != b.mean_similarity) return a.mean_similarity > b.mean_similarity;
        return a.source < b.source;
    });
    return out;
}

// =============================================================================
// Table construction
// =============================================================================

build_result build_mapping_table(const std::vector<reference_case>& corpus, const std::string& department,
                                 const gateway::completion_gateway* gateway, const locate_options& options,
                                 int version) {
    if (corpus.empty()) throw error(error_code::empty_corpus, "EmptyCorpus");

    build_result result;
    std::map<std::pair<ds_field, std::optional<std::string>>, std::vector<observation>> grouped;

    for (const auto& c : corpus) {
        for (const auto& [field, reference] : c.reference) {
            if (text::trim(reference).empty()) continue;
            if (is_short_field(field)) {
                for (auto& ref : locate_short_field(c.record, reference)) {
                    grouped[{field, std::nullopt}].push_back({c.case_id, std::nullopt, std::move(ref), 1.0});
                }
                continue;
            }
            std::vector<std::string> seg_warnings;
            for (auto& hit : locate_long_field(c.record, reference, gateway, options, &seg_warnings)) {
                grouped[{field, hit.segment_label}].push_back(
                    {c.case_id, hit.segment_label, std::move(hit.source), hit.score});
            }
            for (auto& w : seg_warnings) {
                result.warnings.push_back(c.case_id + "/" + std::string(to_string(field)) + ": " + w);
            }
        }
    }

    result.table.department = department;
    result.table.version = version;
    for (const auto field : all_ds_fields) {
        bool any = false;
        for (const auto& [key, observations] : grouped) {
            if (key.first != field) continue;
            any = true;
            result.table.entries.push_back({field, key.second, compute_priorities(observations)});
        }
        if (!any) {
            result.table.entries.push_back({field, std::nullopt, {}});
            result.warnings.push_back(std::string(to_string(field)) + ": no source localized in any case");
        }
    }
    return result;
}

// =============================================================================
// Corpus files
// =============================================================================

std::map<ds_field, std::string> reference_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw error(error_code::parse_failure, "reference must be an object");
    std::map<ds_field, std::string> out;
    for (const auto& [key, value] : j.items()) {
        const auto field = try_parse_ds_field(key);
        if (!field) throw error(error_code::parse_failure, "unknown reference field '" + key + "'");
        if (!value.is_string()) throw error(error_code::parse_failure, "reference '" + key + "' must be a string");
        out[*field] = value.get<std::string>();
    }
    return out;
}

std::vector<reference_case> load_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw error(error_code::io_failure, "not a directory: " + dir.string());
    std::vector<std::filesystem::path> cases;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_directory()) cases.push_back(entry.path());
    }
    std::sort(cases.begin(), cases.end());
    std::vector<reference_case> out;
    for (const auto& c : cases) {
        reference_case rc;
        rc.case_id = c.filename().string();
        rc.record = ingest::parse_record(io::read_file(c / "record.json"));
        const auto ref = nlohmann::json::parse(io::read_file(c / "reference.json"), nullptr, false);
        if (ref.is_discarded()) throw error(error_code::parse_failure, rc.case_id + ": reference.json is not JSON");
        rc.reference = reference_from_json(ref);
        out.push_back(std::move(rc));
    }
    return out;
}

}  // namespace lcds::source_map
