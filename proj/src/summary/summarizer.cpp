#include "lcds/summary/summarizer.hpp"

#include "lcds/attribution/attribution.hpp"
#include "lcds/core/error.hpp"
#include "lcds/core/text.hpp"
#include "lcds/segmentation/sentence_splitter.hpp"
#include "lcds/source_map/resolver.hpp"

#include <future>

namespace lcds::summary {

namespace {

source_map::resolution whole_record(const ingest::unified_record& record) {
    source_map::resolution out;
    for (const auto& doc : record.documents) {
        for (const auto& field : doc.fields) {
            if (text::trim(field.content).empty()) continue;
            out.sources.push_back({{doc.type, field.field_name}, doc.doc_id, field});
        }
    }
    out.source_unavailable = out.sources.empty();
    return out;
}

std::string describe(const error& e) { return std::string(to_string(e.code())) + ": " + e.what(); }

}  // namespace

summary_field generate_field(const ingest::unified_record& record, const source_map::mapping_table& table,
                             const logic::department_config& department, source_map::ds_field field,
                             const gateway::completion_gateway& gateway, const generation_options& options) {
    summary_field out;
    out.field = field;
    try {
        const auto edits_it = options.edits.find(field);
        const auto plan = logic::plan_field(department.rules, field, &gateway,
                                            edits_it == options.edits.end() ? logic::rule_edits{} : edits_it->second);
        out.plan_id = plan.plan_id;
        out.diagnostics = plan.warnings;
        const bool knowledge = plan.has(logic::logic_type::knowledge);

        source_map::resolution resolved;
        if (!options.use_source_map) {
            resolved = whole_record(record);
        } else if (!table.entries_for(field).empty()) {
            resolved = source_map::resolve_field(table, record, field, options.multi_source);
        } else if (knowledge) {
            resolved.source_unavailable = true;
            out.diagnostics.emplace_back("no mapping entry; knowledge base only");
        } else {
            resolved = source_map::resolve_field(table, record, field, options.multi_source);
        }
        out.source_unavailable = resolved.source_unavailable;
        for (const auto& s : resolved.sources) out.source_fields.push_back(s.doc_id + "#" + s.field.field_name);

        if (resolved.source_unavailable && !knowledge) {
            out.diagnostics.emplace_back("SourceUnavailable: no listed source is present in the record");
            return out;
        }

        const auto hits = knowledge ? logic::apply_knowledge(record, department.knowledge) : std::vector<std::string>{};
        gateway::completion_request request;
        request.prompt = logic::orchestrate(plan, resolved.sources, hits);
        request.max_tokens = options.max_tokens;
        request.request_id = plan.plan_id;
        const auto response = gateway.complete(std::move(request));

        for (auto& s : segmentation::split_sentences(response.text)) {
            out.sentences.push_back({{}, std::move(s), sentence_kind::generated, {}});
        }
        if (options.knowledge == knowledge_merge::append) {
            for (const auto& hit : hits) {
                if (text::contains_ignoring_whitespace(response.text, hit)) continue;
                for (auto& s : segmentation::split_sentences(hit)) {
                    out.sentences.push_back({{}, std::move(s), sentence_kind::knowledge, {}});
                }
            }
        }
        refresh_text(out);
    } catch (const error& e) {
        out.error = describe(e);
        out.sentences.clear();
        out.text.clear();
    }
    return out;
}

std::string summary_id_for(const ingest::unified_record& record) {
    return record.patient_id + "-" + record.admission_id;
}

discharge_summary generate_summary(const ingest::unified_record& record, const source_map::mapping_table& table,
                                   const logic::department_config& department,
                                   const gateway::completion_gateway& gateway, const generation_options& options) {
    discharge_summary out;
    out.summary_id = summary_id_for(record);
    out.department = department.rules.department;
    out.status = summary_status::silver;

    if (options.parallel) {
        std::vector<std::future<summary_field>> pending;
        for (const auto field : source_map::all_ds_fields) {
            pending.push_back(std::async(std::launch::async, [&, field] {
                return generate_field(record, table, department, field, gateway, options);
            }));
        }
        for (auto& p : pending) out.fields.push_back(p.get());
    } else {
        for (const auto field : source_map::all_ds_fields) {
            out.fields.push_back(generate_field(record, table, department, field, gateway, options));
        }
    }

    std::string failures;
    std::size_t failed = 0;
    for (const auto& f : out.fields) {
        if (!f.error) continue;
        ++failed;
        failures += "\n  " + std::string(source_map::to_string(f.field)) + ": " + *f.error;
    }
    if (failed == out.fields.size()) throw error(error_code::generation_failed, "GenerationFailed:" + failures);
    return attribution::assign_ids(std::move(out));
}

}  // namespace lcds::summary
