#include "lcds/source_map/resolver.hpp"

#include "lcds/core/error.hpp"
#include "lcds/core/text.hpp"

#include <algorithm>

namespace lcds::source_map {

namespace {

std::vector<resolved_source> present_fields(const ingest::unified_record& record, const source_ref& ref) {
    std::vector<resolved_source> out;
    for (const auto& doc : record.documents) {
        if (doc.type != ref.type) continue;
        const auto* field = doc.find_field(ref.field_name);
        if (field == nullptr || text::trim(field->content).empty()) continue;
        out.push_back({ref, doc.doc_id, *field});
    }
    return out;
}

std::string label_of(const std::optional<std::string>& label) { return label ? "/" + *label : std::string(); }

}  // namespace

resolution resolve_sources(const mapping_table& table, const ingest::unified_record& record, ds_field field,
                           const std::optional<std::string>& segment_label, bool multi_source) {
    const auto* entry = table.find(field, segment_label);
    if (entry == nullptr) {
        throw error(error_code::no_entry, "NoEntry: " + std::string(to_string(field)) + label_of(segment_label));
    }
    resolution out;
    for (const auto& ranked : entry->sources) {
        auto found = present_fields(record, ranked.source);
        if (found.empty()) continue;
        std::move(found.begin(), found.end(), std::back_inserter(out.sources));
        if (!multi_source) break;
    }
    out.source_unavailable = out.sources.empty();
    return out;
}

resolution resolve_field(const mapping_table& table, const ingest::unified_record& record, ds_field field,
                         bool multi_source) {
    const auto entries = table.entries_for(field);
    if (entries.empty()) throw error(error_code::no_entry, "NoEntry: " + std::string(to_string(field)));
    resolution out;
    for (const auto* entry : entries) {
        for (auto& r : resolve_sources(table, record, field, entry->segment_label, multi_source).sources) {
            const bool seen = std::any_of(out.sources.begin(), out.sources.end(), [&](const resolved_source& s) {
                return s.doc_id == r.doc_id && s.field.field_name == r.field.field_name;
            });
            if (!seen) out.sources.push_back(std::move(r));
        }
    }
    // Record order keeps multi-entry fields (course of treatment) chronological.
    auto position = [&](const resolved_source& s) {
        std::size_t i = 0;
        for (const auto& doc : record.documents) {
            for (const auto& f : doc.fields) {
                if (doc.doc_id == s.doc_id && f.field_name == s.field.field_name) return i;
                ++i;
            }
        }
        return i;
    };
    std::stable_sort(out.sources.begin(), out.sources.end(),
                     [&](const resolved_source& a, const resolved_source& b) { return position(a) < position(b); });
    out.source_unavailable = out.sources.empty();
    return out;
}

}  // namespace lcds::source_map
