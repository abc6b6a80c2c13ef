#include "lcds/attribution/attribution.hpp"

#include "lcds/core/error.hpp"
#include "lcds/gateway/prompt_format.hpp"
#include "lcds/retrieval/bm25.hpp"
#include "lcds/retrieval/tokenizer.hpp"

#include <algorithm>
#include <set>

namespace lcds::attribution {

namespace prompt = gateway::prompt;

std::string_view to_string(attribution_method method) noexcept {
    return method == attribution_method::provider ? "provider" : "lexical";
}

std::string_view to_string(attribution_scope scope) noexcept {
    return scope == attribution_scope::full ? "full" : "resolved";
}

attribution_scope parse_scope(std::string_view name) {
    if (name == "resolved") return attribution_scope::resolved;
    if (name == "full") return attribution_scope::full;
    throw error(error_code::invalid_argument, "unknown attribution scope '" + std::string(name) + "'");
}

attribution_method parse_method(std::string_view name) {
    if (name == "provider") return attribution_method::provider;
    if (name == "lexical") return attribution_method::lexical;
    throw error(error_code::invalid_argument, "unknown attribution mode '" + std::string(name) + "'");
}

// =============================================================================
// Identifiers
// =============================================================================

summary::discharge_summary assign_ids(summary::discharge_summary summary) {
    for (auto& f : summary.fields) {
        for (std::size_t i = 0; i < f.sentences.size(); ++i) {
            f.sentences[i].sid = ingest::sentence_id{summary.summary_id, std::string(source_map::to_string(f.field)), i}.str();
        }
    }
    return summary;
}

// =============================================================================
// Single sentences
// =============================================================================

namespace {

std::vector<std::pair<std::string, double>> lexical_scores(std::string_view gen_sentence,
                                                           const std::vector<candidate>& candidates,
                                                           double threshold) {
    if (candidates.empty()) return {};
    std::vector<std::pair<std::string, std::string>> docs;
    docs.reserve(candidates.size());
    std::set<std::string> seen;
    for (const auto& c : candidates) {
        if (seen.insert(c.sid).second) docs.emplace_back(c.sid, c.text);
    }
    const auto index = retrieval::bm25_index::build(docs);
    std::vector<std::pair<std::string, double>> out;
    for (auto& r : index.rank_fields(retrieval::tokenize(gen_sentence), index.ids(), threshold)) {
        out.emplace_back(std::move(r.id), r.score);
    }
    return out;
}

}  // namespace

std::vector<std::pair<std::string, double>> attribute_lexical(std::string_view gen_sentence,
                                                              const std::vector<candidate>& candidates,
                                                              double threshold) {
    return lexical_scores(gen_sentence, candidates, threshold);
}

std::string attribution_prompt(std::string_view gen_sentence, const std::vector<candidate>& candidates) {
    std::string out = prompt::heading(prompt::role);
    out += "Find the candidate sentences from the medical record that support the generated sentence.\n\n";
    out += prompt::heading(prompt::candidates);
    for (const auto& c : candidates) out += prompt::sentence_line(c.sid, c.text);
    out += "\n" + prompt::heading(prompt::generated_sentence);
    out += std::string(gen_sentence) + "\n\n";
    out += prompt::heading(prompt::output_format);
    out += "Return only the identifiers of the supporting candidates as a bracketed, comma-separated list, "
           "for example [D1#history#0, D2#findings#3]. Return [] when none supports it.\n";
    return out;
}

sentence_attribution attribute_sentence(std::string_view gen_sentence, const std::vector<candidate>& candidates,
                                        const gateway::completion_gateway& gateway, double threshold) {
    sentence_attribution out;
    if (candidates.empty()) return out;

    auto fall_back = [&](const std::string& why) {
        out.diagnostics.push_back(why + "; lexical attribution used");
        out.method = attribution_method::lexical;
        out.sources.clear();
        const auto scored = lexical_scores(gen_sentence, candidates, threshold);
        for (const auto& [sid, score] : scored) out.sources.push_back(sid);
        out.confidence = scored.empty() ? 0.0 : scored.front().second;
        return out;
    };

    gateway::completion_request request;
    request.prompt = attribution_prompt(gen_sentence, candidates);
    request.max_tokens = 256;
    std::vector<std::string> returned;
    try {
        returned = gateway.complete_identifiers(std::move(request));
    } catch (const error& e) {
        return fall_back(e.what());
    }

    std::set<std::string> pool;
    for (const auto& c : candidates) pool.insert(c.sid);
    std::set<std::string> kept;
    for (auto& sid : returned) {
        if (pool.count(sid) == 0) {
            ++out.dropped_ids;
            continue;
        }
        if (kept.insert(sid).second) out.sources.push_back(std::move(sid));
    }
    if (out.dropped_ids > 0) {
        out.diagnostics.push_back(std::to_string(out.dropped_ids) + " identifier(s) outside the candidate pool dropped");
    }

    out.method = attribution_method::provider;
    if (!out.sources.empty()) {
        for (const auto& [sid, score] : lexical_scores(gen_sentence, candidates, 0.0)) {
            if (kept.count(sid) != 0) out.confidence = std::max(out.confidence, score);
        }
    }
    return out;
}

// =============================================================================
// Whole summaries
// =============================================================================

const attribution_entry* attribution_map::find(std::string_view gen_sid) const {
    for (const auto& e : entries) {
        if (e.gen_sid == gen_sid) return &e;
    }
    return nullptr;
}

std::vector<candidate> candidate_pool(const summary::summary_field& field, const ingest::unified_record& record,
                                      attribution_scope scope) {
    std::vector<candidate> out;
    const std::set<std::string> allowed(field.source_fields.begin(), field.source_fields.end());
    for (const auto& doc : record.documents) {
        for (const auto& f : doc.fields) {
            if (scope == attribution_scope::resolved && allowed.count(ingest::field_key(doc, f)) == 0) continue;
            for (const auto& s : f.sentences) out.push_back({s.sid, s.text});
        }
    }
    return out;
}

attribution_map build_attribution_map(summary::discharge_summary& summary, const ingest::unified_record& record,
                                      const gateway::completion_gateway* gateway,
                                      const attribution_options& options) {
    attribution_map map;
    map.summary_id = summary.summary_id;
    const bool use_provider = options.mode == attribution_method::provider && gateway != nullptr;

    for (auto& field : summary.fields) {
        const auto pool = candidate_pool(field, record, options.scope);
        for (auto& sentence : field.sentences) {
            attribution_entry entry;
            entry.gen_sid = sentence.sid;
            if (sentence.kind == summary::sentence_kind::knowledge) {
                entry.method = attribution_method::lexical;
            } else if (use_provider) {
                auto result = attribute_sentence(sentence.text, pool, *gateway, options.threshold);
                map.dropped_ids += result.dropped_ids;
                entry.sources = std::move(result.sources);
                entry.method = result.method;
                entry.confidence = result.confidence;
            } else {
                const auto scored = attribute_lexical(sentence.text, pool, options.threshold);
                for (const auto& [sid, score] : scored) entry.sources.push_back(sid);
                entry.method = attribution_method::lexical;
                entry.confidence = scored.empty() ? 0.0 : scored.front().second;
            }
            // The pool comes from the record, but check anyway: a dangling id must never leave here.
            std::erase_if(entry.sources, [&](const std::string& sid) { return record.find_sentence(sid) == nullptr; });
            sentence.sources = entry.sources;
            map.entries.push_back(std::move(entry));
        }
    }
    return map;
}

std::vector<std::string> dangling_ids(const attribution_map& map, const ingest::unified_record& record) {
    std::vector<std::string> out;
    for (const auto& e : map.entries) {
        for (const auto& sid : e.sources) {
            if (!ingest::sentence_id::parse(sid) || record.find_sentence(sid) == nullptr) out.push_back(sid);
        }
    }
    return out;
}

// =============================================================================
// JSON
// =============================================================================

nlohmann::ordered_json to_json(const attribution_map& map) {
    nlohmann::ordered_json j;
    j["summary_id"] = map.summary_id;
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : map.entries) {
        nlohmann::ordered_json ej;
        ej["gen_sid"] = e.gen_sid;
        ej["sources"] = e.sources;
        ej["method"] = to_string(e.method);
        ej["confidence"] = e.confidence;
        entries.push_back(std::move(ej));
    }
    j["entries"] = std::move(entries);
    return j;
}

attribution_map attribution_from_json(const nlohmann::json& j) {
    try {
        attribution_map map;
        map.summary_id = j.at("summary_id").get<std::string>();
        for (const auto& ej : j.at("entries")) {
            attribution_entry e;
            e.gen_sid = ej.at("gen_sid").get<std::string>();
            e.sources = ej.at("sources").get<std::vector<std::string>>();
            e.method = parse_method(ej.at("method").get<std::string>());
            e.confidence = ej.at("confidence").get<double>();
            if (e.confidence < 0.0 || e.confidence > 1.0) throw error(error_code::parse_failure, "confidence out of range");
            map.entries.push_back(std::move(e));
        }
        return map;
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::parse_failure, std::string("malformed attribution map: ") + e.what());
    } catch (const error& e) {
        if (e.code() == error_code::parse_failure) throw;
        throw error(error_code::parse_failure, std::string("malformed attribution map: ") + e.what());
    }
}

std::string serialize(const attribution_map& map) {
    return to_json(map).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

attribution_map parse_attribution(std::string_view text) {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw error(error_code::parse_failure, "attribution map is not valid JSON");
    return attribution_from_json(j);
}

}  // namespace lcds::attribution
