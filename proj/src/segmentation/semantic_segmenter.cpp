#include "lcds/segmentation/semantic_segmenter.hpp"

#include "lcds/core/text.hpp"
#include "lcds/gateway/prompt_format.hpp"

#include <algorithm>

namespace lcds::segmentation {

// =============================================================================
// Lexicon
// =============================================================================

segment_lexicon segment_lexicon::defaults() {
    segment_lexicon lex;
    lex.labels = {
        {"Surgery", {"手术", "切除", "麻醉", "术中", "术后", "surgery", "surgical", "excision", "resection",
                     "mastectomy", "operation"}},
        {"Chemotherapy", {"化疗", "化学治疗", "方案", "紫杉", "表柔比星", "环磷酰胺", "chemotherapy", "chemo",
                          "cycle of"}},
        {"Pathology", {"病理", "活检", "免疫组化", "pathology", "pathological", "biopsy", "immunohistochemistry"}},
        {"Discharge Details", {"出院", "discharge", "discharged"}},
    };
    return lex;
}

segment_lexicon segment_lexicon::from_json(const nlohmann::json& j) {
    segment_lexicon lex;
    try {
        for (const auto& entry : j.at("labels")) {
            lex.labels.emplace_back(entry.at("label").get<std::string>(),
                                    entry.at("cues").get<std::vector<std::string>>());
        }
        if (j.contains("default_label")) lex.default_label = j["default_label"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::parse_failure, std::string("malformed segment lexicon: ") + e.what());
    }
    return lex;
}

nlohmann::ordered_json segment_lexicon::to_json() const {
    nlohmann::ordered_json j;
    auto labels_json = nlohmann::ordered_json::array();
    for (const auto& [label, cues] : labels) {
        nlohmann::ordered_json e;
        e["label"] = label;
        e["cues"] = cues;
        labels_json.push_back(std::move(e));
    }
    j["labels"] = std::move(labels_json);
    j["default_label"] = default_label;
    return j;
}

std::string segment_lexicon::classify(std::string_view sentence) const {
    const auto lowered = text::to_lower_ascii(sentence);
    std::string best = default_label;
    std::size_t best_hits = 0;
    for (const auto& [label, cues] : labels) {
        std::size_t hits = 0;
        for (const auto& cue : cues) {
            if (!cue.empty() && lowered.find(text::to_lower_ascii(cue)) != std::string::npos) ++hits;
        }
        if (hits > best_hits) {
            best_hits = hits;
            best = label;
        }
    }
    return best;
}

std::string segmenter_options::default_prompt_template() {
    return "You split the course-of-treatment text of a discharge summary into labelled parts.\n"
           "Labels: {labels}\n"
           "Copy every part exactly as it appears in the input. Do not rewrite, merge or invent text.\n"
           "Reply with a JSON object mapping each label to its text. Omit labels with no content.\n"
           "\n"
           "Example input: 患者行右乳肿物切除术。术后予TC方案化疗一周期。病理示浸润性导管癌。患者今日出院。\n"
           "Example output: {\"Surgery\": \"患者行右乳肿物切除术。\", \"Chemotherapy\": \"术后予TC方案化疗一周期。\", "
           "\"Pathology\": \"病理示浸润性导管癌。\", \"Discharge Details\": \"患者今日出院。\"}\n"
           "\n"
           "### Input Text\n"
           "{text}\n";
}

// =============================================================================
// Alignment
// =============================================================================

std::optional<byte_span> find_ignoring_whitespace(std::string_view haystack, std::string_view needle,
                                                  std::size_t from) {
    const auto stripped_needle = text::strip_whitespace(needle);
    if (stripped_needle.empty()) return std::nullopt;
    const auto hay = text::strip_with_offsets(haystack);
    // First stripped byte whose source offset is at or after `from`.
    const auto first = static_cast<std::size_t>(
        std::lower_bound(hay.offsets.begin(), hay.offsets.end() - 1, from) - hay.offsets.begin());
    const auto at = hay.text.find(stripped_needle, first);
    if (at == std::string::npos) return std::nullopt;
    return byte_span{hay.offsets[at], hay.offsets[at + stripped_needle.size() - 1] + 1};
}

std::vector<semantic_segment> align_segments(const std::vector<raw_segment>& segments, std::string_view field_text,
                                             std::vector<std::string>* warnings) {
    auto warn = [&](std::string msg) {
        if (warnings != nullptr) warnings->push_back(std::move(msg));
    };

    std::vector<semantic_segment> placed;
    std::size_t cursor = 0;
    for (const auto& seg : segments) {
        const auto needle = text::trim(seg.text);
        if (needle.empty()) {
            warn("segment '" + seg.label + "' is empty; dropped");
            continue;
        }
        std::optional<byte_span> span;
        for (const std::size_t from : {cursor, std::size_t{0}}) {
            if (const auto at = field_text.find(needle, from); at != std::string_view::npos) {
                span = byte_span{at, at + needle.size()};
                break;
            }
            if ((span = find_ignoring_whitespace(field_text, needle, from))) break;
        }
        if (!span) {
            warn("segment '" + seg.label + "' not found in input; dropped");
            continue;
        }
        placed.push_back({seg.label, std::string(field_text.substr(span->start, span->size())), *span});
        cursor = span->end;
    }

    std::stable_sort(placed.begin(), placed.end(),
                     [](const auto& a, const auto& b) { return a.span.start < b.span.start; });
    std::vector<semantic_segment> out;
    for (auto& seg : placed) {
        if (!out.empty() && seg.span.start < out.back().span.end) {
            warn("segment '" + seg.label + "' overlaps '" + out.back().label + "'; dropped");
            continue;
        }
        out.push_back(std::move(seg));
    }
    return out;
}

// =============================================================================
// Segmentation
// =============================================================================

namespace {

/// Merges runs of sentences sharing a label into segments.
std::vector<semantic_segment> merge_runs(std::string_view field_text, const std::vector<byte_span>& sentences,
                                         const std::vector<std::string>& labels) {
    std::vector<semantic_segment> out;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (!out.empty() && out.back().label == labels[i]) {
            out.back().span.end = sentences[i].end;
        } else {
            out.push_back({labels[i], {}, sentences[i]});
        }
    }
    for (auto& seg : out) seg.text = std::string(field_text.substr(seg.span.start, seg.span.size()));
    return out;
}

/// Gives each sentence the label of the aligned segment it overlaps most.
std::vector<semantic_segment> snap_to_sentences(std::string_view field_text,
                                                const std::vector<semantic_segment>& aligned,
                                                const std::string& default_label) {
    const auto sentences = sentence_spans(field_text);
    std::vector<std::string> labels;
    for (const auto& s : sentences) {
        std::size_t best_overlap = 0;
        std::string label = labels.empty() ? default_label : labels.back();
        for (const auto& seg : aligned) {
            const auto lo = std::max(s.start, seg.span.start);
            const auto hi = std::min(s.end, seg.span.end);
            if (hi > lo && hi - lo > best_overlap) {
                best_overlap = hi - lo;
                label = seg.label;
            }
        }
        labels.push_back(std::move(label));
    }
    return merge_runs(field_text, sentences, labels);
}

}  // namespace

std::vector<semantic_segment> lexicon_segment(std::string_view field_text, const segment_lexicon& lexicon) {
    const auto sentences = sentence_spans(field_text);
    std::vector<std::string> labels;
    labels.reserve(sentences.size());
    for (const auto& s : sentences) labels.push_back(lexicon.classify(field_text.substr(s.start, s.size())));
    return merge_runs(field_text, sentences, labels);
}

std::vector<semantic_segment> semantic_segment_text(std::string_view field_text,
                                                    const gateway::completion_gateway* gateway,
                                                    const segmenter_options& options,
                                                    std::vector<std::string>* warnings) {
    if (text::trim(field_text).empty()) {
        throw error(error_code::invalid_argument, "semantic segmentation needs non-empty text");
    }
    if (gateway == nullptr || !gateway->semantic_capable()) {
        return lexicon_segment(field_text, options.lexicon);
    }

    std::string labels;
    for (const auto& [label, cues] : options.lexicon.labels) {
        if (!labels.empty()) labels += ", ";
        labels += label;
    }
    std::string prompt_text = options.prompt_template;
    auto fill = [&](std::string_view key, std::string_view value) {
        if (const auto at = prompt_text.find(key); at != std::string::npos) prompt_text.replace(at, key.size(), value);
    };
    fill("{labels}", labels);
    fill("{text}", field_text);

    auto reject = [&](const std::string& why) -> std::vector<semantic_segment> {
        if (!options.fallback_on_reject) throw error(error_code::segmentation_rejected, "SegmentationRejected: " + why);
        if (warnings != nullptr) warnings->push_back("SegmentationRejected: " + why + "; lexicon fallback used");
        return lexicon_segment(field_text, options.lexicon);
    };

    gateway::completion_request request;
    request.prompt = std::move(prompt_text);
    request.request_id = "segment";
    gateway::label_segments proposed;
    try {
        proposed = gateway->complete_segments(std::move(request));
    } catch (const error& e) {
        if (e.code() != error_code::malformed_structured_output) throw;
        return reject(e.what());
    }

    std::vector<raw_segment> raw;
    for (auto& [label, text_part] : proposed) raw.push_back({label, text_part});
    std::vector<std::string> align_warnings;
    const auto aligned = align_segments(raw, field_text, &align_warnings);
    if (aligned.empty() || !align_warnings.empty()) {
        return reject(align_warnings.empty() ? "no segments proposed" : align_warnings.front());
    }
    return snap_to_sentences(field_text, aligned, options.lexicon.default_label);
}

}  // namespace lcds::segmentation
