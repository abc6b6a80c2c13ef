#include "lcds/retrieval/bm25.hpp"

#include "lcds/core/error.hpp"
#include "lcds/retrieval/tokenizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lcds::retrieval {

namespace {

std::map<std::string, std::size_t> count_terms(const std::vector<std::string>& tokens) {
    std::map<std::string, std::size_t> counts;
    for (const auto& t : tokens) ++counts[t];
    return counts;
}

}  // namespace

// =============================================================================
// Construction
// =============================================================================

bm25_index bm25_index::build(const std::vector<std::pair<std::string, std::string>>& docs, bm25_params params) {
    std::vector<std::pair<std::string, std::vector<std::string>>> tokenized;
    tokenized.reserve(docs.size());
    for (const auto& [id, body] : docs) tokenized.emplace_back(id, tokenize(body));
    return build_from_tokens(tokenized, params);
}

bm25_index bm25_index::build_from_tokens(const std::vector<std::pair<std::string, std::vector<std::string>>>& docs,
                                         bm25_params params) {
    if (params.k1 < 0.0 || params.b < 0.0 || params.b > 1.0) {
        throw error(error_code::invalid_argument, "bm25 parameters out of range");
    }
    bm25_index index;
    index.params_ = params;
    std::size_t total_length = 0;
    for (const auto& [id, tokens] : docs) {
        if (index.docs_.count(id) != 0) throw error(error_code::duplicate_id, "DuplicateId: " + id);
        doc_stats stats;
        stats.length = tokens.size();
        for (const auto& t : tokens) ++stats.tf[t];
        for (const auto& [term, tf] : stats.tf) ++index.df_[term];
        total_length += stats.length;
        index.ids_.push_back(id);
        index.docs_.emplace(id, std::move(stats));
    }
    if (!docs.empty()) index.avg_length_ = static_cast<double>(total_length) / static_cast<double>(docs.size());
    return index;
}

// =============================================================================
// Statistics
// =============================================================================

bool bm25_index::contains(std::string_view id) const { return docs_.find(id) != docs_.end(); }

const bm25_index::doc_stats& bm25_index::stats(std::string_view id) const {
    const auto it = docs_.find(id);
    if (it == docs_.end()) throw error(error_code::unknown_doc, "UnknownDoc: " + std::string(id));
    return it->second;
}

std::size_t bm25_index::document_frequency(const std::string& term) const {
    const auto it = df_.find(term);
    return it == df_.end() ? 0 : it->second;
}

std::size_t bm25_index::document_length(std::string_view id) const { return stats(id).length; }

std::size_t bm25_index::term_frequency(std::string_view id, const std::string& term) const {
    const auto& s = stats(id);
    const auto it = s.tf.find(term);
    return it == s.tf.end() ? 0 : it->second;
}

double bm25_index::idf(const std::string& term) const {
    const auto n = static_cast<double>(ids_.size());
    const auto df = static_cast<double>(document_frequency(term));
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

// =============================================================================
// Scoring
// =============================================================================

double bm25_index::term_weight(const std::string& term, std::size_t tf, std::size_t length) const {
    if (tf == 0) return 0.0;
    const double relative = avg_length_ > 0.0 ? static_cast<double>(length) / avg_length_ : 1.0;
    const double f = static_cast<double>(tf);
    return idf(term) * (f * (params_.k1 + 1.0)) / (f + params_.k1 * (1.0 - params_.b + params_.b * relative));
}

double bm25_index::raw_score(const std::vector<std::string>& query, std::string_view id) const {
    const auto& s = stats(id);
    double total = 0.0;
    for (const auto& [term, count] : count_terms(query)) {
        const auto it = s.tf.find(term);
        if (it != s.tf.end()) total += term_weight(term, it->second, s.length);
    }
    return total;
}

double bm25_index::self_score(const std::vector<std::string>& query) const {
    double total = 0.0;
    for (const auto& [term, count] : count_terms(query)) total += term_weight(term, count, query.size());
    return total;
}

double bm25_index::normalized_score(const std::vector<std::string>& query, std::string_view id) const {
    const double raw = raw_score(query, id);
    const double self = self_score(query);
    if (self <= 0.0) return 0.0;
    return std::clamp(raw / self, 0.0, 1.0);
}

std::vector<scored_id> bm25_index::rank_fields(const std::vector<std::string>& query,
                                               const std::vector<std::string>& candidate_ids,
                                               double threshold) const {
    std::vector<scored_id> scores;
    std::set<std::string, std::less<>> seen;
    for (const auto& id : candidate_ids) {
        if (!contains(id) || !seen.insert(id).second) continue;
        scores.push_back({id, normalized_score(query, id)});
    }
    return rank_scored(std::move(scores), threshold);
}

std::vector<scored_id> rank_scored(std::vector<scored_id> scores, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw error(error_code::invalid_argument, "threshold must lie in [0, 1]");
    }
    std::erase_if(scores, [&](const scored_id& s) { return !(s.score > threshold); });
    std::sort(scores.begin(), scores.end(), [](const scored_id& a, const scored_id& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    return scores;
}

}  // namespace lcds::retrieval
