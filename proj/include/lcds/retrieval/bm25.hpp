/**
 * @file bm25.hpp
 * @brief Okapi BM25 over record fields with self-normalized similarity
 *
 * Raw BM25 scores are unbounded, so similarity is reported relative to the
 * score the query would earn against itself under the same corpus
 * statistics. A document whose text equals the query scores exactly 1.
 */

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lcds::retrieval {

struct bm25_params {
    double k1 = 1.5;
    double b = 0.75;
};

struct scored_id {
    std::string id;
    double score = 0.0;

    friend bool operator==(const scored_id&, const scored_id&) = default;
};

class bm25_index {
public:
    bm25_index() = default;

    /// Tokenizes each text with retrieval::tokenize. @throws lcds::error duplicate_id
    [[nodiscard]] static bm25_index build(const std::vector<std::pair<std::string, std::string>>& docs,
                                          bm25_params params = {});

    /// @throws lcds::error duplicate_id
    [[nodiscard]] static bm25_index build_from_tokens(
        const std::vector<std::pair<std::string, std::vector<std::string>>>& docs, bm25_params params = {});

    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] bool empty() const noexcept { return ids_.empty(); }
    [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
    [[nodiscard]] bool contains(std::string_view id) const;
    [[nodiscard]] const bm25_params& params() const noexcept { return params_; }

    [[nodiscard]] double average_length() const noexcept { return avg_length_; }
    [[nodiscard]] std::size_t document_frequency(const std::string& term) const;
    /// @throws lcds::error unknown_doc
    [[nodiscard]] std::size_t document_length(std::string_view id) const;
    /// @throws lcds::error unknown_doc
    [[nodiscard]] std::size_t term_frequency(std::string_view id, const std::string& term) const;

    /// ln((N - df + 0.5) / (df + 0.5) + 1); always positive.
    [[nodiscard]] double idf(const std::string& term) const;

    /**
     * @brief BM25 of a document for the distinct terms of a query
     *
     * Repeated query terms count once.
     * @throws lcds::error unknown_doc
     */
    [[nodiscard]] double raw_score(const std::vector<std::string>& query, std::string_view id) const;

    /// Score of the query against itself taken as a document of this corpus.
    [[nodiscard]] double self_score(const std::vector<std::string>& query) const;

    /// raw_score / self_score clamped to [0, 1]; 0 for an empty query.
    [[nodiscard]] double normalized_score(const std::vector<std::string>& query, std::string_view id) const;

    /**
     * @brief Candidates scoring strictly above threshold, best first
     *
     * Unknown candidate ids are skipped. Ties are ordered by id.
     * @throws lcds::error invalid_argument when threshold is outside [0, 1]
     */
    [[nodiscard]] std::vector<scored_id> rank_fields(const std::vector<std::string>& query,
                                                     const std::vector<std::string>& candidate_ids,
                                                     double threshold) const;

private:
    struct doc_stats {
        std::size_t length = 0;
        std::unordered_map<std::string, std::size_t> tf;
    };

    [[nodiscard]] const doc_stats& stats(std::string_view id) const;
    [[nodiscard]] double term_weight(const std::string& term, std::size_t tf, std::size_t length) const;

    bm25_params params_;
    std::vector<std::string> ids_;
    std::map<std::string, doc_stats, std::less<>> docs_;
    std::unordered_map<std::string, std::size_t> df_;
    double avg_length_ = 0.0;
};

/// Threshold-and-sort step of rank_fields on precomputed scores.
[[nodiscard]] std::vector<scored_id> rank_scored(std::vector<scored_id> scores, double threshold);

}  // namespace lcds::retrieval
