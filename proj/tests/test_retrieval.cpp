#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcds/core/error.hpp"
#include "lcds/retrieval/bm25.hpp"
#include "lcds/retrieval/tokenizer.hpp"
#include "support.hpp"

#include <cmath>
#include <map>
#include <set>

using namespace lcds;
using namespace lcds::retrieval;
using strings = std::vector<std::string>;

namespace {

/// Okapi BM25 written out directly from its definition, independent of bm25_index.
struct oracle {
    std::vector<std::pair<std::string, strings>> docs;
    double k1 = 1.5;
    double b = 0.75;

    double avgdl() const {
        double total = 0;
        for (const auto& d : docs) total += static_cast<double>(d.second.size());
        return total / static_cast<double>(docs.size());
    }
    double idf(const std::string& t) const {
        double df = 0;
        for (const auto& d : docs) {
            if (std::find(d.second.begin(), d.second.end(), t) != d.second.end()) df += 1;
        }
        const double n = static_cast<double>(docs.size());
        return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    }
    double score(const strings& query, const strings& doc) const {
        std::set<std::string> unique(query.rbegin(), query.rend());
        double s = 0;
        for (const auto& t : unique) {
            const double f = static_cast<double>(std::count(doc.begin(), doc.end(), t));
            if (f == 0) continue;
            s += idf(t) * f * (k1 + 1) / (f + k1 * (1 - b + b * static_cast<double>(doc.size()) / avgdl()));
        }
        return s;
    }
};

std::vector<std::pair<std::string, std::string>> toy_corpus() {
    return {
        {"d1", "right breast invasive ductal carcinoma grade two"},
        {"d2", "left breast mass ultrasound hypoechoic nodule"},
        {"d3", "chemotherapy cycle one tolerated well no adverse reaction"},
        {"d4", "breast ultrasound shows nodule in right breast upper outer quadrant"},
        {"d5", "discharge medication letrozole daily oral follow up in clinic"},
    };
}

}  // namespace

TEST_SUITE("tokenizer") {
    TEST_CASE("latin text is lowercased and split on punctuation") {
        CHECK(tokenize("Ki-67 about 20%, ER(+)") == strings{"ki", "67", "about", "20", "er"});
    }

    TEST_CASE("documented examples") {
        CHECK(tokenize("").empty());
        CHECK(tokenize("CT scan") == strings{"ct", "scan"});
        CHECK(tokenize("乳腺手术") == strings{"乳", "腺", "手", "术", "乳腺", "腺手", "手术"});
    }

    TEST_CASE("property: CJK runs give n unigrams and n-1 bigrams") {
        std::mt19937_64 rng(2);
        const strings chars{"乳", "腺", "手", "术", "化", "疗"};
        for (int trial = 0; trial < 200; ++trial) {
            std::string run;
            strings cps;
            for (std::size_t n = test::uniform(rng, 1, 8); n > 0; --n) {
                cps.push_back(test::pick(rng, chars));
                run += cps.back();
            }
            strings expected = cps;
            for (std::size_t i = 0; i + 1 < cps.size(); ++i) expected.push_back(cps[i] + cps[i + 1]);
            CHECK(tokenize(run) == expected);
        }
    }

    TEST_CASE("a CJK run yields its unigrams then its bigrams") {
        CHECK(tokenize("乳腺癌") == strings{"乳", "腺", "癌", "乳腺", "腺癌"});
    }

    TEST_CASE("mixed script keeps runs in order") {
        CHECK(tokenize("右乳ER阳性") == strings{"右", "乳", "右乳", "er", "阳", "性", "阳性"});
    }

    TEST_CASE("fullwidth letters and digits fold to ASCII") {
        CHECK(tokenize("ＥＲ　１２") == tokenize("ER 12"));
    }

    TEST_CASE("CJK punctuation separates runs") {
        CHECK(tokenize("手术，化疗。") == strings{"手", "术", "手术", "化", "疗", "化疗"});
    }

    TEST_CASE("empty and punctuation-only input give no tokens") {
        CHECK(tokenize("").empty());
        CHECK(tokenize("。，、  ...").empty());
    }
}

TEST_SUITE("bm25") {
    TEST_CASE("corpus statistics") {
        const auto index = bm25_index::build(toy_corpus());
        CHECK(index.size() == 5);
        CHECK(index.document_length("d1") == 7);
        CHECK(index.document_frequency("breast") == 3);
        CHECK(index.term_frequency("d4", "breast") == 2);
        CHECK(index.average_length() == doctest::Approx((7.0 + 6.0 + 8.0 + 10.0 + 9.0) / 5.0));
        CHECK(index.idf("breast") == doctest::Approx(std::log(1.0 + 2.5 / 3.5)));
        CHECK(index.idf("absent") == doctest::Approx(std::log(1.0 + 5.5 / 0.5)));
    }

    TEST_CASE("raw score matches the oracle on every document") {
        const auto corpus = toy_corpus();
        const auto index = bm25_index::build(corpus);
        oracle o;
        for (const auto& [id, text] : corpus) o.docs.emplace_back(id, tokenize(text));
        const strings queries{"breast", "right breast nodule", "ultrasound nodule ultrasound", "chemotherapy",
                              "letrozole oral daily", "carcinoma grade", "absent term", "breast breast breast"};
        for (const auto& q : queries) {
            const auto tokens = tokenize(q);
            for (const auto& [id, doc] : o.docs) {
                CAPTURE(q);
                CAPTURE(id);
                CHECK(std::abs(index.raw_score(tokens, id) - o.score(tokens, doc)) <= 1e-9);
            }
        }
    }

    TEST_CASE("self-match normalizes to exactly one") {
        const auto corpus = toy_corpus();
        const auto index = bm25_index::build(corpus);
        for (const auto& [id, text] : corpus) CHECK(index.normalized_score(tokenize(text), id) == 1.0);
    }

    TEST_CASE("normalized score of an empty query is zero") {
        const auto index = bm25_index::build(toy_corpus());
        CHECK(index.normalized_score({}, "d1") == 0.0);
    }

    TEST_CASE("rank keeps scores strictly above the threshold, best first, ties by id") {
        const auto ranked = rank_scored({{"b", 0.9}, {"a", 0.9}, {"c", 0.8}, {"d", 0.95}, {"e", 0.1}}, 0.8);
        REQUIRE(ranked.size() == 3);
        CHECK(ranked[0].id == "d");
        CHECK(ranked[1].id == "a");
        CHECK(ranked[2].id == "b");
    }

    TEST_CASE("rank_fields skips unknown and repeated candidates") {
        const auto index = bm25_index::build(toy_corpus());
        const auto ranked = index.rank_fields(tokenize("right breast invasive ductal carcinoma grade two"),
                                              {"d1", "zz", "d1", "d4"}, 0.0);
        REQUIRE(ranked.size() == 2);
        CHECK(ranked[0].id == "d1");
        CHECK(ranked[0].score == 1.0);
    }

    TEST_CASE("errors") {
        CHECK_THROWS_AS((void)bm25_index::build({{"x", "a"}, {"x", "b"}}), lcds::error);
        try {
            (void)bm25_index::build({{"x", "a"}, {"x", "b"}});
        } catch (const lcds::error& e) {
            CHECK(e.code() == error_code::duplicate_id);
        }
        const auto index = bm25_index::build(toy_corpus());
        try {
            (void)index.raw_score({"a"}, "nope");
            FAIL("expected UnknownDoc");
        } catch (const lcds::error& e) {
            CHECK(e.code() == error_code::unknown_doc);
        }
        CHECK_THROWS((void)rank_scored({}, 1.5));
        CHECK_THROWS((void)rank_scored({}, -0.1));
        CHECK_THROWS((void)bm25_index::build({}, {1.5, 1.2}));
    }

    TEST_CASE("property: normalized scores lie in [0,1] and match the oracle ratio") {
        std::mt19937_64 rng(7);
        const strings vocab{"a", "b", "c", "d", "e", "f", "g", "h"};
        for (int trial = 0; trial < 300; ++trial) {
            const auto n_docs = test::uniform(rng, 1, 6);
            std::vector<std::pair<std::string, strings>> docs;
            for (std::size_t i = 0; i < n_docs; ++i) {
                strings d;
                for (std::size_t k = test::uniform(rng, 1, 10); k > 0; --k) d.push_back(test::pick(rng, vocab));
                docs.emplace_back("doc" + std::to_string(i), d);
            }
            strings q;
            for (std::size_t k = test::uniform(rng, 1, 6); k > 0; --k) q.push_back(test::pick(rng, vocab));
            const auto index = bm25_index::build_from_tokens(docs);
            oracle o;
            o.docs = docs;
            for (const auto& [id, d] : docs) {
                const double s = index.normalized_score(q, id);
                CHECK(s >= 0.0);
                CHECK(s <= 1.0);
                CHECK(std::abs(index.raw_score(q, id) - o.score(q, d)) <= 1e-9);
            }
        }
    }

    TEST_CASE("property: ranking is a sorted, thresholded subset of the candidates") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<scored_id> scores;
            for (std::size_t i = test::uniform(rng, 0, 12); i > 0; --i) {
                scores.push_back({"id" + std::to_string(test::uniform(rng, 0, 20)),
                                  static_cast<double>(test::uniform(rng, 0, 10)) / 10.0});
            }
            const double threshold = static_cast<double>(test::uniform(rng, 0, 10)) / 10.0;
            const auto ranked = rank_scored(scores, threshold);
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                CHECK(ranked[i].score > threshold);
                if (i > 0) {
                    CHECK((ranked[i - 1].score > ranked[i].score ||
                           (ranked[i - 1].score == ranked[i].score && ranked[i - 1].id <= ranked[i].id)));
                }
            }
            const auto expected = std::count_if(scores.begin(), scores.end(),
                                                [&](const scored_id& s) { return s.score > threshold; });
            CHECK(static_cast<std::ptrdiff_t>(ranked.size()) == expected);
        }
    }
}
