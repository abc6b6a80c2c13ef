#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcds/core/error.hpp"
#include "lcds/core/io.hpp"
#include "lcds/core/text.hpp"
#include "support.hpp"

#include <set>

using namespace lcds;

TEST_SUITE("text") {
    TEST_CASE("decode reports byte offsets and lengths") {
        const auto units = text::decode("a乳\xF0\x9F\x98\x80");
        REQUIRE(units.size() == 3);
        CHECK(units[0].cp == U'a');
        CHECK(units[1].cp == U'乳');
        CHECK(units[1].offset == 1);
        CHECK(units[1].length == 3);
        CHECK(units[2].cp == char32_t{0x1F600});
        CHECK(units[2].offset == 4);
    }

    TEST_CASE("invalid bytes decode to U+FFFD one byte at a time") {
        const auto units = text::decode("\xFF\xE4\xB9");
        REQUIRE(units.size() == 3);
        for (const auto& u : units) {
            CHECK(u.cp == U'\uFFFD');
            CHECK(u.length == 1);
        }
    }

    TEST_CASE("encode round-trips through decode") {
        for (char32_t cp : {U'a', U'é', U'乳', char32_t{0x1F600}}) {
            const auto units = text::decode(text::encode(cp));
            REQUIRE(units.size() == 1);
            CHECK(units[0].cp == cp);
        }
    }

    TEST_CASE("CJK detection") {
        CHECK(text::contains_cjk("ER阳性"));
        CHECK_FALSE(text::contains_cjk("ER positive, 3.5 cm"));
        CHECK(text::starts_with_cjk("乳腺 breast"));
        CHECK(text::ends_with_cjk("breast 乳腺"));
    }

    TEST_CASE("whitespace helpers treat ideographic space as whitespace") {
        CHECK(text::trim("　 abc \n") == "abc");
        CHECK(text::collapse_whitespace("  a \t\n b　c ") == "a b c");
        CHECK(text::strip_whitespace(" 右 乳　癌 ") == "右乳癌");
        CHECK(text::equal_ignoring_whitespace("右 乳癌", "右乳 癌"));
        CHECK(text::contains_ignoring_whitespace("患者 一般 情况良好", "一般情况"));
        CHECK_FALSE(text::contains_ignoring_whitespace("abc", ""));
        CHECK(text::to_lower_ascii("ER(+) Ki") == "er(+) ki");
    }

    TEST_CASE("property: stripped offsets point back at the same bytes") {
        std::mt19937_64 rng(3);
        const std::vector<std::string> pieces{"a", " ", "乳", "　", "\n", "B", "。", "\t", "x y"};
        for (int trial = 0; trial < 500; ++trial) {
            std::string s;
            for (std::size_t n = test::uniform(rng, 0, 12); n > 0; --n) s += test::pick(rng, pieces);
            const auto st = text::strip_with_offsets(s);
            CHECK(st.text == text::strip_whitespace(s));
            REQUIRE(st.offsets.size() == st.text.size() + 1);
            for (std::size_t i = 0; i < st.text.size(); ++i) CHECK(s[st.offsets[i]] == st.text[i]);
        }
    }
}

TEST_SUITE("io") {
    TEST_CASE("atomic write round-trips and replaces") {
        const auto dir = test::temp_dir("io");
        io::write_file_atomic(dir / "sub" / "f.txt", "one");
        CHECK(io::read_file(dir / "sub" / "f.txt") == "one");
        io::write_file_atomic(dir / "sub" / "f.txt", "two");
        CHECK(io::read_file(dir / "sub" / "f.txt") == "two");
        CHECK_FALSE(std::filesystem::exists(dir / "sub" / "f.txt.tmp"));
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("a failure before rename leaves the old content and no temp file") {
        const auto dir = test::temp_dir("io");
        io::write_file_atomic(dir / "f.txt", "old");
        CHECK_THROWS(io::write_file_atomic(dir / "f.txt", "new", [] { throw std::runtime_error("crash"); }));
        CHECK(io::read_file(dir / "f.txt") == "old");
        CHECK_FALSE(std::filesystem::exists(dir / "f.txt.tmp"));
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("reading a missing file is an io_failure") {
        try {
            (void)io::read_file("/nonexistent/lcds/file");
            FAIL("expected io_failure");
        } catch (const error& e) {
            CHECK(e.code() == error_code::io_failure);
        }
    }
}

TEST_CASE("error codes have distinct names") {
    std::set<std::string_view> names;
    for (int c = 0; c <= static_cast<int>(error_code::parse_failure); ++c) {
        names.insert(to_string(static_cast<error_code>(c)));
    }
    CHECK(names.size() == static_cast<std::size_t>(error_code::parse_failure) + 1);
}
