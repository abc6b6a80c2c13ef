#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcds/attribution/attribution.hpp"
#include "lcds/core/io.hpp"
#include "lcds/source_map/mapping_table.hpp"
#include "lcds/summary/discharge_summary.hpp"

#include "support.hpp"

#include <cstdlib>

#include <sys/wait.h>

using namespace lcds;
using namespace lcds::test;
namespace fs = std::filesystem;

namespace {

struct run_result {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

/// Runs the CLI with the given arguments, capturing both streams.
run_result lcds_cli(const std::string& args, const fs::path& work) {
    const auto out = work / "stdout.txt";
    const auto err = work / "stderr.txt";
    const auto cmd = quote(LCDS_CLI) + " " + args + " >" + quote(out.string()) + " 2>" + quote(err.string());
    const int status = std::system(cmd.c_str());
    run_result r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = io::read_file(out);
    r.err = io::read_file(err);
    return r;
}

std::string p(const fs::path& path) { return quote(path.string()); }

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("pipeline") {
        const auto work = temp_dir("cli_pipeline");
        const auto rules = breast_dir();

        auto r = lcds_cli("convert --in " + p(fixtures() / "emr" / "demo") + " --out " + p(work / "record.json"), work);
        REQUIRE(r.exit_code == 0);
        CHECK(r.err.find("converted 10 documents") != std::string::npos);
        const auto record = ingest::parse_record(io::read_file(work / "record.json"));
        CHECK(record.patient_id == "P2001");
        CHECK(record.admission_id == "A2024101");
        CHECK(ingest::validate_record(record).empty());

        r = lcds_cli("build-map --corpus " + p(fixtures() / "corpus" / "breast_surgery") +
                         " --department breast_surgery --out " + p(work / "map.json"),
                     work);
        REQUIRE(r.exit_code == 0);
        CHECK(source_map::parse_table(io::read_file(work / "map.json")) ==
              source_map::parse_table(io::read_file(rules / "mapping.json")));

        r = lcds_cli("generate --record " + p(work / "record.json") + " --map " + p(work / "map.json") + " --rules " +
                         p(rules) + " --out " + p(work / "summary.json"),
                     work);
        REQUIRE(r.exit_code == 0);
        const auto summary = summary::parse_summary(io::read_file(work / "summary.json"));
        CHECK(summary::validate_summary(summary).empty());
        CHECK(summary.fields.size() == 6);

        r = lcds_cli("attribute --summary " + p(work / "summary.json") + " --record " + p(work / "record.json") +
                         " --out " + p(work / "attribution.json") + " --summary-out " +
                         p(work / "attributed.json"),
                     work);
        REQUIRE(r.exit_code == 0);
        const auto map = attribution::parse_attribution(io::read_file(work / "attribution.json"));
        CHECK(attribution::dangling_ids(map, record).empty());
        CHECK_FALSE(map.entries.empty());
        const auto attributed = summary::parse_summary(io::read_file(work / "attributed.json"));
        for (const auto& e : map.entries) {
            const auto* s = attributed.find_sentence(e.gen_sid);
            REQUIRE(s != nullptr);
            CHECK(s->sources == e.sources);
        }

        r = lcds_cli("attribute --summary " + p(work / "summary.json") + " --record " + p(work / "record.json") +
                         " --out " + p(work / "lexical.json") + " --mode lexical --scope full",
                     work);
        CHECK(r.exit_code == 0);
    }

    TEST_CASE("outputs are byte-stable") {
        const auto work = temp_dir("cli_stable");
        std::string first_record;
        std::string first_summary;
        for (int run = 0; run < 2; ++run) {
            REQUIRE(lcds_cli("convert --in " + p(fixtures() / "emr" / "demo") + " --out " + p(work / "record.json"),
                             work)
                        .exit_code == 0);
            REQUIRE(lcds_cli("generate --record " + p(work / "record.json") + " --map " +
                                 p(breast_dir() / "mapping.json") + " --rules " + p(breast_dir()) + " --out " +
                                 p(work / "summary.json"),
                             work)
                        .exit_code == 0);
            const auto rec = io::read_file(work / "record.json");
            const auto sum = io::read_file(work / "summary.json");
            if (run == 0) {
                first_record = rec;
                first_summary = sum;
            } else {
                CHECK(rec == first_record);
                CHECK(sum == first_summary);
            }
        }
    }

    TEST_CASE("record then replay") {
        const auto work = temp_dir("cli_replay");
        const auto record = fixtures() / "corpus" / "breast_surgery" / "case_01" / "record.json";
        const auto common = "generate --record " + p(record) + " --map " + p(breast_dir() / "mapping.json") +
                            " --rules " + p(breast_dir());
        REQUIRE(lcds_cli(common + " --out " + p(work / "live.json") + " --record-exchanges " +
                             p(work / "exchanges.jsonl"),
                         work)
                    .exit_code == 0);
        CHECK(fs::file_size(work / "exchanges.jsonl") > 0);
        REQUIRE(lcds_cli(common + " --out " + p(work / "replayed.json") + " --provider " +
                             quote("replay:" + (work / "exchanges.jsonl").string()),
                         work)
                    .exit_code == 0);
        CHECK(io::read_file(work / "live.json") == io::read_file(work / "replayed.json"));
    }

    TEST_CASE("eval") {
        const auto work = temp_dir("cli_eval");
        auto r = lcds_cli("eval --pairs " + p(fixtures() / "pairs") + " --metrics rouge,judge --method Demo --out " +
                              p(work / "report.json"),
                          work);
        REQUIRE(r.exit_code == 0);
        const auto report = nlohmann::json::parse(io::read_file(work / "report.json"));
        CHECK(report["method"] == "Demo");
        CHECK(report["records"].size() == 10);
        CHECK(report["means"]["llm_judge"] == 100.0);
        CHECK(report["means"]["rouge_l"].is_number());
        CHECK(r.out.find("Demo") != std::string::npos);
        CHECK(r.out.find("LLM-as-a-Judge") != std::string::npos);

        r = lcds_cli("eval --pairs " + p(fixtures() / "pairs") + " --tokenizer word --out " + p(work / "w.json"),
                     work);
        REQUIRE(r.exit_code == 0);
        const auto word = nlohmann::json::parse(io::read_file(work / "w.json"));
        CHECK(word["records"][0]["rouge_l"]["tokenizer"] == "word");
        CHECK(word["means"]["llm_judge"].is_null());

        const auto tmpl = work / "judge.txt";
        io::write_file_atomic(tmpl, "no placeholders here");
        r = lcds_cli("eval --pairs " + p(fixtures() / "pairs") + " --metrics judge --judge-template " + p(tmpl) +
                         " --out " + p(work / "t.json"),
                     work);
        CHECK(r.exit_code == 0);  // per-record judge failures are reported as missing scores
        CHECK(nlohmann::json::parse(io::read_file(work / "t.json"))["means"]["llm_judge"].is_null());
    }

    TEST_CASE("errors") {
        const auto work = temp_dir("cli_errors");
        CHECK(lcds_cli("", work).exit_code != 0);
        CHECK(lcds_cli("convert --out x.json", work).exit_code != 0);
        CHECK(lcds_cli("convert --in " + p(work / "missing") + " --out x.json", work).exit_code != 0);

        auto r = lcds_cli("eval --pairs " + p(fixtures() / "pairs") + " --metrics bleu --out " + p(work / "r.json"),
                          work);
        CHECK(r.exit_code == 1);
        CHECK(r.err.find("InvalidArgument") != std::string::npos);

        r = lcds_cli("generate --record " + p(fixtures() / "corpus" / "breast_surgery" / "case_01" / "record.json") +
                         " --rules " + p(breast_dir()) + " --out " + p(work / "s.json") + " --provider pigeon",
                     work);
        CHECK(r.exit_code == 1);
        CHECK(r.err.find("unknown provider") != std::string::npos);
        CHECK_FALSE(fs::exists(work / "s.json"));

        io::write_file_atomic(work / "bad.json", "{");
        r = lcds_cli("generate --record " + p(work / "bad.json") + " --rules " + p(breast_dir()) + " --out " +
                         p(work / "s.json"),
                     work);
        CHECK(r.exit_code == 1);
    }
}
