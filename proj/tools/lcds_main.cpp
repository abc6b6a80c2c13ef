// lcds command line: convert, build-map, generate, attribute, eval, serve.

#include "lcds/attribution/attribution.hpp"
#include "lcds/core/error.hpp"
#include "lcds/core/io.hpp"
#include "lcds/evaluation/report.hpp"
#include "lcds/gateway/http_provider.hpp"
#include "lcds/gateway/mock_provider.hpp"
#include "lcds/gateway/recording.hpp"
#include "lcds/ingest/converter.hpp"
#include "lcds/service/review_service.hpp"
#include "lcds/source_map/builder.hpp"
#include "lcds/summary/summarizer.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <iostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace lcds;

namespace {

std::string dump(const nlohmann::ordered_json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

/// "mock", "http" (endpoint from LCDS_* environment) or "replay:<file>".
std::shared_ptr<gateway::completion_provider> make_provider(const std::string& name,
                                                            const gateway::provider_config& config) {
    if (name == "mock") return std::make_shared<gateway::mock_provider>();
    if (name == "http") return std::make_shared<gateway::http_provider>(config);
    if (name.starts_with("replay:")) return std::make_shared<gateway::replay_provider>(name.substr(7));
    throw error(error_code::invalid_argument, "unknown provider '" + name + "' (mock, http, replay:<file>)");
}

/// Wraps the provider in a recorder when a recording path is given.
gateway::completion_gateway make_gateway(const std::string& name, const std::string& record_to) {
    auto config = gateway::provider_config::from_env();
    auto provider = make_provider(name, config);
    if (!record_to.empty()) provider = std::make_shared<gateway::recording_provider>(provider, record_to);
    return gateway::completion_gateway(std::move(provider), config);
}

// =============================================================================
// convert
// =============================================================================

struct convert_args {
    fs::path in;
    fs::path out;
    fs::path type_map;
    std::string patient_id;
    std::string admission_id;
};

int run_convert(const convert_args& a) {
    const auto map = a.type_map.empty() ? ingest::type_map::defaults()
                                        : ingest::type_map::from_json(nlohmann::json::parse(io::read_file(a.type_map)));
    std::vector<ingest::raw_document> raws;
    std::string patient = a.in.filename().string();
    std::string admission = "1";

    const auto manifest_path = a.in / "manifest.json";
    if (fs::exists(manifest_path)) {
        // {"patient_id","admission_id","documents":[{"file","doc_id"?,"doc_type"?}]}
        const auto m = nlohmann::json::parse(io::read_file(manifest_path));
        patient = m.value("patient_id", patient);
        admission = m.value("admission_id", admission);
        for (const auto& d : m.at("documents")) {
            const fs::path file = d.at("file").get<std::string>();
            ingest::raw_document raw;
            raw.doc_id = d.value("doc_id", file.stem().string());
            if (d.contains("doc_type")) raw.declared_type = ingest::parse_doc_type(d["doc_type"].get<std::string>());
            raw.payload = io::read_file(a.in / file);
            raws.push_back(std::move(raw));
        }
    } else {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(a.in)) {
            if (entry.is_regular_file()) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) raws.push_back({f.stem().string(), std::nullopt, io::read_file(f), "utf-8"});
    }
    if (!a.patient_id.empty()) patient = a.patient_id;
    if (!a.admission_id.empty()) admission = a.admission_id;

    std::vector<ingest::unified_document> docs;
    for (const auto& raw : raws) {
        auto result = ingest::convert_document(raw, map);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
        docs.push_back(std::move(result.document));
    }
    const auto record = ingest::build_record(std::move(docs), patient, admission);
    io::write_file_atomic(a.out, ingest::serialize(record) + "\n");
    std::cerr << "converted " << record.documents.size() << " documents\n";
    return 0;
}

// =============================================================================
// build-map
// =============================================================================

struct build_map_args {
    fs::path corpus;
    std::string department;
    fs::path out;
    double threshold = 0.8;
    std::string provider = "mock";
};

int run_build_map(const build_map_args& a) {
    const auto corpus = source_map::load_corpus(a.corpus);
    const auto gw = make_gateway(a.provider, "");
    source_map::locate_options options;
    options.threshold = a.threshold;
    const auto result = source_map::build_mapping_table(corpus, a.department, &gw, options);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    io::write_file_atomic(a.out, source_map::serialize(result.table) + "\n");
    std::cerr << "mapping table with " << result.table.entries.size() << " entries from " << corpus.size()
              << " cases\n";
    return 0;
}

// =============================================================================
// generate
// =============================================================================

struct generate_args {
    fs::path record;
    fs::path map;
    fs::path rules;
    fs::path out;
    std::string provider = "mock";
    std::string record_to;
    bool multi_source = false;
    bool no_source_map = false;
};

int run_generate(const generate_args& a) {
    const auto record = ingest::parse_record(io::read_file(a.record));
    const auto department = logic::load_department(a.rules);
    source_map::mapping_table table;
    table.department = department.rules.department;
    if (!a.map.empty()) table = source_map::parse_table(io::read_file(a.map));
    const auto gw = make_gateway(a.provider, a.record_to);

    summary::generation_options options;
    options.multi_source = a.multi_source;
    options.use_source_map = !a.no_source_map;
    const auto result = summary::generate_summary(record, table, department, gw, options);
    for (const auto& f : result.fields) {
        if (f.error) std::cerr << source_map::to_string(f.field) << ": " << *f.error << '\n';
        for (const auto& d : f.diagnostics) std::cerr << source_map::to_string(f.field) << ": " << d << '\n';
    }
    io::write_file_atomic(a.out, summary::serialize(result) + "\n");
    return 0;
}

// =============================================================================
// attribute
// =============================================================================

struct attribute_args {
    fs::path summary;
    fs::path record;
    fs::path out;
    fs::path summary_out;
    std::string scope = "resolved";
    std::string mode = "provider";
    std::string provider = "mock";
    double threshold = attribution::default_attribution_threshold;
};

int run_attribute(const attribute_args& a) {
    auto summary = summary::parse_summary(io::read_file(a.summary));
    const auto record = ingest::parse_record(io::read_file(a.record));
    const auto gw = make_gateway(a.provider, "");
    attribution::attribution_options options;
    options.scope = attribution::parse_scope(a.scope);
    options.mode = attribution::parse_method(a.mode);
    options.threshold = a.threshold;
    const auto map = attribution::build_attribution_map(summary, record, &gw, options);
    if (map.dropped_ids > 0) std::cerr << "dropped " << map.dropped_ids << " ids outside the candidate pool\n";
    io::write_file_atomic(a.out, attribution::serialize(map) + "\n");
    if (!a.summary_out.empty()) io::write_file_atomic(a.summary_out, summary::serialize(summary) + "\n");
    return 0;
}

// =============================================================================
// eval
// =============================================================================

struct eval_args {
    fs::path pairs;
    std::string metrics = "rouge";
    fs::path out;
    std::string tokenizer = "auto";
    fs::path judge_template;
    std::string provider = "mock";
    std::string method = "LCDS";
};

int run_eval(const eval_args& a) {
    evaluation::eval_options options;
    options.rouge = false;
    std::stringstream list(a.metrics);
    for (std::string m; std::getline(list, m, ',');) {
        if (m == "rouge") {
            options.rouge = true;
        } else if (m == "judge") {
            options.judge = true;
        } else {
            throw error(error_code::invalid_argument, "unknown metric '" + m + "' (rouge, judge)");
        }
    }
    options.tokenizer = evaluation::parse_rouge_tokenizer(a.tokenizer);
    if (!a.judge_template.empty()) options.judge_template = evaluation::load_judge_template(a.judge_template);

    const auto pairs = evaluation::load_pairs(a.pairs);
    std::optional<gateway::completion_gateway> gw;
    if (options.judge) gw.emplace(make_gateway(a.provider, ""));
    const auto report = evaluation::evaluate_pairs(pairs, options, gw ? &*gw : nullptr, a.method);
    io::write_file_atomic(a.out, dump(evaluation::to_json(report)) + "\n");
    std::cout << evaluation::render_table({report});
    return 0;
}

// =============================================================================
// serve
// =============================================================================

httplib::Server* running_server = nullptr;

void stop_server(int) {
    if (running_server != nullptr) running_server->stop();
}

struct serve_args {
    int port = 8080;
    std::string host = "127.0.0.1";
    fs::path data_dir;
    fs::path resources;
};

int run_serve(const serve_args& a) {
    service::service_options options;
    options.data_dir = a.data_dir;
    options.resources_dir = a.resources;
    options.provider_config = gateway::provider_config::from_env();
    service::review_service svc(std::move(options));
    httplib::Server server;
    svc.bind(server);
    running_server = &server;
    std::signal(SIGINT, stop_server);
    std::signal(SIGTERM, stop_server);
    std::cerr << "listening on " << a.host << ":" << a.port << '\n';
    if (!server.listen(a.host, a.port)) {
        std::cerr << "cannot listen on " << a.host << ":" << a.port << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discharge summary generation with source mapping and attribution"};
    app.require_subcommand(1);

    convert_args ca;
    auto* convert = app.add_subcommand("convert", "Convert a directory of raw EMR documents into a unified record");
    convert->add_option("--in", ca.in, "Directory of raw documents (optional manifest.json)")->required()->check(CLI::ExistingDirectory);
    convert->add_option("--out", ca.out, "Unified record file")->required();
    convert->add_option("--type-map", ca.type_map, "Section label table")->check(CLI::ExistingFile);
    convert->add_option("--patient-id", ca.patient_id);
    convert->add_option("--admission-id", ca.admission_id);

    build_map_args ba;
    auto* build_map = app.add_subcommand("build-map", "Learn a source mapping table from reference cases");
    build_map->add_option("--corpus", ba.corpus, "Directory of cases (record.json + reference.json)")->required()->check(CLI::ExistingDirectory);
    build_map->add_option("--department", ba.department)->required();
    build_map->add_option("--out", ba.out)->required();
    build_map->add_option("--threshold", ba.threshold, "BM25 similarity cut-off for long fields")->check(CLI::Range(0.0, 1.0));
    build_map->add_option("--provider", ba.provider, "mock | http | replay:<file>");

    generate_args ga;
    auto* generate = app.add_subcommand("generate", "Generate a discharge summary for one record");
    generate->add_option("--record", ga.record)->required()->check(CLI::ExistingFile);
    generate->add_option("--map", ga.map, "Mapping table; omit to run without one")->check(CLI::ExistingFile);
    generate->add_option("--rules", ga.rules, "Department directory with rules.json and knowledge.json")->required()->check(CLI::ExistingDirectory);
    generate->add_option("--out", ga.out)->required();
    generate->add_option("--provider", ga.provider, "mock | http | replay:<file>");
    generate->add_option("--record-exchanges", ga.record_to, "Write provider exchanges to this file");
    generate->add_flag("--multi-source", ga.multi_source, "Use every present source, not only the first");
    generate->add_flag("--no-source-map", ga.no_source_map, "Give the model the whole record");

    attribute_args aa;
    auto* attribute = app.add_subcommand("attribute", "Link generated sentences to record sentences");
    attribute->add_option("--summary", aa.summary)->required()->check(CLI::ExistingFile);
    attribute->add_option("--record", aa.record)->required()->check(CLI::ExistingFile);
    attribute->add_option("--out", aa.out)->required();
    attribute->add_option("--summary-out", aa.summary_out, "Also write the summary with sources filled in");
    attribute->add_option("--scope", aa.scope, "resolved | full");
    attribute->add_option("--mode", aa.mode, "provider | lexical");
    attribute->add_option("--provider", aa.provider, "mock | http | replay:<file>");
    attribute->add_option("--threshold", aa.threshold)->check(CLI::Range(0.0, 1.0));

    eval_args ea;
    auto* eval = app.add_subcommand("eval", "Score generated summaries against references");
    eval->add_option("--pairs", ea.pairs, "Directory of pair files")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--metrics", ea.metrics, "Comma list of rouge, judge");
    eval->add_option("--out", ea.out)->required();
    eval->add_option("--tokenizer", ea.tokenizer, "auto | char | word");
    eval->add_option("--judge-template", ea.judge_template)->check(CLI::ExistingFile);
    eval->add_option("--provider", ea.provider, "Judge provider: mock | http | replay:<file>");
    eval->add_option("--method", ea.method, "Method name for the report");

    serve_args sa;
    auto* serve = app.add_subcommand("serve", "Run the review service");
    serve->add_option("--port", sa.port)->check(CLI::Range(1, 65535));
    serve->add_option("--host", sa.host);
    serve->add_option("--data-dir", sa.data_dir)->required();
    serve->add_option("--resources", sa.resources, "Department directories (default <data-dir>/departments)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*convert) return run_convert(ca);
        if (*build_map) return run_build_map(ba);
        if (*generate) return run_generate(ga);
        if (*attribute) return run_attribute(aa);
        if (*eval) return run_eval(ea);
        if (*serve) return run_serve(sa);
    } catch (const error& e) {
        const std::string_view code = to_string(e.code());
        const std::string message = e.what();
        std::cerr << (message.starts_with(code) ? message : std::string(code) + ": " + message) << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
