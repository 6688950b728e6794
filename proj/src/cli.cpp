#include "biaslens/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "biaslens/acquisition.hpp"
#include "biaslens/audit.hpp"
#include "biaslens/error.hpp"

namespace biaslens {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> threads;
    bool strict = false;
    bool lenient = false;
    std::string out;

    bool strict_mode(bool fallback) const {
        if (lenient) return false;
        if (strict) return true;
        return fallback;
    }
};

fs::path require_out(const GlobalOptions& g, const char* what) {
    if (g.out.empty()) throw PreconditionError(std::string(what) + " requires --out");
    return g.out;
}

std::vector<RawDocument> load_input(const fs::path& in, const std::string& metadata_rule, bool strict,
                                    std::ostream& err) {
    LoadStats stats;
    LoadOptions options{strict};
    std::vector<RawDocument> docs;
    if (fs::is_directory(in)) {
        docs = load_plaintext_dir(in, MetadataRule(metadata_rule), options, &stats);
    } else {
        docs = load_jsonl(in, options, &stats);
    }
    for (const auto& p : stats.problems) err << "warning: " << p << "\n";
    return docs;
}

Corpus load_corpus_arg(const fs::path& path, const TokenizeConfig& tokenizer, bool strict, int threads,
                       std::ostream& err) {
    if (fs::is_regular_file(path) && is_corpus_cache(path)) return load_corpus_cache(path);
    return build_corpus(load_input(path, "", strict, err), tokenizer, threads);
}

TokenizeConfig load_tokenizer_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open tokenizer config " + path);
    try {
        return Json::parse(in).get<TokenizeConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("tokenizer config " + path + ": " + e.what());
    }
}

int cmd_fetch_guardian(const GlobalOptions& g, const std::string& from, const std::string& to, int page_size,
                       const std::string& content_type, const std::string& base_url, std::ostream& out) {
    GuardianQuery q;
    const char* key = std::getenv(kGuardianKeyEnv);
    if (!key || !*key) throw CredentialError(std::string("set the ") + kGuardianKeyEnv + " environment variable");
    q.api_key = key;
    auto f = Date::parse_iso(from);
    auto t = Date::parse_iso(to);
    if (!f || !t) throw PreconditionError("--from/--to must be YYYY-MM-DD dates");
    q.from_date = *f;
    q.to_date = *t;
    q.page_size = page_size;
    q.content_type = content_type;
    q.out_path = require_out(g, "fetch guardian");
    auto transport = make_http_transport(base_url);
    auto manifest = fetch_guardian(q, *transport);
    Json j{{"documents_written", manifest.documents_written},
           {"documents_already_present", manifest.documents_already_present},
           {"pages_fetched", manifest.pages_fetched},
           {"output_path", manifest.output_path.string()}};
    if (manifest.date_range_covered) {
        j["date_range_covered"] = Json::array(
            {manifest.date_range_covered->first.to_iso(), manifest.date_range_covered->second.to_iso()});
    } else {
        j["date_range_covered"] = nullptr;
    }
    Json failures = Json::array();
    for (const auto& fl : manifest.failures) failures.push_back(Json{{"where", fl.where}, {"reason", fl.reason}});
    j["failures"] = failures;
    out << j.dump(2) << "\n";
    return manifest.failures.empty() ? kExitOk : kExitPartial;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"biaslens: measure gender bias in text corpora", "biaslens"};
    app.set_version_flag("--version", std::string(BIASLENS_VERSION));
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config, "Audit config JSON");
    app.add_option("--seed", g.seed, "Override the random seed");
    app.add_option("--threads", g.threads, "Worker threads (training with >1 is nondeterministic)")->check(CLI::PositiveNumber);
    auto* strict_flag = app.add_flag("--strict", g.strict, "Fail on malformed input records");
    auto* lenient_flag = app.add_flag("--lenient", g.lenient, "Skip malformed input records and report them");
    strict_flag->excludes(lenient_flag);
    app.add_option("--out", g.out, "Output file or directory");

    // fetch guardian
    auto* fetch = app.add_subcommand("fetch", "Download documents from a remote source");
    fetch->require_subcommand(1);
    auto* guardian = fetch->add_subcommand(
        "guardian", std::string("Fetch Guardian articles into JSONL (API key read from ") + kGuardianKeyEnv + ")");
    std::string from, to, content_type = "article", base_url = kGuardianBaseUrl;
    int page_size = 50;
    guardian->add_option("--from", from, "First publication date, YYYY-MM-DD")->required();
    guardian->add_option("--to", to, "Last publication date, YYYY-MM-DD")->required();
    guardian->add_option("--page-size", page_size, "Results per page (1-200)")->capture_default_str();
    guardian->add_option("--content-type", content_type, "Content type filter; empty for all")->capture_default_str();
    guardian->add_option("--base-url", base_url, "API base URL")->capture_default_str();
    guardian->footer(std::string("Environment:\n  ") + kGuardianKeyEnv + "  Guardian Open Platform API key (required)");

    // corpus build
    auto* corpus_cmd = app.add_subcommand("corpus", "Corpus operations");
    corpus_cmd->require_subcommand(1);
    auto* build = corpus_cmd->add_subcommand("build", "Tokenize documents into a corpus cache");
    std::string in_path, tokenizer_config, metadata_rule;
    build->add_option("--in", in_path, "JSONL file or plaintext directory")->required();
    build->add_option("--tokenizer-config", tokenizer_config, "JSON file with tokenizer settings");
    build->add_option("--metadata-rule", metadata_rule, "Filename date pattern for plaintext directories");

    // train
    auto* train = app.add_subcommand("train", "Train a CBOW embedding model");
    std::string corpus_path, text_out;
    TrainConfig tc;
    train->add_option("--corpus", corpus_path, "Corpus cache or JSONL file")->required();
    train->add_option("--dim", tc.dim)->capture_default_str();
    train->add_option("--window", tc.window)->capture_default_str();
    train->add_option("--negatives", tc.negatives)->capture_default_str();
    train->add_option("--epochs", tc.epochs)->capture_default_str();
    train->add_option("--min-count", tc.min_count)->capture_default_str();
    train->add_option("--lr", tc.initial_lr, "Initial learning rate")->capture_default_str();
    train->add_option("--text-out", text_out, "Also write vectors in word2vec text format");

    // lexicon expand
    auto* lexicon_cmd = app.add_subcommand("lexicon", "Lexicon operations");
    lexicon_cmd->require_subcommand(1);
    auto* expand_cmd = lexicon_cmd->add_subcommand("expand", "Grow a seed lexicon with embedding neighbours");
    std::string seed_path, model_path;
    std::size_t k = 10;
    double min_sim = 0.4;
    expand_cmd->add_option("--seed", seed_path, "Seed lexicon TSV")->required();
    expand_cmd->add_option("--model", model_path, "Trained model file")->required();
    expand_cmd->add_option("--k", k, "Neighbours per seed word")->capture_default_str();
    expand_cmd->add_option("--min-sim", min_sim, "Minimum cosine similarity")->capture_default_str();
    expand_cmd->add_option("--out", g.out, "Output lexicon TSV");

    // audit
    auto* audit_cmd = app.add_subcommand("audit", "Run audits");
    audit_cmd->require_subcommand(1);
    auto* run = audit_cmd->add_subcommand("run", "Run the configured audit and write report.json and CSVs");
    auto* plots = audit_cmd->add_subcommand("plots", "Regenerate plot CSVs from a report");
    std::string report_path;
    plots->add_option("--report", report_path, "report.json to read")->required();

    // `lexicon expand --seed` is a path; keep the global --seed from shadowing it.
    for (auto* sub : {expand_cmd}) sub->fallthrough(false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        const int threads = static_cast<int>(g.threads.value_or(1));
        if (guardian->parsed()) {
            return cmd_fetch_guardian(g, from, to, page_size, content_type, base_url, out);
        }
        if (build->parsed()) {
            auto config = load_tokenizer_config(tokenizer_config);
            auto docs = load_input(in_path, metadata_rule, g.strict_mode(true), err);
            fs::path dest = require_out(g, "corpus build");
            Corpus corpus = build_corpus(docs, config, threads);
            save_corpus_cache(corpus, {hash_documents(docs), config.hash()}, dest);
            out << "wrote " << dest.string() << ": " << corpus.size() << " documents, " << corpus.token_count()
                << " tokens\n";
            return kExitOk;
        }
        if (train->parsed()) {
            if (g.seed) tc.seed = *g.seed;
            tc.threads = static_cast<std::uint32_t>(threads);
            fs::path dest = require_out(g, "train");
            Corpus corpus = load_corpus_arg(corpus_path, {}, g.strict_mode(true), threads, err);
            TrainLog log;
            auto model = train_cbow(corpus, tc, &log);
            save_model(model, dest);
            if (!text_out.empty()) export_text_vectors(model, text_out);
            out << "wrote " << dest.string() << ": vocab " << model.vocab.size() << ", dim " << model.dim()
                << ", checksum " << model_checksum(model) << "\n";
            for (std::size_t e = 0; e < log.epoch_mean_loss.size(); ++e) {
                out << "epoch " << (e + 1) << " mean loss " << log.epoch_mean_loss[e] << "\n";
            }
            return kExitOk;
        }
        if (expand_cmd->parsed()) {
            fs::path dest = require_out(g, "lexicon expand");
            auto seed = load_lexicon(seed_path);
            auto model = load_model(model_path);
            auto result = expand(seed, model, k, min_sim);
            save_lexicon(result.lexicon, dest);
            out << "wrote " << dest.string() << ": " << result.lexicon.size() << " terms\n";
            for (const auto& w : result.missing_seeds) err << "warning: seed not in vocabulary: " << w << "\n";
            return kExitOk;
        }
        if (run->parsed()) {
            if (g.config.empty()) throw PreconditionError("audit run requires --config");
            AuditConfig config;
            try {
                config = load_config(g.config);
            } catch (const Error& e) {
                err << "error: " << e.what() << "\n";
                return kExitInvalid;
            }
            if (g.seed) config.seed = *g.seed;
            if (g.threads) config.threads = *g.threads;
            config.strict = g.strict_mode(config.strict);
            if (!g.out.empty()) config.output_dir = fs::absolute(g.out).string();
            config.training.config.seed = config.seed;
            auto problems = validate(config);
            if (!problems.empty()) {
                err << "invalid config:\n";
                for (const auto& p : problems) err << "  - " << p << "\n";
                return kExitInvalid;
            }
            auto outputs = run_audit(config);
            for (const auto& w : outputs.report.warnings) err << "warning: " << w << "\n";
            for (const auto& p : outputs.written) out << "wrote " << p.string() << "\n";
            if (outputs.report.partial_failure()) {
                for (const auto& s : outputs.report.slices) {
                    for (const auto& [metric, msg] : s.errors) err << "error: " << s.label << "/" << metric << ": " << msg << "\n";
                }
                return kExitPartial;
            }
            return kExitOk;
        }
        if (plots->parsed()) {
            auto report = load_report(report_path);
            fs::path dest = g.out.empty() ? fs::path(report_path).parent_path() : fs::path(g.out);
            for (const auto& p : emit_plot_data(report, dest)) out << "wrote " << p.string() << "\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}

}  // namespace biaslens
