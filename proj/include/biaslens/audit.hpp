#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biaslens/metrics.hpp"
#include "biaslens/report_io.hpp"

namespace biaslens {

// --- configuration ---------------------------------------------------------

struct SourceSpec {
    enum class Kind { Jsonl, PlaintextDir, Guardian };
    Kind kind = Kind::Jsonl;
    /// Input file or directory; for guardian sources, the JSONL output file.
    std::string path;
    /// plaintext_dir: filename pattern for dates and the document source label.
    std::string metadata_rule;
    std::string source_label = "plaintext";
    // guardian
    std::string from_date;
    std::string to_date;
    std::int64_t page_size = 50;
    std::string content_type = "article";
    std::string base_url = kGuardianBaseUrl;

    bool operator==(const SourceSpec&) const = default;
};

struct SliceSpec {
    std::string label;
    SliceFilter filter;
    bool operator==(const SliceSpec&) const = default;
};

struct SlicePlan {
    enum class Mode { ByYear, All, Explicit };
    Mode mode = Mode::ByYear;
    /// ByYear: add an "undated" slice when undated documents exist.
    bool include_undated = true;
    std::vector<SliceSpec> slices;

    bool operator==(const SlicePlan&) const = default;
};

struct ThemeSpec {
    std::string name;
    std::string path;
    bool operator==(const ThemeSpec&) const = default;
};

struct LexiconPlan {
    // Optional lexicon file overrides for the builtin sets.
    std::string male_pronouns;
    std::string female_pronouns;
    std::string male_anchor;
    std::string female_anchor;
    /// "singleton": {men} / {women}; "centroid": pronouns plus gendered nouns.
    std::string anchor = "singleton";
    std::string occupation;
    std::string characteristic;
    std::string physical;
    std::string inquirer_path;
    std::vector<std::string> inquirer_categories;
    std::vector<ThemeSpec> themes;
    bool expand = false;
    std::int64_t expand_k = 10;
    double expand_min_similarity = 0.4;

    bool operator==(const LexiconPlan&) const = default;
};

struct TrainingPlan {
    TrainConfig config;
    /// "per_slice" trains one model per slice; "global" one over the whole corpus.
    std::string mode = "per_slice";
    /// Slice label (or "*" for every slice) -> pre-trained model path.
    std::map<std::string, std::string> pretrained;

    bool operator==(const TrainingPlan&) const = default;
};

inline constexpr const char* kMetricNames[] = {"presence", "premodified", "modifier_ratio",
                                               "generics", "binomials",   "association"};

struct MetricPlan {
    bool presence = false;
    bool premodified = false;
    bool modifier_ratio = false;
    bool generics = false;
    bool binomials = false;
    bool association = false;
    std::int64_t premod_min_freq = 1;
    std::int64_t binomial_window = static_cast<std::int64_t>(kDefaultBinomialWindow);
    std::vector<BinomialPair> binomial_pairs = default_binomial_pairs();
    std::vector<GenericsPair> generics_pairs = builtin_generics().pairs();
    std::int64_t association_top_k = static_cast<std::int64_t>(reference::kAssociationTopK);

    bool selected(std::string_view name) const;
    std::vector<std::string> selected_names() const;
    bool operator==(const MetricPlan&) const = default;
};

struct AuditConfig {
    std::vector<SourceSpec> sources;
    SlicePlan slices;
    TokenizeConfig tokenizer;
    TrainingPlan training;
    LexiconPlan lexicons;
    MetricPlan metrics;
    std::string output_dir = "biaslens-out";
    std::uint64_t seed = 1;
    bool strict = true;
    std::int64_t threads = 1;
    /// Relative paths resolve against this directory (not serialized).
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::string& path) const;
    bool operator==(const AuditConfig& other) const;
};

/// Throws FormatError on malformed JSON, unknown keys or wrong value types.
AuditConfig parse_config(const Json& j, const std::filesystem::path& base_dir);
AuditConfig load_config(const std::filesystem::path& path);
/// Every field with defaults materialized; paths as written.
Json config_to_json(const AuditConfig& config);

/// Semantic checks (paths, ranges, lexicon disjointness). Never throws for
/// config problems and never touches the filesystem beyond existence checks.
std::vector<std::string> validate(const AuditConfig& config);

// --- report ----------------------------------------------------------------

struct ModelFingerprint {
    /// "trained" or the pre-trained model path.
    std::string origin;
    std::string checksum;
    std::uint64_t vocab_size = 0;
    std::uint64_t dim = 0;
    TrainConfig config;
    std::vector<double> epoch_mean_loss;

    bool operator==(const ModelFingerprint&) const = default;
};

struct SliceReport {
    std::string label;
    SliceFilter filter;
    std::uint64_t documents = 0;
    std::uint64_t tokens = 0;
    std::optional<ModelFingerprint> model;
    std::optional<PresenceResult> presence;
    std::optional<PremodResult> premodified;
    std::optional<ModifierRatioResult> modifier_ratio;
    std::optional<GenericsResult> generics;
    std::optional<BinomialResult> binomials;
    std::optional<std::vector<AssociationResult>> association;
    /// Metric name -> error message.
    std::map<std::string, std::string> errors;

    bool has_result(std::string_view metric) const;
    bool operator==(const SliceReport&) const = default;
};

struct AuditReport {
    std::string tool = "biaslens";
    std::string version = BIASLENS_VERSION;
    Json config;
    std::vector<std::string> selected_metrics;
    std::vector<SliceReport> slices;
    std::vector<std::string> warnings;
    /// Wall-clock seconds keyed by phase / slice label. Excluded from determinism checks.
    std::map<std::string, double> timings;

    bool partial_failure() const;
    bool operator==(const AuditReport&) const = default;
};

Json report_to_json(const AuditReport& report);
AuditReport report_from_json(const Json& j);
std::string report_to_string(const AuditReport& report);
AuditReport load_report(const std::filesystem::path& path);

struct AuditOutputs {
    AuditReport report;
    std::vector<std::filesystem::path> written;
};

/// Validates, runs every slice, and writes report.json plus plot CSVs into
/// config.output_dir. Throws PreconditionError if validation fails.
AuditOutputs run_audit(const AuditConfig& config);
/// Computes the report without writing anything.
AuditReport compute_audit(const AuditConfig& config);

/// Writes presence.csv, modifier_ratio.csv, premod.csv, generics.csv,
/// binomials.csv and association_<theme>.csv for each selected metric.
/// Throws IoError before writing anything if out_dir is unwritable.
std::vector<std::filesystem::path> emit_plot_data(const AuditReport& report, const std::filesystem::path& out_dir);

/// CSV contents keyed by file name, without touching the filesystem.
std::map<std::string, std::string> render_plot_data(const AuditReport& report);

}  // namespace biaslens
