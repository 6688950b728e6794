#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biaslens/date.hpp"

namespace biaslens {

struct RawDocument {
    std::string id;
    std::string text;
    std::optional<Date> date;
    std::string source;

    bool operator==(const RawDocument&) const = default;
};

struct LoadOptions {
    /// Strict mode raises on the first malformed record; lenient mode skips
    /// (JSONL) or repairs (plaintext UTF-8) and counts.
    bool strict = true;
};

struct LoadStats {
    std::size_t loaded = 0;
    std::size_t skipped = 0;
    std::vector<std::string> problems;
};

/// Serializes a document as one JSONL line (no trailing newline).
std::string to_jsonl_line(const RawDocument& doc);

/// Parses one JSONL line; throws FormatError describing the defect.
RawDocument parse_jsonl_line(std::string_view line);

/// Streams documents from a JSONL corpus in file order.
class JsonlReader {
public:
    explicit JsonlReader(const std::filesystem::path& path, LoadOptions options = {});

    std::optional<RawDocument> next();
    const LoadStats& stats() const { return stats_; }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    LoadOptions options_;
    LoadStats stats_;
    std::size_t line_no_ = 0;
};

std::vector<RawDocument> load_jsonl(const std::filesystem::path& path, LoadOptions options = {},
                                    LoadStats* stats = nullptr);

void write_jsonl(const std::filesystem::path& path, const std::vector<RawDocument>& docs);

/// Filename pattern that extracts a date from a file stem. `YYYY`, `MM` and
/// `DD` match digit runs, `*` matches any run, other characters are literal.
/// Missing month/day default to 1.
class MetadataRule {
public:
    MetadataRule() = default;
    explicit MetadataRule(std::string pattern);

    std::optional<Date> date_for(std::string_view stem) const;
    const std::string& pattern() const { return pattern_; }

private:
    std::string pattern_;
};

/// One document per regular file (hidden files ignored), id = file stem,
/// lexicographic filename order.
class PlaintextDirReader {
public:
    PlaintextDirReader(const std::filesystem::path& dir, MetadataRule rule = {}, LoadOptions options = {},
                       std::string source = "plaintext");

    std::optional<RawDocument> next();
    const LoadStats& stats() const { return stats_; }

private:
    std::vector<std::filesystem::path> files_;
    std::size_t cursor_ = 0;
    MetadataRule rule_;
    LoadOptions options_;
    std::string source_;
    LoadStats stats_;
};

std::vector<RawDocument> load_plaintext_dir(const std::filesystem::path& dir, const MetadataRule& rule = {},
                                            LoadOptions options = {}, LoadStats* stats = nullptr,
                                            const std::string& source = "plaintext");

// ---------------------------------------------------------------------------
// Guardian Open Platform client

inline constexpr const char* kGuardianKeyEnv = "BIASLENS_GUARDIAN_API_KEY";
inline constexpr const char* kGuardianBaseUrl = "https://content.guardianapis.com";

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Raised by transports for connection-level failures (DNS, refused, timeout).
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    /// `target` is the path plus query string, e.g. "/search?page=1".
    virtual HttpResponse get(const std::string& target) = 0;
};

/// cpp-httplib backed transport for http:// and (when built with OpenSSL) https:// URLs.
std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url,
                                                   std::chrono::seconds timeout = std::chrono::seconds(30));

struct GuardianQuery {
    std::string api_key;
    Date from_date;
    Date to_date;
    int page_size = 50;
    /// Guardian content type filter; empty string requests every type.
    std::string content_type = "article";
    std::filesystem::path out_path;
    std::chrono::milliseconds min_request_interval{200};
    int max_attempts = 5;
    std::chrono::milliseconds initial_backoff{500};
};

struct IngestFailure {
    std::string where;
    std::string reason;
};

struct IngestManifest {
    std::size_t documents_written = 0;
    std::size_t documents_already_present = 0;
    std::optional<std::pair<Date, Date>> date_range_covered;
    std::filesystem::path output_path;
    std::size_t pages_fetched = 0;
    std::vector<IngestFailure> failures;
};

using SleepFn = std::function<void(std::chrono::milliseconds)>;

/// Builds the /search request target for one page.
std::string guardian_search_target(const GuardianQuery& query, int page);

/// Removes markup from a Guardian body field. Block-level tags become line
/// breaks, script/style content is dropped, and common entities are decoded.
std::string strip_html(std::string_view html);

/// Pages through /search and appends one JSONL line per new article to
/// query.out_path. Ids already present in the file are skipped.
IngestManifest fetch_guardian(const GuardianQuery& query, HttpTransport& transport, SleepFn sleep = {});

}  // namespace biaslens
