#include "biaslens/acquisition.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

#include "biaslens/error.hpp"
#include "biaslens/utf8.hpp"

namespace biaslens {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string to_jsonl_line(const RawDocument& doc) {
    ordered_json j;
    j["id"] = doc.id;
    j["text"] = doc.text;
    j["date"] = doc.date ? ordered_json(doc.date->to_iso()) : ordered_json(nullptr);
    j["source"] = doc.source;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

RawDocument parse_jsonl_line(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw FormatError("line is not a JSON object");
    auto id = j.find("id");
    auto text = j.find("text");
    if (id == j.end() || !id->is_string()) throw FormatError("missing string field \"id\"");
    if (text == j.end() || !text->is_string()) throw FormatError("missing string field \"text\"");
    RawDocument doc;
    doc.id = id->get<std::string>();
    doc.text = text->get<std::string>();
    if (doc.id.empty()) throw FormatError("empty \"id\"");
    if (blank(doc.text)) throw FormatError("empty \"text\"");
    if (auto date = j.find("date"); date != j.end() && !date->is_null()) {
        if (!date->is_string()) throw FormatError("\"date\" must be a string or null");
        doc.date = Date::parse_iso(date->get<std::string>());
        if (!doc.date) throw FormatError("unparseable date \"" + date->get<std::string>() + "\"");
    }
    if (auto source = j.find("source"); source != j.end() && source->is_string()) {
        doc.source = source->get<std::string>();
    }
    return doc;
}

JsonlReader::JsonlReader(const fs::path& path, LoadOptions options)
    : path_(path), in_(path, std::ios::binary), options_(options) {
    if (!in_) throw IoError("cannot open " + path.string());
}

std::optional<RawDocument> JsonlReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;
        try {
            RawDocument doc = parse_jsonl_line(line);
            ++stats_.loaded;
            return doc;
        } catch (const FormatError& e) {
            std::string msg = path_.string() + ":" + std::to_string(line_no_) + ": " + e.what();
            if (options_.strict) throw FormatError(msg);
            ++stats_.skipped;
            stats_.problems.push_back(std::move(msg));
        }
    }
    return std::nullopt;
}

std::vector<RawDocument> load_jsonl(const fs::path& path, LoadOptions options, LoadStats* stats) {
    JsonlReader reader(path, options);
    std::vector<RawDocument> docs;
    while (auto doc = reader.next()) docs.push_back(std::move(*doc));
    if (stats) *stats = reader.stats();
    return docs;
}

void write_jsonl(const fs::path& path, const std::vector<RawDocument>& docs) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& doc : docs) out << to_jsonl_line(doc) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------

MetadataRule::MetadataRule(std::string pattern) : pattern_(std::move(pattern)) {}

namespace {

struct MatchState {
    int year = -1, month = -1, day = -1;
};

bool match_rule(std::string_view pat, std::string_view s, MatchState& st) {
    if (pat.empty()) return s.empty();
    auto digits = [&](std::size_t n, int& out) {
        if (s.size() < n) return false;
        int v = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
            v = v * 10 + (s[i] - '0');
        }
        out = v;
        return true;
    };
    if (pat.starts_with("YYYY")) {
        MatchState saved = st;
        if (digits(4, st.year) && match_rule(pat.substr(4), s.substr(4), st)) return true;
        st = saved;
        return false;
    }
    if (pat.starts_with("MM") || pat.starts_with("DD")) {
        MatchState saved = st;
        int& slot = pat[0] == 'M' ? st.month : st.day;
        if (digits(2, slot) && match_rule(pat.substr(2), s.substr(2), st)) return true;
        st = saved;
        return false;
    }
    if (pat[0] == '*') {
        for (std::size_t skip = 0; skip <= s.size(); ++skip) {
            MatchState saved = st;
            if (match_rule(pat.substr(1), s.substr(skip), st)) return true;
            st = saved;
        }
        return false;
    }
    if (s.empty() || s[0] != pat[0]) return false;
    return match_rule(pat.substr(1), s.substr(1), st);
}

}  // namespace

std::optional<Date> MetadataRule::date_for(std::string_view stem) const {
    if (pattern_.empty()) return std::nullopt;
    MatchState st;
    if (!match_rule(pattern_, stem, st) || st.year < 0) return std::nullopt;
    Date d{st.year, st.month < 0 ? 1 : st.month, st.day < 0 ? 1 : st.day};
    if (!d.valid()) return std::nullopt;
    return d;
}

PlaintextDirReader::PlaintextDirReader(const fs::path& dir, MetadataRule rule, LoadOptions options,
                                       std::string source)
    : rule_(std::move(rule)), options_(options), source_(std::move(source)) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename().string().starts_with(".")) continue;
        files_.push_back(entry.path());
    }
    std::sort(files_.begin(), files_.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
}

std::optional<RawDocument> PlaintextDirReader::next() {
    while (cursor_ < files_.size()) {
        const fs::path& file = files_[cursor_++];
        std::string text = read_file(file);
        std::size_t bad;
        if (!utf8::valid(text, &bad)) {
            std::string msg = file.string() + ": invalid UTF-8 at byte " + std::to_string(bad);
            if (options_.strict) throw FormatError(msg);
            stats_.problems.push_back(msg + " (replaced)");
            text = utf8::sanitize(text);
        }
        if (blank(text)) {
            std::string msg = file.string() + ": empty document";
            if (options_.strict) throw FormatError(msg);
            ++stats_.skipped;
            stats_.problems.push_back(msg);
            continue;
        }
        RawDocument doc;
        doc.id = file.stem().string();
        doc.text = std::move(text);
        doc.date = rule_.date_for(doc.id);
        doc.source = source_;
        ++stats_.loaded;
        return doc;
    }
    return std::nullopt;
}

std::vector<RawDocument> load_plaintext_dir(const fs::path& dir, const MetadataRule& rule, LoadOptions options,
                                            LoadStats* stats, const std::string& source) {
    PlaintextDirReader reader(dir, rule, options, source);
    std::vector<RawDocument> docs;
    while (auto doc = reader.next()) docs.push_back(std::move(*doc));
    if (stats) *stats = reader.stats();
    return docs;
}

}  // namespace biaslens
