#include <algorithm>
#include <cctype>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "biaslens/acquisition.hpp"
#include "biaslens/error.hpp"

namespace biaslens {

namespace fs = std::filesystem;

namespace {

std::string url_encode(std::string_view s) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 15]);
        }
    }
    return out;
}

class HttplibTransport final : public HttpTransport {
public:
    HttplibTransport(const std::string& base_url, std::chrono::seconds timeout) : client_(base_url) {
        client_.set_connection_timeout(timeout);
        client_.set_read_timeout(timeout);
        client_.set_follow_location(true);
    }

    HttpResponse get(const std::string& target) override {
        auto res = client_.Get(target);
        if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()));
        return {res->status, res->body};
    }

private:
    httplib::Client client_;
};

bool is_block_tag(std::string_view name) {
    static constexpr std::string_view kBlocks[] = {"p",  "br", "div", "li", "ul", "ol", "h1", "h2", "h3",
                                                   "h4", "h5", "h6",  "tr", "td", "th", "blockquote",
                                                   "figure", "figcaption", "aside", "section", "article"};
    return std::find(std::begin(kBlocks), std::end(kBlocks), name) != std::end(kBlocks);
}

std::string decode_entity(std::string_view name) {
    if (name == "amp") return "&";
    if (name == "lt") return "<";
    if (name == "gt") return ">";
    if (name == "quot") return "\"";
    if (name == "apos") return "'";
    if (name == "nbsp") return " ";
    if (name.size() > 1 && name[0] == '#') {
        unsigned long cp = 0;
        try {
            cp = name[1] == 'x' || name[1] == 'X' ? std::stoul(std::string(name.substr(2)), nullptr, 16)
                                                  : std::stoul(std::string(name.substr(1)));
        } catch (const std::exception&) {
            return {};
        }
        if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return {};
        std::string out;
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
        return out;
    }
    return "&" + std::string(name) + ";";
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url, std::chrono::seconds timeout) {
    return std::make_unique<HttplibTransport>(base_url, timeout);
}

std::string strip_html(std::string_view html) {
    std::string out;
    out.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        char c = html[i];
        if (c == '<') {
            std::size_t close = html.find('>', i);
            if (close == std::string_view::npos) break;
            std::string_view tag = html.substr(i + 1, close - i - 1);
            bool closing = !tag.empty() && tag[0] == '/';
            if (closing) tag.remove_prefix(1);
            std::size_t name_end = 0;
            while (name_end < tag.size() && std::isalnum(static_cast<unsigned char>(tag[name_end]))) ++name_end;
            std::string name = lower(tag.substr(0, name_end));
            i = close + 1;
            if (!closing && (name == "script" || name == "style")) {
                std::string end_tag = "</" + name;
                std::string rest = lower(html.substr(i));
                std::size_t end = rest.find(end_tag);
                if (end == std::string::npos) break;
                std::size_t gt = html.find('>', i + end);
                i = gt == std::string_view::npos ? html.size() : gt + 1;
                continue;
            }
            if (is_block_tag(name)) {
                if (!out.empty() && out.back() != '\n') out.push_back('\n');
            }
            continue;
        }
        if (c == '&') {
            std::size_t semi = html.find(';', i);
            if (semi != std::string_view::npos && semi - i <= 10) {
                out += decode_entity(html.substr(i + 1, semi - i - 1));
                i = semi + 1;
                continue;
            }
        }
        out.push_back(c);
        ++i;
    }
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
    std::size_t lead = 0;
    while (lead < out.size() && std::isspace(static_cast<unsigned char>(out[lead]))) ++lead;
    return out.substr(lead);
}

std::string guardian_search_target(const GuardianQuery& query, int page) {
    std::string target = "/search?from-date=" + query.from_date.to_iso() + "&to-date=" + query.to_date.to_iso() +
                         "&page=" + std::to_string(page) + "&page-size=" + std::to_string(query.page_size) +
                         "&order-by=oldest&show-fields=bodyText";
    if (!query.content_type.empty()) target += "&type=" + url_encode(query.content_type);
    target += "&api-key=" + url_encode(query.api_key);
    return target;
}

namespace {

struct PageOutcome {
    bool ok = false;
    std::string body;
    std::string reason;
};

PageOutcome request_page(const GuardianQuery& query, HttpTransport& transport, const SleepFn& sleep,
                         const std::string& target) {
    PageOutcome outcome;
    auto backoff = query.initial_backoff;
    for (int attempt = 1; attempt <= query.max_attempts; ++attempt) {
        bool retryable = false;
        try {
            HttpResponse res = transport.get(target);
            if (res.status == 401 || res.status == 403) {
                throw CredentialError("Guardian API rejected the key (HTTP " + std::to_string(res.status) +
                                      "); check " + kGuardianKeyEnv);
            }
            if (res.status == 200) {
                outcome.ok = true;
                outcome.body = std::move(res.body);
                return outcome;
            }
            outcome.reason = "HTTP " + std::to_string(res.status);
            retryable = res.status == 429 || res.status >= 500;
        } catch (const TransportError& e) {
            outcome.reason = e.what();
            retryable = true;
        }
        if (!retryable) return outcome;
        if (attempt < query.max_attempts) {
            sleep(backoff);
            backoff *= 2;
        }
    }
    outcome.reason += " after " + std::to_string(query.max_attempts) + " attempts";
    return outcome;
}

}  // namespace

IngestManifest fetch_guardian(const GuardianQuery& query, HttpTransport& transport, SleepFn sleep) {
    if (query.api_key.empty()) throw PreconditionError("Guardian API key is empty; set " + std::string(kGuardianKeyEnv));
    if (!query.from_date.valid() || !query.to_date.valid()) throw PreconditionError("invalid date in fetch range");
    if (query.to_date < query.from_date) {
        throw PreconditionError("from-date " + query.from_date.to_iso() + " is after to-date " + query.to_date.to_iso());
    }
    if (query.page_size < 1 || query.page_size > 200) throw PreconditionError("page size must be in 1..200");
    if (query.max_attempts < 1) throw PreconditionError("max_attempts must be >= 1");
    if (!sleep) sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };

    IngestManifest manifest;
    manifest.output_path = query.out_path;

    std::unordered_set<std::string> seen;
    if (fs::exists(query.out_path)) {
        LoadStats stats;
        for (auto& doc : load_jsonl(query.out_path, LoadOptions{.strict = false}, &stats)) seen.insert(doc.id);
    }
    std::ofstream out(query.out_path, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open " + query.out_path.string() + " for appending");

    using Clock = std::chrono::steady_clock;
    std::optional<Clock::time_point> last_request;
    int total_pages = -1;
    for (int page = 1;; ++page) {
        if (last_request) {
            auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - *last_request);
            if (elapsed < query.min_request_interval) sleep(query.min_request_interval - elapsed);
        }
        last_request = Clock::now();
        const std::string where = "page " + std::to_string(page);
        PageOutcome outcome = request_page(query, transport, sleep, guardian_search_target(query, page));
        auto next_or_stop = [&]() { return total_pages < 0 || page >= total_pages; };
        if (!outcome.ok) {
            manifest.failures.push_back({where, outcome.reason});
            if (next_or_stop()) break;
            continue;
        }

        nlohmann::json payload;
        try {
            payload = nlohmann::json::parse(outcome.body);
        } catch (const nlohmann::json::parse_error& e) {
            manifest.failures.push_back({where, std::string("malformed payload: ") + e.what()});
            if (next_or_stop()) break;
            continue;
        }
        const nlohmann::json* response =
            payload.is_object() && payload.contains("response") ? &payload["response"] : nullptr;
        if (!response || !response->is_object() || !response->contains("results") ||
            !(*response)["results"].is_array()) {
            manifest.failures.push_back({where, "malformed payload: missing response.results"});
            if (next_or_stop()) break;
            continue;
        }
        ++manifest.pages_fetched;
        if (auto it = response->find("pages"); it != response->end() && it->is_number_integer()) {
            total_pages = it->get<int>();
        } else if (total_pages < 0) {
            total_pages = page;
        }

        const auto& results = (*response)["results"];
        for (std::size_t k = 0; k < results.size(); ++k) {
            const auto& item = results[k];
            const std::string item_where = where + " item " + std::to_string(k);
            if (!item.is_object() || !item.contains("id") || !item["id"].is_string()) {
                manifest.failures.push_back({item_where, "missing id"});
                continue;
            }
            std::string id = item["id"].get<std::string>();
            if (seen.count(id)) {
                ++manifest.documents_already_present;
                continue;
            }
            const nlohmann::json* fields = item.contains("fields") && item["fields"].is_object() ? &item["fields"] : nullptr;
            const nlohmann::json* body = nullptr;
            if (fields) {
                if (auto it = fields->find("bodyText"); it != fields->end() && it->is_string()) body = &*it;
                else if (auto it2 = fields->find("body"); it2 != fields->end() && it2->is_string()) body = &*it2;
            }
            if (!body) {
                manifest.failures.push_back({item_where, "missing fields.bodyText for " + id});
                continue;
            }
            RawDocument doc;
            doc.id = id;
            doc.text = strip_html(body->get<std::string>());
            doc.source = "guardian";
            if (auto it = item.find("webPublicationDate"); it != item.end() && it->is_string()) {
                doc.date = Date::parse_iso(it->get<std::string>());
            }
            if (doc.text.empty()) {
                manifest.failures.push_back({item_where, "empty body for " + id});
                continue;
            }
            out << to_jsonl_line(doc) << '\n';
            out.flush();
            if (!out) throw IoError("write failed: " + query.out_path.string());
            seen.insert(id);
            ++manifest.documents_written;
            if (doc.date) {
                if (!manifest.date_range_covered) {
                    manifest.date_range_covered = std::make_pair(*doc.date, *doc.date);
                } else {
                    manifest.date_range_covered->first = std::min(manifest.date_range_covered->first, *doc.date);
                    manifest.date_range_covered->second = std::max(manifest.date_range_covered->second, *doc.date);
                }
            }
        }
        if (page >= total_pages) break;
    }
    return manifest;
}

}  // namespace biaslens
