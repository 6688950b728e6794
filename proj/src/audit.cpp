#include "biaslens/audit.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "biaslens/csv.hpp"
#include "biaslens/error.hpp"

namespace biaslens {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config parsing

namespace {

/// Strict accessor over one JSON object: rejects unknown keys and wrong types.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw FormatError("config: " + where_ + " must be an object");
    }

    template <class T>
    T get(const std::string& key, T fallback) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return fallback;
        try {
            return it->template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw FormatError("config: " + path(key) + " has the wrong type");
        }
    }

    const Json* child(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return nullptr;
        return &*it;
    }

    std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw FormatError("config: unknown field " + path(key));
        }
    }

private:
    const Json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

std::vector<std::pair<std::string, std::string>> read_pairs(const Json& j, const std::string& where) {
    if (!j.is_array()) throw FormatError("config: " + where + " must be an array of [a, b] pairs");
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string()) {
            throw FormatError("config: " + where + " entries must be [string, string]");
        }
        out.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
    return out;
}

}  // namespace

bool MetricPlan::selected(std::string_view name) const {
    if (name == "presence") return presence;
    if (name == "premodified") return premodified;
    if (name == "modifier_ratio") return modifier_ratio;
    if (name == "generics") return generics;
    if (name == "binomials") return binomials;
    if (name == "association") return association;
    return false;
}

std::vector<std::string> MetricPlan::selected_names() const {
    std::vector<std::string> out;
    for (const char* m : kMetricNames) {
        if (selected(m)) out.emplace_back(m);
    }
    return out;
}

fs::path AuditConfig::resolve(const std::string& path) const {
    fs::path p(path);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

bool AuditConfig::operator==(const AuditConfig& o) const {
    return sources == o.sources && slices == o.slices && tokenizer == o.tokenizer && training == o.training &&
           lexicons == o.lexicons && metrics == o.metrics && output_dir == o.output_dir && seed == o.seed &&
           strict == o.strict && threads == o.threads;
}

AuditConfig parse_config(const Json& j, const fs::path& base_dir) {
    AuditConfig c;
    c.base_dir = base_dir;
    ObjectReader top(j, "");

    if (const Json* sources = top.child("sources")) {
        if (!sources->is_array()) throw FormatError("config: sources must be an array");
        for (std::size_t i = 0; i < sources->size(); ++i) {
            ObjectReader r((*sources)[i], "sources[" + std::to_string(i) + "]");
            SourceSpec s;
            auto type = r.get<std::string>("type", "jsonl");
            if (type == "jsonl") s.kind = SourceSpec::Kind::Jsonl;
            else if (type == "plaintext_dir") s.kind = SourceSpec::Kind::PlaintextDir;
            else if (type == "guardian") s.kind = SourceSpec::Kind::Guardian;
            else throw FormatError("config: " + r.path("type") + " must be jsonl, plaintext_dir or guardian");
            s.path = r.get<std::string>("path", "");
            s.metadata_rule = r.get<std::string>("metadata_rule", "");
            s.source_label = r.get<std::string>("source", s.kind == SourceSpec::Kind::Guardian ? "guardian" : "plaintext");
            s.from_date = r.get<std::string>("from", "");
            s.to_date = r.get<std::string>("to", "");
            s.page_size = r.get<std::int64_t>("page_size", s.page_size);
            s.content_type = r.get<std::string>("content_type", s.content_type);
            s.base_url = r.get<std::string>("base_url", s.base_url);
            r.finish();
            c.sources.push_back(std::move(s));
        }
    }

    if (const Json* slices = top.child("slices")) {
        ObjectReader r(*slices, "slices");
        auto mode = r.get<std::string>("mode", "by_year");
        if (mode == "by_year") c.slices.mode = SlicePlan::Mode::ByYear;
        else if (mode == "all") c.slices.mode = SlicePlan::Mode::All;
        else if (mode == "explicit") c.slices.mode = SlicePlan::Mode::Explicit;
        else throw FormatError("config: slices.mode must be by_year, all or explicit");
        c.slices.include_undated = r.get<bool>("include_undated", true);
        if (const Json* list = r.child("explicit")) {
            if (!list->is_array()) throw FormatError("config: slices.explicit must be an array");
            for (std::size_t i = 0; i < list->size(); ++i) {
                ObjectReader s((*list)[i], "slices.explicit[" + std::to_string(i) + "]");
                SliceSpec spec;
                spec.label = s.get<std::string>("label", "");
                if (s.child("year_from")) spec.filter.year_from = s.get<int>("year_from", 0);
                if (s.child("year_to")) spec.filter.year_to = s.get<int>("year_to", 0);
                if (s.child("source")) spec.filter.source = s.get<std::string>("source", "");
                spec.filter.undated_only = s.get<bool>("undated_only", false);
                s.finish();
                c.slices.slices.push_back(std::move(spec));
            }
        }
        r.finish();
    }

    if (const Json* tok = top.child("tokenizer")) {
        ObjectReader r(*tok, "tokenizer");
        c.tokenizer.lowercase = r.get<bool>("lowercase", true);
        c.tokenizer.keep_apostrophes = r.get<bool>("keep_apostrophes", true);
        c.tokenizer.keep_hyphens = r.get<bool>("keep_hyphens", true);
        r.finish();
    }

    c.seed = top.get<std::uint64_t>("seed", c.seed);

    if (const Json* tr = top.child("training")) {
        ObjectReader r(*tr, "training");
        TrainConfig& t = c.training.config;
        t.dim = r.get<std::uint32_t>("dim", t.dim);
        t.window = r.get<std::uint32_t>("window", t.window);
        t.negatives = r.get<std::uint32_t>("negatives", t.negatives);
        t.epochs = r.get<std::uint32_t>("epochs", t.epochs);
        t.initial_lr = r.get<double>("initial_lr", t.initial_lr);
        t.min_lr = r.get<double>("min_lr", t.min_lr);
        t.subsample_t = r.get<double>("subsample_t", t.subsample_t);
        t.min_count = r.get<std::uint64_t>("min_count", t.min_count);
        t.threads = r.get<std::uint32_t>("threads", t.threads);
        t.shrink_window = r.get<bool>("shrink_window", t.shrink_window);
        c.training.mode = r.get<std::string>("mode", c.training.mode);
        c.training.pretrained = r.get<std::map<std::string, std::string>>("pretrained", {});
        r.finish();
    }
    c.training.config.seed = c.seed;

    if (const Json* lx = top.child("lexicons")) {
        ObjectReader r(*lx, "lexicons");
        auto& l = c.lexicons;
        l.male_pronouns = r.get<std::string>("male_pronouns", "");
        l.female_pronouns = r.get<std::string>("female_pronouns", "");
        l.male_anchor = r.get<std::string>("male_anchor", "");
        l.female_anchor = r.get<std::string>("female_anchor", "");
        l.anchor = r.get<std::string>("anchor", l.anchor);
        l.occupation = r.get<std::string>("occupation", "");
        l.characteristic = r.get<std::string>("characteristic", "");
        l.physical = r.get<std::string>("physical", "");
        if (const Json* inq = r.child("inquirer")) {
            ObjectReader ir(*inq, "lexicons.inquirer");
            l.inquirer_path = ir.get<std::string>("path", "");
            l.inquirer_categories = ir.get<std::vector<std::string>>("categories", {});
            ir.finish();
        }
        if (const Json* themes = r.child("themes")) {
            if (!themes->is_array()) throw FormatError("config: lexicons.themes must be an array");
            for (std::size_t i = 0; i < themes->size(); ++i) {
                ObjectReader tr((*themes)[i], "lexicons.themes[" + std::to_string(i) + "]");
                ThemeSpec t;
                t.name = tr.get<std::string>("name", "");
                t.path = tr.get<std::string>("path", "");
                tr.finish();
                l.themes.push_back(std::move(t));
            }
        }
        if (const Json* ex = r.child("expansion")) {
            ObjectReader er(*ex, "lexicons.expansion");
            l.expand = er.get<bool>("enabled", false);
            l.expand_k = er.get<std::int64_t>("k", l.expand_k);
            l.expand_min_similarity = er.get<double>("min_similarity", l.expand_min_similarity);
            er.finish();
        }
        r.finish();
    }

    if (const Json* metrics = top.child("metrics")) {
        ObjectReader r(*metrics, "metrics");
        auto& m = c.metrics;
        if (const Json* p = r.child("presence")) {
            ObjectReader(*p, "metrics.presence").finish();
            m.presence = true;
        }
        if (const Json* p = r.child("premodified")) {
            ObjectReader pr(*p, "metrics.premodified");
            m.premod_min_freq = pr.get<std::int64_t>("min_freq", m.premod_min_freq);
            pr.finish();
            m.premodified = true;
        }
        if (const Json* p = r.child("modifier_ratio")) {
            ObjectReader(*p, "metrics.modifier_ratio").finish();
            m.modifier_ratio = true;
        }
        if (const Json* p = r.child("generics")) {
            ObjectReader gr(*p, "metrics.generics");
            if (const Json* pairs = gr.child("pairs")) {
                m.generics_pairs.clear();
                for (auto& [a, b] : read_pairs(*pairs, "metrics.generics.pairs")) m.generics_pairs.push_back({a, b});
            }
            gr.finish();
            m.generics = true;
        }
        if (const Json* p = r.child("binomials")) {
            ObjectReader br(*p, "metrics.binomials");
            m.binomial_window = br.get<std::int64_t>("window", m.binomial_window);
            if (const Json* pairs = br.child("pairs")) {
                m.binomial_pairs.clear();
                for (auto& [a, b] : read_pairs(*pairs, "metrics.binomials.pairs")) m.binomial_pairs.push_back({a, b});
            }
            br.finish();
            m.binomials = true;
        }
        if (const Json* p = r.child("association")) {
            ObjectReader ar(*p, "metrics.association");
            m.association_top_k = ar.get<std::int64_t>("top_k", m.association_top_k);
            ar.finish();
            m.association = true;
        }
        r.finish();
    }

    c.output_dir = top.get<std::string>("output_dir", c.output_dir);
    c.strict = top.get<bool>("strict", c.strict);
    c.threads = top.get<std::int64_t>("threads", c.threads);
    top.finish();
    return c;
}

AuditConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("config " + path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

Json config_to_json(const AuditConfig& c) {
    auto path_or_null = [](const std::string& p) { return p.empty() ? Json(nullptr) : Json(p); };
    Json sources = Json::array();
    for (const auto& s : c.sources) {
        Json js;
        switch (s.kind) {
            case SourceSpec::Kind::Jsonl:
                js = Json{{"type", "jsonl"}, {"path", s.path}};
                break;
            case SourceSpec::Kind::PlaintextDir:
                js = Json{{"type", "plaintext_dir"},
                          {"path", s.path},
                          {"metadata_rule", s.metadata_rule},
                          {"source", s.source_label}};
                break;
            case SourceSpec::Kind::Guardian:
                js = Json{{"type", "guardian"},     {"path", s.path},         {"from", s.from_date},
                          {"to", s.to_date},        {"page_size", s.page_size}, {"content_type", s.content_type},
                          {"base_url", s.base_url}, {"source", s.source_label}};
                break;
        }
        sources.push_back(std::move(js));
    }
    Json explicit_slices = Json::array();
    for (const auto& s : c.slices.slices) {
        Json f = s.filter;
        Json js{{"label", s.label}};
        for (auto& [k, v] : f.items()) js[k] = v;
        explicit_slices.push_back(std::move(js));
    }
    const char* mode = c.slices.mode == SlicePlan::Mode::ByYear ? "by_year"
                       : c.slices.mode == SlicePlan::Mode::All  ? "all"
                                                                : "explicit";
    Json training = c.training.config;
    training.erase("seed");
    training["mode"] = c.training.mode;
    training["pretrained"] = Json(c.training.pretrained);

    const auto& l = c.lexicons;
    Json themes = Json::array();
    for (const auto& t : l.themes) themes.push_back(Json{{"name", t.name}, {"path", t.path}});
    Json lexicons{{"male_pronouns", path_or_null(l.male_pronouns)},
                  {"female_pronouns", path_or_null(l.female_pronouns)},
                  {"male_anchor", path_or_null(l.male_anchor)},
                  {"female_anchor", path_or_null(l.female_anchor)},
                  {"anchor", l.anchor},
                  {"occupation", path_or_null(l.occupation)},
                  {"characteristic", path_or_null(l.characteristic)},
                  {"physical", path_or_null(l.physical)},
                  {"inquirer", l.inquirer_path.empty()
                                   ? Json(nullptr)
                                   : Json{{"path", l.inquirer_path}, {"categories", l.inquirer_categories}}},
                  {"themes", themes},
                  {"expansion", Json{{"enabled", l.expand}, {"k", l.expand_k}, {"min_similarity", l.expand_min_similarity}}}};

    const auto& m = c.metrics;
    Json metrics = Json::object();
    if (m.presence) metrics["presence"] = Json::object();
    if (m.premodified) metrics["premodified"] = Json{{"min_freq", m.premod_min_freq}};
    if (m.modifier_ratio) metrics["modifier_ratio"] = Json::object();
    if (m.generics) {
        Json pairs = Json::array();
        for (const auto& p : m.generics_pairs) pairs.push_back(Json::array({p.marked, p.neutral}));
        metrics["generics"] = Json{{"pairs", pairs}};
    }
    if (m.binomials) {
        Json pairs = Json::array();
        for (const auto& p : m.binomial_pairs) pairs.push_back(Json::array({p.male_term, p.female_term}));
        metrics["binomials"] = Json{{"window", m.binomial_window}, {"pairs", pairs}};
    }
    if (m.association) metrics["association"] = Json{{"top_k", m.association_top_k}};

    return Json{{"sources", sources},
                {"slices", Json{{"mode", mode}, {"include_undated", c.slices.include_undated}, {"explicit", explicit_slices}}},
                {"tokenizer", c.tokenizer},
                {"training", training},
                {"lexicons", lexicons},
                {"metrics", metrics},
                {"output_dir", c.output_dir},
                {"seed", c.seed},
                {"strict", c.strict},
                {"threads", c.threads}};
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate(const AuditConfig& c) {
    std::vector<std::string> problems;
    auto need_path = [&](const std::string& what, const std::string& p, bool dir) {
        if (p.empty()) {
            problems.push_back(what + ": path is required");
            return;
        }
        std::error_code ec;
        fs::path resolved = c.resolve(p);
        bool ok = dir ? fs::is_directory(resolved, ec) : fs::is_regular_file(resolved, ec);
        if (!ok) problems.push_back(what + ": " + (dir ? "directory" : "file") + " not found: " + p);
    };
    auto optional_file = [&](const std::string& what, const std::string& p) {
        if (!p.empty()) need_path(what, p, false);
    };

    if (c.sources.empty()) problems.push_back("sources: at least one corpus source is required");
    for (std::size_t i = 0; i < c.sources.size(); ++i) {
        const auto& s = c.sources[i];
        std::string where = "sources[" + std::to_string(i) + "]";
        switch (s.kind) {
            case SourceSpec::Kind::Jsonl: need_path(where, s.path, false); break;
            case SourceSpec::Kind::PlaintextDir: need_path(where, s.path, true); break;
            case SourceSpec::Kind::Guardian: {
                if (s.path.empty()) problems.push_back(where + ": path (JSONL output) is required");
                auto from = Date::parse_iso(s.from_date);
                auto to = Date::parse_iso(s.to_date);
                if (!from || !to) problems.push_back(where + ": from/to must be YYYY-MM-DD dates");
                else if (*to < *from) problems.push_back(where + ": from is after to");
                if (s.page_size < 1 || s.page_size > 200) problems.push_back(where + ": page_size must be in 1..200");
                const char* key = std::getenv(kGuardianKeyEnv);
                if (!key || !*key) problems.push_back(where + ": environment variable " + kGuardianKeyEnv + " is not set");
                break;
            }
        }
    }
    if (c.slices.mode == SlicePlan::Mode::Explicit && c.slices.slices.empty()) {
        problems.push_back("slices: explicit mode needs at least one slice");
    }
    std::set<std::string> labels;
    for (const auto& s : c.slices.slices) {
        if (s.label.empty()) problems.push_back("slices: every explicit slice needs a label");
        else if (!labels.insert(s.label).second) problems.push_back("slices: duplicate label " + s.label);
        if (s.filter.year_from && s.filter.year_to && *s.filter.year_from > *s.filter.year_to) {
            problems.push_back("slices: " + s.label + " has year_from > year_to");
        }
    }

    auto selected = c.metrics.selected_names();
    if (selected.empty()) problems.push_back("metrics: select at least one metric");
    if (c.metrics.premod_min_freq < 1) problems.push_back("metrics.premodified.min_freq must be >= 1");
    if (c.metrics.binomial_window < 1) problems.push_back("metrics.binomials.window must be >= 1");
    if (c.metrics.association_top_k < 1) problems.push_back("metrics.association.top_k must be >= 1");
    for (const auto& p : c.metrics.binomial_pairs) {
        if (p.male_term == p.female_term) problems.push_back("metrics.binomials.pairs: " + p.male_term + " paired with itself");
    }
    try {
        GenericsPairTable table(c.metrics.generics_pairs);
    } catch (const PreconditionError& e) {
        problems.push_back(std::string("metrics.generics.pairs: ") + e.what());
    }
    if (c.threads < 1) problems.push_back("threads must be >= 1");

    try {
        c.training.config.validate();
    } catch (const PreconditionError& e) {
        problems.push_back(std::string("training: ") + e.what());
    }
    if (c.training.mode != "per_slice" && c.training.mode != "global") {
        problems.push_back("training.mode must be per_slice or global");
    }
    for (const auto& [label, path] : c.training.pretrained) need_path("training.pretrained." + label, path, false);

    const auto& l = c.lexicons;
    optional_file("lexicons.male_pronouns", l.male_pronouns);
    optional_file("lexicons.female_pronouns", l.female_pronouns);
    optional_file("lexicons.male_anchor", l.male_anchor);
    optional_file("lexicons.female_anchor", l.female_anchor);
    optional_file("lexicons.occupation", l.occupation);
    optional_file("lexicons.characteristic", l.characteristic);
    optional_file("lexicons.physical", l.physical);
    if (l.anchor != "singleton" && l.anchor != "centroid") problems.push_back("lexicons.anchor must be singleton or centroid");
    if (!l.inquirer_path.empty()) {
        need_path("lexicons.inquirer", l.inquirer_path, false);
        if (l.inquirer_categories.empty()) problems.push_back("lexicons.inquirer: list at least one category");
    }
    for (const auto& t : l.themes) {
        if (t.name.empty()) problems.push_back("lexicons.themes: every theme needs a name");
        need_path("lexicons.themes." + t.name, t.path, false);
    }
    if (l.expand_k < 0) problems.push_back("lexicons.expansion.k must be >= 0");
    if (!(l.expand_min_similarity >= -1 && l.expand_min_similarity <= 1)) {
        problems.push_back("lexicons.expansion.min_similarity must lie in [-1, 1]");
    }
    if (c.metrics.association && l.inquirer_path.empty() && l.themes.empty()) {
        problems.push_back("metrics.association: no theme lexicons (set lexicons.inquirer or lexicons.themes)");
    }

    // Lexicon disjointness for presence; only checkable when the files exist.
    if (c.metrics.presence) {
        try {
            auto builtin = builtin_gender_lexicons();
            Lexicon male = l.male_pronouns.empty() ? builtin.male : load_lexicon(c.resolve(l.male_pronouns));
            Lexicon female = l.female_pronouns.empty() ? builtin.female : load_lexicon(c.resolve(l.female_pronouns));
            if (!disjoint(male, female)) problems.push_back("lexicons: male and female pronoun lexicons overlap");
        } catch (const Error&) {
            // missing or malformed file already reported above
        }
    }
    if (c.output_dir.empty()) problems.push_back("output_dir is required");
    return problems;
}

// ---------------------------------------------------------------------------
// Report serialization

bool SliceReport::has_result(std::string_view metric) const {
    if (metric == "presence") return presence.has_value();
    if (metric == "premodified") return premodified.has_value();
    if (metric == "modifier_ratio") return modifier_ratio.has_value();
    if (metric == "generics") return generics.has_value();
    if (metric == "binomials") return binomials.has_value();
    if (metric == "association") return association.has_value();
    return false;
}

bool AuditReport::partial_failure() const {
    return std::any_of(slices.begin(), slices.end(), [](const SliceReport& s) { return !s.errors.empty(); });
}

Json report_to_json(const AuditReport& r) {
    Json slices = Json::array();
    for (const auto& s : r.slices) {
        Json js{{"label", s.label}, {"filter", s.filter}, {"documents", s.documents}, {"tokens", s.tokens}};
        if (s.model) {
            js["model"] = Json{{"origin", s.model->origin},
                               {"checksum", s.model->checksum},
                               {"vocab_size", s.model->vocab_size},
                               {"dim", s.model->dim},
                               {"train_config", s.model->config},
                               {"epoch_mean_loss", s.model->epoch_mean_loss}};
        }
        Json results = Json::object();
        if (s.presence) results["presence"] = *s.presence;
        if (s.premodified) results["premodified"] = *s.premodified;
        if (s.modifier_ratio) results["modifier_ratio"] = *s.modifier_ratio;
        if (s.generics) results["generics"] = *s.generics;
        if (s.binomials) results["binomials"] = *s.binomials;
        if (s.association) results["association"] = *s.association;
        js["results"] = std::move(results);
        js["errors"] = Json(s.errors);
        slices.push_back(std::move(js));
    }
    return Json{{"tool", r.tool},
                {"version", r.version},
                {"config", r.config},
                {"selected_metrics", r.selected_metrics},
                {"slices", slices},
                {"warnings", r.warnings},
                {"timings", Json(r.timings)}};
}

AuditReport report_from_json(const Json& j) {
    try {
        AuditReport r;
        r.tool = j.at("tool").get<std::string>();
        r.version = j.at("version").get<std::string>();
        r.config = j.at("config");
        r.selected_metrics = j.at("selected_metrics").get<std::vector<std::string>>();
        for (const auto& js : j.at("slices")) {
            SliceReport s;
            s.label = js.at("label").get<std::string>();
            s.filter = js.at("filter").get<SliceFilter>();
            s.documents = js.at("documents").get<std::uint64_t>();
            s.tokens = js.at("tokens").get<std::uint64_t>();
            if (auto it = js.find("model"); it != js.end()) {
                ModelFingerprint m;
                m.origin = it->at("origin").get<std::string>();
                m.checksum = it->at("checksum").get<std::string>();
                m.vocab_size = it->at("vocab_size").get<std::uint64_t>();
                m.dim = it->at("dim").get<std::uint64_t>();
                m.config = it->at("train_config").get<TrainConfig>();
                m.epoch_mean_loss = it->at("epoch_mean_loss").get<std::vector<double>>();
                s.model = std::move(m);
            }
            const auto& res = js.at("results");
            if (res.contains("presence")) s.presence = res["presence"].get<PresenceResult>();
            if (res.contains("premodified")) s.premodified = res["premodified"].get<PremodResult>();
            if (res.contains("modifier_ratio")) s.modifier_ratio = res["modifier_ratio"].get<ModifierRatioResult>();
            if (res.contains("generics")) s.generics = res["generics"].get<GenericsResult>();
            if (res.contains("binomials")) s.binomials = res["binomials"].get<BinomialResult>();
            if (res.contains("association")) s.association = res["association"].get<std::vector<AssociationResult>>();
            s.errors = js.at("errors").get<std::map<std::string, std::string>>();
            r.slices.push_back(std::move(s));
        }
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        r.timings = j.at("timings").get<std::map<std::string, double>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("report: ") + e.what());
    }
}

std::string report_to_string(const AuditReport& report) { return report_to_json(report).dump(2) + "\n"; }

AuditReport load_report(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open report " + path.string());
    try {
        return report_from_json(Json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("report " + path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Running

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ResolvedLexicons {
    Lexicon male_pronouns;
    Lexicon female_pronouns;
    Lexicon male_anchor;
    Lexicon female_anchor;
    PremodClassifiers classifiers;
    std::vector<Lexicon> themes;
};

Lexicon merge(std::string name, LexiconCategory category, const Lexicon& a, const Lexicon& b) {
    Lexicon out(std::move(name), category);
    for (const auto& [w, p] : a.entries()) out.add(w, p);
    for (const auto& [w, p] : b.entries()) out.add(w, p);
    return out;
}

ResolvedLexicons resolve_lexicons(const AuditConfig& c) {
    const auto& l = c.lexicons;
    auto load_or = [&](const std::string& path, Lexicon fallback) {
        return path.empty() ? fallback : load_lexicon(c.resolve(path));
    };
    ResolvedLexicons out;
    auto pronouns = builtin_gender_lexicons();
    out.male_pronouns = load_or(l.male_pronouns, pronouns.male);
    out.female_pronouns = load_or(l.female_pronouns, pronouns.female);
    if (l.anchor == "centroid") {
        auto nouns = builtin_gender_nouns();
        out.male_anchor = load_or(l.male_anchor, merge("male-terms", LexiconCategory::GenderMale, out.male_pronouns, nouns.male));
        out.female_anchor =
            load_or(l.female_anchor, merge("female-terms", LexiconCategory::GenderFemale, out.female_pronouns, nouns.female));
    } else {
        auto anchors = builtin_association_anchors();
        out.male_anchor = load_or(l.male_anchor, anchors.male);
        out.female_anchor = load_or(l.female_anchor, anchors.female);
    }
    out.classifiers.occupation = load_or(l.occupation, builtin_occupations());
    out.classifiers.characteristic = load_or(l.characteristic, builtin_characteristics());
    out.classifiers.physical = load_or(l.physical, builtin_physical());
    if (!l.inquirer_path.empty()) {
        out.themes = load_inquirer(c.resolve(l.inquirer_path), l.inquirer_categories, LoadOptions{c.strict});
    }
    for (const auto& t : l.themes) {
        Lexicon lex = load_lexicon(c.resolve(t.path));
        Lexicon named(t.name, lex.category());
        for (const auto& [w, p] : lex.entries()) named.add(w, p);
        out.themes.push_back(std::move(named));
    }
    return out;
}

std::vector<RawDocument> load_sources(const AuditConfig& c, std::vector<std::string>& warnings) {
    std::vector<RawDocument> docs;
    LoadOptions opts{c.strict};
    for (const auto& s : c.sources) {
        LoadStats stats;
        std::vector<RawDocument> part;
        switch (s.kind) {
            case SourceSpec::Kind::Jsonl:
                part = load_jsonl(c.resolve(s.path), opts, &stats);
                break;
            case SourceSpec::Kind::PlaintextDir:
                part = load_plaintext_dir(c.resolve(s.path), MetadataRule(s.metadata_rule), opts, &stats, s.source_label);
                break;
            case SourceSpec::Kind::Guardian: {
                GuardianQuery q;
                q.api_key = std::getenv(kGuardianKeyEnv) ? std::getenv(kGuardianKeyEnv) : "";
                q.from_date = *Date::parse_iso(s.from_date);
                q.to_date = *Date::parse_iso(s.to_date);
                q.page_size = static_cast<int>(s.page_size);
                q.content_type = s.content_type;
                q.out_path = c.resolve(s.path);
                auto transport = make_http_transport(s.base_url);
                auto manifest = fetch_guardian(q, *transport);
                for (const auto& f : manifest.failures) warnings.push_back("guardian " + f.where + ": " + f.reason);
                part = load_jsonl(q.out_path, opts, &stats);
                break;
            }
        }
        if (stats.skipped) {
            warnings.push_back(s.path + ": skipped " + std::to_string(stats.skipped) + " malformed record(s)");
        }
        for (const auto& p : stats.problems) warnings.push_back(p);
        for (auto& d : part) {
            if (s.kind == SourceSpec::Kind::Jsonl && d.source.empty()) d.source = "jsonl";
            docs.push_back(std::move(d));
        }
    }
    return docs;
}

std::vector<SliceSpec> plan_slices(const AuditConfig& c, const Corpus& corpus) {
    std::vector<SliceSpec> out;
    switch (c.slices.mode) {
        case SlicePlan::Mode::All:
            out.push_back({"all", SliceFilter{}});
            break;
        case SlicePlan::Mode::Explicit:
            out = c.slices.slices;
            break;
        case SlicePlan::Mode::ByYear: {
            for (int year : years_present(corpus)) {
                SliceFilter f;
                f.year_from = year;
                f.year_to = year;
                out.push_back({std::to_string(year), f});
            }
            if (c.slices.include_undated) {
                SliceFilter f;
                f.undated_only = true;
                if (!slice(corpus, f, "undated").empty()) out.push_back({"undated", f});
            }
            break;
        }
    }
    return out;
}

ModelFingerprint fingerprint(const EmbeddingModel& model, std::string origin, const TrainLog* log) {
    ModelFingerprint f;
    f.origin = std::move(origin);
    f.checksum = model_checksum(model);
    f.vocab_size = model.vocab.size();
    f.dim = model.dim();
    f.config = model.config;
    if (log) f.epoch_mean_loss = log->epoch_mean_loss;
    return f;
}

}  // namespace

AuditReport compute_audit(const AuditConfig& config) {
    auto problems = validate(config);
    if (!problems.empty()) {
        std::string msg = "invalid audit config:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw PreconditionError(msg);
    }
    const auto t_start = Clock::now();
    AuditReport report;
    report.config = config_to_json(config);
    report.selected_metrics = config.metrics.selected_names();

    ResolvedLexicons lex = resolve_lexicons(config);
    auto docs = load_sources(config, report.warnings);
    const int threads = static_cast<int>(config.threads);
    Corpus corpus = build_corpus(docs, config.tokenizer, threads);
    docs.clear();
    report.timings["load_seconds"] = seconds_since(t_start);

    const ExecPolicy policy{threads};
    const auto& m = config.metrics;
    TrainConfig train_cfg = config.training.config;
    train_cfg.seed = config.seed;

    std::optional<EmbeddingModel> global_model;
    std::optional<ModelFingerprint> global_print;
    std::string global_error;
    auto get_global = [&]() -> const EmbeddingModel* {
        if (!global_model && global_error.empty()) {
            try {
                if (auto it = config.training.pretrained.find("*"); it != config.training.pretrained.end()) {
                    global_model = load_model(config.resolve(it->second));
                    global_print = fingerprint(*global_model, it->second, nullptr);
                } else {
                    TrainLog log;
                    global_model = train_cbow(corpus, train_cfg, &log);
                    global_print = fingerprint(*global_model, "trained", &log);
                }
            } catch (const Error& e) {
                global_error = e.what();
            }
        }
        return global_model ? &*global_model : nullptr;
    };

    for (const auto& spec : plan_slices(config, corpus)) {
        const auto t_slice = Clock::now();
        CorpusView view = slice(corpus, spec.filter, spec.label);
        SliceReport s;
        s.label = spec.label;
        s.filter = spec.filter;
        s.documents = view.size();
        s.tokens = view.token_count();

        auto attempt = [&](const char* name, auto&& fn) {
            if (!m.selected(name)) return;
            try {
                fn();
            } catch (const Error& e) {
                s.errors[name] = e.what();
            }
        };
        attempt("presence", [&] { s.presence = presence(view, lex.male_pronouns, lex.female_pronouns, policy); });
        attempt("premodified", [&] {
            s.premodified = premodified(view, lex.classifiers, static_cast<std::uint64_t>(m.premod_min_freq), {}, policy);
        });
        attempt("modifier_ratio", [&] { s.modifier_ratio = modifier_ratio(view, {}, policy); });
        attempt("generics", [&] { s.generics = generics_trend(view, GenericsPairTable(m.generics_pairs), policy); });
        attempt("binomials", [&] {
            s.binomials = binomial_order(view, m.binomial_pairs, static_cast<std::size_t>(m.binomial_window), policy);
        });
        attempt("association", [&] {
            std::optional<EmbeddingModel> slice_model;
            const EmbeddingModel* model = nullptr;
            if (auto it = config.training.pretrained.find(spec.label); it != config.training.pretrained.end()) {
                slice_model = load_model(config.resolve(it->second));
                s.model = fingerprint(*slice_model, it->second, nullptr);
                model = &*slice_model;
            } else if (config.training.mode == "global" || config.training.pretrained.count("*")) {
                model = get_global();
                if (!model) throw Error("global model unavailable: " + global_error);
                s.model = global_print;
            } else {
                TrainLog log;
                slice_model = train_cbow(view, train_cfg, &log);
                s.model = fingerprint(*slice_model, "trained", &log);
                model = &*slice_model;
            }
            std::vector<AssociationResult> results;
            std::vector<std::string> failures;
            for (const auto& theme : lex.themes) {
                try {
                    Lexicon effective = theme;
                    if (config.lexicons.expand) {
                        auto ex = expand(theme, *model, static_cast<std::size_t>(config.lexicons.expand_k),
                                         config.lexicons.expand_min_similarity);
                        effective = std::move(ex.lexicon);
                        if (!ex.missing_seeds.empty()) {
                            report.warnings.push_back(spec.label + ": theme " + theme.name() + ": " +
                                                      std::to_string(ex.missing_seeds.size()) +
                                                      " seed(s) not in vocabulary");
                        }
                    }
                    results.push_back(association_pair(*model, lex.male_anchor, lex.female_anchor, effective,
                                                       static_cast<std::size_t>(m.association_top_k)));
                } catch (const PreconditionError& e) {
                    failures.push_back(theme.name() + ": " + e.what());
                    report.warnings.push_back(spec.label + ": association " + theme.name() + ": " + e.what());
                }
            }
            if (results.empty()) {
                std::string msg = "no theme produced a result";
                for (const auto& f : failures) msg += "; " + f;
                throw Error(msg);
            }
            s.association = std::move(results);
        });

        if (s.presence && !s.presence->female_proportion) report.warnings.push_back(spec.label + ": presence undefined (no gendered pronouns)");
        if (s.modifier_ratio && !s.modifier_ratio->female_share) report.warnings.push_back(spec.label + ": modifier ratio undefined");
        if (s.binomials && !s.binomials->male_first_share) report.warnings.push_back(spec.label + ": no binomials matched");
        report.timings["slice:" + spec.label] = seconds_since(t_slice);
        report.slices.push_back(std::move(s));
    }
    report.timings["total_seconds"] = seconds_since(t_start);
    return report;
}

// ---------------------------------------------------------------------------
// Plot data

std::map<std::string, std::string> render_plot_data(const AuditReport& report) {
    std::map<std::string, std::string> files;
    auto selected = [&](const std::string& name) {
        return std::find(report.selected_metrics.begin(), report.selected_metrics.end(), name) !=
               report.selected_metrics.end();
    };
    auto u = [](std::uint64_t v) { return std::to_string(v); };

    if (selected("presence")) {
        csv::Table t({"slice", "male_count", "female_count", "female_proportion"});
        for (const auto& s : report.slices) {
            if (!s.presence) continue;
            t.add_row({s.label, u(s.presence->male_count), u(s.presence->female_count),
                       csv_value(s.presence->female_proportion)});
        }
        files["presence.csv"] = t.str();
    }
    if (selected("modifier_ratio")) {
        csv::Table t({"slice", "male_count", "female_count", "female_share"});
        for (const auto& s : report.slices) {
            if (!s.modifier_ratio) continue;
            t.add_row({s.label, u(s.modifier_ratio->male_count), u(s.modifier_ratio->female_count),
                       csv_value(s.modifier_ratio->female_share)});
        }
        files["modifier_ratio.csv"] = t.str();
    }
    if (selected("premodified")) {
        csv::Table t({"slice", "modifier", "head", "frequency", "category", "equally_premodified"});
        for (const auto& s : report.slices) {
            if (!s.premodified) continue;
            const auto& eq = s.premodified->equally_premodified;
            for (const auto& [name, side] : {std::pair{"male", &s.premodified->male}, std::pair{"female", &s.premodified->female}}) {
                for (const auto& h : side->heads) {
                    bool both = std::binary_search(eq.begin(), eq.end(), h.head);
                    t.add_row({s.label, name, h.head, u(h.frequency), std::string(to_string(h.category)),
                               both ? "true" : "false"});
                }
            }
        }
        files["premod.csv"] = t.str();
    }
    if (selected("generics")) {
        csv::Table t({"slice", "marked", "neutral", "marked_count", "neutral_count", "neutral_share"});
        for (const auto& s : report.slices) {
            if (!s.generics) continue;
            for (const auto& p : s.generics->pairs) {
                t.add_row({s.label, p.marked, p.neutral, u(p.marked_count), u(p.neutral_count), csv_value(p.neutral_share)});
            }
        }
        files["generics.csv"] = t.str();
    }
    if (selected("binomials")) {
        csv::Table t({"slice", "male_term", "female_term", "male_first", "female_first", "male_first_share"});
        for (const auto& s : report.slices) {
            if (!s.binomials) continue;
            for (const auto& p : s.binomials->pairs) {
                t.add_row({s.label, p.male_term, p.female_term, u(p.male_first), u(p.female_first),
                           csv_value(p.male_first_share)});
            }
            t.add_row({s.label, "*", "*", u(s.binomials->male_first_total), u(s.binomials->female_first_total),
                       csv_value(s.binomials->male_first_share)});
        }
        files["binomials.csv"] = t.str();
    }
    if (selected("association")) {
        std::map<std::string, csv::Table> tables;
        for (const auto& s : report.slices) {
            if (!s.association) continue;
            for (const auto& a : *s.association) {
                auto [it, inserted] = tables.try_emplace(
                    a.theme, std::vector<std::string>{"slice", "gender", "anchor", "rank", "word", "similarity",
                                                      "mean_similarity"});
                for (const auto& [gender, g] : {std::pair{"male", &a.male}, std::pair{"female", &a.female}}) {
                    for (std::size_t rank = 0; rank < g->top_terms.size(); ++rank) {
                        it->second.add_row({s.label, gender, g->anchor, std::to_string(rank + 1), g->top_terms[rank].word,
                                            csv::format_real(g->top_terms[rank].similarity),
                                            csv::format_real(g->mean_similarity)});
                    }
                }
            }
        }
        for (const auto& [theme, table] : tables) {
            std::string safe;
            for (char ch : theme) safe.push_back(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' ? ch : '_');
            files["association_" + safe + ".csv"] = table.str();
        }
    }
    return files;
}

namespace {

void write_atomically(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void ensure_writable_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
    fs::path probe = dir / ".biaslens-write-probe";
    {
        std::ofstream out(probe, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("output directory is not writable: " + dir.string());
    }
    fs::remove(probe, ec);
}

}  // namespace

std::vector<fs::path> emit_plot_data(const AuditReport& report, const fs::path& out_dir) {
    auto files = render_plot_data(report);
    if (files.empty()) return {};
    ensure_writable_dir(out_dir);
    std::vector<fs::path> written;
    for (const auto& [name, content] : files) {
        write_atomically(out_dir / name, content);
        written.push_back(out_dir / name);
    }
    return written;
}

AuditOutputs run_audit(const AuditConfig& config) {
    AuditOutputs out;
    out.report = compute_audit(config);
    fs::path dir = config.resolve(config.output_dir);
    ensure_writable_dir(dir);
    write_atomically(dir / "report.json", report_to_string(out.report));
    out.written.push_back(dir / "report.json");
    for (auto& p : emit_plot_data(out.report, dir)) out.written.push_back(std::move(p));
    return out;
}

}  // namespace biaslens
