#include "biaslens/report_io.hpp"

#include "biaslens/csv.hpp"
#include "biaslens/error.hpp"

namespace biaslens {

namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> get_opt(const Json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

Json category_counts(const std::array<std::uint64_t, kPremodCategoryCount>& counts) {
    Json j = Json::object();
    for (std::size_t c = 0; c < kPremodCategoryCount; ++c) {
        j[std::string(to_string(static_cast<PremodCategory>(c)))] = counts[c];
    }
    return j;
}

std::array<std::uint64_t, kPremodCategoryCount> parse_category_counts(const Json& j) {
    std::array<std::uint64_t, kPremodCategoryCount> out{};
    for (std::size_t c = 0; c < kPremodCategoryCount; ++c) {
        out[c] = j.at(std::string(to_string(static_cast<PremodCategory>(c)))).get<std::uint64_t>();
    }
    return out;
}

Json side_to_json(const PremodSide& side) {
    Json heads = Json::array();
    for (const auto& h : side.heads) {
        heads.push_back(Json{{"head", h.head}, {"frequency", h.frequency}, {"category", to_string(h.category)}});
    }
    return Json{{"heads", heads},
                {"unique_terms", category_counts(side.unique_terms)},
                {"token_counts", category_counts(side.token_counts)}};
}

PremodSide side_from_json(const Json& j) {
    PremodSide side;
    for (const auto& h : j.at("heads")) {
        auto cat = parse_premod_category(h.at("category").get<std::string>());
        if (!cat) throw FormatError("unknown premodification category");
        side.heads.push_back({h.at("head").get<std::string>(), h.at("frequency").get<std::uint64_t>(), *cat});
    }
    side.unique_terms = parse_category_counts(j.at("unique_terms"));
    side.token_counts = parse_category_counts(j.at("token_counts"));
    return side;
}

}  // namespace

void to_json(Json& j, const PresenceResult& r) {
    j = Json{{"label", r.label},
             {"male_count", r.male_count},
             {"female_count", r.female_count},
             {"female_proportion", opt(r.female_proportion)}};
}

void from_json(const Json& j, PresenceResult& r) {
    r.label = j.at("label").get<std::string>();
    r.male_count = j.at("male_count").get<std::uint64_t>();
    r.female_count = j.at("female_count").get<std::uint64_t>();
    r.female_proportion = get_opt(j, "female_proportion");
}

void to_json(Json& j, const PremodResult& r) {
    j = Json{{"label", r.label},
             {"min_freq", r.min_freq},
             {"male", side_to_json(r.male)},
             {"female", side_to_json(r.female)},
             {"equally_premodified", r.equally_premodified}};
}

void from_json(const Json& j, PremodResult& r) {
    r.label = j.at("label").get<std::string>();
    r.min_freq = j.at("min_freq").get<std::uint64_t>();
    r.male = side_from_json(j.at("male"));
    r.female = side_from_json(j.at("female"));
    r.equally_premodified = j.at("equally_premodified").get<std::vector<std::string>>();
}

void to_json(Json& j, const ModifierRatioResult& r) {
    j = Json{{"label", r.label},
             {"male_count", r.male_count},
             {"female_count", r.female_count},
             {"female_share", opt(r.female_share)}};
}

void from_json(const Json& j, ModifierRatioResult& r) {
    r.label = j.at("label").get<std::string>();
    r.male_count = j.at("male_count").get<std::uint64_t>();
    r.female_count = j.at("female_count").get<std::uint64_t>();
    r.female_share = get_opt(j, "female_share");
}

void to_json(Json& j, const GenericsResult& r) {
    Json pairs = Json::array();
    for (const auto& p : r.pairs) {
        pairs.push_back(Json{{"marked", p.marked},
                             {"neutral", p.neutral},
                             {"marked_count", p.marked_count},
                             {"neutral_count", p.neutral_count},
                             {"neutral_share", opt(p.neutral_share)}});
    }
    j = Json{{"label", r.label}, {"pairs", pairs}};
}

void from_json(const Json& j, GenericsResult& r) {
    r.label = j.at("label").get<std::string>();
    r.pairs.clear();
    for (const auto& p : j.at("pairs")) {
        r.pairs.push_back({p.at("marked").get<std::string>(), p.at("neutral").get<std::string>(),
                           p.at("marked_count").get<std::uint64_t>(), p.at("neutral_count").get<std::uint64_t>(),
                           get_opt(p, "neutral_share")});
    }
}

void to_json(Json& j, const BinomialResult& r) {
    Json pairs = Json::array();
    for (const auto& p : r.pairs) {
        pairs.push_back(Json{{"male_term", p.male_term},
                             {"female_term", p.female_term},
                             {"male_first", p.male_first},
                             {"female_first", p.female_first},
                             {"male_first_share", opt(p.male_first_share)}});
    }
    j = Json{{"label", r.label},
             {"window", r.window},
             {"pairs", pairs},
             {"male_first_total", r.male_first_total},
             {"female_first_total", r.female_first_total},
             {"male_first_share", opt(r.male_first_share)}};
}

void from_json(const Json& j, BinomialResult& r) {
    r.label = j.at("label").get<std::string>();
    r.window = j.at("window").get<std::uint64_t>();
    r.pairs.clear();
    for (const auto& p : j.at("pairs")) {
        r.pairs.push_back({p.at("male_term").get<std::string>(), p.at("female_term").get<std::string>(),
                           p.at("male_first").get<std::uint64_t>(), p.at("female_first").get<std::uint64_t>(),
                           get_opt(p, "male_first_share")});
    }
    r.male_first_total = j.at("male_first_total").get<std::uint64_t>();
    r.female_first_total = j.at("female_first_total").get<std::uint64_t>();
    r.male_first_share = get_opt(j, "male_first_share");
}

void to_json(Json& j, const Neighbor& n) { j = Json{{"word", n.word}, {"similarity", n.similarity}}; }

void from_json(const Json& j, Neighbor& n) {
    n.word = j.at("word").get<std::string>();
    n.similarity = j.at("similarity").get<double>();
}

void to_json(Json& j, const GenderAssociation& g) {
    j = Json{{"anchor", g.anchor},
             {"anchor_terms", g.anchor_terms},
             {"top_k", g.top_k},
             {"mean_similarity", g.mean_similarity},
             {"lexicon_mean", g.lexicon_mean},
             {"theme_terms_in_vocab", g.theme_terms_in_vocab},
             {"top_terms", g.top_terms}};
}

void from_json(const Json& j, GenderAssociation& g) {
    g.anchor = j.at("anchor").get<std::string>();
    g.anchor_terms = j.at("anchor_terms").get<std::vector<std::string>>();
    g.top_k = j.at("top_k").get<std::uint64_t>();
    g.mean_similarity = j.at("mean_similarity").get<double>();
    g.lexicon_mean = j.at("lexicon_mean").get<double>();
    g.theme_terms_in_vocab = j.at("theme_terms_in_vocab").get<std::uint64_t>();
    g.top_terms = j.at("top_terms").get<std::vector<Neighbor>>();
}

void to_json(Json& j, const AssociationResult& r) {
    j = Json{{"theme", r.theme}, {"gap", r.gap}, {"male", r.male}, {"female", r.female}};
}

void from_json(const Json& j, AssociationResult& r) {
    r.theme = j.at("theme").get<std::string>();
    r.gap = j.at("gap").get<double>();
    r.male = j.at("male").get<GenderAssociation>();
    r.female = j.at("female").get<GenderAssociation>();
}

void to_json(Json& j, const TrainConfig& c) {
    j = Json{{"dim", c.dim},
             {"window", c.window},
             {"negatives", c.negatives},
             {"epochs", c.epochs},
             {"initial_lr", c.initial_lr},
             {"min_lr", c.min_lr},
             {"subsample_t", c.subsample_t},
             {"min_count", c.min_count},
             {"seed", c.seed},
             {"threads", c.threads},
             {"shrink_window", c.shrink_window}};
}

void from_json(const Json& j, TrainConfig& c) {
    TrainConfig d;
    c.dim = j.value("dim", d.dim);
    c.window = j.value("window", d.window);
    c.negatives = j.value("negatives", d.negatives);
    c.epochs = j.value("epochs", d.epochs);
    c.initial_lr = j.value("initial_lr", d.initial_lr);
    c.min_lr = j.value("min_lr", d.min_lr);
    c.subsample_t = j.value("subsample_t", d.subsample_t);
    c.min_count = j.value("min_count", d.min_count);
    c.seed = j.value("seed", d.seed);
    c.threads = j.value("threads", d.threads);
    c.shrink_window = j.value("shrink_window", d.shrink_window);
}

void to_json(Json& j, const TokenizeConfig& c) {
    j = Json{{"lowercase", c.lowercase}, {"keep_apostrophes", c.keep_apostrophes}, {"keep_hyphens", c.keep_hyphens}};
}

void from_json(const Json& j, TokenizeConfig& c) {
    TokenizeConfig d;
    c.lowercase = j.value("lowercase", d.lowercase);
    c.keep_apostrophes = j.value("keep_apostrophes", d.keep_apostrophes);
    c.keep_hyphens = j.value("keep_hyphens", d.keep_hyphens);
}

void to_json(Json& j, const SliceFilter& f) {
    j = Json{{"year_from", f.year_from ? Json(*f.year_from) : Json(nullptr)},
             {"year_to", f.year_to ? Json(*f.year_to) : Json(nullptr)},
             {"source", f.source ? Json(*f.source) : Json(nullptr)},
             {"undated_only", f.undated_only}};
}

void from_json(const Json& j, SliceFilter& f) {
    f = SliceFilter{};
    if (auto it = j.find("year_from"); it != j.end() && !it->is_null()) f.year_from = it->get<int>();
    if (auto it = j.find("year_to"); it != j.end() && !it->is_null()) f.year_to = it->get<int>();
    if (auto it = j.find("source"); it != j.end() && !it->is_null()) f.source = it->get<std::string>();
    f.undated_only = j.value("undated_only", false);
}

std::string csv_value(const std::optional<double>& value) { return value ? csv::format_real(*value) : "NA"; }

}  // namespace biaslens
