#include "biaslens/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "biaslens/error.hpp"

namespace biaslens {

namespace fs = std::filesystem;

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::string_view to_string(LexiconCategory category) {
    switch (category) {
        case LexiconCategory::GenderMale: return "gender-male";
        case LexiconCategory::GenderFemale: return "gender-female";
        case LexiconCategory::Emotion: return "emotion";
        case LexiconCategory::Family: return "family";
        case LexiconCategory::Action: return "action";
        case LexiconCategory::Vice: return "vice";
        case LexiconCategory::Occupation: return "occupation";
        case LexiconCategory::Characteristic: return "characteristic";
        case LexiconCategory::Physical: return "physical";
        case LexiconCategory::Custom: return "custom";
    }
    return "custom";
}

std::optional<LexiconCategory> parse_category(std::string_view name) {
    static constexpr LexiconCategory kAll[] = {
        LexiconCategory::GenderMale, LexiconCategory::GenderFemale, LexiconCategory::Emotion,
        LexiconCategory::Family,     LexiconCategory::Action,       LexiconCategory::Vice,
        LexiconCategory::Occupation, LexiconCategory::Characteristic, LexiconCategory::Physical,
        LexiconCategory::Custom,
    };
    std::string n = ascii_lower(name);
    for (auto c : kAll) {
        if (to_string(c) == n) return c;
    }
    return std::nullopt;
}

std::string Provenance::str() const {
    switch (kind) {
        case Kind::Seed: return "seed";
        case Kind::Inquirer: return "inquirer";
        case Kind::Expanded: {
            char buf[40];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, similarity);
            return "expanded:" + std::string(buf, end);
        }
    }
    return "seed";
}

std::optional<Provenance> Provenance::parse(std::string_view text) {
    if (text == "seed") return Provenance{Kind::Seed, 0};
    if (text == "inquirer") return Provenance{Kind::Inquirer, 0};
    if (text.starts_with("expanded:")) {
        auto num = text.substr(9);
        double v = 0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
        if (ec != std::errc{} || ptr != num.data() + num.size()) return std::nullopt;
        return Provenance{Kind::Expanded, v};
    }
    return std::nullopt;
}

Lexicon::Lexicon(std::string name, LexiconCategory category) : name_(std::move(name)), category_(category) {}

Lexicon::Lexicon(std::string name, LexiconCategory category, const std::vector<std::string>& seeds)
    : Lexicon(std::move(name), category) {
    for (const auto& w : seeds) add(w);
}

bool Lexicon::add(std::string_view word, Provenance provenance) {
    std::string w = ascii_lower(trim(word));
    if (w.empty()) return false;
    return entries_.emplace(std::move(w), provenance).second;
}

bool Lexicon::contains(std::string_view word) const { return entries_.find(word) != entries_.end(); }

std::vector<std::string> Lexicon::words() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [w, p] : entries_) out.push_back(w);
    return out;
}

const Provenance* Lexicon::provenance(std::string_view word) const {
    auto it = entries_.find(word);
    return it == entries_.end() ? nullptr : &it->second;
}

bool disjoint(const Lexicon& a, const Lexicon& b) {
    for (const auto& [w, p] : a.entries()) {
        if (b.contains(w)) return false;
    }
    return true;
}

GenderLexicons builtin_gender_lexicons() {
    return {Lexicon("male-pronouns", LexiconCategory::GenderMale, {"he", "him", "his", "himself"}),
            Lexicon("female-pronouns", LexiconCategory::GenderFemale, {"she", "her", "hers", "herself"})};
}

GenderLexicons builtin_gender_nouns() {
    return {Lexicon("male-nouns", LexiconCategory::GenderMale,
                    {"man", "men", "boy", "boys", "husband", "husbands", "son", "sons", "father", "fathers",
                     "brother", "brothers", "uncle", "uncles", "nephew", "nephews", "king", "kings", "gentleman",
                     "gentlemen", "mr", "sir", "lord", "lords", "grandfather", "boyfriend"}),
            Lexicon("female-nouns", LexiconCategory::GenderFemale,
                    {"woman", "women", "girl", "girls", "wife", "wives", "daughter", "daughters", "mother",
                     "mothers", "sister", "sisters", "aunt", "aunts", "niece", "nieces", "queen", "queens", "lady",
                     "ladies", "mrs", "miss", "ms", "madam", "grandmother", "girlfriend"})};
}

GenderLexicons builtin_association_anchors() {
    return {Lexicon("men", LexiconCategory::GenderMale, {"men"}),
            Lexicon("women", LexiconCategory::GenderFemale, {"women"})};
}

Lexicon builtin_occupations() {
    return Lexicon(
        "occupation", LexiconCategory::Occupation,
        {"servant", "servants", "domestic", "domestics", "attendant", "attendants", "warrior", "warriors", "slave",
         "slaves", "artist", "artists", "novelist", "novelists", "detective", "detectives", "sovereign", "warder",
         "warders", "missionary", "missionaries", "singer", "singers", "teacher", "teachers", "philosopher", "doctor",
         "doctors", "poet", "poets", "assistant", "cook", "politician", "politicians", "proprietor", "writer",
         "writers", "actor", "actors", "player", "players", "employee", "employees", "author", "authors", "mp",
         "mps", "athlete", "athletes", "director", "directors", "model", "models", "star", "stars", "presenter",
         "presenters", "critic", "critics", "journalist", "journalists", "officer", "officers", "dancer", "dancers",
         "staff", "footballer", "footballers", "executive", "executives", "co-star", "co-stars", "applicant",
         "applicants", "celebrity", "celebrities", "comedian", "comedians", "musician", "musicians", "scientist",
         "scientists", "worker", "workers", "academic", "academics", "boss", "bosses", "investor", "investors",
         "police", "nurse", "nurses", "lawyer", "lawyers", "candidate", "candidates", "student", "students",
         "president", "governor", "film-maker", "film-makers", "composer", "composers", "coach", "coaches", "jockey",
         "jockeys", "pilot", "pilots", "entrepreneur", "entrepreneurs", "reporter", "reporters", "chef", "chefs",
         "engineer", "engineers", "senator", "mayor", "performer", "performers"});
}

Lexicon builtin_characteristics() {
    return Lexicon(
        "characteristic", LexiconCategory::Characteristic,
        {"violence", "violent", "mind", "minds", "character", "characters", "young", "intellect", "youth", "heart",
         "hearts", "loveliness", "education", "influence", "nature", "charms", "virtue", "curiosity", "vanity",
         "delicacy", "excellence", "heroism", "instinct", "taste", "innocence", "soul", "purity", "propriety",
         "grace", "perfection", "weakness", "affection", "modesty", "ingenuity", "sympathy", "pride", "dignity",
         "honour", "spirit", "voice", "voices", "bonding", "dominance", "domination", "ego", "gaze", "power",
         "behaviour", "privilege", "rage", "bravado", "chauvinist", "chauvinism", "talent", "empowerment",
         "emancipation", "perspective", "entitlement", "supremacy", "desire", "identity", "aggression", "anxiety",
         "agency", "autonomy", "ambition", "strength", "anger", "solidarity", "equality", "independence",
         "creativity", "imagination", "genius", "authority"});
}

Lexicon builtin_physical() {
    return Lexicon("physical", LexiconCategory::Physical,
                   {"figure", "figures", "eye", "eyes", "sex", "head", "heads", "hand", "hands", "form", "forms",
                    "beauty", "attire", "face", "faces", "breast", "breasts", "shape", "lips", "tongue", "tongues",
                    "bosom", "bosoms", "flesh", "genitalia", "genital", "genitals", "sexual", "sexuality", "body",
                    "bodies", "fertility", "infertility", "hormone", "hormones", "hormonal", "orgasm", "orgasms",
                    "anatomy", "sperm", "physique", "libido", "hair", "skin", "nipples", "reproductive",
                    "reproduction", "makeup"});
}

GenericsPairTable::GenericsPairTable(std::vector<GenericsPair> pairs) : pairs_(std::move(pairs)) {
    std::set<std::string> seen;
    for (const auto& p : pairs_) {
        for (const auto& w : {p.marked, p.neutral}) {
            if (w.empty()) throw PreconditionError("generics pair with an empty word");
            if (!seen.insert(w).second) throw PreconditionError("generics word \"" + w + "\" repeats");
        }
    }
}

GenericsPairTable builtin_generics() {
    return GenericsPairTable({
        {"mankind", "humanity"},
        {"chairman", "chairperson"},
        {"statesman", "statesperson"},
        {"spokesman", "spokesperson"},
        {"businessman", "businessperson"},
        {"manpower", "workforce"},
        {"fireman", "firefighter"},
    });
}

// ---------------------------------------------------------------------------

namespace {

std::string normalize_tag(std::string_view tag) {
    std::string t = ascii_lower(trim(tag));
    while (!t.empty() && (t.back() == '@' || t.back() == '*')) t.pop_back();
    return t;
}

std::string normalize_entry(std::string_view word) {
    std::string w = trim(word);
    if (auto hash = w.find('#'); hash != std::string::npos) w.erase(hash);
    return ascii_lower(trim(w));
}

std::string resolve_alias(const std::string& requested) {
    static const std::pair<const char*, const char*> kAliases[] = {
        {"emotion", "emot"}, {"family", "kin"}, {"action", "active"}, {"vice", "vice"}};
    for (const auto& [name, tag] : kAliases) {
        if (requested == name) return tag;
    }
    return requested;
}

}  // namespace

std::vector<Lexicon> load_inquirer(const fs::path& path, const std::vector<std::string>& categories,
                                   LoadOptions options, LoadStats* stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    LoadStats local;
    std::map<std::string, std::set<std::string>> members;  // tag -> words
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto cols = split(line, '\t');
        if (header.empty()) {
            header = cols;
            if (header.size() < 2) throw FormatError(path.string() + ": header needs at least two columns");
            continue;
        }
        auto bad = [&](const std::string& why) {
            std::string msg = path.string() + ":" + std::to_string(line_no) + ": " + why;
            if (options.strict) throw FormatError(msg);
            ++local.skipped;
            local.problems.push_back(msg);
        };
        std::string word = cols.empty() ? std::string() : normalize_entry(cols[0]);
        if (cols.size() < 2 || word.empty()) {
            bad("expected a word and at least one tag column");
            continue;
        }
        if (header.size() == 2) {
            std::istringstream tags(cols[1]);
            std::string tag;
            while (tags >> tag) members[normalize_tag(tag)].insert(word);
        } else {
            if (cols.size() > header.size()) {
                bad("more columns than the header");
                continue;
            }
            for (std::size_t c = 1; c < cols.size(); ++c) {
                if (!trim(cols[c]).empty()) members[normalize_tag(header[c])].insert(word);
            }
        }
        ++local.loaded;
    }

    std::vector<Lexicon> out;
    for (const auto& requested : categories) {
        std::string name = ascii_lower(trim(requested));
        auto it = members.find(name);
        if (it == members.end()) it = members.find(resolve_alias(name));
        if (it == members.end()) {
            std::string available;
            for (const auto& [tag, words] : members) {
                if (!available.empty()) available += ", ";
                available += tag;
            }
            throw PreconditionError("unknown inquirer category \"" + requested + "\"; available: " + available);
        }
        Lexicon lex(name, parse_category(name).value_or(LexiconCategory::Custom));
        for (const auto& w : it->second) lex.add(w, Provenance{Provenance::Kind::Inquirer, 0});
        out.push_back(std::move(lex));
    }
    if (stats) *stats = std::move(local);
    return out;
}

Expansion expand(const Lexicon& seed, const EmbeddingModel& model, std::size_t per_word_k, double min_similarity) {
    if (!(min_similarity >= -1.0 && min_similarity <= 1.0)) {
        throw PreconditionError("min_similarity must lie in [-1, 1]");
    }
    Expansion result;
    result.lexicon = Lexicon(seed.name(), seed.category());
    for (const auto& [w, p] : seed.entries()) result.lexicon.add(w, p);
    std::map<std::string, double> found;
    for (const auto& [w, p] : seed.entries()) {
        if (!model.vocab.find(w)) {
            result.missing_seeds.push_back(w);
            continue;
        }
        if (per_word_k == 0) continue;
        std::vector<Neighbor> near;
        try {
            near = neighbors(model, w, per_word_k);
        } catch (const PreconditionError&) {
            continue;  // zero vector: nothing is related to it
        }
        for (const auto& n : near) {
            if (n.similarity < min_similarity) continue;
            auto [it, inserted] = found.emplace(n.word, n.similarity);
            if (!inserted) it->second = std::max(it->second, n.similarity);
        }
    }
    for (const auto& [w, sim] : found) result.lexicon.add(w, Provenance{Provenance::Kind::Expanded, sim});
    return result;
}

std::string lexicon_to_tsv(const Lexicon& lexicon) {
    std::string out = "word\tcategory\tprovenance\n";
    for (const auto& [w, p] : lexicon.entries()) {
        out += w;
        out += '\t';
        out += to_string(lexicon.category());
        out += '\t';
        out += p.str();
        out += '\n';
    }
    return out;
}

void save_lexicon(const Lexicon& lexicon, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << lexicon_to_tsv(lexicon);
    if (!out) throw IoError("write failed: " + path.string());
}

Lexicon load_lexicon(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::optional<LexiconCategory> category;
    std::vector<std::pair<std::string, Provenance>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line[0] == '#') continue;
        auto cols = split(line, '\t');
        if (!header_seen) {
            header_seen = true;
            if (cols.empty() || trim(cols[0]) != "word") {
                throw FormatError(path.string() + ": expected header word<TAB>category<TAB>provenance");
            }
            continue;
        }
        auto where = path.string() + ":" + std::to_string(line_no);
        Provenance prov;
        if (cols.size() >= 2 && !trim(cols[1]).empty()) {
            auto c = parse_category(trim(cols[1]));
            if (!c) throw FormatError(where + ": unknown category \"" + cols[1] + "\"");
            if (category && *category != *c) throw FormatError(where + ": mixed categories in one lexicon file");
            category = c;
        }
        if (cols.size() >= 3 && !trim(cols[2]).empty()) {
            auto p = Provenance::parse(trim(cols[2]));
            if (!p) throw FormatError(where + ": bad provenance \"" + cols[2] + "\"");
            prov = *p;
        }
        rows.emplace_back(cols[0], prov);
    }
    Lexicon lex(path.stem().string(), category.value_or(LexiconCategory::Custom));
    for (const auto& [w, p] : rows) lex.add(w, p);
    return lex;
}

}  // namespace biaslens
