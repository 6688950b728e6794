#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "biaslens/acquisition.hpp"
#include "biaslens/embedding.hpp"

namespace biaslens {

enum class LexiconCategory {
    GenderMale,
    GenderFemale,
    Emotion,
    Family,
    Action,
    Vice,
    Occupation,
    Characteristic,
    Physical,
    Custom,
};

std::string_view to_string(LexiconCategory category);
std::optional<LexiconCategory> parse_category(std::string_view name);

struct Provenance {
    enum class Kind { Seed, Inquirer, Expanded };
    Kind kind = Kind::Seed;
    /// Cosine to the seed that introduced the word; meaningful for Expanded only.
    double similarity = 0;

    bool operator==(const Provenance&) const = default;
    std::string str() const;
    static std::optional<Provenance> parse(std::string_view text);
};

/// A named word set. Words are lowercase; iteration order is lexicographic.
class Lexicon {
public:
    using Entries = std::map<std::string, Provenance, std::less<>>;

    Lexicon() = default;
    Lexicon(std::string name, LexiconCategory category);
    Lexicon(std::string name, LexiconCategory category, const std::vector<std::string>& seeds);

    /// Lowercases `word`; an existing entry keeps its provenance.
    bool add(std::string_view word, Provenance provenance = {});
    bool contains(std::string_view word) const;
    const std::string& name() const { return name_; }
    LexiconCategory category() const { return category_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const Entries& entries() const { return entries_; }
    std::vector<std::string> words() const;
    const Provenance* provenance(std::string_view word) const;

    bool operator==(const Lexicon&) const = default;

private:
    std::string name_;
    LexiconCategory category_ = LexiconCategory::Custom;
    Entries entries_;
};

bool disjoint(const Lexicon& a, const Lexicon& b);

struct GenderLexicons {
    Lexicon male;
    Lexicon female;
};

/// Pronoun sets: {he, him, his, himself} and {she, her, hers, herself}.
GenderLexicons builtin_gender_lexicons();
/// Gendered nouns (man/men/boy(s)/husband/son(s)/... and counterparts).
GenderLexicons builtin_gender_nouns();
/// Singleton anchors {men} and {women} used for association by default.
GenderLexicons builtin_association_anchors();

/// Starter classifier lexicons for premodified heads.
Lexicon builtin_occupations();
Lexicon builtin_characteristics();
Lexicon builtin_physical();

struct GenericsPair {
    std::string marked;
    std::string neutral;
    bool operator==(const GenericsPair&) const = default;
};

/// Male-marked generics and their neutral counterparts (mankind/humanity, ...).
class GenericsPairTable {
public:
    GenericsPairTable() = default;
    /// Throws PreconditionError when a word repeats within or across pairs.
    explicit GenericsPairTable(std::vector<GenericsPair> pairs);
    const std::vector<GenericsPair>& pairs() const { return pairs_; }

private:
    std::vector<GenericsPair> pairs_;
};

GenericsPairTable builtin_generics();

/// Reads a General Inquirer style TSV: header row, then `word<TAB>tags` where
/// tags is a space separated list (e.g. "Positiv EMOT"). Sense suffixes such
/// as "#1" are stripped. Category names are matched case-insensitively and
/// the aliases emotion=emot, family=kin, action=active, vice=vice apply.
/// Throws PreconditionError for an unknown category, listing those available.
std::vector<Lexicon> load_inquirer(const std::filesystem::path& path, const std::vector<std::string>& categories,
                                   LoadOptions options = {}, LoadStats* stats = nullptr);

struct Expansion {
    Lexicon lexicon;
    /// Seeds absent from the model vocabulary (carried through unexpanded).
    std::vector<std::string> missing_seeds;
};

/// Adds, for every in-vocabulary seed, its top `per_word_k` neighbours with
/// similarity >= min_similarity. A word reached from several seeds keeps the
/// highest similarity; seeds keep their own provenance.
Expansion expand(const Lexicon& seed, const EmbeddingModel& model, std::size_t per_word_k, double min_similarity);

/// TSV with header `word<TAB>category<TAB>provenance`.
void save_lexicon(const Lexicon& lexicon, const std::filesystem::path& path);
/// The lexicon name is the file stem; every row must share one category.
Lexicon load_lexicon(const std::filesystem::path& path);
std::string lexicon_to_tsv(const Lexicon& lexicon);

}  // namespace biaslens
