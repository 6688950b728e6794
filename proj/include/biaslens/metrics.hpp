#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biaslens/corpus.hpp"
#include "biaslens/embedding.hpp"
#include "biaslens/kernels.hpp"
#include "biaslens/lexicon.hpp"

namespace biaslens {

using kernels::ExecPolicy;

/// numerator / denominator, or nullopt when the denominator is zero.
std::optional<double> share(std::uint64_t numerator, std::uint64_t denominator);

// --- presence --------------------------------------------------------------

struct PresenceResult {
    std::string label;
    std::uint64_t male_count = 0;
    std::uint64_t female_count = 0;
    std::optional<double> female_proportion;

    bool operator==(const PresenceResult&) const = default;
};

/// Token occurrences of each lexicon over the view. Throws PreconditionError
/// when the lexicons overlap.
PresenceResult presence(const CorpusView& view, const Lexicon& male, const Lexicon& female, ExecPolicy policy = {});

// --- premodification -------------------------------------------------------

enum class PremodCategory { Occupation, Characteristic, Physical, Unclassified };
inline constexpr std::size_t kPremodCategoryCount = 4;
std::string_view to_string(PremodCategory category);
std::optional<PremodCategory> parse_premod_category(std::string_view name);

struct PremodClassifiers {
    Lexicon occupation;
    Lexicon characteristic;
    Lexicon physical;

    static PremodClassifiers builtin();
    /// Occupation wins over characteristic, which wins over physical.
    PremodCategory classify(std::string_view head) const;
};

struct PremodHead {
    std::string head;
    std::uint64_t frequency = 0;
    PremodCategory category = PremodCategory::Unclassified;

    bool operator==(const PremodHead&) const = default;
};

struct PremodSide {
    /// Descending frequency, then lexicographic.
    std::vector<PremodHead> heads;
    /// Distinct head words per category (indexed by PremodCategory).
    std::array<std::uint64_t, kPremodCategoryCount> unique_terms{};
    /// Premodified occurrences per category.
    std::array<std::uint64_t, kPremodCategoryCount> token_counts{};

    bool operator==(const PremodSide&) const = default;
};

struct PremodModifiers {
    std::string male = "male";
    std::string female = "female";
};

struct PremodResult {
    std::string label;
    std::uint64_t min_freq = 1;
    PremodSide male;
    PremodSide female;
    /// Heads retained on both sides, lexicographic.
    std::vector<std::string> equally_premodified;

    bool operator==(const PremodResult&) const = default;
};

/// Heads are the tokens immediately after a modifier in the same sentence.
PremodResult premodified(const CorpusView& view, const PremodClassifiers& classifiers, std::uint64_t min_freq,
                         const PremodModifiers& modifiers = {}, ExecPolicy policy = {});

// --- modifier ratio --------------------------------------------------------

struct ModifierRatioResult {
    std::string label;
    std::uint64_t male_count = 0;
    std::uint64_t female_count = 0;
    /// female / (female + male)
    std::optional<double> female_share;

    bool operator==(const ModifierRatioResult&) const = default;
};

ModifierRatioResult modifier_ratio(const CorpusView& view, const PremodModifiers& modifiers = {},
                                   ExecPolicy policy = {});

// --- androcentric generics -------------------------------------------------

struct GenericsEntry {
    std::string marked;
    std::string neutral;
    std::uint64_t marked_count = 0;
    std::uint64_t neutral_count = 0;
    std::optional<double> neutral_share;

    bool operator==(const GenericsEntry&) const = default;
};

struct GenericsResult {
    std::string label;
    std::vector<GenericsEntry> pairs;

    bool operator==(const GenericsResult&) const = default;
};

GenericsResult generics_trend(const CorpusView& view, const GenericsPairTable& table, ExecPolicy policy = {});

// --- binomial ordering -----------------------------------------------------

struct BinomialPair {
    std::string male_term;
    std::string female_term;
    bool operator==(const BinomialPair&) const = default;
};

/// husband/wife, boy/girl, son/daughter, man/woman, men/women.
std::vector<BinomialPair> default_binomial_pairs();
inline constexpr std::size_t kDefaultBinomialWindow = 3;

struct BinomialEntry {
    std::string male_term;
    std::string female_term;
    std::uint64_t male_first = 0;
    std::uint64_t female_first = 0;
    std::optional<double> male_first_share;

    bool operator==(const BinomialEntry&) const = default;
};

struct BinomialResult {
    std::string label;
    std::uint64_t window = kDefaultBinomialWindow;
    std::vector<BinomialEntry> pairs;
    std::uint64_t male_first_total = 0;
    std::uint64_t female_first_total = 0;
    std::optional<double> male_first_share;

    bool operator==(const BinomialResult&) const = default;
};

/// Coordinations "A and B" / "A or B" between the members of each pair.
/// A word belonging to several pairs is attributed to the first. Throws
/// PreconditionError when window < 1.
BinomialResult binomial_order(const CorpusView& view, const std::vector<BinomialPair>& pairs,
                              std::size_t window = kDefaultBinomialWindow, ExecPolicy policy = {});

// --- embedding associations ------------------------------------------------

struct GenderAssociation {
    std::string anchor;
    std::vector<std::string> anchor_terms;
    std::uint64_t top_k = 20;
    /// Descending similarity, ties lexicographic; at most top_k entries.
    std::vector<Neighbor> top_terms;
    /// Mean over top_terms.
    double mean_similarity = 0;
    /// Mean over every in-vocabulary theme word.
    double lexicon_mean = 0;
    std::uint64_t theme_terms_in_vocab = 0;

    bool operator==(const GenderAssociation&) const = default;
};

/// Ranks theme words by cosine to the centroid of the gender lexicon's
/// in-vocabulary vectors (for a singleton lexicon, the word itself). Throws
/// PreconditionError naming the lexicon when its vocabulary intersection is
/// empty, or when top_k is 0.
GenderAssociation association(const EmbeddingModel& model, const Lexicon& gender_terms, const Lexicon& theme,
                              std::size_t top_k);

struct AssociationResult {
    std::string theme;
    GenderAssociation male;
    GenderAssociation female;
    /// female.mean_similarity - male.mean_similarity
    double gap = 0;

    bool operator==(const AssociationResult&) const = default;
};

AssociationResult association_pair(const EmbeddingModel& model, const Lexicon& male, const Lexicon& female,
                                   const Lexicon& theme, std::size_t top_k);

/// Published values observed on the two large corpora this method was
/// developed on (19th-century British fiction; a 2009-2018 UK newspaper
/// archive). Not reproducible without those corpora; kept for comparison
/// in reports and documentation.
namespace reference {
inline constexpr double kNewsFemalePronounShare2009 = 0.20;
inline constexpr double kNewsFemalePronounShare2018 = 0.30;
inline constexpr double kFictionFemaleModifierShare = 2.5 / 3.5;
inline constexpr double kNewsFemaleModifierShare2009 = 0.56;
inline constexpr double kNewsFemaleModifierShare2018 = 0.60;
inline constexpr double kFictionEmotionWomen = 0.101;
inline constexpr double kFictionEmotionMen = 0.056;
inline constexpr double kNewsEmotionWomen = 0.078;
inline constexpr double kNewsEmotionMen = 0.089;
inline constexpr double kFictionBinomialMaleFirst = 0.87;
inline constexpr double kNewsBinomialMaleFirst2009 = 0.78;
inline constexpr double kNewsBinomialMaleFirst2018 = 0.74;
// Husband-before-wife share; the source pairs 87% and 84% with 2018 and
// 2009 respectively, which runs against the aggregate trend.
inline constexpr double kNewsHusbandFirstA = 0.87;
inline constexpr double kNewsHusbandFirstB = 0.84;
inline constexpr std::size_t kAssociationTopK = 20;
}  // namespace reference

}  // namespace biaslens
