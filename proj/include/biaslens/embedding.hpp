#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "biaslens/corpus.hpp"

namespace biaslens {

using WordId = std::uint32_t;

/// Training vocabulary: words by descending frequency, ties lexicographic.
class Vocabulary {
public:
    Vocabulary() = default;
    /// Words must be distinct; order is taken as given.
    Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts);

    std::size_t size() const { return words_.size(); }
    bool empty() const { return words_.empty(); }
    const std::string& word(WordId id) const { return words_[id]; }
    std::uint64_t count(WordId id) const { return counts_[id]; }
    const std::vector<std::string>& words() const { return words_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::optional<WordId> find(std::string_view word) const;
    /// Throws PreconditionError naming the word when absent.
    WordId id(std::string_view word) const;
    std::uint64_t total_tokens() const { return total_tokens_; }

    double negative_table_exponent = 0.75;

    bool operator==(const Vocabulary& other) const;

private:
    std::vector<std::string> words_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, WordId> index_;
    std::uint64_t total_tokens_ = 0;
};

Vocabulary build_vocab(const CorpusView& view, std::uint64_t min_count);
Vocabulary build_vocab(const Corpus& corpus, std::uint64_t min_count);

struct TrainConfig {
    std::uint32_t dim = 100;
    std::uint32_t window = 5;
    std::uint32_t negatives = 5;
    std::uint32_t epochs = 5;
    double initial_lr = 0.025;
    double min_lr = 1e-4;
    double subsample_t = 1e-3;
    std::uint64_t min_count = 5;
    std::uint64_t seed = 1;
    /// 1 = deterministic serial trainer; >1 = lock-free parallel updates (nondeterministic).
    std::uint32_t threads = 1;
    /// Sample the effective radius uniformly from 1..window per target, as word2vec does.
    bool shrink_window = true;

    /// Throws PreconditionError describing the first violated constraint.
    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct EmbeddingModel {
    Vocabulary vocab;
    TrainConfig config;
    /// V x dim, row-major. Used for every similarity query.
    std::vector<float> input_vectors;
    /// V x dim, row-major negative-sampling output weights.
    std::vector<float> output_vectors;

    std::size_t dim() const { return config.dim; }
    std::span<const float> input_row(WordId id) const {
        return {input_vectors.data() + std::size_t(id) * dim(), dim()};
    }
    std::span<float> input_row(WordId id) { return {input_vectors.data() + std::size_t(id) * dim(), dim()}; }
    std::span<float> output_row(WordId id) { return {output_vectors.data() + std::size_t(id) * dim(), dim()}; }

    /// Zero-initialized model over `vocab`.
    static EmbeddingModel zeros(Vocabulary vocab, std::uint32_t dim);
    /// Hand-set input vectors (tests, fixtures). Output weights are zero.
    static EmbeddingModel from_vectors(const std::vector<std::string>& words,
                                       const std::vector<std::vector<float>>& vectors);

    bool all_finite() const;
    /// Bitwise equality of vocabulary, config and both matrices.
    bool operator==(const EmbeddingModel& other) const;
};

/// One CBOW negative-sampling step; see cbow::update. Throws
/// PreconditionError on invalid ids, empty context, or target among negatives.
double cbow_step(EmbeddingModel& model, std::span<const WordId> context, WordId target,
                 std::span<const WordId> negatives, double lr);

struct TrainLog {
    std::vector<double> epoch_mean_loss;
    std::vector<std::uint64_t> epoch_updates;
};

EmbeddingModel train_cbow(const CorpusView& view, const TrainConfig& config, TrainLog* log = nullptr);
EmbeddingModel train_cbow(const Corpus& corpus, const TrainConfig& config, TrainLog* log = nullptr);

/// Cosine of two raw vectors; throws PreconditionError if either is all-zero.
double cosine(std::span<const float> a, std::span<const float> b);
/// Cosine similarity of the input vectors of two vocabulary words.
double cosine(const EmbeddingModel& model, std::string_view w1, std::string_view w2);

struct Neighbor {
    std::string word;
    double similarity = 0;
    bool operator==(const Neighbor&) const = default;
};

/// Top-k words by cosine to `word` (excluding itself and zero vectors),
/// descending similarity, ties lexicographic.
std::vector<Neighbor> neighbors(const EmbeddingModel& model, std::string_view word, std::size_t k);

void save_model(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_model(const std::filesystem::path& path);
std::string serialize_model(const EmbeddingModel& model);
EmbeddingModel deserialize_model(std::string_view bytes, const std::string& what = "model");

/// word2vec text format: "V dim" header, then one "word v1 .. vdim" line per word.
void export_text_vectors(const EmbeddingModel& model, const std::filesystem::path& path);

/// FNV-1a of the serialized model, hex encoded.
std::string model_checksum(const EmbeddingModel& model);

}  // namespace biaslens
