#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "acap/corpus.hpp"

namespace acap {

// Lowercased word tokens. ASCII letters and digits form tokens; apostrophes
// (ASCII ' and U+2019) survive inside a token but are stripped at its edges;
// common Unicode punctuation splits; other non-ASCII codepoints pass through
// verbatim. Invalid UTF-8 bytes act as separators. Empty text gives an empty
// list, never an error.
std::vector<std::string> tokenize(std::string_view text);

enum class VectorizerMode { tfidf, hashed };

std::string_view vectorizer_mode_name(VectorizerMode mode);
VectorizerMode parse_vectorizer_mode(std::string_view name);

// Per-kind token caps applied before both fitting and embedding, so a fitted
// vocabulary never contains tokens an embedding would then ignore. Articles
// default to their first 512 tokens; comments are uncapped.
struct TokenBudget {
    std::optional<std::size_t> article{512};
    std::optional<std::size_t> comment{};

    std::optional<std::size_t> for_kind(DocKind kind) const {
        return kind == DocKind::article ? article : comment;
    }
};

struct VectorizerConfig {
    VectorizerMode mode = VectorizerMode::tfidf;
    // hashed: bucket count (required > 0). tfidf: vocabulary cap, 0 = keep all.
    std::size_t dimension = 0;
    std::uint64_t hash_seed = 0x9e3779b97f4a7c15ULL;
    TokenBudget budget;
};

// Embedding plus bookkeeping the pair-feature layout needs: token_count is
// the document's full token count (pre-budget), matched_tokens counts the
// budgeted tokens that landed in a known slot.
struct DocVector {
    std::vector<double> values;
    std::size_t token_count = 0;
    std::size_t matched_tokens = 0;

    std::size_t size() const { return values.size(); }
    bool all_oov() const { return matched_tokens == 0; }
};

// Immutable after fitting; embed is pure, so a fitted vectorizer is safe to
// share across threads.
class Vectorizer {
public:
    static Vectorizer fit(const std::vector<Document>& documents,
                          const VectorizerConfig& config);

    VectorizerMode mode() const { return config_.mode; }
    std::size_t dimension() const { return dimension_; }
    const TokenBudget& budget() const { return config_.budget; }
    // tfidf mode only; lexicographically sorted.
    const std::vector<std::string>& vocabulary() const { return vocabulary_; }
    const std::vector<double>& idf() const { return idf_; }

    DocVector embed(const Document& doc) const;

private:
    VectorizerConfig config_;
    std::size_t dimension_ = 0;
    std::vector<std::string> vocabulary_;
    std::unordered_map<std::string, std::size_t> slot_;
    std::vector<double> idf_;
};

Vectorizer fit_vectorizer(const std::vector<Document>& documents,
                          const VectorizerConfig& config);

// One vectorizer per outlet tag, each fitted only on that outlet's documents.
std::map<std::string, Vectorizer> fit_per_outlet(const std::vector<Document>& documents,
                                                 const VectorizerConfig& config);

// Standard cosine in [-1, 1]. A zero vector has no direction, so it is an
// error rather than a silent 0 (a silent 0 would feed the threshold rule a
// fabricated class).
double cosine_similarity(const DocVector& a, const DocVector& b);

using PairFeatures = std::vector<double>;

// Layout: article values, comment values, cosine, log1p(comment tokens),
// log1p(article tokens); total length 2d+3. Dimensions must match.
PairFeatures pair_features(const DocVector& article, const DocVector& comment);

// TSV rows `id<TAB>v1 v2 ... vd`, constant dimension, unique ids.
std::map<std::string, DocVector> load_external_embeddings(const std::filesystem::path& path);
void save_embeddings(const std::filesystem::path& path,
                     const std::map<std::string, DocVector>& embeddings);

} // namespace acap
