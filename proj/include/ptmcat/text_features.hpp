#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ptmcat {

/// Ordered lowercase tokens: alphanumeric only, length >= 2, stopwords removed.
struct TokenStream {
    std::vector<std::string> tokens;

    bool operator==(const TokenStream&) const = default;
};

struct PreprocessOptions {
    bool stemming = false; // plural-folding S-stemmer, off by default
    int ngram_max = 1;     // >= 2 appends concatenated word n-grams
};

/// Model-card text to tokens. Strips the leading YAML front-matter block,
/// fenced code blocks and URLs; lowercases; splits on non-alphanumeric runs;
/// drops single-character tokens and stopwords.
TokenStream preprocess(std::string_view card_text, const PreprocessOptions& options = {});

/// Embedded English stopword snapshot (318 words), sorted.
const std::vector<std::string>& english_stopwords();
bool is_stopword(std::string_view token);

/// Vocabulary and IDF weights learned from a training corpus. Feature indices
/// are dense, 0-based, assigned in first-seen order.
struct FeatureSpace {
    std::vector<std::string> vocabulary; // index -> token
    std::vector<double> idf;
    std::size_t n_docs_fitted = 0;

    std::unordered_map<std::string, std::size_t> index; // token -> feature index

    std::size_t size() const { return vocabulary.size(); }
};

struct SparseEntry {
    std::size_t index = 0;
    double weight = 0.0;

    bool operator==(const SparseEntry&) const = default;
};

/// Sparse TF-IDF vector, entries sorted by strictly increasing index,
/// L2-normalized whenever the document has at least one in-vocabulary token.
struct DocVector {
    std::vector<SparseEntry> entries;

    bool empty() const { return entries.empty(); }
    double norm() const;

    bool operator==(const DocVector&) const = default;
};

double dot(const DocVector& a, const DocVector& b);

/// Vocabulary = tokens present in >= min_df documents; idf_i = ln((1+N)/(1+df_i)) + 1.
FeatureSpace fit(const std::vector<TokenStream>& documents, std::size_t min_df = 2);

/// Sublinear TF: weight_i = (1 + ln tf_i) * idf_i, then L2 normalization.
/// Out-of-vocabulary tokens are ignored; never mutates the space.
DocVector transform(const FeatureSpace& space, const TokenStream& doc);

} // namespace ptmcat
