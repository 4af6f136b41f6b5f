#include "ptmcat/text_features.hpp"
#include "ptmcat/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace ptmcat {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string_view trim_view(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Drops the leading `--- ... ---` block. An unterminated fence is kept as body.
std::string_view strip_front_matter(std::string_view text) {
    if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.remove_prefix(3);
    std::size_t first_eol = text.find('\n');
    if (first_eol == std::string_view::npos) return text;
    if (trim_view(text.substr(0, first_eol)) != "---") return text;

    std::size_t pos = first_eol + 1;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        if (trim_view(line) == "---")
            return eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    return text;
}

// Removes ``` fenced blocks line-wise, fences included.
std::string strip_code_fences(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_fence = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        if (trim_view(line).substr(0, 3) == "```") {
            in_fence = !in_fence;
        } else if (!in_fence) {
            out.append(line);
            out.push_back('\n');
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    return out;
}

bool url_starts_at(std::string_view text, std::size_t i) {
    auto has = [&](std::string_view prefix) {
        if (i + prefix.size() > text.size()) return false;
        for (std::size_t k = 0; k < prefix.size(); ++k)
            if (std::tolower(static_cast<unsigned char>(text[i + k])) != prefix[k]) return false;
        return true;
    };
    return has("http://") || has("https://") || has("www.");
}

struct Stemmer {
    // Harman's S-stemmer: folds common plural forms only.
    static std::string apply(const std::string& word) {
        auto ends = [&](std::string_view suffix) {
            return word.size() >= suffix.size() &&
                   std::string_view(word).substr(word.size() - suffix.size()) == suffix;
        };
        if (word.size() > 3 && ends("ies") && !ends("eies") && !ends("aies"))
            return word.substr(0, word.size() - 3) + "y";
        if (word.size() > 3 && ends("es") && !ends("aes") && !ends("ees") && !ends("oes"))
            return word.substr(0, word.size() - 1);
        if (word.size() > 2 && ends("s") && !ends("ss") && !ends("us"))
            return word.substr(0, word.size() - 1);
        return word;
    }
};

} // namespace

TokenStream preprocess(std::string_view card_text, const PreprocessOptions& options) {
    std::string body = strip_code_fences(strip_front_matter(card_text));

    TokenStream stream;
    std::string token;
    auto flush = [&]() {
        if (token.size() >= 2 && !is_stopword(token)) {
            if (options.stemming) {
                std::string stemmed = Stemmer::apply(token);
                if (stemmed.size() >= 2 && !is_stopword(stemmed))
                    stream.tokens.push_back(std::move(stemmed));
            } else {
                stream.tokens.push_back(token);
            }
        }
        token.clear();
    };

    std::size_t i = 0;
    while (i < body.size()) {
        if (token.empty() && url_starts_at(body, i)) {
            while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
            continue;
        }
        char c = body[i];
        if (is_alnum(c)) {
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            flush();
        }
        ++i;
    }
    flush();

    if (options.ngram_max >= 2) {
        std::size_t n_unigrams = stream.tokens.size();
        for (int n = 2; n <= options.ngram_max; ++n) {
            for (std::size_t start = 0; start + static_cast<std::size_t>(n) <= n_unigrams;
                 ++start) {
                std::string joined;
                for (int k = 0; k < n; ++k) joined += stream.tokens[start + k];
                stream.tokens.push_back(std::move(joined));
            }
        }
    }
    return stream;
}

double DocVector::norm() const {
    double sum = 0.0;
    for (const SparseEntry& e : entries) sum += e.weight * e.weight;
    return std::sqrt(sum);
}

double dot(const DocVector& a, const DocVector& b) {
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() && j < b.entries.size()) {
        if (a.entries[i].index < b.entries[j].index) {
            ++i;
        } else if (a.entries[i].index > b.entries[j].index) {
            ++j;
        } else {
            sum += a.entries[i].weight * b.entries[j].weight;
            ++i;
            ++j;
        }
    }
    return sum;
}

FeatureSpace fit(const std::vector<TokenStream>& documents, std::size_t min_df) {
    if (documents.empty()) throw EmptyCorpusError();

    struct TokenInfo {
        std::size_t df = 0;
        std::size_t last_doc = static_cast<std::size_t>(-1);
    };
    std::vector<std::string> first_seen;
    std::unordered_map<std::string, TokenInfo> df;
    for (std::size_t d = 0; d < documents.size(); ++d) {
        for (const std::string& tok : documents[d].tokens) {
            auto [it, inserted] = df.emplace(tok, TokenInfo{});
            if (inserted) first_seen.push_back(tok);
            if (it->second.last_doc != d) {
                it->second.last_doc = d;
                ++it->second.df;
            }
        }
    }

    FeatureSpace space;
    space.n_docs_fitted = documents.size();
    double n = static_cast<double>(documents.size());
    for (const std::string& tok : first_seen) {
        std::size_t count = df[tok].df;
        if (count < min_df) continue;
        space.index.emplace(tok, space.vocabulary.size());
        space.vocabulary.push_back(tok);
        space.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    return space;
}

DocVector transform(const FeatureSpace& space, const TokenStream& doc) {
    std::unordered_map<std::size_t, std::size_t> tf;
    for (const std::string& tok : doc.tokens) {
        auto it = space.index.find(tok);
        if (it != space.index.end()) ++tf[it->second];
    }

    DocVector vec;
    vec.entries.reserve(tf.size());
    for (const auto& [feature, count] : tf) {
        double weight = (1.0 + std::log(static_cast<double>(count))) * space.idf[feature];
        vec.entries.push_back({feature, weight});
    }
    std::sort(vec.entries.begin(), vec.entries.end(),
              [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });

    double norm = vec.norm();
    if (norm > 0.0)
        for (SparseEntry& e : vec.entries) e.weight /= norm;
    return vec;
}

} // namespace ptmcat
