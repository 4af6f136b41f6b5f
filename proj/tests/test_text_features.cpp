#include <doctest.h>

#include "ptmcat/errors.hpp"
#include "ptmcat/serialize.hpp"
#include "ptmcat/text_features.hpp"
#include "test_util.hpp"

#include <cctype>
#include <cmath>
#include <numeric>

using namespace ptmcat;

namespace {

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const std::string& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

// Character-by-character reference tokenizer, written independently of the
// implementation: explicit state machine over the already-stripped body.
std::vector<std::string> reference_tokenize(const std::string& raw) {
    // strip front matter
    std::string text = raw;
    if (text.rfind("---", 0) == 0) {
        std::size_t body_start = std::string::npos;
        std::size_t line_start = text.find('\n');
        while (line_start != std::string::npos) {
            std::size_t line_end = text.find('\n', line_start + 1);
            std::string line = line_end == std::string::npos
                                   ? text.substr(line_start + 1)
                                   : text.substr(line_start + 1, line_end - line_start - 1);
            while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
                line.pop_back();
            if (line == "---") {
                body_start = line_end == std::string::npos ? text.size() : line_end + 1;
                break;
            }
            line_start = line_end;
        }
        if (body_start != std::string::npos) text = text.substr(body_start);
    }
    // drop fenced lines
    std::string kept;
    bool fence = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line =
            eol == std::string::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        std::string lead = line;
        while (!lead.empty() && std::isspace(static_cast<unsigned char>(lead.front())))
            lead.erase(lead.begin());
        if (lead.rfind("```", 0) == 0)
            fence = !fence;
        else if (!fence)
            kept += line + "\n";
        if (eol == std::string::npos) break;
        pos = eol + 1;
    }
    // drop URLs
    std::string no_urls;
    for (std::size_t i = 0; i < kept.size();) {
        auto lower_at = [&](std::size_t at, const std::string& prefix) {
            if (at + prefix.size() > kept.size()) return false;
            for (std::size_t k = 0; k < prefix.size(); ++k)
                if (std::tolower(static_cast<unsigned char>(kept[at + k])) != prefix[k])
                    return false;
            return true;
        };
        bool at_boundary = no_urls.empty() ||
                           !std::isalnum(static_cast<unsigned char>(no_urls.back()));
        if (at_boundary &&
            (lower_at(i, "http://") || lower_at(i, "https://") || lower_at(i, "www."))) {
            while (i < kept.size() && !std::isspace(static_cast<unsigned char>(kept[i]))) ++i;
            continue;
        }
        no_urls += kept[i++];
    }
    // split, lowercase, filter
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : no_urls) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!cur.empty()) {
            if (cur.size() >= 2 && !is_stopword(cur)) tokens.push_back(cur);
            cur.clear();
        }
    }
    if (cur.size() >= 2 && !is_stopword(cur)) tokens.push_back(cur);
    return tokens;
}

} // namespace

TEST_CASE("preprocess lowercases and drops stopwords") {
    TokenStream stream = preprocess("The BERT Model!");
    CHECK(stream.tokens == std::vector<std::string>{"bert", "model"});
}

TEST_CASE("preprocess strips YAML front matter") {
    TokenStream stream = preprocess("---\nlicense: mit\n---\nbody text here");
    CHECK(stream.tokens == std::vector<std::string>{"body", "text"});
}

TEST_CASE("preprocess keeps an unterminated fence as body") {
    TokenStream stream = preprocess("---\nlicense: mit\nno closing fence");
    CHECK(stream.tokens ==
          std::vector<std::string>{"license", "mit", "closing", "fence"});
}

TEST_CASE("preprocess removes fenced code blocks and URLs") {
    TokenStream stream = preprocess("intro paragraph\n```python\nsecret_token = 1\n```\n"
                                    "visit https://example.org/path?q=1 tail words");
    CHECK(stream.tokens ==
          std::vector<std::string>{"intro", "paragraph", "visit", "tail", "words"});
}

TEST_CASE("preprocess drops single characters and empty input") {
    CHECK(preprocess("").tokens.empty());
    CHECK(preprocess("a b c 7 ! ?").tokens.empty());
    CHECK(preprocess("x1 ok").tokens == std::vector<std::string>{"x1", "ok"});
}

TEST_CASE("realistic card equals the reference tokenizer") {
    std::string card =
        "---\nlicense: apache-2.0\ntags:\n  - fill-mask\n---\n"
        "# SloBERTa base model\n\n"
        "This checkpoint provides masked language modelling for Slovenian text. "
        "It was pretrained on 3.4B tokens drawn from news corpora, subtitles and "
        "web crawls; see https://example.org/corpus for the crawling setup.\n\n"
        "```python\nfrom transformers import AutoModel\nmodel = AutoModel.from_pretrained('x')\n```\n\n"
        "Evaluation reached 81.2% accuracy on NER benchmarks, outperforming the "
        "multilingual baseline by 4 points (www.example.org has details).\n";
    REQUIRE(card.size() > 500);
    TokenStream stream = preprocess(card);
    CHECK(stream.tokens == reference_tokenize(card));
    CHECK(stream.tokens.size() > 10);
}

TEST_CASE("preprocess is idempotent on its own joined output") {
    std::string card = "---\nlicense: mit\n---\nThe quick brown foxes keep 2 running over "
                       "https://example.org and `inline code` blocks!";
    TokenStream first = preprocess(card);
    TokenStream second = preprocess(join(first.tokens));
    CHECK(first.tokens == second.tokens);
}

TEST_CASE("stemming folds plurals behind its flag") {
    PreprocessOptions opts;
    opts.stemming = true;
    CHECK(preprocess("libraries models bus classes", opts).tokens ==
          std::vector<std::string>{"library", "model", "bus", "classe"});
    CHECK(preprocess("libraries models bus classes").tokens ==
          std::vector<std::string>{"libraries", "models", "bus", "classes"});
}

TEST_CASE("bigram option appends concatenated pairs") {
    PreprocessOptions opts;
    opts.ngram_max = 2;
    CHECK(preprocess("masked language model", opts).tokens ==
          std::vector<std::string>{"masked", "language", "model", "maskedlanguage",
                                   "languagemodel"});
}

TEST_CASE("fit builds the vocabulary in first-seen order with min_df") {
    std::vector<TokenStream> docs = {{{"alpha", "beta"}}, {{"beta", "gamma"}}, {{"beta"}}};
    SUBCASE("min_df=1 keeps everything") {
        FeatureSpace space = fit(docs, 1);
        CHECK(space.vocabulary == std::vector<std::string>{"alpha", "beta", "gamma"});
        CHECK(space.n_docs_fitted == 3);
    }
    SUBCASE("min_df=2 prunes hapaxes") {
        FeatureSpace space = fit(docs, 2);
        CHECK(space.vocabulary == std::vector<std::string>{"beta"});
    }
    SUBCASE("empty corpus is an error") { CHECK_THROWS_AS(fit({}, 1), EmptyCorpusError); }
}

TEST_CASE("idf follows ln((1+N)/(1+df)) + 1") {
    std::vector<TokenStream> docs = {{{"common", "rare"}}, {{"common"}}, {{"common"}}};
    FeatureSpace space = fit(docs, 1);
    REQUIRE(space.vocabulary.size() == 2);
    // df = N = 3 -> idf = ln(4/4)+1 = 1
    CHECK(space.idf[space.index.at("common")] == doctest::Approx(1.0).epsilon(1e-12));
    // df = 1 of 3 -> ln(4/2)+1
    CHECK(space.idf[space.index.at("rare")] ==
          doctest::Approx(std::log(2.0) + 1.0).epsilon(1e-12));
    CHECK(space.idf[space.index.at("rare")] == doctest::Approx(1.6931).epsilon(1e-4));
}

TEST_CASE("transform weights and normalizes") {
    std::vector<TokenStream> docs = {{{"alpha", "beta"}}, {{"alpha", "gamma"}}, {{"beta"}}};
    FeatureSpace space = fit(docs, 1);

    SUBCASE("single in-vocabulary token gives weight 1 after normalization") {
        DocVector vec = transform(space, {{"alpha"}});
        REQUIRE(vec.entries.size() == 1);
        CHECK(vec.entries[0].weight == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("out-of-vocabulary tokens produce an empty vector") {
        DocVector vec = transform(space, {{"unknown", "words"}});
        CHECK(vec.empty());
    }
    SUBCASE("two-token document matches the hand formula") {
        TokenStream doc{{"alpha", "alpha", "beta"}};
        DocVector vec = transform(space, doc);
        // oracle: recompute (1+ln tf)*idf then L2-normalize, by hand
        double w_alpha = (1.0 + std::log(2.0)) * space.idf[space.index.at("alpha")];
        double w_beta = (1.0 + std::log(1.0)) * space.idf[space.index.at("beta")];
        double norm = std::sqrt(w_alpha * w_alpha + w_beta * w_beta);
        REQUIRE(vec.entries.size() == 2);
        CHECK(vec.entries[0].weight == doctest::Approx(w_alpha / norm).epsilon(1e-12));
        CHECK(vec.entries[1].weight == doctest::Approx(w_beta / norm).epsilon(1e-12));
    }
}

TEST_CASE("document vectors are unit length with strictly increasing indices") {
    std::mt19937_64 rng(9);
    std::vector<TokenStream> docs;
    std::vector<std::string> pool;
    for (int i = 0; i < 30; ++i) pool.push_back(test_util::random_word(rng, 2, 7));
    for (int d = 0; d < 50; ++d) {
        TokenStream doc;
        std::size_t len = 3 + rng() % 20;
        for (std::size_t t = 0; t < len; ++t) doc.tokens.push_back(pool[rng() % pool.size()]);
        docs.push_back(doc);
    }
    FeatureSpace space = fit(docs, 1);
    for (const TokenStream& doc : docs) {
        DocVector vec = transform(space, doc);
        if (vec.empty()) continue;
        CHECK(std::abs(vec.norm() - 1.0) < 1e-9);
        for (std::size_t i = 1; i < vec.entries.size(); ++i)
            CHECK(vec.entries[i - 1].index < vec.entries[i].index);
        for (const SparseEntry& e : vec.entries) CHECK(e.weight > 0.0);
    }
}

TEST_CASE("transform never mutates the fitted space") {
    std::vector<TokenStream> docs = {{{"alpha", "beta"}}, {{"alpha"}}};
    FeatureSpace space = fit(docs, 1);
    std::vector<std::string> vocab_before = space.vocabulary;
    std::vector<double> idf_before = space.idf;
    (void)transform(space, {{"zeta", "alpha", "unseen"}});
    CHECK(space.vocabulary == vocab_before);
    CHECK(space.idf == idf_before);
}

TEST_CASE("feature space serializes with full precision") {
    std::vector<TokenStream> docs = {{{"alpha", "beta"}}, {{"alpha", "gamma"}}, {{"beta"}}};
    FeatureSpace space = fit(docs, 1);

    test_util::TempDir dir;
    save_feature_space(space, dir.file("space.json"));
    FeatureSpace loaded = load_feature_space(dir.file("space.json"));
    CHECK(loaded.vocabulary == space.vocabulary);
    CHECK(loaded.n_docs_fitted == space.n_docs_fitted);
    REQUIRE(loaded.idf.size() == space.idf.size());
    for (std::size_t i = 0; i < space.idf.size(); ++i)
        CHECK(loaded.idf[i] == space.idf[i]); // bit-exact round trip
    CHECK(loaded.index == space.index);
}

TEST_CASE("stopword list is the embedded snapshot") {
    CHECK(english_stopwords().size() == 318);
    CHECK(is_stopword("the"));
    CHECK(is_stopword("whence"));
    CHECK_FALSE(is_stopword("bert"));
    CHECK_FALSE(is_stopword(""));
}
