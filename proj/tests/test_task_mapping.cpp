#include <doctest.h>

#include "ptmcat/errors.hpp"
#include "ptmcat/registry.hpp"
#include "ptmcat/task_mapping.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace ptmcat;
using test_util::data_path;

namespace {

// Exhaustive recursion, deliberately memo-free: the independent oracle for
// short strings.
std::size_t lev_recursive(std::string_view a, std::string_view b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    std::size_t del = lev_recursive(a.substr(1), b) + 1;
    std::size_t ins = lev_recursive(a, b.substr(1)) + 1;
    std::size_t sub = lev_recursive(a.substr(1), b.substr(1)) + (a[0] == b[0] ? 0 : 1);
    return std::min({del, ins, sub});
}

std::size_t weighted_recursive(std::string_view a, std::string_view b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    std::size_t del = weighted_recursive(a.substr(1), b) + 1;
    std::size_t ins = weighted_recursive(a, b.substr(1)) + 1;
    std::size_t sub = weighted_recursive(a.substr(1), b.substr(1)) + (a[0] == b[0] ? 0 : 2);
    return std::min({del, ins, sub});
}

Registry roberta_family_fixture() {
    Registry reg;
    auto add = [&](const std::string& id, const char* tag) {
        PtmRecord rec;
        rec.model_id = id;
        rec.card_data = "card";
        if (tag) rec.pipeline_tag = tag;
        reg.records.push_back(rec);
    };
    add("EMBEDDIA/sloberta", "fill-mask");
    add("uklfr/roberta-go", "fill-mask");
    add("lab-ai/me-roberta", "fill-mask");
    add("am-roberta", "fill-mask");
    add("flax-community/numroberta", "fill-mask");
    add("distilbert", "text-classification");
    add("bert-base", "fill-mask");
    add("gpt2", "text-generation");
    add("t5-small", "text2text-generation");
    reg.ingested_count = reg.records.size();
    return reg;
}

} // namespace

TEST_CASE("levenshtein basics") {
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("abc", "abc") == 0);
    CHECK(levenshtein("", "abcd") == 4);
    CHECK(levenshtein("abcd", "") == 4);
    CHECK(levenshtein("flaw", "lawn") == 2);
}

TEST_CASE("levenshtein equals the exhaustive recursion oracle on random pairs") {
    std::mt19937_64 rng(51);
    for (int round = 0; round < 300; ++round) {
        std::string a = test_util::random_word(rng, 0 + rng() % 2, 8);
        std::string b = test_util::random_word(rng, 0 + rng() % 2, 8);
        CAPTURE(a);
        CAPTURE(b);
        CHECK(levenshtein(a, b) == lev_recursive(a, b));
        CHECK(weighted_edit_distance(a, b) == weighted_recursive(a, b));
    }
}

TEST_CASE("levenshtein satisfies the metric axioms on random triples") {
    std::mt19937_64 rng(52);
    for (int round = 0; round < 200; ++round) {
        std::string a = test_util::random_word(rng, 1, 7);
        std::string b = test_util::random_word(rng, 1, 7);
        std::string c = test_util::random_word(rng, 1, 7);
        CHECK(levenshtein(a, a) == 0);
        CHECK(levenshtein(a, b) == levenshtein(b, a));
        CHECK(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c));
    }
}

TEST_CASE("name_similarity reference values") {
    CHECK(name_similarity("roberta", "sloberta") == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(name_similarity("roberta", "roberta-go") ==
          doctest::Approx(14.0 / 17.0).epsilon(1e-12));
    CHECK(name_similarity("roberta", "me-roberta") ==
          doctest::Approx(14.0 / 17.0).epsilon(1e-12));
    CHECK(name_similarity("same", "same") == 1.0);
    CHECK(name_similarity("", "") == 1.0);
    // weighted distance 9 (per the DP oracle), not a 0.8 match
    CHECK(weighted_edit_distance("roberta", "distilbert") == 9);
    CHECK(name_similarity("roberta", "distilbert") ==
          doctest::Approx(8.0 / 17.0).epsilon(1e-12));
}

TEST_CASE("name_similarity stays in range and is 1 only on equality") {
    std::mt19937_64 rng(53);
    for (int round = 0; round < 300; ++round) {
        std::string a = test_util::random_word(rng, 1, 8);
        std::string b = test_util::random_word(rng, 1, 8);
        double sim = name_similarity(a, b);
        CHECK(sim >= 0.0);
        CHECK(sim <= 1.0);
        CHECK((sim == 1.0) == (a == b));
    }
}

TEST_CASE("normalize_model_name lowercases and strips the owner prefix") {
    CHECK(normalize_model_name("EMBEDDIA/SloBERTa") == "sloberta");
    CHECK(normalize_model_name("RoBERTa") == "roberta");
    CHECK(normalize_model_name("a/b/c-Model") == "c-model");
    CHECK(normalize_model_name("no-owner") == "no-owner");
}

TEST_CASE("find_similar returns the reference roberta-family matches") {
    Registry reg = roberta_family_fixture();
    std::vector<MatchResult> matches = find_similar("RoBERTa", reg);
    std::set<std::string> names;
    for (const MatchResult& m : matches) {
        names.insert(m.matched_name);
        CHECK(m.score >= 0.8);
        CHECK(m.pipeline_tag == "fill-mask");
    }
    CHECK(names == std::set<std::string>{"sloberta", "roberta-go", "me-roberta", "am-roberta",
                                         "numroberta"});

    // sorted by score descending, ties by model_id ascending
    for (std::size_t i = 1; i < matches.size(); ++i) {
        CHECK(matches[i - 1].score >= matches[i].score);
        if (matches[i - 1].score == matches[i].score)
            CHECK(matches[i - 1].model_id < matches[i].model_id);
    }
}

TEST_CASE("find_similar extremes and errors") {
    Registry reg = roberta_family_fixture();
    SUBCASE("T=1.0 keeps only exact case-insensitive matches") {
        MatchOptions exact;
        exact.threshold = 1.0;
        std::vector<MatchResult> matches = find_similar("AM-RoBERTa", reg, exact);
        REQUIRE(matches.size() == 1);
        CHECK(matches[0].model_id == "am-roberta");
    }
    SUBCASE("strict comparison drops boundary scores") {
        MatchOptions strict;
        strict.strict = true;
        std::vector<MatchResult> matches = find_similar("RoBERTa", reg, strict);
        std::set<std::string> names;
        for (const MatchResult& m : matches) names.insert(m.matched_name);
        // sloberta sits exactly at 0.8 and falls out under strict inequality
        CHECK(names == std::set<std::string>{"roberta-go", "me-roberta", "am-roberta",
                                             "numroberta"});
    }
    SUBCASE("empty name and bad thresholds are rejected") {
        CHECK_THROWS_AS(find_similar("   ", reg), EmptyNameError);
        MatchOptions bad;
        bad.threshold = 0.0;
        CHECK_THROWS_AS(find_similar("roberta", reg, bad), ConfigError);
        bad.threshold = 1.5;
        CHECK_THROWS_AS(find_similar("roberta", reg, bad), ConfigError);
    }
    SUBCASE("raising the threshold never adds matches") {
        MatchOptions loose, tight;
        loose.threshold = 0.5;
        tight.threshold = 0.85;
        std::set<std::string> loose_ids, tight_ids;
        for (const MatchResult& m : find_similar("roberta", reg, loose))
            loose_ids.insert(m.model_id);
        for (const MatchResult& m : find_similar("roberta", reg, tight))
            tight_ids.insert(m.model_id);
        for (const std::string& id : tight_ids) CHECK(loose_ids.count(id) == 1);
    }
}

TEST_CASE("map_task pairs each distinct tag with the input task") {
    Registry reg = roberta_family_fixture();
    SUBCASE("roberta-family fixture yields the single fill-mask pair") {
        MappingResult result = map_task("RoBERTa", "Code-related task", reg);
        REQUIRE(result.entries.size() == 1);
        CHECK(result.entries[0] == MappingEntry{"fill-mask", "Code-related task"});
        CHECK(result.untagged_skipped == 0);
    }
    SUBCASE("no matches yields an empty set") {
        MappingResult result = map_task("whisper", "Speech task", reg);
        CHECK(result.entries.empty());
    }
    SUBCASE("multiple tags and untagged matches, against a naive scan oracle") {
        Registry mixed;
        auto add = [&](const std::string& id, const char* tag) {
            PtmRecord rec;
            rec.model_id = id;
            if (tag) rec.pipeline_tag = tag;
            mixed.records.push_back(rec);
        };
        add("roberta", "fill-mask");
        add("roberta-go", "text-classification");
        add("sloberta", nullptr); // untagged match is skipped and counted
        add("gpt2", "text-generation");
        MappingResult result = map_task("roberta", "some task", mixed);

        // naive oracle: rescan with direct similarity calls
        std::set<std::string> oracle_tags;
        std::size_t oracle_skipped = 0;
        for (const PtmRecord& rec : mixed.records) {
            if (name_similarity("roberta", normalize_model_name(rec.model_id)) < 0.8) continue;
            if (rec.pipeline_tag)
                oracle_tags.insert(*rec.pipeline_tag);
            else
                ++oracle_skipped;
        }
        std::set<std::string> got_tags;
        for (const MappingEntry& e : result.entries) {
            got_tags.insert(e.pipeline_tag);
            CHECK(e.task == "some task");
        }
        CHECK(got_tags == oracle_tags);
        CHECK(result.untagged_skipped == oracle_skipped);
        CHECK(result.entries.size() == 2);
    }
    SUBCASE("empty task is rejected") {
        CHECK_THROWS_AS(map_task("roberta", "", reg), EmptyNameError);
    }
}

TEST_CASE("map_task tags are a subset of find_similar tags") {
    Registry reg = roberta_family_fixture();
    std::vector<MatchResult> matches = find_similar("bert", reg, MatchOptions{0.5, false});
    std::set<std::string> match_tags;
    for (const MatchResult& m : matches)
        if (m.pipeline_tag) match_tags.insert(*m.pipeline_tag);
    MappingResult result = map_task("bert", "t", reg, MatchOptions{0.5, false});
    for (const MappingEntry& e : result.entries) CHECK(match_tags.count(e.pipeline_tag) == 1);
}

TEST_CASE("dominant_tag picks the most frequent tag") {
    SUBCASE("roberta-family fixture dominates with fill-mask") {
        Registry reg = roberta_family_fixture();
        CHECK(dominant_tag(find_similar("RoBERTa", reg)) == "fill-mask");
    }
    SUBCASE("ties break lexicographically") {
        std::vector<MatchResult> matches = {{"m1", "m1", std::string("b"), 1.0},
                                            {"m2", "m2", std::string("a"), 1.0},
                                            {"m3", "m3", std::string("b"), 1.0},
                                            {"m4", "m4", std::string("a"), 1.0}};
        CHECK(dominant_tag(matches) == "a");
    }
    SUBCASE("absent when no match carries a tag") {
        std::vector<MatchResult> matches = {{"m1", "m1", std::nullopt, 1.0}};
        CHECK_FALSE(dominant_tag(matches).has_value());
        CHECK_FALSE(dominant_tag({}).has_value());
    }
}

TEST_CASE("explain_mapping on the bundled fixtures reproduces the reference rows") {
    Registry reg = ingest_csv(data_path("fixtures/registry_small.csv"));
    std::vector<TaxonomyEntry> taxonomy = load_taxonomy(data_path("taxonomy.json"));
    std::vector<EvidenceDoc> evidence = load_evidence(data_path("evidence.jsonl"), taxonomy);

    ExplainRow roberta = explain_mapping("RoBERTa", reg, evidence);
    CHECK(roberta.pipeline_tag == "fill-mask");
    CHECK(roberta.macro_ids == std::set<std::string>{"M1", "M3", "M4"});

    ExplainRow bert = explain_mapping("BERT", reg, evidence);
    CHECK(bert.pipeline_tag == "text-classification");
    CHECK(bert.macro_ids == std::set<std::string>{"M1", "M2", "M3", "M4", "M5", "M6"});

    ExplainRow t5 = explain_mapping("T5", reg, evidence);
    CHECK(t5.pipeline_tag == "text2text-generation");
    CHECK(t5.macro_ids == std::set<std::string>{"M1", "M2", "M3", "M5"});

    ExplainRow unknown = explain_mapping("zzz-unknown-model", reg, evidence);
    CHECK_FALSE(unknown.pipeline_tag.has_value());
    CHECK(unknown.macro_ids.empty());
}
