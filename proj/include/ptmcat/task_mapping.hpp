#pragma once

#include "ptmcat/registry.hpp"
#include "ptmcat/taxonomy.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ptmcat {

/// Unit-cost edit distance (insert, delete, substitute each cost 1).
std::size_t levenshtein(std::string_view a, std::string_view b);

/// Edit distance with substitution cost 2 (insert/delete cost 1); this is the
/// distance underlying the weighted-ratio similarity.
std::size_t weighted_edit_distance(std::string_view a, std::string_view b);

/// sim(a,b) = (|a| + |b| - d_w(a,b)) / (|a| + |b|), in [0,1]; sim("","") = 1.
double name_similarity(std::string_view a, std::string_view b);

/// Lowercases and keeps the segment after the last '/' (registry ids are
/// owner-qualified, names are compared bare).
std::string normalize_model_name(std::string_view model_id);

struct MatchResult {
    std::string model_id;
    std::string matched_name; // normalized name segment
    std::optional<std::string> pipeline_tag;
    double score = 0.0;
};

struct MatchOptions {
    double threshold = 0.8;
    bool strict = false; // strict: require score > threshold instead of >=
};

/// Scans the registry for names similar to ptm_name; results sorted by score
/// descending, then model_id ascending.
std::vector<MatchResult> find_similar(const std::string& ptm_name, const Registry& registry,
                                      const MatchOptions& options = {});

struct MappingEntry {
    std::string pipeline_tag;
    std::string task;

    bool operator==(const MappingEntry&) const = default;
    bool operator<(const MappingEntry& other) const {
        return pipeline_tag != other.pipeline_tag ? pipeline_tag < other.pipeline_tag
                                                  : task < other.task;
    }
};

struct MappingResult {
    std::vector<MappingEntry> entries; // one per distinct tag, sorted by tag
    std::size_t untagged_skipped = 0;  // matches without a pipeline tag
};

/// One mapping entry per distinct pipeline tag among the similar models.
MappingResult map_task(const std::string& ptm_name, const std::string& task,
                       const Registry& registry, const MatchOptions& options = {});

/// Most frequent tag among the matches; ties break lexicographically; absent
/// when no match carries a tag.
std::optional<std::string> dominant_tag(const std::vector<MatchResult>& matches);

struct ExplainRow {
    std::string ptm;
    std::optional<std::string> pipeline_tag;
    std::set<std::string> macro_ids;
};

/// Joins the dominant tag of the similar models with the macro tasks the
/// evidence corpus links to the PTM name.
ExplainRow explain_mapping(const std::string& ptm_name, const Registry& registry,
                           const std::vector<EvidenceDoc>& evidence,
                           const MatchOptions& options = {});

} // namespace ptmcat
