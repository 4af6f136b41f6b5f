#include "ptmcat/task_mapping.hpp"
#include "ptmcat/errors.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace ptmcat {

namespace {

std::size_t edit_distance(std::string_view a, std::string_view b, std::size_t sub_cost) {
    const std::size_t m = a.size(), n = b.size();
    if (m == 0) return n;
    if (n == 0) return m;

    std::vector<std::size_t> prev(n + 1), cur(n + 1);
    for (std::size_t j = 0; j <= n; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= m; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= n; ++j) {
            std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : sub_cost);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

std::size_t levenshtein(std::string_view a, std::string_view b) {
    return edit_distance(a, b, 1);
}

std::size_t weighted_edit_distance(std::string_view a, std::string_view b) {
    return edit_distance(a, b, 2);
}

double name_similarity(std::string_view a, std::string_view b) {
    const double total = static_cast<double>(a.size() + b.size());
    if (total == 0.0) return 1.0;
    return (total - static_cast<double>(weighted_edit_distance(a, b))) / total;
}

std::string normalize_model_name(std::string_view model_id) {
    std::size_t slash = model_id.rfind('/');
    std::string_view bare =
        slash == std::string_view::npos ? model_id : model_id.substr(slash + 1);
    std::string out(bare);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<MatchResult> find_similar(const std::string& ptm_name, const Registry& registry,
                                      const MatchOptions& options) {
    std::string needle = normalize_model_name(trimmed(ptm_name));
    if (needle.empty()) throw EmptyNameError();
    if (!(options.threshold > 0.0 && options.threshold <= 1.0))
        throw ConfigError("similarity threshold must lie in (0, 1], got " +
                          std::to_string(options.threshold));

    std::vector<MatchResult> matches;
    for (const PtmRecord& rec : registry.records) {
        std::string candidate = normalize_model_name(rec.model_id);
        double score = name_similarity(needle, candidate);
        bool accepted = options.strict ? score > options.threshold : score >= options.threshold;
        if (accepted)
            matches.push_back({rec.model_id, std::move(candidate), rec.pipeline_tag, score});
    }
    std::sort(matches.begin(), matches.end(), [](const MatchResult& a, const MatchResult& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.model_id < b.model_id;
    });
    return matches;
}

MappingResult map_task(const std::string& ptm_name, const std::string& task,
                       const Registry& registry, const MatchOptions& options) {
    if (trimmed(task).empty()) throw EmptyNameError();

    MappingResult result;
    std::set<std::string> tags;
    for (const MatchResult& match : find_similar(ptm_name, registry, options)) {
        if (match.pipeline_tag)
            tags.insert(*match.pipeline_tag);
        else
            ++result.untagged_skipped;
    }
    for (const std::string& tag : tags) result.entries.push_back({tag, task});
    return result;
}

std::optional<std::string> dominant_tag(const std::vector<MatchResult>& matches) {
    std::map<std::string, std::size_t> counts;
    for (const MatchResult& match : matches)
        if (match.pipeline_tag) ++counts[*match.pipeline_tag];
    if (counts.empty()) return std::nullopt;

    const std::string* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [tag, count] : counts) {
        if (count > best_count) { // map order makes ties lexicographic
            best = &tag;
            best_count = count;
        }
    }
    return *best;
}

ExplainRow explain_mapping(const std::string& ptm_name, const Registry& registry,
                           const std::vector<EvidenceDoc>& evidence,
                           const MatchOptions& options) {
    ExplainRow row;
    row.ptm = trimmed(ptm_name);
    row.pipeline_tag = dominant_tag(find_similar(ptm_name, registry, options));
    row.macro_ids = tasks_for_ptm(row.ptm, evidence);
    return row;
}

} // namespace ptmcat
