#include "ptmcat/filter.hpp"
#include "ptmcat/errors.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace ptmcat {

namespace {

std::unordered_map<std::string, std::size_t> tag_supports(const Dataset& dataset) {
    std::unordered_map<std::string, std::size_t> supports;
    for (const PtmRecord& rec : dataset)
        if (rec.pipeline_tag) ++supports[*rec.pipeline_tag];
    return supports;
}

// Median with the midpoint convention for even-length input.
double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

} // namespace

DropMissingResult drop_missing(const Dataset& records) {
    DropMissingResult result;
    result.dataset.reserve(records.size());
    for (const PtmRecord& rec : records) {
        if (rec.card_data && rec.pipeline_tag)
            result.dataset.push_back(rec);
        else
            ++result.dropped;
    }
    return result;
}

FilterThresholds compute_thresholds(const Dataset& dataset, CombineMode combine) {
    if (dataset.empty()) throw EmptyDatasetError("cannot compute thresholds on an empty dataset");

    auto supports = tag_supports(dataset);
    if (supports.empty())
        throw EmptyDatasetError("cannot compute thresholds: no record carries a pipeline tag");

    std::vector<double> support_values;
    support_values.reserve(supports.size());
    for (const auto& [tag, count] : supports) support_values.push_back(static_cast<double>(count));

    double downloads_sum = 0.0;
    for (const PtmRecord& rec : dataset) downloads_sum += static_cast<double>(rec.downloads);

    FilterThresholds t;
    t.alpha = median(std::move(support_values));
    t.beta = downloads_sum / static_cast<double>(dataset.size());
    t.combine = combine;
    return t;
}

ThresholdResult apply_thresholds(const Dataset& dataset, const FilterThresholds& thresholds) {
    auto supports = tag_supports(dataset);

    ThresholdResult result;
    result.dataset.reserve(dataset.size());
    for (const PtmRecord& rec : dataset) {
        bool low_support = false;
        if (rec.pipeline_tag) {
            double support = static_cast<double>(supports[*rec.pipeline_tag]);
            low_support = support <= thresholds.alpha;
        }
        bool low_downloads = static_cast<double>(rec.downloads) <= thresholds.beta;
        bool drop = thresholds.combine == CombineMode::And ? (low_support && low_downloads)
                                                           : (low_support || low_downloads);
        if (drop)
            ++result.report.dropped_threshold;
        else
            result.dataset.push_back(rec);
    }

    auto surviving = tag_supports(result.dataset);
    result.report.initial_ptms = dataset.size();
    result.report.initial_tags = supports.size();
    result.report.tags_removed = supports.size() - surviving.size();
    result.report.final_ptms = result.dataset.size();
    result.report.final_tags = surviving.size();
    result.report.thresholds = thresholds;
    return result;
}

FilterRun filter_registry(const Registry& registry, const FilterOptions& options) {
    const Dataset& initial = registry.records;
    std::size_t initial_tags = tag_supports(initial).size();

    DropMissingResult stage1 = drop_missing(initial);

    FilterThresholds thresholds;
    if (options.alpha_override && options.beta_override) {
        thresholds.alpha = *options.alpha_override;
        thresholds.beta = *options.beta_override;
        thresholds.combine = options.combine;
    } else {
        thresholds = compute_thresholds(stage1.dataset, options.combine);
        if (options.alpha_override) thresholds.alpha = *options.alpha_override;
        if (options.beta_override) thresholds.beta = *options.beta_override;
    }

    ThresholdResult stage2 = apply_thresholds(stage1.dataset, thresholds);

    FilterRun run;
    run.dataset = std::move(stage2.dataset);
    run.report.initial_ptms = initial.size();
    run.report.initial_tags = initial_tags;
    run.report.dropped_missing = stage1.dropped;
    run.report.dropped_threshold = stage2.report.dropped_threshold;
    run.report.final_ptms = run.dataset.size();
    run.report.final_tags = stage2.report.final_tags;
    // Attributed to the whole pipeline so the report arithmetic always closes,
    // even when a tag's last record already fell at the missing-data stage.
    run.report.tags_removed = run.report.initial_tags - run.report.final_tags;
    run.report.thresholds = thresholds;
    return run;
}

} // namespace ptmcat
