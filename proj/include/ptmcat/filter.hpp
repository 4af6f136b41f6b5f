#pragma once

#include "ptmcat/registry.hpp"

#include <optional>

namespace ptmcat {

enum class CombineMode { And, Or };

/// alpha = median per-tag support, beta = mean downloads; `combine` says how
/// the two drop conditions are joined per record (default: conjunction).
struct FilterThresholds {
    double alpha = 0.0;
    double beta = 0.0;
    CombineMode combine = CombineMode::And;
};

struct FilterReport {
    std::size_t initial_ptms = 0;
    std::size_t initial_tags = 0;
    std::size_t dropped_missing = 0;
    std::size_t dropped_threshold = 0;
    std::size_t tags_removed = 0;
    std::size_t final_ptms = 0;
    std::size_t final_tags = 0;
    FilterThresholds thresholds;
};

struct DropMissingResult {
    Dataset dataset;
    std::size_t dropped = 0;
};

/// Stage 1: keep only records that carry both a card and a pipeline tag.
DropMissingResult drop_missing(const Dataset& records);

/// Derive alpha/beta from the dataset (throws EmptyDataset). Records without
/// a tag contribute to beta only.
FilterThresholds compute_thresholds(const Dataset& dataset,
                                    CombineMode combine = CombineMode::And);

struct ThresholdResult {
    Dataset dataset;
    FilterReport report; // initial_* = this stage's input, dropped_missing = 0
};

/// Stage 2: drop a record iff support(tag) <= alpha AND downloads <= beta
/// (OR when combine=Or). Support is counted on the input dataset.
ThresholdResult apply_thresholds(const Dataset& dataset, const FilterThresholds& thresholds);

struct FilterOptions {
    CombineMode combine = CombineMode::And;
    std::optional<double> alpha_override;
    std::optional<double> beta_override;
};

struct FilterRun {
    Dataset dataset;
    FilterReport report;
};

/// Both stages composed over a whole registry, with the report spanning the
/// full pipeline. tags_removed counts every tag present initially that no
/// longer survives, so final_tags = initial_tags - tags_removed always holds.
FilterRun filter_registry(const Registry& registry, const FilterOptions& options = {});

} // namespace ptmcat
