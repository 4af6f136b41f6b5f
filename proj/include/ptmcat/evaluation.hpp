#pragma once

#include "ptmcat/classifiers.hpp"
#include "ptmcat/registry.hpp"
#include "ptmcat/text_features.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ptmcat {

struct PerClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct MetricTriple {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// precision/recall/f1 are the support-weighted averages; macro and micro
/// variants ride along for the JSON report.
struct FoldMetrics {
    std::size_t fold_index = 0; // 1-based, matching the report layout
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    MetricTriple macro_avg;
    MetricTriple micro_avg;
    std::map<std::string, PerClassMetrics> per_class;
};

/// Per-class precision = TP/(TP+FP), recall = TP/(TP+FN) (0 on empty
/// denominators), F1 = harmonic mean; aggregates weighted by true support.
FoldMetrics compute_metrics(const std::vector<std::string>& y_true,
                            const std::vector<std::string>& y_pred);

struct FoldPlan {
    std::vector<std::vector<std::size_t>> folds; // disjoint, sorted index sets
    std::vector<std::string> dropped_classes;    // classes with < k members
    std::size_t dropped_samples = 0;
};

/// Stratified k-fold split: fold sizes differ by at most 1 overall and per
/// class. Classes with fewer than k members are dropped (reported in the
/// plan); throws TooFewSamples when nothing is left to partition.
FoldPlan make_folds(const std::vector<std::string>& labels, std::size_t k, std::uint64_t seed);

enum class Averaging { Weighted, Macro, Micro };

struct EvalPipelineConfig {
    PreprocessOptions preprocess;
    std::size_t min_df = 2;
    ClassifierKind classifier = ClassifierKind::Cnb;
    CnbOptions cnb;
    SvcOptions svc;
    Averaging averaging = Averaging::Weighted;
};

struct CvReport {
    ClassifierKind classifier = ClassifierKind::Cnb;
    std::size_t k = 10;
    std::uint64_t seed = 0;
    Averaging averaging = Averaging::Weighted;
    std::vector<FoldMetrics> folds;
    MetricTriple averages; // arithmetic means of the per-fold values
    std::vector<std::string> dropped_classes;
};

struct FoldPredictions {
    std::vector<std::string> y_true;
    std::vector<std::string> y_pred;
};

struct CvRun {
    CvReport report;
    std::vector<FoldPredictions> predictions;
};

/// k-fold cross-validation over a filtered dataset: per fold, the feature
/// space is fitted on the train split only, the classifier trained and the
/// held-out split scored.
CvRun evaluate_cv_detailed(const Dataset& dataset, const EvalPipelineConfig& config,
                           std::size_t k, std::uint64_t seed);

CvReport evaluate_cv(const Dataset& dataset, const EvalPipelineConfig& config, std::size_t k,
                     std::uint64_t seed);

} // namespace ptmcat
