#pragma once

#include "ptmcat/classifiers.hpp"
#include "ptmcat/evaluation.hpp"
#include "ptmcat/filter.hpp"
#include "ptmcat/registry.hpp"
#include "ptmcat/task_mapping.hpp"
#include "ptmcat/text_features.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ptmcat {

// All artifacts are JSON with fixed key order so identical inputs produce
// byte-identical files. Floats round-trip exactly.

nlohmann::ordered_json registry_stats_json(const Registry& registry);

nlohmann::ordered_json filter_report_json(const FilterReport& report);
std::string filter_report_table(const FilterReport& report);

nlohmann::ordered_json feature_space_json(const FeatureSpace& space);
void save_feature_space(const FeatureSpace& space, const std::string& path);
FeatureSpace load_feature_space(const std::string& path);

nlohmann::ordered_json classifier_model_json(const ClassifierModel& model);
void save_classifier_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_classifier_model(const std::string& path);

nlohmann::ordered_json cv_report_json(const CvReport& report);
/// Fold-per-row table; pass one or two reports (e.g. CNB and SVC side by side).
std::string cv_report_table(const std::vector<const CvReport*>& reports);

nlohmann::ordered_json mapping_json(const std::string& ptm, const std::string& task,
                                    const std::vector<MatchResult>& matches,
                                    const MappingResult& mapping,
                                    const std::optional<std::string>& dominant);

nlohmann::ordered_json explain_row_json(const ExplainRow& row);
std::string explain_row_text(const ExplainRow& row);

std::string classifier_kind_name(ClassifierKind kind);
std::string averaging_name(Averaging averaging);

void write_text_file(const std::string& path, const std::string& content);

} // namespace ptmcat
