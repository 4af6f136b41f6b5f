#pragma once

#include "ptmcat/classifiers.hpp"
#include "ptmcat/evaluation.hpp"
#include "ptmcat/filter.hpp"
#include "ptmcat/registry.hpp"
#include "ptmcat/task_mapping.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ptmcat {

/// Everything a run needs, resolvable from a flat key=value config file with
/// command-line flags taking precedence. Unknown keys are errors.
struct RunConfig {
    // paths
    std::string registry_path;
    std::string taxonomy_path;
    std::string evidence_path;
    std::string query_path;
    std::string out_dir = ".";

    // ingest
    RegistryFormat format = RegistryFormat::Auto;
    char delimiter = ',';
    bool strict_ingest = false;

    // filter
    CombineMode combine = CombineMode::And;
    std::optional<double> alpha_override;
    std::optional<double> beta_override;

    // features
    std::size_t min_df = 2;
    bool stemming = false;
    int ngram_max = 1;

    // classifier
    ClassifierKind classifier = ClassifierKind::Cnb;
    bool classifier_both = false; // evaluate both kinds side by side
    CnbOptions cnb;
    SvcOptions svc;

    // evaluation
    std::size_t k = 10;
    std::optional<std::uint64_t> seed;
    Averaging averaging = Averaging::Weighted;

    // mapping
    double threshold = 0.8;
    bool strict_compare = false;
};

/// Applies one config key; throws ConfigError on unknown keys or bad values.
/// The key set is documented in the README and the CLI help text.
void apply_config_key(RunConfig& config, const std::string& key, const std::string& value);

/// Parses `key = value` lines ('#' comments, blank lines ignored).
RunConfig load_config_file(const std::string& path);

EvalPipelineConfig pipeline_config(const RunConfig& config);
FilterOptions filter_options(const RunConfig& config);
IngestOptions ingest_options(const RunConfig& config);
MatchOptions match_options(const RunConfig& config);

} // namespace ptmcat
