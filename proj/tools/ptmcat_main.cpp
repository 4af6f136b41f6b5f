#include "ptmcat/errors.hpp"
#include "ptmcat/run_config.hpp"
#include "ptmcat/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace {

using namespace ptmcat;
namespace fs = std::filesystem;

// Binds CLI flags to config keys so flag values run through the same
// validation as config-file entries, with flags taking precedence.
class FlagSet {
public:
    void add(CLI::App* cmd, const std::string& flag, const std::string& key,
             const std::string& desc) {
        CLI::Option* opt = cmd->add_option(flag, values_[key], desc);
        bound_.emplace_back(key, opt);
    }

    void add_switch(CLI::App* cmd, const std::string& flag, const std::string& key,
                    const std::string& desc) {
        CLI::Option* opt = cmd->add_flag(flag, desc);
        bound_.emplace_back(key, opt);
        switches_.insert(key);
    }

    void apply(RunConfig& config) const {
        for (const auto& [key, opt] : bound_) {
            if (!opt->count()) continue;
            if (switches_.count(key))
                apply_config_key(config, key, "true");
            else
                apply_config_key(config, key, values_.at(key));
        }
    }

private:
    std::vector<std::pair<std::string, CLI::Option*>> bound_;
    std::unordered_map<std::string, std::string> values_;
    std::set<std::string> switches_;
};

struct CommandState {
    CLI::App* cmd = nullptr;
    FlagSet flags;
    std::string config_path;
    bool out_dir_given = false;

    RunConfig resolve() {
        RunConfig config;
        if (!config_path.empty()) config = load_config_file(config_path);
        flags.apply(config);
        return config;
    }
};

void add_common(CommandState& state, CLI::App* cmd) {
    state.cmd = cmd;
    cmd->add_option("--config", state.config_path, "flat key=value config file");
    state.flags.add(cmd, "--registry", "registry", "registry export (CSV or JSON-lines)");
    state.flags.add(cmd, "--out-dir", "out_dir", "artifact directory");
}

std::string artifact_path(const RunConfig& config, const std::string& name) {
    fs::create_directories(config.out_dir);
    return (fs::path(config.out_dir) / name).string();
}

void write_artifact(const RunConfig& config, const std::string& name,
                    const nlohmann::ordered_json& value) {
    std::ofstream out(artifact_path(config, name), std::ios::binary);
    if (!out) throw FileNotFoundError(config.out_dir + "/" + name);
    out << value.dump(2) << "\n";
}

Registry load_registry(const RunConfig& config) {
    if (config.registry_path.empty())
        throw ConfigError("a registry path is required (--registry or config 'registry')");
    return ingest_file(config.registry_path, ingest_options(config));
}

std::uint64_t required_seed(const RunConfig& config) {
    if (!config.seed)
        throw ConfigError("a seed is required for training/evaluation (--seed or 'eval.seed')");
    return *config.seed;
}

int run_ingest(CommandState& state) {
    RunConfig config = state.resolve();
    Registry registry = load_registry(config);
    nlohmann::ordered_json summary = registry_stats_json(registry);
    write_artifact(config, "registry_stats.json", summary);
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_filter(CommandState& state, const bool& save_dataset) {
    RunConfig config = state.resolve();
    Registry registry = load_registry(config);
    FilterRun run = filter_registry(registry, filter_options(config));
    write_artifact(config, "filter_report.json", filter_report_json(run.report));
    if (save_dataset) {
        Registry filtered{run.dataset, config.registry_path, run.dataset.size(), 0};
        save_csv(filtered, artifact_path(config, "dataset_f.csv"));
    }
    std::cout << filter_report_table(run.report);
    return 0;
}

int run_train(CommandState& state) {
    RunConfig config = state.resolve();
    std::uint64_t seed = required_seed(config);
    Registry registry = load_registry(config);
    FilterRun filtered = filter_registry(registry, filter_options(config));
    if (filtered.dataset.empty()) throw EmptyDatasetError("no records survive filtering");

    EvalPipelineConfig pipeline = pipeline_config(config);
    std::vector<TokenStream> docs;
    std::vector<std::string> labels;
    for (const PtmRecord& rec : filtered.dataset) {
        docs.push_back(preprocess(*rec.card_data, pipeline.preprocess));
        labels.push_back(*rec.pipeline_tag);
    }
    FeatureSpace space = fit(docs, pipeline.min_df);
    std::vector<DocVector> vectors;
    vectors.reserve(docs.size());
    for (const TokenStream& doc : docs) vectors.push_back(transform(space, doc));
    save_feature_space(space, artifact_path(config, "feature_space.json"));

    std::vector<ClassifierKind> kinds;
    if (config.classifier_both)
        kinds = {ClassifierKind::Cnb, ClassifierKind::Svc};
    else
        kinds = {config.classifier};
    for (ClassifierKind kind : kinds) {
        ClassifierModel model;
        if (kind == ClassifierKind::Cnb) {
            model = train_cnb(vectors, labels, space.size(), config.cnb);
        } else {
            SvcOptions svc = config.svc;
            svc.seed = seed;
            SvcTraining training = train_svc_detailed(vectors, labels, space.size(), svc);
            for (std::size_t c = 0; c < training.converged.size(); ++c)
                if (!training.converged[c])
                    std::cerr << "warning: svc class '" << training.model.classes[c]
                              << "' did not converge within " << svc.epochs << " epochs\n";
            model = std::move(training.model);
        }
        std::string name = "model_" + classifier_kind_name(kind) + ".json";
        save_classifier_model(model, artifact_path(config, name));
        std::cout << "trained " << classifier_kind_name(kind) << " on " << vectors.size()
                  << " documents, " << model.classes.size() << " classes, " << space.size()
                  << " features -> " << name << "\n";
    }
    return 0;
}

int run_evaluate(CommandState& state) {
    RunConfig config = state.resolve();
    std::uint64_t seed = required_seed(config);
    Registry registry = load_registry(config);
    FilterRun filtered = filter_registry(registry, filter_options(config));

    std::vector<ClassifierKind> kinds;
    if (config.classifier_both)
        kinds = {ClassifierKind::Cnb, ClassifierKind::Svc};
    else
        kinds = {config.classifier};

    std::vector<CvReport> reports;
    for (ClassifierKind kind : kinds) {
        EvalPipelineConfig pipeline = pipeline_config(config);
        pipeline.classifier = kind;
        pipeline.svc.seed = seed;
        CvReport report = evaluate_cv(filtered.dataset, pipeline, config.k, seed);
        write_artifact(config, "cv_report_" + classifier_kind_name(kind) + ".json",
                       cv_report_json(report));
        reports.push_back(std::move(report));
    }

    std::vector<const CvReport*> views;
    for (const CvReport& report : reports) views.push_back(&report);
    std::cout << cv_report_table(views);
    for (const CvReport& report : reports)
        for (const std::string& cls : report.dropped_classes)
            std::cerr << "warning: class '" << cls << "' has fewer than k members, dropped\n";
    return 0;
}

int run_map(CommandState& state, const std::string& ptm, const std::string& task) {
    RunConfig config = state.resolve();
    Registry registry = load_registry(config);
    MatchOptions options = match_options(config);
    std::vector<MatchResult> matches = find_similar(ptm, registry, options);
    MappingResult mapping = map_task(ptm, task, registry, options);
    nlohmann::ordered_json out =
        mapping_json(ptm, task, matches, mapping, dominant_tag(matches));
    if (state.out_dir_given) write_artifact(config, "mapping.json", out);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_explain(CommandState& state, const std::string& ptm, const bool& as_json) {
    RunConfig config = state.resolve();
    if (config.taxonomy_path.empty() || config.evidence_path.empty())
        throw ConfigError("explain needs --taxonomy and --evidence (or config keys)");
    Registry registry = load_registry(config);
    std::vector<TaxonomyEntry> taxonomy = load_taxonomy(config.taxonomy_path);
    std::vector<EvidenceDoc> evidence = load_evidence(config.evidence_path, taxonomy);
    ExplainRow row = explain_mapping(ptm, registry, evidence, match_options(config));
    if (as_json)
        std::cout << explain_row_json(row).dump(2) << "\n";
    else
        std::cout << explain_row_text(row) << "\n";
    return 0;
}

int run_screen(CommandState& state) {
    RunConfig config = state.resolve();
    if (config.taxonomy_path.empty() || config.evidence_path.empty() ||
        config.query_path.empty())
        throw ConfigError("screen needs --taxonomy, --evidence and --query (or config keys)");
    std::vector<TaxonomyEntry> taxonomy = load_taxonomy(config.taxonomy_path);
    std::vector<EvidenceDoc> evidence = load_evidence(config.evidence_path, taxonomy);
    KeywordQuery query = load_query(config.query_path);
    for (const EvidenceDoc& doc : screen(evidence, query)) std::cout << doc.doc_id << "\n";
    return 0;
}

int exit_code_for(const Error& error) {
    switch (error.kind()) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Data: return 3;
    case ErrorKind::Training: return 4;
    }
    return 1;
}

void report_error(const Error& error) {
    nlohmann::ordered_json out;
    out["error"] = {{"kind", error.name()}, {"message", error.what()}};
    std::cerr << out.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"categorize pre-trained models and map them to SE tasks"};
    app.require_subcommand(1);
    app.footer("Config keys mirror the flags (see README). Flags override config values.\n"
               "Exit codes: 0 ok, 2 config error, 3 data error, 4 training error.");

    CommandState ingest_state, filter_state, train_state, evaluate_state, map_state,
        explain_state, screen_state;

    CLI::App* cmd_ingest = app.add_subcommand("ingest", "parse and validate a registry export");
    add_common(ingest_state, cmd_ingest);
    ingest_state.flags.add(cmd_ingest, "--format", "format", "auto|csv|jsonl");
    ingest_state.flags.add(cmd_ingest, "--delimiter", "delimiter", "CSV delimiter");
    ingest_state.flags.add_switch(cmd_ingest, "--strict", "strict",
                                  "abort on malformed rows instead of skipping");

    CLI::App* cmd_filter =
        app.add_subcommand("filter", "apply the two-stage dataset filtering");
    add_common(filter_state, cmd_filter);
    filter_state.flags.add(cmd_filter, "--format", "format", "auto|csv|jsonl");
    filter_state.flags.add(cmd_filter, "--combine", "filter.combine",
                           "how the two drop conditions join: and|or");
    filter_state.flags.add(cmd_filter, "--alpha", "filter.alpha",
                           "override the support threshold");
    filter_state.flags.add(cmd_filter, "--beta", "filter.beta",
                           "override the downloads threshold");
    bool save_dataset = false;
    cmd_filter->add_flag("--save-dataset", save_dataset,
                         "also write the filtered dataset as dataset_f.csv");

    CLI::App* cmd_train =
        app.add_subcommand("train", "fit the feature space and train a classifier");
    add_common(train_state, cmd_train);
    train_state.flags.add(cmd_train, "--classifier", "classifier.kind", "cnb|svc|both");
    train_state.flags.add(cmd_train, "--combine", "filter.combine", "and|or");
    train_state.flags.add(cmd_train, "--min-df", "features.min_df",
                          "minimum document frequency");
    train_state.flags.add_switch(cmd_train, "--stemming", "features.stemming",
                                 "enable the plural-folding stemmer");
    train_state.flags.add(cmd_train, "--ngram-max", "features.ngram_max", "1..3");
    train_state.flags.add(cmd_train, "--cnb-smoothing", "cnb.smoothing",
                          "CNB additive smoothing");
    train_state.flags.add_switch(cmd_train, "--cnb-normalize", "cnb.normalize_weights",
                                 "normalize CNB weight rows");
    train_state.flags.add(cmd_train, "--svc-c", "svc.c", "SVC hinge penalty");
    train_state.flags.add(cmd_train, "--epochs", "svc.epochs", "SVC epoch budget");
    train_state.flags.add(cmd_train, "--seed", "eval.seed", "training seed (required)");

    CLI::App* cmd_evaluate =
        app.add_subcommand("evaluate", "k-fold cross-validation with P/R/F1 per fold");
    add_common(evaluate_state, cmd_evaluate);
    evaluate_state.flags.add(cmd_evaluate, "--classifier", "classifier.kind", "cnb|svc|both");
    evaluate_state.flags.add(cmd_evaluate, "--combine", "filter.combine", "and|or");
    evaluate_state.flags.add(cmd_evaluate, "--min-df", "features.min_df",
                             "minimum document frequency");
    evaluate_state.flags.add_switch(cmd_evaluate, "--stemming", "features.stemming",
                                    "enable the plural-folding stemmer");
    evaluate_state.flags.add(cmd_evaluate, "--ngram-max", "features.ngram_max", "1..3");
    evaluate_state.flags.add(cmd_evaluate, "--cnb-smoothing", "cnb.smoothing",
                             "CNB additive smoothing");
    evaluate_state.flags.add(cmd_evaluate, "--svc-c", "svc.c", "SVC hinge penalty");
    evaluate_state.flags.add(cmd_evaluate, "--epochs", "svc.epochs", "SVC epoch budget");
    evaluate_state.flags.add(cmd_evaluate, "--k", "eval.k", "number of folds");
    evaluate_state.flags.add(cmd_evaluate, "--seed", "eval.seed", "fold seed (required)");
    evaluate_state.flags.add(cmd_evaluate, "--averaging", "eval.averaging",
                             "weighted|macro|micro");

    CLI::App* cmd_map = app.add_subcommand("map", "map a PTM name to pipeline-tag/task pairs");
    add_common(map_state, cmd_map);
    std::string map_ptm, map_ptm_task;
    cmd_map->add_option("--ptm", map_ptm, "PTM name to match")->required();
    cmd_map->add_option("--task", map_ptm_task, "SE task paired with each matched tag")
        ->required();
    map_state.flags.add(cmd_map, "--threshold", "map.threshold", "similarity threshold in (0,1]");
    map_state.flags.add_switch(cmd_map, "--strict-compare", "map.strict",
                               "require score > threshold (strict inequality)");

    CLI::App* cmd_explain =
        app.add_subcommand("explain", "one mapping row: PTM, dominant tag, macro tasks");
    add_common(explain_state, cmd_explain);
    std::string explain_ptm;
    bool explain_json = false;
    cmd_explain->add_option("--ptm", explain_ptm, "PTM name")->required();
    cmd_explain->add_flag("--json", explain_json, "emit JSON instead of a text row");
    explain_state.flags.add(cmd_explain, "--taxonomy", "taxonomy", "taxonomy JSON file");
    explain_state.flags.add(cmd_explain, "--evidence", "evidence", "evidence JSON-lines file");
    explain_state.flags.add(cmd_explain, "--threshold", "map.threshold",
                            "similarity threshold in (0,1]");
    explain_state.flags.add_switch(cmd_explain, "--strict-compare", "map.strict",
                                   "require score > threshold");

    CLI::App* cmd_screen =
        app.add_subcommand("screen", "run the keyword query over the evidence corpus");
    add_common(screen_state, cmd_screen);
    screen_state.flags.add(cmd_screen, "--taxonomy", "taxonomy", "taxonomy JSON file");
    screen_state.flags.add(cmd_screen, "--evidence", "evidence", "evidence JSON-lines file");
    screen_state.flags.add(cmd_screen, "--query", "query", "keyword query JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    // add_common registered --out-dir for every command; remember whether the
    // user actually asked for artifacts from `map`.
    map_state.out_dir_given = cmd_map->count("--out-dir") > 0 || !map_state.config_path.empty();

    try {
        if (cmd_ingest->parsed()) return run_ingest(ingest_state);
        if (cmd_filter->parsed()) return run_filter(filter_state, save_dataset);
        if (cmd_train->parsed()) return run_train(train_state);
        if (cmd_evaluate->parsed()) return run_evaluate(evaluate_state);
        if (cmd_map->parsed()) return run_map(map_state, map_ptm, map_ptm_task);
        if (cmd_explain->parsed()) return run_explain(explain_state, explain_ptm, explain_json);
        if (cmd_screen->parsed()) return run_screen(screen_state);
    } catch (const Error& e) {
        report_error(e);
        return exit_code_for(e);
    } catch (const std::exception& e) {
        nlohmann::ordered_json out;
        out["error"] = {{"kind", "Internal"}, {"message", e.what()}};
        std::cerr << out.dump() << "\n";
        return 1;
    }
    return 0;
}
