#include "ptmcat/run_config.hpp"
#include "ptmcat/errors.hpp"

#include <cctype>
#include <fstream>

namespace ptmcat {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        double parsed = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
}

long long parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        long long parsed = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
}

} // namespace

void apply_config_key(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "registry") config.registry_path = value;
    else if (key == "taxonomy") config.taxonomy_path = value;
    else if (key == "evidence") config.evidence_path = value;
    else if (key == "query") config.query_path = value;
    else if (key == "out_dir") config.out_dir = value;
    else if (key == "format") {
        if (value == "auto") config.format = RegistryFormat::Auto;
        else if (value == "csv") config.format = RegistryFormat::Csv;
        else if (value == "jsonl") config.format = RegistryFormat::JsonLines;
        else throw ConfigError("format: expected auto|csv|jsonl, got '" + value + "'");
    } else if (key == "delimiter") {
        if (value.size() != 1) throw ConfigError("delimiter: expected a single character");
        config.delimiter = value[0];
    } else if (key == "strict") config.strict_ingest = parse_bool(value, key);
    else if (key == "filter.combine") {
        if (value == "and") config.combine = CombineMode::And;
        else if (value == "or") config.combine = CombineMode::Or;
        else throw ConfigError("filter.combine: expected and|or, got '" + value + "'");
    } else if (key == "filter.alpha") config.alpha_override = parse_double(value, key);
    else if (key == "filter.beta") config.beta_override = parse_double(value, key);
    else if (key == "features.min_df") {
        long long v = parse_int(value, key);
        if (v < 1) throw ConfigError("features.min_df: must be >= 1");
        config.min_df = static_cast<std::size_t>(v);
    } else if (key == "features.stemming") config.stemming = parse_bool(value, key);
    else if (key == "features.ngram_max") {
        long long v = parse_int(value, key);
        if (v < 1 || v > 3) throw ConfigError("features.ngram_max: must lie in 1..3");
        config.ngram_max = static_cast<int>(v);
    } else if (key == "classifier.kind") {
        config.classifier_both = false;
        if (value == "cnb") config.classifier = ClassifierKind::Cnb;
        else if (value == "svc") config.classifier = ClassifierKind::Svc;
        else if (value == "both") config.classifier_both = true;
        else throw ConfigError("classifier.kind: expected cnb|svc|both, got '" + value + "'");
    } else if (key == "cnb.smoothing") {
        double v = parse_double(value, key);
        if (v <= 0) throw ConfigError("cnb.smoothing: must be positive");
        config.cnb.smoothing = v;
    } else if (key == "cnb.normalize_weights") {
        config.cnb.normalize_weights = parse_bool(value, key);
    } else if (key == "svc.c") {
        double v = parse_double(value, key);
        if (v <= 0) throw ConfigError("svc.c: must be positive");
        config.svc.c = v;
    } else if (key == "svc.epochs") {
        long long v = parse_int(value, key);
        if (v < 1) throw ConfigError("svc.epochs: must be >= 1");
        config.svc.epochs = static_cast<int>(v);
    } else if (key == "eval.k") {
        long long v = parse_int(value, key);
        if (v < 2) throw ConfigError("eval.k: must be >= 2");
        config.k = static_cast<std::size_t>(v);
    } else if (key == "eval.seed") {
        long long v = parse_int(value, key);
        if (v < 0) throw ConfigError("eval.seed: must be non-negative");
        config.seed = static_cast<std::uint64_t>(v);
    } else if (key == "eval.averaging") {
        if (value == "weighted") config.averaging = Averaging::Weighted;
        else if (value == "macro") config.averaging = Averaging::Macro;
        else if (value == "micro") config.averaging = Averaging::Micro;
        else throw ConfigError("eval.averaging: expected weighted|macro|micro");
    } else if (key == "map.threshold") {
        double v = parse_double(value, key);
        if (!(v > 0.0 && v <= 1.0)) throw ConfigError("map.threshold: must lie in (0, 1]");
        config.threshold = v;
    } else if (key == "map.strict") {
        config.strict_compare = parse_bool(value, key);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);

    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        apply_config_key(config, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return config;
}

EvalPipelineConfig pipeline_config(const RunConfig& config) {
    EvalPipelineConfig pipeline;
    pipeline.preprocess.stemming = config.stemming;
    pipeline.preprocess.ngram_max = config.ngram_max;
    pipeline.min_df = config.min_df;
    pipeline.classifier = config.classifier;
    pipeline.cnb = config.cnb;
    pipeline.svc = config.svc;
    if (config.seed) pipeline.svc.seed = *config.seed;
    pipeline.averaging = config.averaging;
    return pipeline;
}

FilterOptions filter_options(const RunConfig& config) {
    return {config.combine, config.alpha_override, config.beta_override};
}

IngestOptions ingest_options(const RunConfig& config) {
    return {config.format, config.delimiter, config.strict_ingest};
}

MatchOptions match_options(const RunConfig& config) {
    return {config.threshold, config.strict_compare};
}

} // namespace ptmcat
