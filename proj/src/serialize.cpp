#include "ptmcat/serialize.hpp"
#include "ptmcat/errors.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ptmcat {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

ordered_json parse_artifact(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError(path);
    ordered_json parsed = ordered_json::parse(in, nullptr, false);
    if (parsed.is_discarded()) throw SchemaError(what, "not valid JSON");
    return parsed;
}

void write_json_file(const ordered_json& value, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileNotFoundError(path);
    out << value.dump(2) << "\n";
}

ordered_json triple_json(const MetricTriple& t) {
    ordered_json obj;
    obj["precision"] = t.precision;
    obj["recall"] = t.recall;
    obj["f1"] = t.f1;
    return obj;
}

} // namespace

std::string classifier_kind_name(ClassifierKind kind) {
    return kind == ClassifierKind::Cnb ? "cnb" : "svc";
}

std::string averaging_name(Averaging averaging) {
    switch (averaging) {
    case Averaging::Macro: return "macro";
    case Averaging::Micro: return "micro";
    default: return "weighted";
    }
}

nlohmann::ordered_json registry_stats_json(const Registry& registry) {
    RegistryStats stats = registry_stats(registry);
    ordered_json obj;
    obj["source_path"] = registry.source_path;
    obj["ingested_count"] = registry.ingested_count;
    obj["rejected_count"] = registry.rejected_count;
    obj["records"] = stats.records;
    obj["distinct_tags"] = stats.distinct_tags;
    obj["missing_card"] = stats.missing_card;
    obj["missing_tag"] = stats.missing_tag;
    return obj;
}

nlohmann::ordered_json filter_report_json(const FilterReport& report) {
    ordered_json obj;
    obj["initial_ptms"] = report.initial_ptms;
    obj["initial_tags"] = report.initial_tags;
    obj["dropped_missing"] = report.dropped_missing;
    obj["dropped_threshold"] = report.dropped_threshold;
    obj["tags_removed"] = report.tags_removed;
    obj["final_ptms"] = report.final_ptms;
    obj["final_tags"] = report.final_tags;
    ordered_json thresholds;
    thresholds["alpha"] = report.thresholds.alpha;
    thresholds["beta"] = report.thresholds.beta;
    thresholds["combine"] = report.thresholds.combine == CombineMode::And ? "and" : "or";
    obj["thresholds"] = thresholds;
    return obj;
}

std::string filter_report_table(const FilterReport& report) {
    std::ostringstream out;
    char line[160];
    out << "                                                 #PTMs  #pipeline tags\n";
    std::snprintf(line, sizeof(line), "%-45s %8zu %15zu\n", "PTMs in the initial dump",
                  report.initial_ptms, report.initial_tags);
    out << line;
    std::snprintf(line, sizeof(line), "%-45s %8zu %15s\n", "PTMs with missing data",
                  report.dropped_missing, "-");
    out << line;
    std::snprintf(line, sizeof(line), "%-45s %8zu %15zu\n",
                  "PTMs with support<=alpha and downloads<=beta", report.dropped_threshold,
                  report.tags_removed);
    out << line;
    std::snprintf(line, sizeof(line), "%-45s %8zu %15zu\n", "D_f", report.final_ptms,
                  report.final_tags);
    out << line;
    std::snprintf(line, sizeof(line), "(alpha=%g, beta=%g, combine=%s)\n",
                  report.thresholds.alpha, report.thresholds.beta,
                  report.thresholds.combine == CombineMode::And ? "and" : "or");
    out << line;
    return out.str();
}

nlohmann::ordered_json feature_space_json(const FeatureSpace& space) {
    ordered_json obj;
    obj["vocabulary"] = space.vocabulary;
    obj["idf"] = space.idf;
    obj["n_docs_fitted"] = space.n_docs_fitted;
    return obj;
}

void save_feature_space(const FeatureSpace& space, const std::string& path) {
    write_json_file(feature_space_json(space), path);
}

FeatureSpace load_feature_space(const std::string& path) {
    ordered_json obj = parse_artifact(path, "feature_space");
    FeatureSpace space;
    if (!obj.contains("vocabulary") || !obj.contains("idf") || !obj.contains("n_docs_fitted"))
        throw SchemaError("feature_space", "missing vocabulary/idf/n_docs_fitted");
    space.vocabulary = obj["vocabulary"].get<std::vector<std::string>>();
    space.idf = obj["idf"].get<std::vector<double>>();
    space.n_docs_fitted = obj["n_docs_fitted"].get<std::size_t>();
    if (space.vocabulary.size() != space.idf.size())
        throw SchemaError("feature_space.idf", "length differs from vocabulary");
    for (std::size_t i = 0; i < space.vocabulary.size(); ++i)
        space.index.emplace(space.vocabulary[i], i);
    if (space.index.size() != space.vocabulary.size())
        throw SchemaError("feature_space.vocabulary", "duplicate token");
    return space;
}

nlohmann::ordered_json classifier_model_json(const ClassifierModel& model) {
    ordered_json obj;
    obj["kind"] = classifier_kind_name(model.kind);
    obj["classes"] = model.classes;
    ordered_json rows = ordered_json::array();
    for (const std::vector<double>& row : model.weights) rows.push_back(row);
    obj["weights"] = rows;
    obj["bias"] = model.bias;
    ordered_json hyper;
    if (model.kind == ClassifierKind::Cnb) {
        hyper["smoothing"] = model.cnb.smoothing;
        hyper["normalize_weights"] = model.cnb.normalize_weights;
    } else {
        hyper["c"] = model.svc.c;
        hyper["epochs"] = model.svc.epochs;
        hyper["seed"] = model.svc.seed;
    }
    obj["hyperparams"] = hyper;
    return obj;
}

void save_classifier_model(const ClassifierModel& model, const std::string& path) {
    write_json_file(classifier_model_json(model), path);
}

ClassifierModel load_classifier_model(const std::string& path) {
    ordered_json obj = parse_artifact(path, "classifier_model");
    ClassifierModel model;
    std::string kind = obj.value("kind", "");
    if (kind == "cnb")
        model.kind = ClassifierKind::Cnb;
    else if (kind == "svc")
        model.kind = ClassifierKind::Svc;
    else
        throw SchemaError("classifier_model.kind", "expected 'cnb' or 'svc'");

    model.classes = obj.at("classes").get<std::vector<std::string>>();
    for (const auto& row : obj.at("weights"))
        model.weights.push_back(row.get<std::vector<double>>());
    model.bias = obj.at("bias").get<std::vector<double>>();
    if (model.weights.size() != model.classes.size() || model.bias.size() != model.classes.size())
        throw SchemaError("classifier_model.weights", "row count differs from classes");

    const ordered_json& hyper = obj.at("hyperparams");
    if (model.kind == ClassifierKind::Cnb) {
        model.cnb.smoothing = hyper.value("smoothing", 1.0);
        model.cnb.normalize_weights = hyper.value("normalize_weights", false);
    } else {
        model.svc.c = hyper.value("c", 1.0);
        model.svc.epochs = hyper.value("epochs", 50);
        model.svc.seed = hyper.value("seed", std::uint64_t{0});
    }
    return model;
}

nlohmann::ordered_json cv_report_json(const CvReport& report) {
    ordered_json obj;
    obj["classifier"] = classifier_kind_name(report.classifier);
    obj["k"] = report.k;
    obj["seed"] = report.seed;
    obj["averaging"] = averaging_name(report.averaging);
    ordered_json folds = ordered_json::array();
    for (const FoldMetrics& fold : report.folds) {
        ordered_json f;
        f["fold_index"] = fold.fold_index;
        f["precision"] = fold.precision;
        f["recall"] = fold.recall;
        f["f1"] = fold.f1;
        f["macro"] = triple_json(fold.macro_avg);
        f["micro"] = triple_json(fold.micro_avg);
        ordered_json per_class;
        for (const auto& [tag, m] : fold.per_class) {
            ordered_json entry;
            entry["precision"] = m.precision;
            entry["recall"] = m.recall;
            entry["f1"] = m.f1;
            entry["support"] = m.support;
            per_class[tag] = entry;
        }
        f["per_class"] = per_class;
        folds.push_back(std::move(f));
    }
    obj["folds"] = folds;
    obj["averages"] = triple_json(report.averages);
    obj["dropped_classes"] = report.dropped_classes;
    return obj;
}

std::string cv_report_table(const std::vector<const CvReport*>& reports) {
    std::ostringstream out;
    auto fold_value = [](const CvReport& r, std::size_t fold, int metric) {
        MetricTriple t;
        switch (r.averaging) {
        case Averaging::Macro: t = r.folds[fold].macro_avg; break;
        case Averaging::Micro: t = r.folds[fold].micro_avg; break;
        default:
            t = {r.folds[fold].precision, r.folds[fold].recall, r.folds[fold].f1};
        }
        return metric == 0 ? t.precision : metric == 1 ? t.recall : t.f1;
    };

    out << "         ";
    const char* metric_names[3] = {"Precision", "Recall", "F1 Score"};
    for (const char* name : metric_names) {
        std::size_t width = reports.size() * 8;
        std::string label(name);
        out << "  " << label;
        for (std::size_t pad = label.size(); pad < width; ++pad) out << ' ';
    }
    out << "\nFold     ";
    for (int metric = 0; metric < 3; ++metric) {
        out << "  ";
        for (const CvReport* report : reports) {
            std::string name = classifier_kind_name(report->classifier);
            for (auto& c : name) c = static_cast<char>(std::toupper(c));
            out << name;
            for (std::size_t pad = name.size(); pad < 8; ++pad) out << ' ';
        }
    }
    out << "\n";

    std::size_t n_folds = reports.empty() ? 0 : reports.front()->folds.size();
    for (std::size_t fold = 0; fold < n_folds; ++fold) {
        char head[32];
        std::snprintf(head, sizeof(head), "%-9zu", fold + 1);
        out << head;
        for (int metric = 0; metric < 3; ++metric) {
            out << "  ";
            for (const CvReport* report : reports) {
                std::string cell = fixed3(fold_value(*report, fold, metric));
                out << cell;
                for (std::size_t pad = cell.size(); pad < 8; ++pad) out << ' ';
            }
        }
        out << "\n";
    }
    out << "Average  ";
    for (int metric = 0; metric < 3; ++metric) {
        out << "  ";
        for (const CvReport* report : reports) {
            double v = metric == 0   ? report->averages.precision
                       : metric == 1 ? report->averages.recall
                                     : report->averages.f1;
            std::string cell = fixed3(v);
            out << cell;
            for (std::size_t pad = cell.size(); pad < 8; ++pad) out << ' ';
        }
    }
    out << "\n";
    return out.str();
}

nlohmann::ordered_json mapping_json(const std::string& ptm, const std::string& task,
                                    const std::vector<MatchResult>& matches,
                                    const MappingResult& mapping,
                                    const std::optional<std::string>& dominant) {
    ordered_json obj;
    obj["ptm"] = ptm;
    obj["task"] = task;
    ordered_json match_list = ordered_json::array();
    for (const MatchResult& match : matches) {
        ordered_json m;
        m["model_id"] = match.model_id;
        m["matched_name"] = match.matched_name;
        m["pipeline_tag"] =
            match.pipeline_tag ? ordered_json(*match.pipeline_tag) : ordered_json(nullptr);
        m["score"] = match.score;
        match_list.push_back(std::move(m));
    }
    obj["matches"] = match_list;
    ordered_json entries = ordered_json::array();
    for (const MappingEntry& entry : mapping.entries) {
        ordered_json e;
        e["pipeline_tag"] = entry.pipeline_tag;
        e["task"] = entry.task;
        entries.push_back(std::move(e));
    }
    obj["mapping"] = entries;
    obj["untagged_skipped"] = mapping.untagged_skipped;
    obj["dominant_tag"] = dominant ? ordered_json(*dominant) : ordered_json(nullptr);
    return obj;
}

nlohmann::ordered_json explain_row_json(const ExplainRow& row) {
    ordered_json obj;
    obj["ptm"] = row.ptm;
    obj["pipeline_tag"] =
        row.pipeline_tag ? ordered_json(*row.pipeline_tag) : ordered_json(nullptr);
    obj["macro_tasks"] = std::vector<std::string>(row.macro_ids.begin(), row.macro_ids.end());
    return obj;
}

std::string explain_row_text(const ExplainRow& row) {
    std::string macros;
    for (const std::string& id : row.macro_ids) {
        if (!macros.empty()) macros += ", ";
        macros += id;
    }
    if (macros.empty()) macros = "-";
    return row.ptm + " | " + row.pipeline_tag.value_or("-") + " | " + macros;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileNotFoundError(path);
    out << content;
}

} // namespace ptmcat
