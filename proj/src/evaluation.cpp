#include "ptmcat/evaluation.hpp"
#include "ptmcat/errors.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>

namespace ptmcat {

namespace {

// Unbiased bounded draw; kept explicit so fold layouts are identical across
// platforms (std::uniform_int_distribution is implementation-defined).
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % bound;
}

void fisher_yates(std::vector<std::size_t>& values, std::mt19937_64& rng) {
    for (std::size_t i = values.size(); i > 1; --i)
        std::swap(values[i - 1], values[bounded_draw(rng, i)]);
}

MetricTriple fold_triple(const FoldMetrics& fold, Averaging averaging) {
    switch (averaging) {
    case Averaging::Macro: return fold.macro_avg;
    case Averaging::Micro: return fold.micro_avg;
    default: return {fold.precision, fold.recall, fold.f1};
    }
}

} // namespace

FoldMetrics compute_metrics(const std::vector<std::string>& y_true,
                            const std::vector<std::string>& y_pred) {
    if (y_true.size() != y_pred.size()) throw LengthMismatchError(y_true.size(), y_pred.size());
    if (y_true.empty()) throw LengthMismatchError(0, 0);

    struct Counts {
        std::size_t tp = 0, fp = 0, fn = 0, support = 0;
    };
    std::map<std::string, Counts> counts;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        counts[y_true[i]].support += 1;
        if (y_true[i] == y_pred[i]) {
            counts[y_true[i]].tp += 1;
        } else {
            counts[y_true[i]].fn += 1;
            counts[y_pred[i]].fp += 1;
        }
    }

    FoldMetrics metrics;
    double w_p = 0, w_r = 0, w_f = 0;
    double m_p = 0, m_r = 0, m_f = 0;
    std::size_t total_tp = 0, total_fp = 0, total_fn = 0;
    const double total = static_cast<double>(y_true.size());
    for (const auto& [tag, c] : counts) {
        double precision = c.tp + c.fp ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
        double recall = c.tp + c.fn ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
        double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
        metrics.per_class[tag] = {precision, recall, f1, c.support};
        double weight = static_cast<double>(c.support) / total;
        w_p += weight * precision;
        w_r += weight * recall;
        w_f += weight * f1;
        m_p += precision;
        m_r += recall;
        m_f += f1;
        total_tp += c.tp;
        total_fp += c.fp;
        total_fn += c.fn;
    }
    metrics.precision = w_p;
    metrics.recall = w_r;
    metrics.f1 = w_f;

    const double n_classes = static_cast<double>(counts.size());
    metrics.macro_avg = {m_p / n_classes, m_r / n_classes, m_f / n_classes};

    double micro_p = total_tp + total_fp ? static_cast<double>(total_tp) / (total_tp + total_fp)
                                         : 0.0;
    double micro_r = total_tp + total_fn ? static_cast<double>(total_tp) / (total_tp + total_fn)
                                         : 0.0;
    double micro_f =
        micro_p + micro_r > 0 ? 2 * micro_p * micro_r / (micro_p + micro_r) : 0.0;
    metrics.micro_avg = {micro_p, micro_r, micro_f};
    return metrics;
}

FoldPlan make_folds(const std::vector<std::string>& labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw TooFewSamplesError("k must be at least 2, got " + std::to_string(k));

    std::vector<std::string> classes;
    std::unordered_map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = members.try_emplace(labels[i]);
        if (inserted) classes.push_back(labels[i]);
        it->second.push_back(i);
    }

    FoldPlan plan;
    std::vector<std::string> retained;
    for (const std::string& cls : classes) {
        if (members[cls].size() < k) {
            plan.dropped_classes.push_back(cls);
            plan.dropped_samples += members[cls].size();
        } else {
            retained.push_back(cls);
        }
    }
    if (retained.empty())
        throw TooFewSamplesError("no class has at least k=" + std::to_string(k) + " members");

    std::mt19937_64 rng(seed);
    plan.folds.assign(k, {});
    std::vector<std::size_t> load(k, 0);
    for (const std::string& cls : retained) {
        std::vector<std::size_t>& idx = members[cls];
        fisher_yates(idx, rng);

        // Lightest folds first keeps global sizes within 1 while the cyclic
        // deal keeps per-class counts within 1.
        std::vector<std::size_t> order(k);
        for (std::size_t f = 0; f < k; ++f) order[f] = f;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return load[a] < load[b]; });
        for (std::size_t m = 0; m < idx.size(); ++m) {
            std::size_t fold = order[m % k];
            plan.folds[fold].push_back(idx[m]);
            ++load[fold];
        }
    }
    for (std::vector<std::size_t>& fold : plan.folds) std::sort(fold.begin(), fold.end());
    return plan;
}

CvRun evaluate_cv_detailed(const Dataset& dataset, const EvalPipelineConfig& config,
                           std::size_t k, std::uint64_t seed) {
    std::vector<TokenStream> docs;
    std::vector<std::string> labels;
    docs.reserve(dataset.size());
    for (const PtmRecord& rec : dataset) {
        if (!rec.card_data || !rec.pipeline_tag) continue;
        docs.push_back(preprocess(*rec.card_data, config.preprocess));
        labels.push_back(*rec.pipeline_tag);
    }
    if (labels.empty()) throw EmptyDatasetError("no records with both card and tag to evaluate");

    FoldPlan plan = make_folds(labels, k, seed);
    {
        std::unordered_map<std::string, bool> retained;
        for (const auto& fold : plan.folds)
            for (std::size_t i : fold) retained.emplace(labels[i], true);
        if (retained.size() < 2) throw SingleClassError();
    }

    CvRun run;
    run.report.classifier = config.classifier;
    run.report.k = k;
    run.report.seed = seed;
    run.report.averaging = config.averaging;
    run.report.dropped_classes = plan.dropped_classes;

    for (std::size_t f = 0; f < k; ++f) {
        std::vector<TokenStream> train_docs;
        std::vector<std::string> train_labels;
        for (std::size_t g = 0; g < k; ++g) {
            if (g == f) continue;
            for (std::size_t i : plan.folds[g]) {
                train_docs.push_back(docs[i]);
                train_labels.push_back(labels[i]);
            }
        }

        FeatureSpace space = fit(train_docs, config.min_df);
        std::vector<DocVector> train_vectors;
        train_vectors.reserve(train_docs.size());
        for (const TokenStream& doc : train_docs) train_vectors.push_back(transform(space, doc));

        ClassifierModel model =
            config.classifier == ClassifierKind::Cnb
                ? train_cnb(train_vectors, train_labels, space.size(), config.cnb)
                : train_svc(train_vectors, train_labels, space.size(), config.svc);

        FoldPredictions preds;
        for (std::size_t i : plan.folds[f]) {
            preds.y_true.push_back(labels[i]);
            preds.y_pred.push_back(predict(model, transform(space, docs[i])));
        }

        FoldMetrics metrics = compute_metrics(preds.y_true, preds.y_pred);
        metrics.fold_index = f + 1;
        run.report.folds.push_back(std::move(metrics));
        run.predictions.push_back(std::move(preds));
    }

    MetricTriple sum;
    for (const FoldMetrics& fold : run.report.folds) {
        MetricTriple t = fold_triple(fold, config.averaging);
        sum.precision += t.precision;
        sum.recall += t.recall;
        sum.f1 += t.f1;
    }
    const double kf = static_cast<double>(k);
    run.report.averages = {sum.precision / kf, sum.recall / kf, sum.f1 / kf};
    return run;
}

CvReport evaluate_cv(const Dataset& dataset, const EvalPipelineConfig& config, std::size_t k,
                     std::uint64_t seed) {
    return evaluate_cv_detailed(dataset, config, k, seed).report;
}

} // namespace ptmcat
