#include "ptmcat/classifiers.hpp"
#include "ptmcat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace ptmcat {

namespace {

std::vector<std::string> class_list(const std::vector<std::string>& labels) {
    std::vector<std::string> classes;
    std::unordered_map<std::string, std::size_t> seen;
    for (const std::string& label : labels)
        if (seen.emplace(label, classes.size()).second) classes.push_back(label);
    return classes;
}

void check_training_input(const std::vector<DocVector>& vectors,
                          const std::vector<std::string>& labels, std::size_t n_features) {
    if (vectors.size() != labels.size())
        throw DimensionMismatchError("got " + std::to_string(vectors.size()) + " vectors for " +
                                     std::to_string(labels.size()) + " labels");
    if (vectors.empty()) throw DimensionMismatchError("empty training set");
    for (const DocVector& v : vectors)
        for (const SparseEntry& e : v.entries)
            if (e.index >= n_features)
                throw DimensionMismatchError("feature index " + std::to_string(e.index) +
                                             " out of range for " + std::to_string(n_features) +
                                             " features");
}

double dot_dense(const std::vector<double>& w, const DocVector& v) {
    double sum = 0.0;
    for (const SparseEntry& e : v.entries) sum += w[e.index] * e.weight;
    return sum;
}

// Exact minimizer of C * sum_i hinge(y_i * (w.x_i + b)) over b alone.
// The sum is piecewise linear and convex in b with slope increasing by C at
// each breakpoint; the sweep picks the first point where it turns >= 0.
double optimal_bias(const std::vector<double>& margins, const std::vector<int>& y) {
    std::vector<double> breakpoints;
    breakpoints.reserve(y.size());
    std::size_t positives = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] > 0) {
            breakpoints.push_back(1.0 - margins[i]); // active while b < this
            ++positives;
        } else {
            breakpoints.push_back(-(1.0 + margins[i])); // active while b > this
        }
    }
    std::sort(breakpoints.begin(), breakpoints.end());

    double slope = -static_cast<double>(positives); // in units of C
    for (std::size_t k = 0; k < breakpoints.size(); ++k) {
        slope += 1.0;
        if (slope > 0.0) return breakpoints[k];
        if (slope == 0.0) {
            if (k + 1 < breakpoints.size()) return (breakpoints[k] + breakpoints[k + 1]) / 2.0;
            return breakpoints[k];
        }
    }
    return breakpoints.empty() ? 0.0 : breakpoints.back();
}

double primal_objective(const std::vector<double>& w, double b,
                        const std::vector<double>& margins, const std::vector<int>& y,
                        double c) {
    double reg = 0.0;
    for (double wi : w) reg += wi * wi;
    double hinge = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        hinge += std::max(0.0, 1.0 - static_cast<double>(y[i]) * (margins[i] + b));
    return 0.5 * reg + c * hinge;
}

struct BinarySvc {
    std::vector<double> w;
    double b = 0.0;
    std::vector<double> history; // best objective per completed epoch
    bool converged = false;
};

// Dual coordinate descent on the maximal violating pair (the classic SMO
// working-set rule), which honours the equality constraint and therefore the
// unregularized bias of the stated objective. Fully deterministic.
BinarySvc solve_binary_svc(const std::vector<DocVector>& xs, const std::vector<int>& y,
                           std::size_t n_features, double c, int epochs) {
    const std::size_t n = xs.size();
    constexpr double kKktTol = 1e-9;
    constexpr double kTau = 1e-12;

    std::vector<double> alpha(n, 0.0);
    std::vector<double> w(n_features, 0.0);
    std::vector<double> self_dot(n);
    for (std::size_t i = 0; i < n; ++i) self_dot[i] = dot(xs[i], xs[i]);

    BinarySvc result;
    double best_obj = std::numeric_limits<double>::infinity();

    std::vector<double> margins(n, 0.0); // w . x_i
    auto refresh_margins = [&]() {
        for (std::size_t i = 0; i < n; ++i) margins[i] = dot_dense(w, xs[i]);
    };
    auto checkpoint = [&]() {
        refresh_margins();
        double b = optimal_bias(margins, y);
        double obj = primal_objective(w, b, margins, y, c);
        if (obj < best_obj) {
            best_obj = obj;
            result.w = w;
            result.b = b;
        }
    };

    const long long max_updates = static_cast<long long>(epochs) * static_cast<long long>(n);
    long long updates = 0;
    while (updates < max_updates) {
        refresh_margins();

        // select the maximal violating pair
        double up_best = -std::numeric_limits<double>::infinity();
        double low_best = std::numeric_limits<double>::infinity();
        std::size_t i = n, j = n;
        for (std::size_t t = 0; t < n; ++t) {
            double grad = static_cast<double>(y[t]) * margins[t] - 1.0; // dual gradient
            double v = -static_cast<double>(y[t]) * grad;
            bool in_up = (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
            bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
            if (in_up && v > up_best) {
                up_best = v;
                i = t;
            }
            if (in_low && v < low_best) {
                low_best = v;
                j = t;
            }
        }
        if (i >= n || j >= n || up_best - low_best <= kKktTol) {
            result.converged = true;
            break;
        }

        double grad_i = static_cast<double>(y[i]) * margins[i] - 1.0;
        double grad_j = static_cast<double>(y[j]) * margins[j] - 1.0;
        double quad = self_dot[i] + self_dot[j] - 2.0 * dot(xs[i], xs[j]);
        if (quad <= kTau) quad = kTau;

        double old_ai = alpha[i], old_aj = alpha[j];
        if (y[i] != y[j]) {
            double delta = (-grad_i - grad_j) / quad;
            double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else {
                if (alpha[i] < 0) {
                    alpha[i] = 0;
                    alpha[j] = -diff;
                }
            }
            if (diff > 0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            }
        } else {
            double delta = (grad_i - grad_j) / quad;
            double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = sum;
                }
                if (alpha[i] < 0) {
                    alpha[i] = 0;
                    alpha[j] = sum;
                }
            }
        }

        double di = (alpha[i] - old_ai) * static_cast<double>(y[i]);
        double dj = (alpha[j] - old_aj) * static_cast<double>(y[j]);
        for (const SparseEntry& e : xs[i].entries) w[e.index] += di * e.weight;
        for (const SparseEntry& e : xs[j].entries) w[e.index] += dj * e.weight;

        ++updates;
        if (updates % static_cast<long long>(n) == 0) {
            checkpoint();
            result.history.push_back(best_obj);
        }
    }

    checkpoint();
    if (result.history.empty() || result.history.back() != best_obj)
        result.history.push_back(best_obj);
    return result;
}

} // namespace

ClassifierModel train_cnb(const std::vector<DocVector>& vectors,
                          const std::vector<std::string>& labels, std::size_t n_features,
                          const CnbOptions& options) {
    check_training_input(vectors, labels, n_features);

    ClassifierModel model;
    model.kind = ClassifierKind::Cnb;
    model.cnb = options;
    model.classes = class_list(labels);
    if (model.classes.size() < 2) throw SingleClassError();

    std::unordered_map<std::string, std::size_t> class_index;
    for (std::size_t c = 0; c < model.classes.size(); ++c)
        class_index.emplace(model.classes[c], c);

    const std::size_t n_classes = model.classes.size();
    std::vector<double> total_per_feature(n_features, 0.0);
    std::vector<std::vector<double>> class_per_feature(n_classes,
                                                       std::vector<double>(n_features, 0.0));
    double total_mass = 0.0;
    std::vector<double> class_mass(n_classes, 0.0);

    for (std::size_t d = 0; d < vectors.size(); ++d) {
        std::size_t c = class_index[labels[d]];
        for (const SparseEntry& e : vectors[d].entries) {
            total_per_feature[e.index] += e.weight;
            class_per_feature[c][e.index] += e.weight;
            total_mass += e.weight;
            class_mass[c] += e.weight;
        }
    }

    const double a = options.smoothing;
    model.weights.assign(n_classes, std::vector<double>(n_features, 0.0));
    model.bias.assign(n_classes, 0.0);
    for (std::size_t c = 0; c < n_classes; ++c) {
        double complement_mass = total_mass - class_mass[c];
        double denom = complement_mass + a * static_cast<double>(n_features);
        std::vector<double>& row = model.weights[c];
        for (std::size_t i = 0; i < n_features; ++i) {
            double complement_count = total_per_feature[i] - class_per_feature[c][i];
            row[i] = std::log((complement_count + a) / denom);
        }
        if (options.normalize_weights) {
            double l1 = 0.0;
            for (double wi : row) l1 += std::abs(wi);
            if (l1 > 0)
                for (double& wi : row) wi /= l1;
        }
    }
    return model;
}

SvcTraining train_svc_detailed(const std::vector<DocVector>& vectors,
                               const std::vector<std::string>& labels, std::size_t n_features,
                               const SvcOptions& options) {
    check_training_input(vectors, labels, n_features);

    SvcTraining training;
    ClassifierModel& model = training.model;
    model.kind = ClassifierKind::Svc;
    model.svc = options;
    model.classes = class_list(labels);
    if (model.classes.size() < 2) throw SingleClassError();

    model.weights.assign(model.classes.size(), {});
    model.bias.assign(model.classes.size(), 0.0);
    training.objective_history.resize(model.classes.size());
    training.converged.resize(model.classes.size());

    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        std::vector<int> y(vectors.size());
        for (std::size_t d = 0; d < vectors.size(); ++d)
            y[d] = labels[d] == model.classes[c] ? 1 : -1;
        BinarySvc solved =
            solve_binary_svc(vectors, y, n_features, options.c, options.epochs);
        model.weights[c] = std::move(solved.w);
        model.bias[c] = solved.b;
        training.objective_history[c] = std::move(solved.history);
        training.converged[c] = solved.converged;
    }
    return training;
}

ClassifierModel train_svc(const std::vector<DocVector>& vectors,
                          const std::vector<std::string>& labels, std::size_t n_features,
                          const SvcOptions& options) {
    return train_svc_detailed(vectors, labels, n_features, options).model;
}

std::vector<double> predict_scores(const ClassifierModel& model, const DocVector& vector) {
    for (const SparseEntry& e : vector.entries)
        if (e.index >= model.n_features())
            throw DimensionMismatchError("vector index " + std::to_string(e.index) +
                                         " out of range for " +
                                         std::to_string(model.n_features()) + " features");

    std::vector<double> scores(model.classes.size(), 0.0);
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        double s = dot_dense(model.weights[c], vector);
        scores[c] = model.kind == ClassifierKind::Cnb ? -s : s + model.bias[c];
    }
    return scores;
}

std::string predict(const ClassifierModel& model, const DocVector& vector) {
    std::vector<double> scores = predict_scores(model, vector);
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best]) best = c;
    return model.classes[best];
}

} // namespace ptmcat
