#pragma once

#include "ptmcat/text_features.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ptmcat {

enum class ClassifierKind { Cnb, Svc };

struct CnbOptions {
    double smoothing = 1.0;         // additive smoothing a > 0
    bool normalize_weights = false; // divide each class row by its L1 norm
};

struct SvcOptions {
    double c = 1.0;      // hinge-loss penalty
    int epochs = 50;     // max optimization passes (n pair updates each)
    std::uint64_t seed = 0;
};

/// Trained linear model. weights is |classes| x |features| row-major;
/// bias is all zeros for CNB. Class order is the training first-seen order
/// and doubles as the tie-break order for predictions.
struct ClassifierModel {
    ClassifierKind kind = ClassifierKind::Cnb;
    std::vector<std::string> classes;
    std::vector<std::vector<double>> weights;
    std::vector<double> bias;
    CnbOptions cnb;
    SvcOptions svc;

    std::size_t n_features() const { return weights.empty() ? 0 : weights[0].size(); }
};

/// Complement Naive Bayes: theta_{~c,i} = (N_{~c,i} + a) / (N_{~c} + a*F)
/// over complement feature mass, weights = ln theta, score
/// f_c(x) = -sum_i x_i * w_{c,i}.
ClassifierModel train_cnb(const std::vector<DocVector>& vectors,
                          const std::vector<std::string>& labels, std::size_t n_features,
                          const CnbOptions& options = {});

struct SvcTraining {
    ClassifierModel model;
    // Per class, best primal objective seen up to each completed epoch.
    std::vector<std::vector<double>> objective_history;
    std::vector<bool> converged;
};

/// One-vs-rest linear SVC minimizing (1/2)||w||^2 + C * sum hinge(y(w.x+b)).
/// Solved by deterministic maximal-violating-pair dual coordinate descent;
/// non-convergence within the epoch budget is reported, never fatal.
SvcTraining train_svc_detailed(const std::vector<DocVector>& vectors,
                               const std::vector<std::string>& labels, std::size_t n_features,
                               const SvcOptions& options = {});

ClassifierModel train_svc(const std::vector<DocVector>& vectors,
                          const std::vector<std::string>& labels, std::size_t n_features,
                          const SvcOptions& options = {});

/// Per-class decision scores in class order; argmax is the prediction.
std::vector<double> predict_scores(const ClassifierModel& model, const DocVector& vector);

/// classes[argmax f_c]; ties break toward the lowest class index.
std::string predict(const ClassifierModel& model, const DocVector& vector);

} // namespace ptmcat
