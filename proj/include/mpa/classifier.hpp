#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "mpa/dataset.hpp"

namespace mpa {

// Common contract for every classifier the harness drives. fit() resets any
// previous state; every implementation scales features to [-100, 100] with a
// scaler fitted on its own training data before the model sees them.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual void fit(const LabeledDataset& train, std::uint64_t seed) = 0;
    virtual std::vector<int> predict(const Eigen::MatrixXd& X) const = 0;
    virtual std::string name() const = 0;

    // Serialized fitted state (scaler plus model) for artifacts and goldens.
    virtual nlohmann::json to_json() const = 0;
};

// Builds one classifier instance from a hyperparameter object; unknown
// parameter keys are rejected so grid typos fail loudly.
using ClassifierFactory = std::function<std::unique_ptr<Classifier>(const nlohmann::json& params)>;

// kind is one of "mpa", "smpa", "knn", "perceptron", "dtree".
std::unique_ptr<Classifier> make_classifier(const std::string& kind,
                                            const nlohmann::json& params = nlohmann::json::object());
ClassifierFactory classifier_family(const std::string& kind);

// The declared default hyperparameter grid searched for each classifier kind.
nlohmann::json default_grid(const std::string& kind);

// Per-epoch training error counts of the most recent fit (empty for
// classifiers without an iterative history). MPA reports the per-epoch sum
// over ensemble members.
std::vector<long> convergence_history(const Classifier& clf);

} // namespace mpa
