#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpa/classifier.hpp"
#include "mpa/dataset.hpp"
#include "mpa/stats.hpp"

namespace mpa {

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int positive_class = 1;
    long tp = 0, fp = 0, tn = 0, fn = 0;
};

// Standard binary confusion-matrix metrics; precision and recall are 0 when
// their denominator is 0.
Metrics compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                        int positive_class = 1);

double accuracy_score(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Per-fold test accuracies, ordered by fold index; the classifier is refit on
// each fold's complement with a fold-derived seed.
std::vector<double> cross_val_score(Classifier& clf, const LabeledDataset& data,
                                    const FoldAssignment& folds, std::uint64_t seed);

struct GridSearchResult {
    nlohmann::json best_config;
    double best_cv_score = 0.0;
    std::vector<std::pair<nlohmann::json, double>> all_results;
};

// Full Cartesian product of the grid (an object mapping parameter names to
// value arrays), scored by mean stratified-k-fold CV accuracy on shared
// folds. Enumeration order: parameters sorted by name, values in the given
// order; ties keep the earliest configuration.
GridSearchResult grid_search(const ClassifierFactory& factory, const nlohmann::json& grid,
                             const LabeledDataset& data, int k, std::uint64_t seed);

struct SbsStep {
    int removed_feature = -1; // -1 for the initial full set
    std::vector<int> subset;
    double score = 0.0;
};

struct SbsResult {
    std::vector<int> best_subset;
    double best_score = 0.0;
    std::vector<SbsStep> trajectory;
};

// Greedy wrapper elimination: each round removes the feature whose removal
// maximizes mean CV accuracy (ties remove the lowest index) until
// min_features remain; returns the best subset seen along the way.
SbsResult sequential_backward_selection(const ClassifierFactory& factory,
                                        const nlohmann::json& params,
                                        const LabeledDataset& data, int min_features,
                                        int k, std::uint64_t seed);

struct RunStats {
    std::vector<double> per_run_scores;
    double mean = 0.0;
    double std_sample = 0.0;     // n-1 denominator
    double std_population = 0.0; // n denominator

    static RunStats from_scores(std::vector<double> scores);
};

struct RepeatedRunsProtocol {
    LabeledDataset dataset;
    double test_fraction = 0.25;
    bool stratified = true;
    int n_runs = 5;
    std::uint64_t seed0 = 0;
    ClassifierFactory factory;
    nlohmann::json grid;
    int cv_folds = 3;
};

struct RepeatedRunsResult {
    RunStats stats;
    std::vector<nlohmann::json> best_configs; // per run
};

// Run i: split with seed0+i, grid-search on the training side, refit the best
// configuration on the full training side, record test accuracy.
RepeatedRunsResult repeated_runs(const RepeatedRunsProtocol& protocol);

} // namespace mpa
