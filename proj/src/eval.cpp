#include "mpa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpa/rng.hpp"

namespace mpa {

Metrics compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                        int positive_class) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw InvalidArgument("prediction and truth lengths must match and be non-empty");
    Metrics m;
    m.positive_class = positive_class;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool truth_pos = y_true[i] == positive_class;
        const bool pred_pos = y_pred[i] == positive_class;
        if (truth_pos && pred_pos) ++m.tp;
        else if (!truth_pos && pred_pos) ++m.fp;
        else if (truth_pos && !pred_pos) ++m.fn;
        else ++m.tn;
    }
    const double n = static_cast<double>(y_true.size());
    m.accuracy = static_cast<double>(m.tp + m.tn) / n;
    m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
    m.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0
        ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
        : 0.0;
    return m;
}

double accuracy_score(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw InvalidArgument("prediction and truth lengths must match and be non-empty");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i)
        if (y_true[i] == y_pred[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

std::vector<double> cross_val_score(Classifier& clf, const LabeledDataset& data,
                                    const FoldAssignment& folds, std::uint64_t seed) {
    if (folds.fold_index.size() != static_cast<std::size_t>(data.n()))
        throw InvalidArgument("fold assignment does not match the dataset");
    std::vector<double> scores;
    scores.reserve(static_cast<std::size_t>(folds.k));
    for (int f = 0; f < folds.k; ++f) {
        std::vector<int> train_rows, test_rows;
        for (int i = 0; i < data.n(); ++i) {
            if (folds.fold_index[static_cast<std::size_t>(i)] == f) test_rows.push_back(i);
            else train_rows.push_back(i);
        }
        const LabeledDataset train = data.subset(train_rows);
        const LabeledDataset test = data.subset(test_rows);
        try {
            clf.fit(train, derive_seed(seed, static_cast<std::uint64_t>(f)));
        } catch (const Error& e) {
            throw InvalidData("fit failed on fold " + std::to_string(f) + ": " + e.what());
        }
        scores.push_back(accuracy_score(test.labels, clf.predict(test.features)));
    }
    return scores;
}

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Cartesian product in deterministic order: keys sorted by name (nlohmann
// objects iterate alphabetically), values in the order given.
std::vector<nlohmann::json> enumerate_grid(const nlohmann::json& grid) {
    if (!grid.is_object() || grid.empty())
        throw InvalidArgument("grid must be a non-empty object of value arrays");
    std::vector<std::string> keys;
    for (auto it = grid.begin(); it != grid.end(); ++it) {
        if (!it.value().is_array() || it.value().empty())
            throw InvalidArgument("grid entry '" + it.key() + "' must be a non-empty array");
        keys.push_back(it.key());
    }
    std::vector<nlohmann::json> configs;
    std::vector<std::size_t> cursor(keys.size(), 0);
    while (true) {
        nlohmann::json config = nlohmann::json::object();
        for (std::size_t i = 0; i < keys.size(); ++i)
            config[keys[i]] = grid.at(keys[i]).at(cursor[i]);
        configs.push_back(std::move(config));
        std::size_t j = keys.size();
        while (j-- > 0) {
            if (++cursor[j] < grid.at(keys[j]).size()) break;
            cursor[j] = 0;
            if (j == 0) return configs;
        }
    }
}

} // namespace

GridSearchResult grid_search(const ClassifierFactory& factory, const nlohmann::json& grid,
                             const LabeledDataset& data, int k, std::uint64_t seed) {
    const auto configs = enumerate_grid(grid);
    const FoldAssignment folds = stratified_kfold(data, k, seed);

    GridSearchResult result;
    result.best_cv_score = -1.0;
    for (const auto& config : configs) {
        auto clf = factory(config);
        const auto scores = cross_val_score(*clf, data, folds, seed);
        const double mean_score = mean_of(scores);
        result.all_results.emplace_back(config, mean_score);
        if (mean_score > result.best_cv_score) {
            result.best_cv_score = mean_score;
            result.best_config = config;
        }
    }
    return result;
}

SbsResult sequential_backward_selection(const ClassifierFactory& factory,
                                        const nlohmann::json& params,
                                        const LabeledDataset& data, int min_features,
                                        int k, std::uint64_t seed) {
    if (min_features < 1) throw InvalidArgument("min_features must be at least 1");
    if (data.dim() <= min_features)
        throw InvalidArgument("need more features than min_features");

    const FoldAssignment folds = stratified_kfold(data, k, seed);
    auto evaluate = [&](const std::vector<int>& subset) {
        const LabeledDataset view = data.select_features(subset);
        auto clf = factory(params);
        return mean_of(cross_val_score(*clf, view, folds, seed));
    };

    SbsResult result;
    std::vector<int> current(static_cast<std::size_t>(data.dim()));
    std::iota(current.begin(), current.end(), 0);

    result.trajectory.push_back({-1, current, evaluate(current)});
    result.best_subset = current;
    result.best_score = result.trajectory.back().score;

    while (static_cast<int>(current.size()) > min_features) {
        double round_best = -1.0;
        std::size_t drop_pos = 0;
        for (std::size_t i = 0; i < current.size(); ++i) {
            std::vector<int> candidate = current;
            candidate.erase(candidate.begin() + static_cast<long>(i));
            const double score = evaluate(candidate);
            if (score > round_best) { // ties keep the earliest, i.e. lowest index
                round_best = score;
                drop_pos = i;
            }
        }
        const int removed = current[drop_pos];
        current.erase(current.begin() + static_cast<long>(drop_pos));
        result.trajectory.push_back({removed, current, round_best});
        if (round_best > result.best_score) {
            result.best_score = round_best;
            result.best_subset = current;
        }
    }
    return result;
}

RunStats RunStats::from_scores(std::vector<double> scores) {
    if (scores.empty()) throw InvalidArgument("no scores");
    RunStats s;
    s.per_run_scores = std::move(scores);
    s.mean = mean_of(s.per_run_scores);
    double ss = 0.0;
    for (double x : s.per_run_scores) ss += (x - s.mean) * (x - s.mean);
    const auto n = static_cast<double>(s.per_run_scores.size());
    s.std_population = std::sqrt(ss / n);
    s.std_sample = s.per_run_scores.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return s;
}

RepeatedRunsResult repeated_runs(const RepeatedRunsProtocol& protocol) {
    if (protocol.n_runs < 2) throw InvalidArgument("need at least two runs");
    if (!protocol.factory) throw InvalidArgument("protocol has no classifier factory");

    std::vector<double> scores;
    RepeatedRunsResult result;
    for (int run = 0; run < protocol.n_runs; ++run) {
        const std::uint64_t run_seed = protocol.seed0 + static_cast<std::uint64_t>(run);
        SplitSpec split{protocol.test_fraction, run_seed, protocol.stratified};
        const auto [train, test] = train_test_split(protocol.dataset, split);

        const auto search =
            grid_search(protocol.factory, protocol.grid, train, protocol.cv_folds, run_seed);
        auto clf = protocol.factory(search.best_config);
        clf->fit(train, run_seed);
        scores.push_back(accuracy_score(test.labels, clf->predict(test.features)));
        result.best_configs.push_back(search.best_config);
    }
    result.stats = RunStats::from_scores(std::move(scores));
    return result;
}

} // namespace mpa
