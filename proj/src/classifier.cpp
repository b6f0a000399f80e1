#include "mpa/classifier.hpp"

#include <algorithm>

#include "mpa/baselines.hpp"
#include "mpa/linear.hpp"
#include "mpa/smpa.hpp"

namespace mpa {

namespace {

void reject_unknown_keys(const nlohmann::json& params,
                         const std::vector<std::string>& known) {
    for (auto it = params.begin(); it != params.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw InvalidArgument("unknown hyperparameter '" + it.key() + "'");
    }
}

nlohmann::json scaler_to_json(const RangeScaler& s) {
    nlohmann::json j;
    j["min"] = std::vector<double>(s.per_feature_min.data(),
                                   s.per_feature_min.data() + s.per_feature_min.size());
    j["max"] = std::vector<double>(s.per_feature_max.data(),
                                   s.per_feature_max.data() + s.per_feature_max.size());
    j["target_lo"] = s.target_lo;
    j["target_hi"] = s.target_hi;
    return j;
}

// Shared scaling step: fit on train, remember, apply to queries.
class ScaledClassifier : public Classifier {
public:
    void fit(const LabeledDataset& train, std::uint64_t seed) final {
        scaler_ = fit_scaler(train);
        LabeledDataset scaled = train;
        scaled.features = transform(scaler_, train.features);
        fit_scaled(scaled, seed);
        fitted_ = true;
    }

    std::vector<int> predict(const Eigen::MatrixXd& X) const final {
        if (!fitted_) throw InvalidArgument("classifier is not fitted");
        return predict_scaled(transform(scaler_, X));
    }

    nlohmann::json to_json() const final {
        if (!fitted_) throw InvalidArgument("classifier is not fitted");
        nlohmann::json j;
        j["classifier"] = name();
        j["scaler"] = scaler_to_json(scaler_);
        j["model"] = model_to_json();
        return j;
    }

protected:
    virtual void fit_scaled(const LabeledDataset& train, std::uint64_t seed) = 0;
    virtual std::vector<int> predict_scaled(const Eigen::MatrixXd& X) const = 0;
    virtual nlohmann::json model_to_json() const = 0;

private:
    RangeScaler scaler_;
    bool fitted_ = false;
};

class MpaClassifier : public ScaledClassifier {
public:
    explicit MpaClassifier(const nlohmann::json& params) {
        reject_unknown_keys(params, {"members", "epochs", "batch_size", "initial_rate",
                                     "decay_factor", "patience", "clip_fraction", "init",
                                     "bootstrap"});
        config_.members = params.value("members", config_.members);
        config_.epochs = params.value("epochs", config_.epochs);
        config_.batch_size = params.value("batch_size", config_.batch_size);
        config_.initial_rate = params.value("initial_rate", config_.initial_rate);
        config_.decay_factor = params.value("decay_factor", config_.decay_factor);
        config_.patience = params.value("patience", config_.patience);
        config_.clip_fraction = params.value("clip_fraction", config_.clip_fraction);
        if (params.contains("init"))
            config_.init = params.at("init").get<std::string>() == "centroid"
                ? MpaConfig::Init::Centroid
                : MpaConfig::Init::Random;
        config_.bootstrap = params.value("bootstrap", config_.bootstrap);
    }

    std::string name() const override { return "mpa"; }
    const MpaModel& model() const { return model_; }

protected:
    void fit_scaled(const LabeledDataset& train, std::uint64_t seed) override {
        config_.seed = seed;
        model_ = fit_mpa(train, config_);
    }
    std::vector<int> predict_scaled(const Eigen::MatrixXd& X) const override {
        return model_.predict(X);
    }
    nlohmann::json model_to_json() const override { return model_.to_json(); }

private:
    MpaConfig config_;
    MpaModel model_;
};

class SmpaClassifier : public ScaledClassifier {
public:
    explicit SmpaClassifier(const nlohmann::json& params) {
        reject_unknown_keys(params, {"control_points", "kind", "lambda", "epochs",
                                     "initial_rate", "decay_factor", "patience",
                                     "base_margin"});
        config_.control_points = params.value("control_points", config_.control_points);
        if (params.contains("kind"))
            config_.kind = spline_kind_from_string(params.at("kind").get<std::string>());
        if (params.contains("lambda"))
            config_.lambda = lambda_strategy_from_string(params.at("lambda").get<std::string>());
        config_.epochs = params.value("epochs", config_.epochs);
        config_.initial_rate = params.value("initial_rate", config_.initial_rate);
        config_.decay_factor = params.value("decay_factor", config_.decay_factor);
        config_.patience = params.value("patience", config_.patience);
        config_.base_margin = params.value("base_margin", config_.base_margin);
    }

    std::string name() const override { return "smpa"; }
    const SmpaModel& model() const { return model_; }

protected:
    void fit_scaled(const LabeledDataset& train, std::uint64_t seed) override {
        config_.seed = seed;
        model_ = fit_smpa(train, config_);
    }
    std::vector<int> predict_scaled(const Eigen::MatrixXd& X) const override {
        return model_.predict(X);
    }
    nlohmann::json model_to_json() const override { return model_.to_json(); }

private:
    SmpaConfig config_;
    SmpaModel model_;
};

class KnnClassifier : public ScaledClassifier {
public:
    explicit KnnClassifier(const nlohmann::json& params) {
        reject_unknown_keys(params, {"k"});
        k_ = params.value("k", 5);
        if (k_ < 1) throw InvalidArgument("k must be at least 1");
    }

    std::string name() const override { return "knn"; }

protected:
    void fit_scaled(const LabeledDataset& train, std::uint64_t) override { train_ = train; }
    std::vector<int> predict_scaled(const Eigen::MatrixXd& X) const override {
        return knn_predict(train_, X, std::min(k_, train_.n()));
    }
    nlohmann::json model_to_json() const override {
        return {{"k", k_}, {"n_train", train_.n()}};
    }

private:
    int k_ = 5;
    LabeledDataset train_;
};

class PerceptronClassifier : public ScaledClassifier {
public:
    explicit PerceptronClassifier(const nlohmann::json& params) {
        reject_unknown_keys(params, {"rate", "epochs"});
        rate_ = params.value("rate", 0.1);
        epochs_ = params.value("epochs", 100);
    }

    std::string name() const override { return "perceptron"; }
    const PerceptronModel& model() const { return model_; }

protected:
    void fit_scaled(const LabeledDataset& train, std::uint64_t seed) override {
        model_ = perceptron_fit(train, rate_, epochs_, seed);
    }
    std::vector<int> predict_scaled(const Eigen::MatrixXd& X) const override {
        return model_.predict(X);
    }
    nlohmann::json model_to_json() const override {
        return {{"weights", std::vector<double>(model_.weights.data(),
                                                model_.weights.data() + model_.weights.size())},
                {"bias", model_.bias},
                {"mistake_history", model_.mistake_history}};
    }

private:
    double rate_ = 0.1;
    int epochs_ = 100;
    PerceptronModel model_;
};

class DtreeClassifier : public ScaledClassifier {
public:
    explicit DtreeClassifier(const nlohmann::json& params) {
        reject_unknown_keys(params, {"max_depth", "min_leaf"});
        max_depth_ = params.value("max_depth", 6);
        min_leaf_ = params.value("min_leaf", 1);
    }

    std::string name() const override { return "dtree"; }

protected:
    void fit_scaled(const LabeledDataset& train, std::uint64_t) override {
        tree_ = dtree_fit(train, max_depth_, min_leaf_);
    }
    std::vector<int> predict_scaled(const Eigen::MatrixXd& X) const override {
        return tree_.predict(X);
    }
    nlohmann::json model_to_json() const override {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : tree_.nodes)
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"label", n.label}});
        return {{"max_depth", max_depth_}, {"min_leaf", min_leaf_}, {"nodes", nodes}};
    }

private:
    int max_depth_ = 6;
    int min_leaf_ = 1;
    DecisionTree tree_;
};

} // namespace

std::unique_ptr<Classifier> make_classifier(const std::string& kind,
                                            const nlohmann::json& params) {
    if (kind == "mpa") return std::make_unique<MpaClassifier>(params);
    if (kind == "smpa") return std::make_unique<SmpaClassifier>(params);
    if (kind == "knn") return std::make_unique<KnnClassifier>(params);
    if (kind == "perceptron") return std::make_unique<PerceptronClassifier>(params);
    if (kind == "dtree") return std::make_unique<DtreeClassifier>(params);
    throw InvalidArgument("unknown classifier '" + kind + "'");
}

ClassifierFactory classifier_family(const std::string& kind) {
    make_classifier(kind); // validate the name up front
    return [kind](const nlohmann::json& params) { return make_classifier(kind, params); };
}

nlohmann::json default_grid(const std::string& kind) {
    if (kind == "mpa")
        return {{"members", {3}}, {"initial_rate", {0.05, 0.1, 0.3}}};
    if (kind == "smpa")
        return {{"lambda", {"log", "sqrt", "none"}}, {"kind", {"pchip", "clamped-cubic"}}};
    if (kind == "knn") return {{"k", {3, 5, 7, 9}}};
    if (kind == "perceptron") return {{"rate", {0.01, 0.1, 1.0}}};
    if (kind == "dtree") return {{"max_depth", {2, 4, 6, 8}}};
    throw InvalidArgument("unknown classifier '" + kind + "'");
}

std::vector<long> convergence_history(const Classifier& clf) {
    if (const auto* smpa = dynamic_cast<const SmpaClassifier*>(&clf))
        return smpa->model().error_history;
    if (const auto* mpa = dynamic_cast<const MpaClassifier*>(&clf)) {
        std::vector<long> sum;
        for (const auto& member : mpa->model().members) {
            if (sum.size() < member.error_history.size())
                sum.resize(member.error_history.size(), 0);
            for (std::size_t i = 0; i < member.error_history.size(); ++i)
                sum[i] += member.error_history[i];
        }
        return sum;
    }
    if (const auto* p = dynamic_cast<const PerceptronClassifier*>(&clf))
        return p->model().mistake_history;
    return {};
}

} // namespace mpa
