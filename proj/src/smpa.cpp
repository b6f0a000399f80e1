#include "mpa/smpa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "mpa/rng.hpp"

namespace mpa {

std::string to_string(LambdaStrategy s) {
    switch (s) {
        case LambdaStrategy::Log: return "log";
        case LambdaStrategy::Sqrt: return "sqrt";
        case LambdaStrategy::None: return "none";
    }
    return "none";
}

LambdaStrategy lambda_strategy_from_string(const std::string& name) {
    if (name == "log") return LambdaStrategy::Log;
    if (name == "sqrt") return LambdaStrategy::Sqrt;
    if (name == "none") return LambdaStrategy::None;
    throw InvalidArgument("unknown lambda strategy '" + name + "'");
}

double lambda_scale(LambdaStrategy strategy, double distance) {
    double lam = 1.0;
    switch (strategy) {
        case LambdaStrategy::Log: lam = std::log1p(distance); break;
        case LambdaStrategy::Sqrt: lam = std::sqrt(distance); break;
        case LambdaStrategy::None: lam = 1.0; break;
    }
    return std::clamp(lam, 0.1, 10.0);
}

KnotSet init_control_points(const LabeledDataset& train, int m, std::uint64_t seed) {
    if (train.dim() != 2)
        throw InvalidArgument("spline boundaries are defined for 2-D data only");
    if (m < 2) throw InvalidArgument("need at least two control points");
    if (train.n() < 1) throw InvalidData("empty training set");

    const double x_min = train.features.col(0).minCoeff();
    const double x_max = train.features.col(0).maxCoeff();
    const double y_min = train.features.col(1).minCoeff();
    const double y_max = train.features.col(1).maxCoeff();
    if (!(x_max - x_min >= 1e-9))
        throw InvalidData("training x-range is degenerate");

    KnotSet knots;
    knots.xs.resize(static_cast<std::size_t>(m));
    knots.ys.resize(static_cast<std::size_t>(m));
    Rng rng(seed);
    for (int i = 0; i < m; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(m - 1);
        knots.xs[static_cast<std::size_t>(i)] = x_min + t * (x_max - x_min);
        knots.ys[static_cast<std::size_t>(i)] = rng.uniform(y_min, y_max);
    }
    return knots;
}

int classify_point(const PiecewiseCubic& spline, int above_class, double x, double y) {
    return (y - spline.eval(x)) >= 0.0 ? above_class : 1 - above_class;
}

namespace {

std::size_t nearest_knot(double x, const KnotSet& knots) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < knots.size(); ++i) {
        const double dist = std::abs(x - knots.xs[i]);
        if (dist < best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    return best;
}

} // namespace

double adaptive_margin(double x_sample, const KnotSet& knots, double base_margin,
                       LambdaStrategy strategy) {
    if (base_margin < 0.0) throw InvalidArgument("base margin must be non-negative");
    const double dist = std::abs(x_sample - knots.xs[nearest_knot(x_sample, knots)]);
    return base_margin * lambda_scale(strategy, dist);
}

CorrectiveStep corrective_step(double x, double y, int label,
                               const SplineBoundaryState& state,
                               const LabeledDataset& train,
                               const std::vector<int>& predictions) {
    const auto& knots = state.knots;
    const std::size_t k = nearest_knot(x, knots);
    const double spacing = (knots.xs.back() - knots.xs.front()) /
                           static_cast<double>(knots.size() - 1);
    const double window = 2.0 * spacing;
    const double lam =
        lambda_scale(state.lambda, std::abs(x - knots.xs[k]));
    const double rate = state.schedule.rate;

    // Informed update: nearest-in-x opposite-class point that the current
    // boundary already gets right.
    const int opposite = 1 - label;
    int guide = -1;
    double guide_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < train.n(); ++i) {
        if (train.labels[static_cast<std::size_t>(i)] != opposite) continue;
        if (predictions[static_cast<std::size_t>(i)] != opposite) continue;
        const double dx = std::abs(train.features(i, 0) - x);
        if (dx <= window && dx < guide_dist) {
            guide_dist = dx;
            guide = i;
        }
    }

    double delta;
    if (guide >= 0) {
        const double target = 0.5 * (y + train.features(guide, 1));
        delta = rate * lam * (target - knots.ys[k]);
    } else {
        delta = rate * lam * 0.5 * (y - state.spline.eval(x));
    }
    if (k == 0 || k + 1 == knots.size()) delta *= 0.5; // edge knots move gently

    const double clamped = std::clamp(knots.ys[k] + delta, state.y_box_lower, state.y_box_upper);
    return CorrectiveStep{static_cast<int>(k), clamped - knots.ys[k]};
}

namespace {

long count_errors(const std::vector<int>& predictions, const std::vector<int>& labels) {
    long errors = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (predictions[i] != labels[i]) ++errors;
    return errors;
}

} // namespace

long train_epoch(SplineBoundaryState& state, const LabeledDataset& train,
                 const SmpaConfig& config) {
    state.spline = fit_spline(state.knots, state.kind);
    const int n = train.n();

    std::vector<int> predictions(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        predictions[static_cast<std::size_t>(i)] = classify_point(
            state.spline, state.above_class, train.features(i, 0), train.features(i, 1));
    const long errors = count_errors(predictions, train.labels);

    std::vector<double> accum(state.knots.size(), 0.0);
    std::vector<int> touches(state.knots.size(), 0);
    for (int i = 0; i < n; ++i) {
        const double x = train.features(i, 0);
        const double y = train.features(i, 1);
        const int label = train.labels[static_cast<std::size_t>(i)];
        const bool wrong = predictions[static_cast<std::size_t>(i)] != label;
        bool eligible = wrong;
        if (!eligible) {
            const double margin =
                adaptive_margin(x, state.knots, state.base_margin, state.lambda);
            eligible = std::abs(y - state.spline.eval(x)) < margin;
        }
        if (!eligible) continue;
        const auto step = corrective_step(x, y, label, state, train, predictions);
        accum[static_cast<std::size_t>(step.knot_index)] += step.delta_y;
        touches[static_cast<std::size_t>(step.knot_index)] += 1;
    }

    bool moved = false;
    for (std::size_t k = 0; k < state.knots.size(); ++k) {
        if (touches[k] == 0) continue;
        state.knots.ys[k] = std::clamp(state.knots.ys[k] + accum[k] / touches[k],
                                       state.y_box_lower, state.y_box_upper);
        moved = true;
    }
    if (moved) state.spline = fit_spline(state.knots, state.kind);

    // Orientation minimizing errors against the refit boundary; ties keep current.
    long e_current = 0;
    for (int i = 0; i < n; ++i)
        if (classify_point(state.spline, state.above_class, train.features(i, 0),
                           train.features(i, 1)) != train.labels[static_cast<std::size_t>(i)])
            ++e_current;
    if (n - e_current < e_current) state.above_class = 1 - state.above_class;

    state.error_history.push_back(errors);
    state.schedule.observe(errors);
    return errors;
}

SmpaModel fit_smpa(const LabeledDataset& train, const SmpaConfig& config) {
    train.validate();
    if (train.dim() != 2)
        throw InvalidArgument("spline boundaries are defined for 2-D data only");
    const auto counts = train.class_counts();
    if (counts[0] < 1 || counts[1] < 1)
        throw InvalidData("training data must contain both classes");
    if (config.epochs < 1) throw InvalidArgument("epochs must be positive");

    SplineBoundaryState state;
    state.knots = init_control_points(train, config.control_points, config.seed);
    state.kind = config.kind;
    state.schedule = LrSchedule::make(config.initial_rate, config.decay_factor,
                                      config.patience, config.min_rate_factor);
    state.lambda = config.lambda;
    state.base_margin = config.base_margin;
    const double y_min = train.features.col(1).minCoeff();
    const double y_max = train.features.col(1).maxCoeff();
    const double y_range = std::max(y_max - y_min, 1e-12);
    state.y_box_lower = y_min - 0.05 * y_range;
    state.y_box_upper = y_max + 0.05 * y_range;
    state.spline = fit_spline(state.knots, state.kind);

    KnotSet best_knots = state.knots;
    int best_orientation = state.above_class;
    long best_error = std::numeric_limits<long>::max();
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // The epoch error is measured against the state entering the epoch,
        // so snapshot before the update is applied.
        const KnotSet entering = state.knots;
        const int entering_orientation = state.above_class;
        const long errors = train_epoch(state, train, config);
        if (errors < best_error) {
            best_error = errors;
            best_knots = entering;
            best_orientation = entering_orientation;
        }
    }

    SmpaModel model;
    model.knots = std::move(best_knots);
    model.kind = config.kind;
    model.above_class = best_orientation;
    model.config = config;
    model.error_history = std::move(state.error_history);
    model.spline = fit_spline(model.knots, model.kind);
    return model;
}

std::vector<int> SmpaModel::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != 2) throw InvalidArgument("spline model expects two feature columns");
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        out.push_back(classify_point(spline, above_class, X(i, 0), X(i, 1)));
    return out;
}

std::vector<std::pair<double, double>> SmpaModel::boundary_trace(int n_points) const {
    if (n_points < 2) throw InvalidArgument("trace needs at least two points");
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(n_points));
    const double x0 = knots.xs.front();
    const double x1 = knots.xs.back();
    for (int i = 0; i < n_points; ++i) {
        const double x = x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n_points - 1);
        out.emplace_back(x, spline.eval(x));
    }
    return out;
}

nlohmann::json SmpaModel::to_json() const {
    nlohmann::json j;
    j["type"] = "smpa";
    j["config"] = {{"control_points", config.control_points},
                   {"kind", to_string(config.kind)},
                   {"lambda", to_string(config.lambda)},
                   {"epochs", config.epochs},
                   {"initial_rate", config.initial_rate},
                   {"decay_factor", config.decay_factor},
                   {"patience", config.patience},
                   {"min_rate_factor", config.min_rate_factor},
                   {"base_margin", config.base_margin},
                   {"seed", config.seed}};
    j["knots"] = {{"xs", knots.xs}, {"ys", knots.ys}};
    j["kind"] = to_string(kind);
    j["above_class"] = above_class;
    j["error_history"] = error_history;
    return j;
}

SmpaModel SmpaModel::from_json(const nlohmann::json& j) {
    SmpaModel model;
    const auto& c = j.at("config");
    model.config.control_points = c.at("control_points").get<int>();
    model.config.kind = spline_kind_from_string(c.at("kind").get<std::string>());
    model.config.lambda = lambda_strategy_from_string(c.at("lambda").get<std::string>());
    model.config.epochs = c.at("epochs").get<int>();
    model.config.initial_rate = c.at("initial_rate").get<double>();
    model.config.decay_factor = c.at("decay_factor").get<double>();
    model.config.patience = c.at("patience").get<int>();
    model.config.min_rate_factor = c.at("min_rate_factor").get<double>();
    model.config.base_margin = c.at("base_margin").get<double>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.knots.xs = j.at("knots").at("xs").get<std::vector<double>>();
    model.knots.ys = j.at("knots").at("ys").get<std::vector<double>>();
    model.kind = spline_kind_from_string(j.at("kind").get<std::string>());
    model.above_class = j.at("above_class").get<int>();
    model.error_history = j.at("error_history").get<std::vector<long>>();
    model.spline = fit_spline(model.knots, model.kind);
    return model;
}

} // namespace mpa
