#include "mpa/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace mpa {

LrSchedule LrSchedule::make(double initial_rate, double decay_factor, int patience,
                            double min_rate_factor) {
    if (!(initial_rate > 0.0)) throw InvalidArgument("initial rate must be positive");
    if (!(decay_factor > 0.0 && decay_factor < 1.0))
        throw InvalidArgument("decay factor must be in (0, 1)");
    if (patience < 1) throw InvalidArgument("patience must be positive");
    LrSchedule s;
    s.initial_rate = initial_rate;
    s.decay_factor = decay_factor;
    s.patience = patience;
    s.min_rate = initial_rate * min_rate_factor;
    s.rate = initial_rate;
    s.best_error_seen = -1;
    s.epochs_since_improvement = 0;
    return s;
}

void LrSchedule::observe(long epoch_error) {
    if (best_error_seen < 0 || epoch_error < best_error_seen) {
        best_error_seen = epoch_error;
        epochs_since_improvement = 0;
        return;
    }
    ++epochs_since_improvement;
    if (epochs_since_improvement >= patience) {
        rate = std::max(rate * decay_factor, min_rate);
        epochs_since_improvement = 0;
    }
}

std::pair<Eigen::VectorXd, double> hyperplane_from_points(const Eigen::MatrixXd& points) {
    const auto d = points.cols();
    if (points.rows() != d || d < 2)
        throw InvalidArgument("expected d points in d dimensions, d >= 2");

    const Eigen::RowVectorXd mean = points.colwise().mean();
    const Eigen::MatrixXd centered = points.rowwise() - mean;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // d centered points span at most d-1 dimensions, so the smallest singular
    // value is ~0 by construction; affine independence requires the next one
    // to be well separated from zero.
    if (sv(0) <= 0.0 || sv(d - 2) <= 1e-10 * sv(0))
        throw DegenerateGeometry("control points are affinely dependent");

    Eigen::VectorXd normal = svd.matrixV().col(d - 1);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (std::abs(normal(i)) > 1e-12) {
            if (normal(i) < 0.0) normal = -normal;
            break;
        }
    }
    return {normal, normal.dot(mean.transpose())};
}

Eigen::MatrixXd init_random(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                            Rng& rng) {
    const auto d = lower.size();
    if (d < 2) throw InvalidArgument("need at least two dimensions");
    if (upper.size() != d) throw InvalidArgument("bounds dimension mismatch");
    for (Eigen::Index j = 0; j < d; ++j)
        if (!std::isfinite(lower(j)) || !std::isfinite(upper(j)))
            throw InvalidArgument("bounds must be finite");
    const double range = (upper - lower).maxCoeff();

    Eigen::MatrixXd points(d, d);
    for (int attempt = 0; attempt < 100; ++attempt) {
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                points(i, j) = rng.uniform(lower(j), upper(j));
        const Eigen::MatrixXd centered = points.rowwise() - points.colwise().mean();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
        if (svd.singularValues()(d - 2) > 1e-8 * range) return points;
    }
    throw DegenerateGeometry("random initialization kept producing dependent points");
}

Eigen::MatrixXd init_centroid(const LabeledDataset& train) {
    const auto counts = train.class_counts();
    if (counts[0] < 1 || counts[1] < 1)
        throw InvalidData("centroid init needs both classes");
    const auto d = train.features.cols();

    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(d), c1 = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < train.n(); ++i) {
        if (train.labels[static_cast<std::size_t>(i)] == 0)
            c0 += train.features.row(i).transpose();
        else
            c1 += train.features.row(i).transpose();
    }
    c0 /= counts[0];
    c1 /= counts[1];

    const Eigen::VectorXd axis = c1 - c0;
    const double axis_norm = axis.norm();
    const Eigen::VectorXd ranges = train.features.colwise().maxCoeff() -
                                   train.features.colwise().minCoeff();
    const double scale = 0.1 * std::max(ranges.maxCoeff(), 1.0);
    if (axis_norm <= 1e-12 * std::max(ranges.maxCoeff(), 1.0))
        throw DegenerateGeometry("class centroids coincide");

    // Householder QR of the axis: columns 1..d-1 of Q are an orthonormal
    // basis of its orthogonal complement.
    Eigen::MatrixXd axis_col = axis / axis_norm;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(axis_col);
    const Eigen::MatrixXd q = qr.householderQ();

    const Eigen::VectorXd midpoint = 0.5 * (c0 + c1);
    Eigen::MatrixXd points(d, d);
    points.row(0) = midpoint.transpose();
    for (Eigen::Index i = 1; i < d; ++i)
        points.row(i) = (midpoint + scale * q.col(i)).transpose();
    return points;
}

double signed_distance(const HyperplaneMember& member, const Eigen::VectorXd& x) {
    return member.normal.dot(x) - member.offset;
}

Eigen::VectorXd clip_step(const Eigen::VectorXd& step, const Eigen::VectorXd& limits) {
    if (step.size() != limits.size()) throw InvalidArgument("limit dimension mismatch");
    Eigen::VectorXd out(step.size());
    for (Eigen::Index j = 0; j < step.size(); ++j) {
        if (!(limits(j) > 0.0)) throw InvalidArgument("clip limits must be positive");
        out(j) = std::clamp(step(j), -limits(j), limits(j));
    }
    return out;
}

namespace {

int member_predict(const HyperplaneMember& member, const Eigen::VectorXd& x) {
    return signed_distance(member, x) >= 0.0 ? member.above_class : 1 - member.above_class;
}

long member_errors(const HyperplaneMember& member, const LabeledDataset& data) {
    long errors = 0;
    for (int i = 0; i < data.n(); ++i)
        if (member_predict(member, data.features.row(i).transpose()) !=
            data.labels[static_cast<std::size_t>(i)])
            ++errors;
    return errors;
}

// Fewest-errors orientation for the current boundary; ties keep the current bit.
void reorient(HyperplaneMember& member, const LabeledDataset& data) {
    const long current = member_errors(member, data);
    if (data.n() - current < current) member.above_class = 1 - member.above_class;
}

} // namespace

long train_epoch(HyperplaneMember& member, const LabeledDataset& train, int batch_size,
                 const Eigen::VectorXd& clip_limits, const Eigen::VectorXd& box_lower,
                 const Eigen::VectorXd& box_upper, Rng& rng) {
    if (batch_size < 1) throw InvalidArgument("batch size must be positive");
    const double rate = member.schedule.rate;
    const auto d = train.features.cols();
    const int n = train.n();

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);

    Eigen::MatrixXd accum = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXi touch_counts = Eigen::VectorXi::Zero(d);
    long errors = 0;
    int in_batch = 0;

    auto apply_batch = [&]() {
        if (touch_counts.sum() == 0) {
            in_batch = 0;
            return;
        }
        const Eigen::MatrixXd before_points = member.control_points;
        const Eigen::VectorXd before_normal = member.normal;
        const double before_offset = member.offset;
        for (Eigen::Index p = 0; p < d; ++p) {
            if (touch_counts(p) == 0) continue;
            const Eigen::VectorXd mean_step = accum.row(p).transpose() / touch_counts(p);
            member.control_points.row(p) += clip_step(mean_step, clip_limits).transpose();
        }
        for (Eigen::Index p = 0; p < d; ++p)
            for (Eigen::Index j = 0; j < d; ++j)
                member.control_points(p, j) =
                    std::clamp(member.control_points(p, j), box_lower(j), box_upper(j));
        try {
            auto [normal, offset] = hyperplane_from_points(member.control_points);
            member.normal = normal;
            member.offset = offset;
        } catch (const DegenerateGeometry&) {
            // Projection collapsed the points; drop this batch.
            member.control_points = before_points;
            member.normal = before_normal;
            member.offset = before_offset;
        }
        accum.setZero();
        touch_counts.setZero();
        in_batch = 0;
    };

    for (int k = 0; k < n; ++k) {
        const int idx = order[static_cast<std::size_t>(k)];
        const Eigen::VectorXd x = train.features.row(idx).transpose();
        const int truth = train.labels[static_cast<std::size_t>(idx)];
        if (member_predict(member, x) != truth) {
            ++errors;
            Eigen::Index nearest = 0;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index p = 0; p < d; ++p) {
                const double dist = (x - member.control_points.row(p).transpose()).squaredNorm();
                if (dist < best) {
                    best = dist;
                    nearest = p;
                }
            }
            // Move the nearest point toward the sample along the normal only;
            // in-plane motion cannot change the boundary.
            const double component =
                (x - member.control_points.row(nearest).transpose()).dot(member.normal);
            accum.row(nearest) += (rate * component) * member.normal.transpose();
            touch_counts(nearest) += 1;
        }
        if (++in_batch == batch_size) apply_batch();
    }
    apply_batch();

    member.error_history.push_back(errors);
    member.schedule.observe(errors);
    return errors;
}

namespace {

LabeledDataset bootstrap_resample(const LabeledDataset& data, Rng& rng) {
    std::vector<int> rows(static_cast<std::size_t>(data.n()));
    for (auto& r : rows) r = static_cast<int>(rng.below(static_cast<std::size_t>(data.n())));
    return data.subset(rows);
}

} // namespace

MpaModel fit_mpa(const LabeledDataset& train, const MpaConfig& config) {
    train.validate();
    const auto counts = train.class_counts();
    if (counts[0] < 1 || counts[1] < 1) throw InvalidData("training data must contain both classes");
    if (train.dim() < 2) throw InvalidArgument("need at least two features");
    if (config.epochs < 1) throw InvalidArgument("epochs must be positive");

    MpaModel model;
    model.config = config;
    model.config.members = config.members % 2 == 0 ? config.members + 1 : config.members;
    if (model.config.members < 1) throw InvalidArgument("member count must be positive");
    model.bounds_lower = train.features.colwise().minCoeff();
    model.bounds_upper = train.features.colwise().maxCoeff();

    const Eigen::VectorXd ranges = model.bounds_upper - model.bounds_lower;
    Eigen::VectorXd clip_limits(train.dim()), box_lower(train.dim()), box_upper(train.dim());
    for (int j = 0; j < train.dim(); ++j) {
        const double range = std::max(ranges(j), 1e-12);
        clip_limits(j) = config.clip_fraction * range;
        box_lower(j) = model.bounds_lower(j) - 0.05 * range;
        box_upper(j) = model.bounds_upper(j) + 0.05 * range;
    }

    for (int m = 0; m < model.config.members; ++m) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(m)));
        HyperplaneMember member;
        member.schedule = LrSchedule::make(config.initial_rate, config.decay_factor,
                                           config.patience, config.min_rate_factor);
        member.control_points = config.init == MpaConfig::Init::Centroid
            ? init_centroid(train)
            : init_random(model.bounds_lower, model.bounds_upper, rng);
        std::tie(member.normal, member.offset) = hyperplane_from_points(member.control_points);

        const LabeledDataset member_train =
            config.bootstrap ? bootstrap_resample(train, rng) : train;
        reorient(member, member_train);
        for (int epoch = 0; epoch < config.epochs; ++epoch) {
            train_epoch(member, member_train, config.batch_size, clip_limits, box_lower,
                        box_upper, rng);
            reorient(member, member_train);
        }
        model.members.push_back(std::move(member));
    }
    return model;
}

std::vector<int> MpaModel::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != bounds_lower.size())
        throw InvalidArgument("feature count does not match fitted model");
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        int votes = 0;
        for (const auto& member : members)
            votes += member_predict(member, X.row(i).transpose());
        out.push_back(2 * votes > static_cast<int>(members.size()) ? 1 : 0);
    }
    return out;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.size();
    const auto cols = rows == 0 ? 0 : j.at(0).size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j.at(i).at(c).get<double>();
    return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
    return v;
}

} // namespace

nlohmann::json MpaModel::to_json() const {
    nlohmann::json j;
    j["type"] = "mpa";
    j["config"] = {{"members", config.members},
                   {"epochs", config.epochs},
                   {"batch_size", config.batch_size},
                   {"initial_rate", config.initial_rate},
                   {"decay_factor", config.decay_factor},
                   {"patience", config.patience},
                   {"min_rate_factor", config.min_rate_factor},
                   {"clip_fraction", config.clip_fraction},
                   {"init", config.init == MpaConfig::Init::Centroid ? "centroid" : "random"},
                   {"bootstrap", config.bootstrap},
                   {"seed", config.seed}};
    j["bounds_lower"] = vector_to_json(bounds_lower);
    j["bounds_upper"] = vector_to_json(bounds_upper);
    j["members"] = nlohmann::json::array();
    for (const auto& m : members) {
        j["members"].push_back({{"control_points", matrix_to_json(m.control_points)},
                                {"normal", vector_to_json(m.normal)},
                                {"offset", m.offset},
                                {"above_class", m.above_class},
                                {"error_history", m.error_history}});
    }
    return j;
}

MpaModel MpaModel::from_json(const nlohmann::json& j) {
    MpaModel model;
    const auto& c = j.at("config");
    model.config.members = c.at("members").get<int>();
    model.config.epochs = c.at("epochs").get<int>();
    model.config.batch_size = c.at("batch_size").get<int>();
    model.config.initial_rate = c.at("initial_rate").get<double>();
    model.config.decay_factor = c.at("decay_factor").get<double>();
    model.config.patience = c.at("patience").get<int>();
    model.config.min_rate_factor = c.at("min_rate_factor").get<double>();
    model.config.clip_fraction = c.at("clip_fraction").get<double>();
    model.config.init = c.at("init").get<std::string>() == "centroid"
        ? MpaConfig::Init::Centroid
        : MpaConfig::Init::Random;
    model.config.bootstrap = c.at("bootstrap").get<bool>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.bounds_lower = vector_from_json(j.at("bounds_lower"));
    model.bounds_upper = vector_from_json(j.at("bounds_upper"));
    for (const auto& mj : j.at("members")) {
        HyperplaneMember m;
        m.control_points = matrix_from_json(mj.at("control_points"));
        m.normal = vector_from_json(mj.at("normal"));
        m.offset = mj.at("offset").get<double>();
        m.above_class = mj.at("above_class").get<int>();
        m.error_history = mj.at("error_history").get<std::vector<long>>();
        model.members.push_back(std::move(m));
    }
    return model;
}

} // namespace mpa
