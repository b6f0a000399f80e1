#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "mpa/dataset.hpp"
#include "mpa/rng.hpp"

namespace mpa {

// Patience-based learning-rate decay: the rate halves (by decay_factor) after
// `patience` consecutive epochs without a new best training error, never
// dropping below min_rate.
struct LrSchedule {
    double initial_rate = 0.1;
    double decay_factor = 0.5;
    int patience = 10;
    double min_rate = 0.1 * 1e-4;

    double rate = 0.1;
    long best_error_seen = -1; // -1 until the first observation
    int epochs_since_improvement = 0;

    static LrSchedule make(double initial_rate, double decay_factor, int patience,
                           double min_rate_factor = 1e-4);

    // One per-epoch observation of the training error count.
    void observe(long epoch_error);
};

struct MpaConfig {
    int members = 3;      // forced odd at fit time
    int epochs = 300;
    int batch_size = 32;
    double initial_rate = 0.1;
    double decay_factor = 0.5;
    int patience = 10;
    double min_rate_factor = 1e-4;
    double clip_fraction = 0.05; // per-feature step cap as a fraction of range
    enum class Init { Random, Centroid };
    Init init = Init::Random;
    bool bootstrap = false; // experimental: train each member on a resample
    std::uint64_t seed = 0;
};

// One hyperplane of the ensemble: d control points whose affine span defines
// the boundary, refit after every batched update.
struct HyperplaneMember {
    Eigen::MatrixXd control_points; // d x d, one point per row
    Eigen::VectorXd normal;         // unit vector
    double offset = 0.0;
    int above_class = 1; // class assigned to signed_distance >= 0
    LrSchedule schedule;
    std::vector<long> error_history;
};

// Normal and offset of the affine span of d points: the singular direction of
// the centered point matrix with the smallest singular value, sign-normalized
// so the first nonzero component is positive. Throws DegenerateGeometry for
// affinely dependent points.
std::pair<Eigen::VectorXd, double> hyperplane_from_points(const Eigen::MatrixXd& points);

// d points sampled uniformly inside the per-feature bounds, resampled (at
// most 100 attempts) until affinely independent.
Eigen::MatrixXd init_random(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                            Rng& rng);

// Control points spanning the perpendicular bisector plane of the two class
// centroids: the midpoint plus orthonormal complement directions of the
// centroid axis, scaled to 10% of the data range.
Eigen::MatrixXd init_centroid(const LabeledDataset& train);

double signed_distance(const HyperplaneMember& member, const Eigen::VectorXd& x);

// Component-wise clamp of a proposed step to [-limit_j, +limit_j].
Eigen::VectorXd clip_step(const Eigen::VectorXd& step, const Eigen::VectorXd& limits);

// One pass over the training data in a freshly shuffled order. Displacements
// for misclassified samples accumulate on the nearest control point (along
// the normal direction only) and are mean-applied at batch boundaries, then
// the hyperplane is refit and the points re-projected into the expanded data
// box. Returns the epoch misclassification count, measured against the
// boundary as of each sample's visit.
long train_epoch(HyperplaneMember& member, const LabeledDataset& train, int batch_size,
                 const Eigen::VectorXd& clip_limits, const Eigen::VectorXd& box_lower,
                 const Eigen::VectorXd& box_upper, Rng& rng);

struct MpaModel {
    std::vector<HyperplaneMember> members;
    Eigen::VectorXd bounds_lower, bounds_upper; // training data bounds
    MpaConfig config;

    std::vector<int> predict(const Eigen::MatrixXd& X) const; // majority vote

    nlohmann::json to_json() const;
    static MpaModel from_json(const nlohmann::json& j);
};

MpaModel fit_mpa(const LabeledDataset& train, const MpaConfig& config);

} // namespace mpa
