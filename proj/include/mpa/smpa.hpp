#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mpa/dataset.hpp"
#include "mpa/linear.hpp" // LrSchedule
#include "mpa/splines.hpp"

namespace mpa {

// Scaling applied to the x-distance from a sample to its nearest control
// point; the result multiplies both the adaptive margin and the update step.
enum class LambdaStrategy { Log, Sqrt, None };

std::string to_string(LambdaStrategy s);
LambdaStrategy lambda_strategy_from_string(const std::string& name);

// log -> ln(1+d), sqrt -> sqrt(d), none -> 1; clamped to [0.1, 10] so updates
// at a knot's own x never freeze and far samples never explode.
double lambda_scale(LambdaStrategy strategy, double distance);

struct SmpaConfig {
    int control_points = 8;
    SplineKind kind = SplineKind::Pchip;
    LambdaStrategy lambda = LambdaStrategy::Log;
    int epochs = 200;
    double initial_rate = 0.1;
    double decay_factor = 0.5;
    int patience = 10;
    double min_rate_factor = 1e-4;
    double base_margin = 1.0; // in scaled feature units
    std::uint64_t seed = 0;
};

// Mutable training state: spline boundary y = s(x) through m control points
// whose xs stay fixed (evenly spaced over the training x-range) while the ys
// move under corrective updates.
struct SplineBoundaryState {
    KnotSet knots;
    SplineKind kind = SplineKind::Pchip;
    int above_class = 1; // class occupying y > s(x)
    LrSchedule schedule;
    LambdaStrategy lambda = LambdaStrategy::Log;
    double base_margin = 1.0;
    std::vector<long> error_history;
    double y_box_lower = 0.0, y_box_upper = 0.0; // data y-range expanded by 10%
    PiecewiseCubic spline;                        // always current for knots
};

// Evenly spaced xs over the training x-range; ys sampled uniformly inside the
// training y-range. Throws InvalidArgument unless the data is 2-D.
KnotSet init_control_points(const LabeledDataset& train, int m, std::uint64_t seed);

// Sign of the vertical residual y - s(x); zero residual goes to the above class.
int classify_point(const PiecewiseCubic& spline, int above_class, double x, double y);

double adaptive_margin(double x_sample, const KnotSet& knots, double base_margin,
                       LambdaStrategy strategy);

struct CorrectiveStep {
    int knot_index = 0;
    double delta_y = 0.0;
};

// Update proposal for one misclassified (or margin-violating) sample. When a
// correctly classified opposite-class point sits within 2 knot spacings in x,
// the knot is pulled toward the midpoint of the two sample heights; otherwise
// a conservative half-residual move toward the sample applies. Edge knots
// move at half strength, and the result is clamped to the expanded y-range.
CorrectiveStep corrective_step(double x, double y, int label,
                               const SplineBoundaryState& state,
                               const LabeledDataset& train,
                               const std::vector<int>& predictions);

// One epoch: classify everything against the current spline, accumulate one
// corrective step per eligible sample, mean-apply the steps per knot, refit
// the spline, re-evaluate orientation, update the schedule. Returns the
// epoch's misclassification count (margin violations are not errors).
long train_epoch(SplineBoundaryState& state, const LabeledDataset& train,
                 const SmpaConfig& config);

struct SmpaModel {
    KnotSet knots; // best snapshot over training
    SplineKind kind = SplineKind::Pchip;
    int above_class = 1;
    SmpaConfig config;
    std::vector<long> error_history;
    PiecewiseCubic spline;

    std::vector<int> predict(const Eigen::MatrixXd& X) const;

    // Dense (x, s(x)) samples over the control-point x-range, for plotting.
    std::vector<std::pair<double, double>> boundary_trace(int n_points) const;

    nlohmann::json to_json() const;
    static SmpaModel from_json(const nlohmann::json& j);
};

SmpaModel fit_smpa(const LabeledDataset& train, const SmpaConfig& config);

} // namespace mpa
