#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mpa/errors.hpp"

namespace mpa {

// Real-valued feature matrix with binary labels. Immutable by convention
// after construction; all pipeline steps produce fresh copies.
struct LabeledDataset {
    Eigen::MatrixXd features;               // n x d
    std::vector<int> labels;                // values in {0, 1}, length n
    std::vector<std::string> feature_names; // empty or length d

    int n() const { return static_cast<int>(features.rows()); }
    int dim() const { return static_cast<int>(features.cols()); }

    // Throws InvalidData if invariants are violated.
    void validate() const;

    std::array<int, 2> class_counts() const;

    LabeledDataset subset(const std::vector<int>& rows) const;
    LabeledDataset select_features(const std::vector<int>& cols) const;
};

// Per-feature affine map fitted from data min/max onto [target_lo, target_hi].
// Constant features (min == max) map to the interval midpoint and invert to
// the recorded constant.
struct RangeScaler {
    Eigen::VectorXd per_feature_min;
    Eigen::VectorXd per_feature_max;
    double target_lo = -100.0;
    double target_hi = 100.0;
};

RangeScaler fit_scaler(const LabeledDataset& data, double target_lo = -100.0,
                       double target_hi = 100.0);
Eigen::MatrixXd transform(const RangeScaler& scaler, const Eigen::MatrixXd& X);
Eigen::MatrixXd inverse_transform(const RangeScaler& scaler, const Eigen::MatrixXd& X);

struct SplitSpec {
    double test_fraction = 0.25;
    std::uint64_t seed = 0;
    bool stratified = true;
};

// Returns (train, test). Deterministic permutation given the seed; with
// stratified = true the class ratio is preserved within +-1 sample per class.
std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& data,
                                                           const SplitSpec& spec);

struct FoldAssignment {
    std::vector<int> fold_index; // values in [0, k), length n
    int k = 0;
};

FoldAssignment stratified_kfold(const LabeledDataset& data, int k, std::uint64_t seed);

// Two interleaving half-circles. Class 0 on (cos t, sin t), class 1 on
// (1 - cos t, 0.5 - sin t), t evenly spaced in [0, pi]; Gaussian noise with
// the given standard deviation added per coordinate.
LabeledDataset make_moons(int n, double noise, std::uint64_t seed);

// Isotropic Gaussian clusters around exactly two centers; label = center
// index; class 0 receives the extra point for odd n.
LabeledDataset make_blobs(int n, const std::vector<Eigen::VectorXd>& centers,
                          double cluster_std, std::uint64_t seed);

struct CsvOptions {
    int label_column = -1; // -1 means last column
    bool has_header = false;
    std::string missing_token = "?";
};

// RFC-4180-style reader. Rows containing the missing token are dropped;
// label values map to {0, 1} in first-seen order.
LabeledDataset load_csv(const std::string& path, const CsvOptions& options = {});

// Serialized form used for golden tests: optional header, labels last.
std::string to_csv(const LabeledDataset& data);
void save_csv(const LabeledDataset& data, const std::string& path);

} // namespace mpa
