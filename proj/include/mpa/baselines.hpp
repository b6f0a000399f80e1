#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mpa/dataset.hpp"

namespace mpa {

// Euclidean k-nearest majority vote; vote ties go to the label of the single
// nearest neighbor, distance ties to the lower training index.
std::vector<int> knn_predict(const LabeledDataset& train, const Eigen::MatrixXd& X, int k);

struct PerceptronModel {
    Eigen::VectorXd weights;
    double bias = 0.0;
    std::vector<long> mistake_history; // per-epoch mistake counts

    std::vector<int> predict(const Eigen::MatrixXd& X) const;
};

// Classic mistake-driven perceptron over seeded per-epoch shuffles; labels
// map to -1/+1 internally.
PerceptronModel perceptron_fit(const LabeledDataset& train, double rate, int epochs,
                               std::uint64_t seed);

// Binary CART with Gini impurity. Thresholds are midpoints of consecutive
// distinct sorted feature values; split ties break on (feature, threshold)
// lexicographic order; leaf ties predict class 0.
struct DecisionTree {
    struct Node {
        int feature = -1;       // -1 marks a leaf
        double threshold = 0.0; // go left when x[feature] <= threshold
        int left = -1, right = -1;
        int label = 0;
    };
    std::vector<Node> nodes; // nodes[0] is the root

    std::vector<int> predict(const Eigen::MatrixXd& X) const;
    int node_count() const { return static_cast<int>(nodes.size()); }
};

DecisionTree dtree_fit(const LabeledDataset& train, int max_depth, int min_leaf = 1);

} // namespace mpa
