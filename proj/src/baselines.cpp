#include "mpa/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpa/rng.hpp"

namespace mpa {

std::vector<int> knn_predict(const LabeledDataset& train, const Eigen::MatrixXd& X, int k) {
    if (k < 1) throw InvalidArgument("k must be positive");
    if (k > train.n()) throw InvalidArgument("k exceeds the training set size");
    if (X.cols() != train.features.cols()) throw InvalidArgument("feature count mismatch");

    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(X.rows()));
    std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(train.n()));
    for (Eigen::Index q = 0; q < X.rows(); ++q) {
        for (int i = 0; i < train.n(); ++i) {
            const double d2 = (train.features.row(i) - X.row(q)).squaredNorm();
            dist[static_cast<std::size_t>(i)] = {d2, i};
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        int votes = 0;
        for (int i = 0; i < k; ++i)
            votes += train.labels[static_cast<std::size_t>(dist[static_cast<std::size_t>(i)].second)];
        int label;
        if (2 * votes > k) label = 1;
        else if (2 * votes < k) label = 0;
        else label = train.labels[static_cast<std::size_t>(dist[0].second)];
        out.push_back(label);
    }
    return out;
}

std::vector<int> PerceptronModel::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != weights.size()) throw InvalidArgument("feature count mismatch");
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        out.push_back(weights.dot(X.row(i).transpose()) + bias >= 0.0 ? 1 : 0);
    return out;
}

PerceptronModel perceptron_fit(const LabeledDataset& train, double rate, int epochs,
                               std::uint64_t seed) {
    if (!(rate > 0.0)) throw InvalidArgument("rate must be positive");
    if (epochs < 1) throw InvalidArgument("epochs must be positive");
    train.validate();

    PerceptronModel model;
    model.weights = Eigen::VectorXd::Zero(train.features.cols());
    Rng rng(seed);
    std::vector<int> order(static_cast<std::size_t>(train.n()));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        long mistakes = 0;
        for (int idx : order) {
            const double y = train.labels[static_cast<std::size_t>(idx)] == 1 ? 1.0 : -1.0;
            const Eigen::VectorXd x = train.features.row(idx).transpose();
            if (y * (model.weights.dot(x) + model.bias) <= 0.0) {
                model.weights += rate * y * x;
                model.bias += rate * y;
                ++mistakes;
            }
        }
        model.mistake_history.push_back(mistakes);
    }
    return model;
}

namespace {

double gini(long n0, long n1) {
    const long n = n0 + n1;
    if (n == 0) return 0.0;
    const double p0 = static_cast<double>(n0) / static_cast<double>(n);
    const double p1 = static_cast<double>(n1) / static_cast<double>(n);
    return 1.0 - p0 * p0 - p1 * p1;
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0; // weighted child Gini
};

SplitChoice best_split(const LabeledDataset& data, const std::vector<int>& rows, int min_leaf) {
    SplitChoice best;
    const auto n = static_cast<long>(rows.size());
    std::vector<std::pair<double, int>> column(rows.size());
    for (int f = 0; f < data.dim(); ++f) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            column[i] = {data.features(rows[i], f), data.labels[static_cast<std::size_t>(rows[i])]};
        std::sort(column.begin(), column.end());

        long left0 = 0, left1 = 0, right0 = 0, right1 = 0;
        for (const auto& [v, l] : column) (l == 1 ? right1 : right0)++;
        for (std::size_t i = 0; i + 1 < column.size(); ++i) {
            (column[i].second == 1 ? left1 : left0)++;
            (column[i].second == 1 ? right1 : right0)--;
            if (column[i].first == column[i + 1].first) continue; // not a boundary
            const long nl = left0 + left1, nr = right0 + right1;
            if (nl < min_leaf || nr < min_leaf) continue;
            const double impurity = (static_cast<double>(nl) * gini(left0, left1) +
                                     static_cast<double>(nr) * gini(right0, right1)) /
                                    static_cast<double>(n);
            const double threshold = 0.5 * (column[i].first + column[i + 1].first);
            // Strict improvement required; earlier (feature, threshold) wins ties.
            if (!best.found || impurity < best.impurity - 1e-12) {
                best.found = true;
                best.feature = f;
                best.threshold = threshold;
                best.impurity = impurity;
            }
        }
    }
    return best;
}

int build_node(DecisionTree& tree, const LabeledDataset& data, const std::vector<int>& rows,
               int depth, int max_depth, int min_leaf) {
    long n1 = 0;
    for (int r : rows) n1 += data.labels[static_cast<std::size_t>(r)];
    const long n0 = static_cast<long>(rows.size()) - n1;

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[static_cast<std::size_t>(node_id)].label = n1 > n0 ? 1 : 0; // tie -> class 0

    const bool pure = n0 == 0 || n1 == 0;
    if (pure || depth >= max_depth || static_cast<long>(rows.size()) < 2 * min_leaf)
        return node_id;

    const SplitChoice split = best_split(data, rows, min_leaf);
    if (!split.found) return node_id;

    std::vector<int> left_rows, right_rows;
    for (int r : rows) {
        if (data.features(r, split.feature) <= split.threshold)
            left_rows.push_back(r);
        else
            right_rows.push_back(r);
    }
    const int left = build_node(tree, data, left_rows, depth + 1, max_depth, min_leaf);
    const int right = build_node(tree, data, right_rows, depth + 1, max_depth, min_leaf);
    auto& node = tree.nodes[static_cast<std::size_t>(node_id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return node_id;
}

} // namespace

DecisionTree dtree_fit(const LabeledDataset& train, int max_depth, int min_leaf) {
    if (max_depth < 1) throw InvalidArgument("max_depth must be at least 1");
    if (min_leaf < 1) throw InvalidArgument("min_leaf must be at least 1");
    train.validate();
    if (train.n() < 1) throw InvalidData("empty training set");

    DecisionTree tree;
    std::vector<int> rows(static_cast<std::size_t>(train.n()));
    std::iota(rows.begin(), rows.end(), 0);
    build_node(tree, train, rows, 0, max_depth, min_leaf);
    return tree;
}

std::vector<int> DecisionTree::predict(const Eigen::MatrixXd& X) const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        int node = 0;
        while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
            const auto& nd = nodes[static_cast<std::size_t>(node)];
            node = X(i, nd.feature) <= nd.threshold ? nd.left : nd.right;
        }
        out.push_back(nodes[static_cast<std::size_t>(node)].label);
    }
    return out;
}

} // namespace mpa
