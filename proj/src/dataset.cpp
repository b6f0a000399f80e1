#include "mpa/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mpa/rng.hpp"

namespace mpa {

void LabeledDataset::validate() const {
    if (features.rows() != static_cast<Eigen::Index>(labels.size()))
        throw InvalidData("row count does not match label count");
    if (!feature_names.empty() &&
        feature_names.size() != static_cast<std::size_t>(features.cols()))
        throw InvalidData("feature name count does not match column count");
    for (Eigen::Index i = 0; i < features.rows(); ++i)
        for (Eigen::Index j = 0; j < features.cols(); ++j)
            if (!std::isfinite(features(i, j)))
                throw InvalidData("non-finite feature value at row " + std::to_string(i));
    for (int l : labels)
        if (l != 0 && l != 1)
            throw InvalidData("labels must be 0 or 1");
}

std::array<int, 2> LabeledDataset::class_counts() const {
    std::array<int, 2> counts{0, 0};
    for (int l : labels) ++counts[l == 1 ? 1 : 0];
    return counts;
}

LabeledDataset LabeledDataset::subset(const std::vector<int>& rows) const {
    LabeledDataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
        out.labels.push_back(labels[static_cast<std::size_t>(rows[i])]);
    }
    out.feature_names = feature_names;
    return out;
}

LabeledDataset LabeledDataset::select_features(const std::vector<int>& cols) const {
    LabeledDataset out;
    out.features.resize(features.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.features.col(static_cast<Eigen::Index>(j)) = features.col(cols[j]);
        if (!feature_names.empty())
            out.feature_names.push_back(feature_names[static_cast<std::size_t>(cols[j])]);
    }
    out.labels = labels;
    return out;
}

RangeScaler fit_scaler(const LabeledDataset& data, double target_lo, double target_hi) {
    if (data.n() < 1) throw InvalidData("cannot fit scaler on an empty dataset");
    if (!(target_lo < target_hi)) throw InvalidArgument("target_lo must be below target_hi");
    RangeScaler s;
    s.per_feature_min = data.features.colwise().minCoeff();
    s.per_feature_max = data.features.colwise().maxCoeff();
    s.target_lo = target_lo;
    s.target_hi = target_hi;
    return s;
}

Eigen::MatrixXd transform(const RangeScaler& scaler, const Eigen::MatrixXd& X) {
    if (X.cols() != scaler.per_feature_min.size())
        throw InvalidArgument("column count does not match fitted scaler");
    Eigen::MatrixXd out(X.rows(), X.cols());
    const double mid = 0.5 * (scaler.target_lo + scaler.target_hi);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double lo = scaler.per_feature_min(j);
        const double hi = scaler.per_feature_max(j);
        if (lo == hi) {
            out.col(j).setConstant(mid);
            continue;
        }
        // Ratio-first form so fitted extremes land exactly on the targets.
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const double t = (X(i, j) - lo) / (hi - lo);
            out(i, j) = scaler.target_lo + t * (scaler.target_hi - scaler.target_lo);
        }
    }
    return out;
}

Eigen::MatrixXd inverse_transform(const RangeScaler& scaler, const Eigen::MatrixXd& X) {
    if (X.cols() != scaler.per_feature_min.size())
        throw InvalidArgument("column count does not match fitted scaler");
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double lo = scaler.per_feature_min(j);
        const double hi = scaler.per_feature_max(j);
        if (lo == hi) {
            out.col(j).setConstant(lo);
            continue;
        }
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const double t = (X(i, j) - scaler.target_lo) / (scaler.target_hi - scaler.target_lo);
            out(i, j) = lo + t * (hi - lo);
        }
    }
    return out;
}

namespace {

std::vector<int> class_indices(const LabeledDataset& data, int cls) {
    std::vector<int> idx;
    for (int i = 0; i < data.n(); ++i)
        if (data.labels[static_cast<std::size_t>(i)] == cls) idx.push_back(i);
    return idx;
}

} // namespace

std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& data,
                                                           const SplitSpec& spec) {
    if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
        throw InvalidArgument("test_fraction must be in (0, 1)");
    const auto counts = data.class_counts();
    if (counts[0] < 1 || counts[1] < 1)
        throw InvalidData("both classes must be present before splitting");

    Rng rng(spec.seed);
    std::vector<int> test_idx, train_idx;
    if (spec.stratified) {
        for (int cls : {0, 1}) {
            auto idx = class_indices(data, cls);
            rng.shuffle(idx);
            const auto n_test = static_cast<std::size_t>(
                std::lround(spec.test_fraction * static_cast<double>(idx.size())));
            if (n_test < 1 || n_test >= idx.size())
                throw InvalidArgument("split leaves a class empty on one side");
            test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + static_cast<long>(n_test));
            train_idx.insert(train_idx.end(), idx.begin() + static_cast<long>(n_test), idx.end());
        }
    } else {
        std::vector<int> idx(static_cast<std::size_t>(data.n()));
        for (int i = 0; i < data.n(); ++i) idx[static_cast<std::size_t>(i)] = i;
        rng.shuffle(idx);
        const auto n_test = static_cast<std::size_t>(
            std::lround(spec.test_fraction * static_cast<double>(idx.size())));
        if (n_test < 1 || n_test >= idx.size())
            throw InvalidArgument("split leaves train or test empty");
        test_idx.assign(idx.begin(), idx.begin() + static_cast<long>(n_test));
        train_idx.assign(idx.begin() + static_cast<long>(n_test), idx.end());
    }
    return {data.subset(train_idx), data.subset(test_idx)};
}

FoldAssignment stratified_kfold(const LabeledDataset& data, int k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("k must be at least 2");
    const auto counts = data.class_counts();
    if (counts[0] < k || counts[1] < k)
        throw InvalidArgument("each class needs at least k samples");

    FoldAssignment fa;
    fa.k = k;
    fa.fold_index.assign(static_cast<std::size_t>(data.n()), -1);
    Rng rng(seed);
    for (int cls : {0, 1}) {
        auto idx = class_indices(data, cls);
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i)
            fa.fold_index[static_cast<std::size_t>(idx[i])] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    return fa;
}

LabeledDataset make_moons(int n, double noise, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("make_moons requires n >= 2");
    if (noise < 0.0) throw InvalidArgument("noise must be non-negative");
    const int n0 = (n + 1) / 2;
    const int n1 = n / 2;

    LabeledDataset data;
    data.features.resize(n, 2);
    data.labels.assign(static_cast<std::size_t>(n), 0);
    data.feature_names = {"x", "y"};

    auto arc_angle = [](int i, int m) {
        return m == 1 ? 0.0 : std::numbers::pi * static_cast<double>(i) / static_cast<double>(m - 1);
    };
    for (int i = 0; i < n0; ++i) {
        const double t = arc_angle(i, n0);
        data.features(i, 0) = std::cos(t);
        data.features(i, 1) = std::sin(t);
    }
    for (int i = 0; i < n1; ++i) {
        const double t = arc_angle(i, n1);
        data.features(n0 + i, 0) = 1.0 - std::cos(t);
        data.features(n0 + i, 1) = 0.5 - std::sin(t);
        data.labels[static_cast<std::size_t>(n0 + i)] = 1;
    }
    if (noise > 0.0) {
        Rng rng(seed);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < 2; ++j)
                data.features(i, j) += rng.normal(0.0, noise);
    }
    return data;
}

LabeledDataset make_blobs(int n, const std::vector<Eigen::VectorXd>& centers,
                          double cluster_std, std::uint64_t seed) {
    if (centers.size() != 2)
        throw InvalidArgument("make_blobs requires exactly 2 centers (binary task)");
    if (n < 2) throw InvalidArgument("make_blobs requires n >= 2");
    if (!(cluster_std > 0.0)) throw InvalidArgument("cluster_std must be positive");
    const auto d = centers[0].size();
    if (centers[1].size() != d) throw InvalidArgument("centers must share a dimension");

    LabeledDataset data;
    data.features.resize(n, d);
    data.labels.assign(static_cast<std::size_t>(n), 0);

    Rng rng(seed);
    const int n0 = (n + 1) / 2;
    for (int i = 0; i < n; ++i) {
        const int cls = i < n0 ? 0 : 1;
        data.labels[static_cast<std::size_t>(i)] = cls;
        for (Eigen::Index j = 0; j < d; ++j)
            data.features(i, j) = centers[static_cast<std::size_t>(cls)](j) + rng.normal(0.0, cluster_std);
    }
    return data;
}

namespace {

// Splits one CSV record, honoring double quotes per RFC 4180.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t row) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty())
                throw ParseError("unexpected quote inside unquoted field", row, fields.size() + 1);
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", row, fields.size() + 1);
    fields.push_back(std::move(cur));
    return fields;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, std::size_t row, std::size_t col) {
    const std::string t = trim(field);
    if (t.empty()) throw ParseError("empty feature cell", row, col);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ParseError("non-numeric feature cell '" + t + "'", row, col);
    return v;
}

} // namespace

LabeledDataset load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line, lineno));
    }
    if (rows.empty()) throw InvalidData("empty CSV file '" + path + "'");

    std::vector<std::string> header;
    if (options.has_header) {
        header = rows.front();
        rows.erase(rows.begin());
        if (rows.empty()) throw InvalidData("CSV has a header but no data rows");
    }

    const std::size_t width = rows.front().size();
    if (width < 2) throw InvalidData("CSV needs at least one feature column and a label column");
    const std::size_t label_col = options.label_column < 0
        ? width - 1
        : static_cast<std::size_t>(options.label_column);
    if (label_col >= width) throw InvalidArgument("label column out of range");

    // Drop rows containing the missing token, then map labels in first-seen order.
    std::vector<std::string> label_values;
    std::vector<std::vector<double>> feat_rows;
    std::vector<int> labels;
    const std::size_t first_data_line = options.has_header ? 2 : 1;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& fields = rows[r];
        const std::size_t file_row = first_data_line + r;
        if (fields.size() != width)
            throw ParseError("ragged row (expected " + std::to_string(width) + " fields, got " +
                                 std::to_string(fields.size()) + ")",
                             file_row, 1);
        bool missing = false;
        for (const auto& f : fields)
            if (trim(f) == options.missing_token) { missing = true; break; }
        if (missing) continue;

        const std::string label_text = trim(fields[label_col]);
        auto it = std::find(label_values.begin(), label_values.end(), label_text);
        std::size_t label_id;
        if (it == label_values.end()) {
            label_values.push_back(label_text);
            label_id = label_values.size() - 1;
            if (label_values.size() > 2)
                throw InvalidData("more than two distinct labels; binary classification only");
        } else {
            label_id = static_cast<std::size_t>(it - label_values.begin());
        }

        std::vector<double> feat;
        feat.reserve(width - 1);
        for (std::size_t c = 0; c < width; ++c) {
            if (c == label_col) continue;
            feat.push_back(parse_number(fields[c], file_row, c + 1));
        }
        feat_rows.push_back(std::move(feat));
        labels.push_back(static_cast<int>(label_id));
    }
    if (feat_rows.empty())
        throw InvalidData("no usable rows after dropping missing values");

    LabeledDataset data;
    data.features.resize(static_cast<Eigen::Index>(feat_rows.size()),
                         static_cast<Eigen::Index>(width - 1));
    for (std::size_t i = 0; i < feat_rows.size(); ++i)
        for (std::size_t j = 0; j + 1 < width; ++j)
            data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = feat_rows[i][j];
    data.labels = std::move(labels);
    if (options.has_header) {
        for (std::size_t c = 0; c < width; ++c)
            if (c != label_col) data.feature_names.push_back(trim(header[c]));
    }
    return data;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

std::string to_csv(const LabeledDataset& data) {
    std::ostringstream out;
    for (int j = 0; j < data.dim(); ++j) {
        const std::string name = data.feature_names.empty()
            ? "x" + std::to_string(j)
            : data.feature_names[static_cast<std::size_t>(j)];
        out << name << ',';
    }
    out << "label\n";
    for (int i = 0; i < data.n(); ++i) {
        for (int j = 0; j < data.dim(); ++j)
            out << format_double(data.features(i, j)) << ',';
        out << data.labels[static_cast<std::size_t>(i)] << '\n';
    }
    return out.str();
}

void save_csv(const LabeledDataset& data, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write '" + path + "'");
        out << to_csv(data);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot move temporary file onto '" + path + "'");
}

} // namespace mpa
