#include "epiflow/shapley.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace epiflow {

std::vector<double> shapley_values(const PredictFn& predict, std::span<const double> instance,
                                   std::span<const double> background_mean) {
    const int m = static_cast<int>(instance.size());
    if (m == 0) throw ValidationError("shapley: empty instance");
    if (static_cast<int>(background_mean.size()) != m)
        throw ValidationError("shapley: background size does not match instance");
    if (m > 20)
        throw SizeError("shapley: exact enumeration limited to 20 features, got " +
                        std::to_string(m));

    // Model value of every coalition; absent features take the background mean.
    const std::uint32_t full = 1u << m;
    std::vector<double> value(full);
    std::vector<double> x(instance.begin(), instance.end());
    for (std::uint32_t mask = 0; mask < full; ++mask) {
        for (int j = 0; j < m; ++j)
            x[j] = (mask >> j) & 1u ? instance[j] : background_mean[j];
        value[mask] = predict(x);
    }

    // Coalition weight |S|!(M-|S|-1)!/M! = 1 / (M * C(M-1, |S|)).
    std::vector<double> weight(m);
    for (int s = 0; s < m; ++s) {
        double binom = 1.0;
        for (int i = 1; i <= s; ++i) binom = binom * (m - 1 - (i - 1)) / i;
        weight[s] = 1.0 / (m * binom);
    }

    std::vector<double> phi(m, 0.0);
    for (int j = 0; j < m; ++j) {
        const std::uint32_t bit = 1u << j;
        for (std::uint32_t mask = 0; mask < full; ++mask) {
            if (mask & bit) continue;
            const int s = std::popcount(mask);
            phi[j] += weight[s] * (value[mask | bit] - value[mask]);
        }
    }
    return phi;
}

std::vector<double> AttributionDataset::background_mean() const {
    std::vector<double> mean(feature_names.size(), 0.0);
    if (rows.empty()) return mean;
    for (const auto& r : rows)
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += r.features[j];
    for (double& v : mean) v /= static_cast<double>(rows.size());
    return mean;
}

double DecisionTree::predict(std::span<const double> x) const {
    int i = 0;
    while (nodes[i].feature >= 0)
        i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
}

double BaggedForest::predict(std::span<const double> x) const {
    if (degenerate || trees.empty()) return constant;
    double s = 0.0;
    for (const auto& t : trees) s += t.predict(x);
    return s / static_cast<double>(trees.size());
}

PredictFn BaggedForest::as_function() const {
    return [copy = *this](const std::vector<double>& x) { return copy.predict(x); };
}

namespace {

constexpr int kMaxDepth = 4;
constexpr int kNumTrees = 25;
constexpr int kMinLeaf = 2;

double gini_impurity(double positives, double count) {
    if (count <= 0.0) return 0.0;
    const double p = positives / count;
    return 2.0 * p * (1.0 - p);
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();
};

Split best_split(const AttributionDataset& data, const std::vector<int>& idx) {
    const int m = static_cast<int>(data.feature_names.size());
    Split best;
    std::vector<std::pair<double, int>> col(idx.size());
    for (int f = 0; f < m; ++f) {
        for (std::size_t k = 0; k < idx.size(); ++k)
            col[k] = {data.rows[idx[k]].features[f], data.rows[idx[k]].strict_first};
        std::sort(col.begin(), col.end());

        double total_pos = 0.0;
        for (const auto& [v, y] : col) total_pos += y;
        double left_pos = 0.0;
        for (std::size_t k = 0; k + 1 < col.size(); ++k) {
            left_pos += col[k].second;
            if (col[k].first == col[k + 1].first) continue;  // no boundary here
            const double nl = static_cast<double>(k + 1);
            const double nr = static_cast<double>(col.size()) - nl;
            if (nl < kMinLeaf || nr < kMinLeaf) continue;
            const double score =
                nl * gini_impurity(left_pos, nl) + nr * gini_impurity(total_pos - left_pos, nr);
            if (score < best.score) {
                best.score = score;
                best.feature = f;
                best.threshold = 0.5 * (col[k].first + col[k + 1].first);
            }
        }
    }
    return best;
}

int grow(DecisionTree& tree, const AttributionDataset& data, std::vector<int> idx, int depth) {
    double pos = 0.0;
    for (int i : idx) pos += data.rows[i].strict_first;
    const double mean = pos / static_cast<double>(idx.size());

    const bool pure = pos == 0.0 || pos == static_cast<double>(idx.size());
    Split split;
    if (!pure && depth < kMaxDepth) split = best_split(data, idx);

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    if (split.feature < 0) {
        tree.nodes[node_id].value = mean;
        return node_id;
    }

    std::vector<int> li, ri;
    for (int i : idx) {
        if (data.rows[i].features[split.feature] <= split.threshold)
            li.push_back(i);
        else
            ri.push_back(i);
    }
    if (li.empty() || ri.empty()) {
        tree.nodes[node_id].value = mean;
        return node_id;
    }
    tree.nodes[node_id].feature = split.feature;
    tree.nodes[node_id].threshold = split.threshold;
    const int l = grow(tree, data, std::move(li), depth + 1);
    const int r = grow(tree, data, std::move(ri), depth + 1);
    tree.nodes[node_id].left = l;
    tree.nodes[node_id].right = r;
    return node_id;
}

}  // namespace

BaggedForest build_attribution_model(const AttributionDataset& dataset, std::uint64_t seed) {
    const int n = static_cast<int>(dataset.rows.size());
    if (n < 50)
        throw ValidationError("attribution model needs >= 50 rows, got " + std::to_string(n));
    for (const auto& r : dataset.rows)
        if (r.features.size() != dataset.feature_names.size())
            throw ValidationError("attribution row feature length mismatch");

    BaggedForest forest;
    double pos = 0.0;
    for (const auto& r : dataset.rows) pos += r.strict_first;
    if (pos == 0.0 || pos == static_cast<double>(n)) {
        forest.degenerate = true;  // single-class data: nothing to learn
        forest.constant = pos / static_cast<double>(n);
        return forest;
    }

    std::mt19937_64 rng(seed ^ 0x5eed5eedULL);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int t = 0; t < kNumTrees; ++t) {
        std::vector<int> sample(n);
        for (int& s : sample) s = pick(rng);
        DecisionTree tree;
        grow(tree, dataset, std::move(sample), 0);
        forest.trees.push_back(std::move(tree));
    }
    return forest;
}

}  // namespace epiflow
