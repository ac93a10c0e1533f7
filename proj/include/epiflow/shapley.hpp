#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "epiflow/types.hpp"

namespace epiflow {

using PredictFn = std::function<double(const std::vector<double>&)>;

/// Exact Shapley values by coalition enumeration with background-mean
/// imputation of absent features. Throws SizeError above 20 features
/// (2^M model evaluations); sampling is deliberately not offered.
std::vector<double> shapley_values(const PredictFn& predict, std::span<const double> instance,
                                   std::span<const double> background_mean);

/// One (cycle, destination, origin) decision with its context features and
/// the classify_policy label.
struct AttributionRow {
    int cycle = 0;
    std::string dest;
    std::string origin;
    std::vector<double> features;
    int strict_first = 0;  // label: 1 when the allocation classified strict-first
};

struct AttributionDataset {
    std::vector<std::string> feature_names;
    std::vector<AttributionRow> rows;

    std::vector<double> background_mean() const;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf: mean strict-first label
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    double predict(std::span<const double> x) const;
};

struct BaggedForest {
    std::vector<DecisionTree> trees;
    bool degenerate = false;  // single-class training data: constant predictor
    double constant = 0.0;

    double predict(std::span<const double> x) const;
    PredictFn as_function() const;
};

/// Bagged decision trees (25 trees, depth <= 4, seeded bootstrap) predicting
/// the probability a decision is strict-first. Needs >= 50 rows; a
/// single-class dataset yields a flagged constant predictor.
BaggedForest build_attribution_model(const AttributionDataset& dataset, std::uint64_t seed = 0);

}  // namespace epiflow
