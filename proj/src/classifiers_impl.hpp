#pragma once

#include <vector>

#include "convtrace/classify.hpp"

namespace convtrace::classify::detail {

// Inputs are standardized, sorted by id, and labels map to class positions
// 0..classes-1.
KnnParams fit_knn(const std::vector<std::vector<double>>& x, const std::vector<int>& y);
LdaParams fit_lda(const std::vector<std::vector<double>>& x, const std::vector<int>& y, double ridge);
SvmParams fit_svm(const std::vector<std::vector<double>>& x, const std::vector<int>& y, int epochs, double lambda,
                  std::uint64_t seed);
ForestParams fit_forest(const std::vector<std::vector<double>>& x, const std::vector<int>& y, std::size_t n_classes,
                        int trees, int max_depth, std::uint64_t seed);

// Return class positions.
int predict_knn(const KnnParams& p, int k, const std::vector<double>& x, std::size_t n_classes);
int predict_lda(const LdaParams& p, const std::vector<double>& x);
int predict_svm(const SvmParams& p, const std::vector<double>& x);
int predict_forest(const ForestParams& p, const std::vector<double>& x, std::size_t n_classes);
int tree_leaf_class(const DecisionTree& tree, const std::vector<double>& x);

/// Index of the largest count; ties go to the lower index.
int argmax_lowest(const std::vector<int>& counts);

}  // namespace convtrace::classify::detail
