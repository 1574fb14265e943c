#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace convtrace::classify {

/// One CT (or any fixed-length feature vector) with its class.
struct FeatureRecord {
    std::vector<double> features;
    int label = 0;
    std::string source;
    /// Canonical position (manifest row); training sorts records by it.
    std::size_t id = 0;
};

enum class Kind { knn, lda, svm_linear, random_forest };

struct ClassifierSpec {
    Kind kind = Kind::random_forest;
    int k = 3;  // neighbors, knn only

    /// "knn3", "lda", "svm", "rf".
    std::string name() const;
    /// Accepts knn<k> / knn:<k> for k in {3,5,7,9,11,13}, lda, svm, svm_linear,
    /// rf, random_forest. UsageError otherwise.
    static ClassifierSpec parse(const std::string& token);
    bool operator==(const ClassifierSpec&) const = default;
};

/// Six KNN variants (k = 3..13), linear SVM, LDA and Random Forest.
std::vector<ClassifierSpec> default_bank();

struct TrainOptions {
    bool standardize = true;
    double lda_ridge = 1e-6;
    int svm_epochs = 200;
    double svm_lambda = 1e-4;
    int forest_trees = 100;
    int forest_max_depth = 16;
    bool operator==(const TrainOptions&) const = default;
};

/// Per-feature z-scoring fitted on the training split. Zero-variance
/// features keep scale 1.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const std::vector<FeatureRecord>& records, bool enabled);
    std::vector<double> apply(const std::vector<double>& x) const;
    bool operator==(const Standardizer&) const = default;
};

struct KnnParams {
    std::vector<std::vector<double>> points;  // standardized, canonical order
    std::vector<int> labels;
    bool operator==(const KnnParams&) const = default;
};

struct LdaParams {
    std::vector<double> weights;
    double threshold = 0.0;  // predict classes[1] when w.x > threshold
    std::vector<double> mean0, mean1;
    bool operator==(const LdaParams&) const = default;
};

struct SvmParams {
    std::vector<double> weights;
    double bias = 0.0;  // predict classes[1] when w.x + b > 0
    bool operator==(const SvmParams&) const = default;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;   // x[feature] <= threshold
    int right = -1;
    std::vector<int> counts;  // per-class bootstrap counts, leaves only
    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    bool operator==(const DecisionTree&) const = default;
};

struct ForestParams {
    std::vector<DecisionTree> trees;
    int max_features = 1;
    bool operator==(const ForestParams&) const = default;
};

struct TrainedModel {
    ClassifierSpec spec;
    TrainOptions options;
    std::uint64_t train_seed = 0;
    std::size_t dim = 0;
    std::vector<int> classes;  // sorted distinct training labels
    Standardizer standardizer;
    std::variant<KnnParams, LdaParams, SvmParams, ForestParams> params;

    bool operator==(const TrainedModel&) const = default;
};

/// ValidationError on empty input, inconsistent feature lengths, or a
/// binary-only classifier (lda, svm) given other than two classes.
TrainedModel train(const ClassifierSpec& spec, std::vector<FeatureRecord> records, std::uint64_t seed,
                   const TrainOptions& options = {});

/// ValidationError when the feature length differs from the model's.
int predict(const TrainedModel& model, const std::vector<double>& features);

/// Leaf-level helpers exposed for tests.
int predict_tree(const DecisionTree& tree, const std::vector<double>& standardized, const std::vector<int>& classes);

struct EvalReport {
    std::vector<int> classes;
    std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
    double accuracy = 0.0;                            // trace / total
    std::vector<double> per_class_accuracy;
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
};

EvalReport evaluate(const TrainedModel& model, const std::vector<FeatureRecord>& test);

struct Split {
    std::vector<FeatureRecord> train;
    std::vector<FeatureRecord> test;
};

/// Per class, round(train_fraction * n) records (at least one) go to train.
/// ValidationError when fewer than two classes are present.
Split stratified_split(const std::vector<FeatureRecord>& records, double train_fraction, std::uint64_t seed);

/// Stratified split, train, evaluate on the held-out part.
EvalReport split_eval(const ClassifierSpec& spec, const std::vector<FeatureRecord>& records,
                      double train_fraction, std::uint64_t seed, const TrainOptions& options = {});

/// Stratified k-fold cross validation. The confusion matrix pools all folds;
/// mean_accuracy averages the per-fold accuracies. ValidationError when a
/// class has fewer than `folds` records.
EvalReport kfold_cv(const ClassifierSpec& spec, const std::vector<FeatureRecord>& records, int folds,
                    std::uint64_t seed, const TrainOptions& options = {});

}  // namespace convtrace::classify
