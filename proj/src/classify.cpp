#include "convtrace/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <type_traits>

#include "classifiers_impl.hpp"
#include "convtrace/error.hpp"
#include "convtrace/rng.hpp"

namespace convtrace::classify {
namespace {

constexpr int kKnnChoices[] = {3, 5, 7, 9, 11, 13};

void check_dims(const std::vector<FeatureRecord>& records)
{
    if (records.empty()) throw ValidationError("no training records");
    const std::size_t d = records.front().features.size();
    if (d == 0) throw ValidationError("empty feature vectors");
    for (const auto& r : records) {
        if (r.features.size() != d) {
            throw ValidationError("inconsistent feature length: " + std::to_string(r.features.size()) + " vs " +
                                  std::to_string(d));
        }
    }
}

std::vector<int> distinct_labels(const std::vector<FeatureRecord>& records)
{
    std::set<int> s;
    for (const auto& r : records) s.insert(r.label);
    return {s.begin(), s.end()};
}

std::size_t class_position(const std::vector<int>& classes, int label)
{
    const auto it = std::lower_bound(classes.begin(), classes.end(), label);
    if (it == classes.end() || *it != label) return classes.size();
    return static_cast<std::size_t>(it - classes.begin());
}

void sort_canonical(std::vector<FeatureRecord>& records)
{
    std::stable_sort(records.begin(), records.end(),
                     [](const FeatureRecord& a, const FeatureRecord& b) { return a.id < b.id; });
}

// Indices of each class's records in canonical (id) order.
std::map<int, std::vector<std::size_t>> by_class(const std::vector<FeatureRecord>& records)
{
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return records[a].id < records[b].id; });
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i : order) groups[records[i].label].push_back(i);
    return groups;
}

EvalReport empty_report(const std::vector<int>& classes)
{
    EvalReport r;
    r.classes = classes;
    r.confusion.assign(classes.size(), std::vector<std::size_t>(classes.size(), 0));
    return r;
}

void finalize(EvalReport& r)
{
    std::size_t total = 0, correct = 0;
    r.per_class_accuracy.assign(r.classes.size(), 0.0);
    for (std::size_t i = 0; i < r.classes.size(); ++i) {
        std::size_t row = 0;
        for (std::size_t j = 0; j < r.classes.size(); ++j) row += r.confusion[i][j];
        total += row;
        correct += r.confusion[i][i];
        r.per_class_accuracy[i] = row ? static_cast<double>(r.confusion[i][i]) / static_cast<double>(row) : 0.0;
    }
    r.accuracy = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

void tally(EvalReport& r, const TrainedModel& model, const std::vector<FeatureRecord>& test)
{
    for (const auto& rec : test) {
        const std::size_t truth = class_position(r.classes, rec.label);
        const std::size_t pred = class_position(r.classes, predict(model, rec.features));
        if (truth == r.classes.size()) throw ValidationError("test label not in report classes");
        ++r.confusion[truth][pred];
    }
}

}  // namespace

std::string ClassifierSpec::name() const
{
    switch (kind) {
    case Kind::knn: return "knn" + std::to_string(k);
    case Kind::lda: return "lda";
    case Kind::svm_linear: return "svm";
    case Kind::random_forest: return "rf";
    }
    return "unknown";
}

ClassifierSpec ClassifierSpec::parse(const std::string& token)
{
    if (token == "lda") return {Kind::lda, 0};
    if (token == "svm" || token == "svm_linear" || token == "svm-linear") return {Kind::svm_linear, 0};
    if (token == "rf" || token == "random_forest" || token == "random-forest") return {Kind::random_forest, 0};
    if (token.rfind("knn", 0) == 0) {
        std::string digits = token.substr(3);
        if (!digits.empty() && (digits.front() == ':' || digits.front() == '-')) digits.erase(0, 1);
        for (int k : kKnnChoices) {
            if (digits == std::to_string(k)) return {Kind::knn, k};
        }
    }
    throw UsageError("unknown classifier '" + token + "' (knn3..knn13, lda, svm, rf)");
}

std::vector<ClassifierSpec> default_bank()
{
    std::vector<ClassifierSpec> bank;
    for (int k : kKnnChoices) bank.push_back({Kind::knn, k});
    bank.push_back({Kind::svm_linear, 0});
    bank.push_back({Kind::lda, 0});
    bank.push_back({Kind::random_forest, 0});
    return bank;
}

Standardizer Standardizer::fit(const std::vector<FeatureRecord>& records, bool enabled)
{
    const std::size_t d = records.front().features.size();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    if (!enabled) return s;
    const double n = static_cast<double>(records.size());
    for (const auto& r : records) {
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += r.features[j];
    }
    for (double& m : s.mean) m /= n;
    std::vector<double> var(d, 0.0);
    for (const auto& r : records) {
        for (std::size_t j = 0; j < d; ++j) {
            const double c = r.features[j] - s.mean[j];
            var[j] += c * c;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(var[j] / n);
        s.scale[j] = sd > 1e-12 ? sd : 1.0;
    }
    return s;
}

std::vector<double> Standardizer::apply(const std::vector<double>& x) const
{
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
    return out;
}

TrainedModel train(const ClassifierSpec& spec, std::vector<FeatureRecord> records, std::uint64_t seed,
                   const TrainOptions& options)
{
    check_dims(records);
    sort_canonical(records);

    TrainedModel model;
    model.spec = spec;
    model.options = options;
    model.train_seed = seed;
    model.dim = records.front().features.size();
    model.classes = distinct_labels(records);
    model.standardizer = Standardizer::fit(records, options.standardize);

    std::vector<std::vector<double>> x;
    std::vector<int> y;
    x.reserve(records.size());
    y.reserve(records.size());
    for (const auto& r : records) {
        x.push_back(model.standardizer.apply(r.features));
        y.push_back(static_cast<int>(class_position(model.classes, r.label)));
    }

    switch (spec.kind) {
    case Kind::knn:
        if (spec.k < 1) throw ValidationError("knn needs k >= 1");
        model.params = detail::fit_knn(x, y);
        break;
    case Kind::lda:
        if (model.classes.size() != 2) throw ValidationError("LDA needs exactly two classes");
        model.params = detail::fit_lda(x, y, options.lda_ridge);
        break;
    case Kind::svm_linear:
        if (model.classes.size() != 2) throw ValidationError("linear SVM needs exactly two classes");
        model.params = detail::fit_svm(x, y, options.svm_epochs, options.svm_lambda, seed);
        break;
    case Kind::random_forest:
        model.params = detail::fit_forest(x, y, model.classes.size(), options.forest_trees, options.forest_max_depth,
                                          seed);
        break;
    }
    return model;
}

int predict(const TrainedModel& model, const std::vector<double>& features)
{
    if (features.size() != model.dim) {
        throw ValidationError("feature length " + std::to_string(features.size()) + " does not match model " +
                              std::to_string(model.dim));
    }
    const std::vector<double> x = model.standardizer.apply(features);
    const std::size_t n_classes = model.classes.size();
    const int pos = std::visit(
        [&](const auto& p) -> int {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, KnnParams>) return detail::predict_knn(p, model.spec.k, x, n_classes);
            else if constexpr (std::is_same_v<P, LdaParams>) return detail::predict_lda(p, x);
            else if constexpr (std::is_same_v<P, SvmParams>) return detail::predict_svm(p, x);
            else return detail::predict_forest(p, x, n_classes);
        },
        model.params);
    return model.classes[static_cast<std::size_t>(pos)];
}

int predict_tree(const DecisionTree& tree, const std::vector<double>& standardized, const std::vector<int>& classes)
{
    return classes[static_cast<std::size_t>(detail::tree_leaf_class(tree, standardized))];
}

EvalReport evaluate(const TrainedModel& model, const std::vector<FeatureRecord>& test)
{
    std::set<int> labels(model.classes.begin(), model.classes.end());
    for (const auto& r : test) labels.insert(r.label);
    EvalReport report = empty_report({labels.begin(), labels.end()});
    tally(report, model, test);
    finalize(report);
    report.fold_accuracies = {report.accuracy};
    report.mean_accuracy = report.accuracy;
    return report;
}

Split stratified_split(const std::vector<FeatureRecord>& records, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ValidationError("train fraction must lie in (0,1)");
    const auto groups = by_class(records);
    if (groups.size() < 2) throw ValidationError("stratified split needs at least two non-empty classes");

    Split split;
    for (const auto& [label, members] : groups) {
        std::vector<std::size_t> idx = members;
        Xoshiro256 rng(derive_seed(seed, static_cast<std::uint64_t>(static_cast<std::uint32_t>(label))));
        shuffle(idx.begin(), idx.end(), rng);
        const auto n = idx.size();
        const auto n_train =
            std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n))),
                                    1, n);
        for (std::size_t i = 0; i < n; ++i) (i < n_train ? split.train : split.test).push_back(records[idx[i]]);
    }
    sort_canonical(split.train);
    sort_canonical(split.test);
    return split;
}

EvalReport split_eval(const ClassifierSpec& spec, const std::vector<FeatureRecord>& records, double train_fraction,
                      std::uint64_t seed, const TrainOptions& options)
{
    check_dims(records);
    const Split split = stratified_split(records, train_fraction, seed);
    const TrainedModel model = train(spec, split.train, seed, options);
    EvalReport report = empty_report(distinct_labels(records));
    tally(report, model, split.test);
    finalize(report);
    report.fold_accuracies = {report.accuracy};
    report.mean_accuracy = report.accuracy;
    return report;
}

EvalReport kfold_cv(const ClassifierSpec& spec, const std::vector<FeatureRecord>& records, int folds,
                    std::uint64_t seed, const TrainOptions& options)
{
    if (folds < 2) throw ValidationError("cross validation needs at least 2 folds");
    check_dims(records);
    const auto groups = by_class(records);
    if (groups.size() < 2) throw ValidationError("cross validation needs at least two classes");

    std::vector<int> fold_of(records.size(), 0);
    for (const auto& [label, members] : groups) {
        if (members.size() < static_cast<std::size_t>(folds)) {
            throw ValidationError("class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                                  " records, fewer than " + std::to_string(folds) + " folds");
        }
        std::vector<std::size_t> idx = members;
        Xoshiro256 rng(derive_seed(seed, static_cast<std::uint64_t>(static_cast<std::uint32_t>(label))));
        shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i < idx.size(); ++i) fold_of[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }

    EvalReport report = empty_report(distinct_labels(records));
    for (int f = 0; f < folds; ++f) {
        std::vector<FeatureRecord> train_set, test_set;
        for (std::size_t i = 0; i < records.size(); ++i) (fold_of[i] == f ? test_set : train_set).push_back(records[i]);
        const TrainedModel model = train(spec, train_set, derive_seed(seed, 1000 + static_cast<std::uint64_t>(f)), options);
        EvalReport fold = empty_report(report.classes);
        tally(fold, model, test_set);
        finalize(fold);
        report.fold_accuracies.push_back(fold.accuracy);
        for (std::size_t i = 0; i < report.classes.size(); ++i) {
            for (std::size_t j = 0; j < report.classes.size(); ++j) report.confusion[i][j] += fold.confusion[i][j];
        }
    }
    finalize(report);
    double sum = 0.0;
    for (double a : report.fold_accuracies) sum += a;
    report.mean_accuracy = sum / static_cast<double>(folds);
    return report;
}

}  // namespace convtrace::classify
