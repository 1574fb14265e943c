#include <algorithm>
#include <cmath>
#include <numeric>

#include "classifiers_impl.hpp"
#include "convtrace/rng.hpp"

namespace convtrace::classify::detail {
namespace {

double gini(const std::vector<int>& counts, int total)
{
    if (total == 0) return 0.0;
    double sum_sq = 0.0;
    for (int c : counts) {
        const double p = static_cast<double>(c) / total;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<double>>& x, const std::vector<int>& y, std::size_t n_classes,
                int max_depth, int max_features, Xoshiro256& rng)
        : x_(x), y_(y), n_classes_(n_classes), max_depth_(max_depth), max_features_(max_features), rng_(rng),
          features_(x.front().size())
    {
        std::iota(features_.begin(), features_.end(), 0);
    }

    DecisionTree build(std::vector<std::size_t> samples)
    {
        DecisionTree tree;
        grow(tree, samples, 0);
        return tree;
    }

private:
    int grow(DecisionTree& tree, std::vector<std::size_t>& samples, int depth)
    {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        std::vector<int> counts(n_classes_, 0);
        for (std::size_t s : samples) ++counts[static_cast<std::size_t>(y_[s])];
        const bool pure = std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }) <= 1;

        SplitChoice split;
        if (!pure && depth < max_depth_ && samples.size() >= 2) split = best_split(samples, counts);
        if (split.feature < 0) {
            tree.nodes[static_cast<std::size_t>(id)].counts = std::move(counts);
            return id;
        }

        std::vector<std::size_t> left, right;
        for (std::size_t s : samples) {
            (x_[s][static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right).push_back(s);
        }
        samples.clear();
        samples.shrink_to_fit();
        const int l = grow(tree, left, depth + 1);
        const int r = grow(tree, right, depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    SplitChoice best_split(const std::vector<std::size_t>& samples, const std::vector<int>& parent_counts)
    {
        // Partial Fisher-Yates: the first max_features entries are the candidates.
        const std::size_t d = features_.size();
        const auto mtry = static_cast<std::size_t>(max_features_);
        for (std::size_t i = 0; i < mtry && i < d; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng_.below(d - i));
            std::swap(features_[i], features_[j]);
        }

        const int total = static_cast<int>(samples.size());
        SplitChoice best;
        best.impurity = gini(parent_counts, total);
        std::vector<std::pair<double, int>> column(samples.size());
        for (std::size_t fi = 0; fi < mtry && fi < d; ++fi) {
            const std::size_t f = features_[fi];
            for (std::size_t i = 0; i < samples.size(); ++i) column[i] = {x_[samples[i]][f], y_[samples[i]]};
            std::sort(column.begin(), column.end());
            std::vector<int> left(n_classes_, 0);
            std::vector<int> right = parent_counts;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                ++left[static_cast<std::size_t>(column[i].second)];
                --right[static_cast<std::size_t>(column[i].second)];
                if (column[i].first == column[i + 1].first) continue;
                const int nl = static_cast<int>(i + 1);
                const int nr = total - nl;
                const double impurity = (nl * gini(left, nl) + nr * gini(right, nr)) / total;
                if (impurity < best.impurity - 1e-12) {
                    best.impurity = impurity;
                    best.feature = static_cast<int>(f);
                    best.threshold = 0.5 * (column[i].first + column[i + 1].first);
                    // Midpoint can round onto the upper value for adjacent doubles.
                    if (!(best.threshold < column[i + 1].first)) best.threshold = column[i].first;
                }
            }
        }
        return best;
    }

    const std::vector<std::vector<double>>& x_;
    const std::vector<int>& y_;
    std::size_t n_classes_;
    int max_depth_;
    int max_features_;
    Xoshiro256& rng_;
    std::vector<std::size_t> features_;
};

}  // namespace

ForestParams fit_forest(const std::vector<std::vector<double>>& x, const std::vector<int>& y, std::size_t n_classes,
                        int trees, int max_depth, std::uint64_t seed)
{
    ForestParams p;
    p.max_features = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(x.front().size())))));
    p.trees.resize(static_cast<std::size_t>(trees));
    const std::size_t n = x.size();
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trees; ++t) {
        Xoshiro256 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> bootstrap(n);
        for (auto& b : bootstrap) b = static_cast<std::size_t>(rng.below(n));
        std::sort(bootstrap.begin(), bootstrap.end());
        TreeBuilder builder(x, y, n_classes, max_depth, p.max_features, rng);
        p.trees[static_cast<std::size_t>(t)] = builder.build(std::move(bootstrap));
    }
    return p;
}

int tree_leaf_class(const DecisionTree& tree, const std::vector<double>& x)
{
    std::size_t node = 0;
    while (tree.nodes[node].feature >= 0) {
        const TreeNode& n = tree.nodes[node];
        node = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return argmax_lowest(tree.nodes[node].counts);
}

int predict_forest(const ForestParams& p, const std::vector<double>& x, std::size_t n_classes)
{
    std::vector<int> votes(n_classes, 0);
    for (const auto& tree : p.trees) ++votes[static_cast<std::size_t>(tree_leaf_class(tree, x))];
    return argmax_lowest(votes);
}

}  // namespace convtrace::classify::detail
