#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include <Eigen/Dense>

#include "classifiers_impl.hpp"
#include "convtrace/error.hpp"
#include "convtrace/rng.hpp"

namespace convtrace::classify::detail {

int argmax_lowest(const std::vector<int>& counts)
{
    int best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        if (counts[i] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    }
    return best;
}

KnnParams fit_knn(const std::vector<std::vector<double>>& x, const std::vector<int>& y) { return {x, y}; }

int predict_knn(const KnnParams& p, int k, const std::vector<double>& x, std::size_t n_classes)
{
    std::vector<std::pair<double, std::size_t>> dist(p.points.size());
    for (std::size_t i = 0; i < p.points.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double diff = p.points[i][j] - x[j];
            d += diff * diff;
        }
        dist[i] = {d, i};
    }
    // Lexicographic order breaks distance ties by lower record index.
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    std::vector<int> votes(n_classes, 0);
    for (std::size_t i = 0; i < kk; ++i) ++votes[static_cast<std::size_t>(p.labels[dist[i].second])];
    return argmax_lowest(votes);
}

LdaParams fit_lda(const std::vector<std::vector<double>>& x, const std::vector<int>& y, double ridge)
{
    const auto d = static_cast<Eigen::Index>(x.front().size());
    Eigen::VectorXd mean[2] = {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
    double count[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int c = y[i];
        mean[c] += Eigen::Map<const Eigen::VectorXd>(x[i].data(), d);
        count[c] += 1.0;
    }
    mean[0] /= count[0];
    mean[1] /= count[1];

    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Eigen::VectorXd centered = Eigen::Map<const Eigen::VectorXd>(x[i].data(), d) - mean[y[i]];
        scatter.noalias() += centered * centered.transpose();
    }
    const double dof = std::max(1.0, static_cast<double>(x.size()) - 2.0);
    Eigen::MatrixXd pooled = scatter / dof;
    pooled.diagonal().array() += ridge;

    const Eigen::VectorXd w = pooled.ldlt().solve(mean[1] - mean[0]);
    if (!w.allFinite()) throw ValidationError("LDA covariance is singular");
    LdaParams p;
    p.weights.assign(w.data(), w.data() + w.size());
    p.threshold = 0.5 * w.dot(mean[0] + mean[1]) - std::log(count[1] / count[0]);
    p.mean0.assign(mean[0].data(), mean[0].data() + d);
    p.mean1.assign(mean[1].data(), mean[1].data() + d);
    return p;
}

int predict_lda(const LdaParams& p, const std::vector<double>& x)
{
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += p.weights[j] * x[j];
    return s > p.threshold ? 1 : 0;
}

// Pegasos: primal sub-gradient descent on the regularized hinge loss with
// step 1/(lambda t) and projection onto the ball of radius 1/sqrt(lambda).
// The bias is an extra coordinate fed a constant 1.
SvmParams fit_svm(const std::vector<std::vector<double>>& x, const std::vector<int>& y, int epochs, double lambda,
                  std::uint64_t seed)
{
    const std::size_t d = x.front().size();
    std::vector<double> w(d + 1, 0.0);
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    Xoshiro256 rng(seed);
    const double radius = 1.0 / std::sqrt(lambda);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double label = y[idx] == 1 ? 1.0 : -1.0;
            double margin = w[d];
            for (std::size_t j = 0; j < d; ++j) margin += w[j] * x[idx][j];
            margin *= label;
            const double shrink = 1.0 - eta * lambda;
            for (double& wj : w) wj *= shrink;
            if (margin < 1.0) {
                for (std::size_t j = 0; j < d; ++j) w[j] += eta * label * x[idx][j];
                w[d] += eta * label;
            }
            double norm = 0.0;
            for (double wj : w) norm += wj * wj;
            norm = std::sqrt(norm);
            if (norm > radius) {
                for (double& wj : w) wj *= radius / norm;
            }
        }
    }
    SvmParams p;
    p.weights.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
    p.bias = w[d];
    return p;
}

int predict_svm(const SvmParams& p, const std::vector<double>& x)
{
    double s = p.bias;
    for (std::size_t j = 0; j < x.size(); ++j) s += p.weights[j] * x[j];
    return s > 0.0 ? 1 : 0;
}

}  // namespace convtrace::classify::detail
