#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "convtrace/classify.hpp"
#include "convtrace/rng.hpp"

namespace convtrace::testing {

/// Exhaustive k-NN: sort every (distance, position) pair, vote among the first
/// k, break vote ties towards the smaller label.
inline int brute_force_knn(const std::vector<classify::FeatureRecord>& train, const std::vector<double>& q, int k)
{
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < train.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) s += (train[i].features[j] - q[j]) * (train[i].features[j] - q[j]);
        d.emplace_back(std::sqrt(s), i);
    }
    std::sort(d.begin(), d.end());
    std::map<int, int> votes;
    for (int i = 0; i < k && i < static_cast<int>(d.size()); ++i) ++votes[train[d[static_cast<std::size_t>(i)].second].label];
    int best = votes.begin()->first;
    for (const auto& [label, n] : votes)
        if (n > votes[best]) best = label;
    return best;
}

inline std::vector<classify::FeatureRecord> uniform_records(std::size_t n, std::size_t dim, std::uint64_t seed)
{
    Xoshiro256 rng(seed);
    std::vector<classify::FeatureRecord> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].features.resize(dim);
        for (double& v : out[i].features) v = rng.uniform();
        out[i].label = static_cast<int>(rng.below(2));
        out[i].id = i;
    }
    return out;
}

/// Two unit-variance isotropic Gaussian clusters whose means are `separation`
/// apart along the first axis; labels alternate.
inline std::vector<classify::FeatureRecord> gaussian_clusters(std::size_t n, std::size_t dim, double separation,
                                                             std::uint64_t seed, std::size_t id_offset = 0)
{
    Xoshiro256 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<classify::FeatureRecord> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].label = static_cast<int>(i % 2);
        out[i].features.resize(dim);
        for (double& v : out[i].features) v = normal(rng);
        if (out[i].label == 1) out[i].features[0] += separation;
        out[i].id = id_offset + i;
    }
    return out;
}

}  // namespace convtrace::testing
