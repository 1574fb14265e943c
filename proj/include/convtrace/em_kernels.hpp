#pragma once

// Inner loops of the EM estimator in two flavors:
//
//   parallel::   OpenMP kernels used by the library. Reductions accumulate
//                fixed blocks of kBlockRows interior rows and combine the
//                block partials in order, so results are bit-identical for
//                any thread count.
//   reference::  plain serial loops that follow the defining sums term by
//                term. Kept for tests and the benchmark.

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "convtrace/em.hpp"

namespace convtrace::em {

struct NormalEquations {
    Eigen::MatrixXd lhs;  // A[(i),(j)] = sum w * I_i * I_j
    Eigen::VectorXd rhs;  // b[(i)]     = sum w * I_i * I_center
};

struct WeightedMoments {
    double weighted_sq = 0.0;  // sum w * R^2
    double weight = 0.0;       // sum w
};

namespace parallel {

inline constexpr std::size_t kBlockRows = 8;

void residuals(const Plane& plane, int alpha, std::span<const double> coeffs, Grid& out);
void posterior(const Grid& residuals, double sigma_sq, double prior_m1, double uniform_density, Grid& out);
WeightedMoments moments(const Grid& residuals, const Grid& weights);
NormalEquations normal_equations(const Plane& plane, const Grid& weights, int alpha);
double energy(const Plane& plane, const Grid& weights, int alpha, std::span<const double> coeffs);

}  // namespace parallel

namespace reference {

void residuals(const Plane& plane, int alpha, std::span<const double> coeffs, Grid& out);
void posterior(const Grid& residuals, double sigma_sq, double prior_m1, double uniform_density, Grid& out);
WeightedMoments moments(const Grid& residuals, const Grid& weights);
NormalEquations normal_equations(const Plane& plane, const Grid& weights, int alpha);
double energy(const Plane& plane, const Grid& weights, int alpha, std::span<const double> coeffs);

}  // namespace reference

/// Smallest posterior value handed out; keeps w strictly positive when the
/// Gaussian density underflows.
inline constexpr double kPosteriorFloor = 1e-300;

}  // namespace convtrace::em
