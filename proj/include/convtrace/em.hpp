#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "convtrace/image.hpp"

namespace convtrace::em {

/// Dense row-major matrix of doubles over the interior of a plane.
struct Grid {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> data;

    Grid() = default;
    Grid(std::size_t w, std::size_t h, double fill = 0.0) : width(w), height(h), data(w * h, fill) {}

    double operator()(std::size_t x, std::size_t y) const noexcept { return data[y * width + x]; }
    double& operator()(std::size_t x, std::size_t y) noexcept { return data[y * width + x]; }
    std::size_t size() const noexcept { return data.size(); }
};

/// Absolute prediction residuals over the interior.
using ResidualMap = Grid;

/// Per-pixel probability that the pixel follows the linear neighbor model.
/// Values lie strictly inside (0,1).
using PosteriorMap = Grid;

/// One neighbor of the prediction stencil, relative to the predicted pixel.
struct Tap {
    int dx;
    int dy;
};

/// Neighbor offsets in coefficient order: the (2*alpha+1)^2 stencil read top
/// to bottom, left to right, with the center skipped.
std::vector<Tap> stencil_taps(int alpha);

/// Number of kernel coefficients, (2*alpha+1)^2 - 1.
constexpr std::size_t kernel_length(int alpha) noexcept
{
    const auto n = static_cast<std::size_t>(2 * alpha + 1);
    return n * n - 1;
}

struct EmConfig {
    int alpha = 1;
    int max_iters = 100;
    double tol = 1e-4;
    double sigma_init = 0.1;
    double sigma_floor = 1e-4;
    double prior_m1 = 0.5;
    double uniform_density = 1.0;

    /// Throws ValidationError when a field is out of range.
    void validate() const;
};

struct KernelEstimate {
    int alpha = 1;
    std::vector<double> coeffs;
    double sigma_sq = 0.0;
    int iterations = 0;
    bool converged = false;

    bool operator==(const KernelEstimate&) const = default;
};

struct EmResult {
    KernelEstimate kernel;
    PosteriorMap posterior;
};

/// State handed to an observer after every M-step. Used by tests to check
/// that each weighted least-squares update does not increase the energy.
struct IterationTrace {
    int iteration;
    const Plane& plane;
    const PosteriorMap& weights;
    std::span<const double> previous;
    std::span<const double> updated;
    double sigma_sq;
};
using IterationObserver = std::function<void(const IterationTrace&)>;

/// |I[x,y] - sum_taps k * I[x+dx,y+dy]| for every interior pixel.
/// DimensionError if the plane is smaller than the stencil.
ResidualMap residual_map(const Plane& plane, std::span<const double> coeffs);

/// Bayes posterior of the Gaussian residual model against the uniform one.
PosteriorMap e_step(const ResidualMap& residuals, double sigma_sq, double prior_m1, double uniform_density);

/// Weighted residual variance, floored at sigma_floor^2.
double estimate_sigma(const ResidualMap& residuals, const PosteriorMap& weights, double sigma_floor);

/// Solves the weighted normal equations for the kernel. Falls back to a
/// 1e-8 diagonal ridge when the Cholesky factorization fails or is
/// numerically singular. Throws DegenerateInputError for planes that are
/// constant over the stencil footprint or when the ridged system still
/// cannot be factored.
std::vector<double> m_step(const Plane& plane, const PosteriorMap& weights, int alpha);

/// Weighted prediction energy sum w * (I - sum k * I_neighbor)^2.
double weighted_energy(const Plane& plane, const PosteriorMap& weights, std::span<const double> coeffs);

/// Alternates E and M steps from a uniform kernel until the largest
/// coefficient change drops below `tol` or `max_iters` is reached. The
/// returned posterior is recomputed from the final kernel and variance.
EmResult run_em(const Plane& plane, const EmConfig& config, const IterationObserver& observer = {});

}  // namespace convtrace::em
