#include "convtrace/em.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "convtrace/em_kernels.hpp"
#include "convtrace/error.hpp"

namespace convtrace::em {
namespace {

constexpr double kRidge = 1e-8;
// Reciprocal condition below which the plain Cholesky solve is not trusted.
constexpr double kSingularRcond = 1e-13;
constexpr double kTinyWeightSum = 1e-12;
constexpr double kFlatRange = 1e-12;

void require_fits(const Plane& plane, int alpha)
{
    const auto side = static_cast<std::size_t>(2 * alpha + 1);
    if (plane.width() < side || plane.height() < side) {
        throw DimensionError("plane " + std::to_string(plane.width()) + "x" + std::to_string(plane.height()) +
                             " is smaller than the " + std::to_string(side) + "x" + std::to_string(side) +
                             " stencil");
    }
}

void require_conformant(const Grid& a, const Grid& b)
{
    if (a.width != b.width || a.height != b.height) {
        throw ValidationError("residual and weight maps differ in size");
    }
}

}  // namespace

std::vector<Tap> stencil_taps(int alpha)
{
    std::vector<Tap> taps;
    taps.reserve(kernel_length(alpha));
    for (int dy = -alpha; dy <= alpha; ++dy) {
        for (int dx = -alpha; dx <= alpha; ++dx) {
            if (dx == 0 && dy == 0) continue;
            taps.push_back({dx, dy});
        }
    }
    return taps;
}

void EmConfig::validate() const
{
    if (alpha < 1 || alpha > 3) throw ValidationError("alpha must be 1, 2 or 3");
    if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
    if (!(tol > 0.0)) throw ValidationError("tol must be positive");
    if (!(sigma_floor > 0.0)) throw ValidationError("sigma_floor must be positive");
    if (!(sigma_init >= sigma_floor)) throw ValidationError("sigma_init must be >= sigma_floor");
    if (!(prior_m1 > 0.0 && prior_m1 < 1.0)) throw ValidationError("prior_m1 must lie in (0,1)");
    if (!(uniform_density > 0.0)) throw ValidationError("uniform_density must be positive");
}

ResidualMap residual_map(const Plane& plane, std::span<const double> coeffs)
{
    int alpha = 0;
    while (alpha <= 3 && kernel_length(alpha) < coeffs.size()) ++alpha;
    if (alpha < 1 || alpha > 3 || kernel_length(alpha) != coeffs.size()) {
        throw ValidationError("kernel length " + std::to_string(coeffs.size()) + " is not (2a+1)^2-1");
    }
    require_fits(plane, alpha);
    ResidualMap out;
    parallel::residuals(plane, alpha, coeffs, out);
    return out;
}

PosteriorMap e_step(const ResidualMap& residuals, double sigma_sq, double prior_m1, double uniform_density)
{
    if (!(sigma_sq > 0.0)) throw ValidationError("sigma_sq must be positive");
    if (!(prior_m1 > 0.0 && prior_m1 < 1.0)) throw ValidationError("prior_m1 must lie in (0,1)");
    if (!(uniform_density > 0.0)) throw ValidationError("uniform_density must be positive");
    PosteriorMap out;
    parallel::posterior(residuals, sigma_sq, prior_m1, uniform_density, out);
    return out;
}

double estimate_sigma(const ResidualMap& residuals, const PosteriorMap& weights, double sigma_floor)
{
    require_conformant(residuals, weights);
    const double floor_sq = sigma_floor * sigma_floor;
    const WeightedMoments mom = parallel::moments(residuals, weights);
    if (mom.weight < kTinyWeightSum) return floor_sq;
    return std::max(floor_sq, mom.weighted_sq / mom.weight);
}

std::vector<double> m_step(const Plane& plane, const PosteriorMap& weights, int alpha)
{
    require_fits(plane, alpha);
    const auto a = static_cast<std::size_t>(alpha);
    if (weights.width != plane.width() - 2 * a || weights.height != plane.height() - 2 * a) {
        throw ValidationError("weight map does not match the plane interior");
    }
    const auto [lo, hi] = std::minmax_element(plane.data().begin(), plane.data().end());
    if (*hi - *lo <= kFlatRange) {
        throw DegenerateInputError("constant plane: the normal equations have rank one");
    }

    const NormalEquations eq = parallel::normal_equations(plane, weights, alpha);
    Eigen::LLT<Eigen::MatrixXd> llt(eq.lhs);
    if (llt.info() != Eigen::Success || !(llt.rcond() >= kSingularRcond)) {
        Eigen::MatrixXd ridged = eq.lhs;
        ridged.diagonal().array() += kRidge;
        llt.compute(ridged);
        if (llt.info() != Eigen::Success) {
            throw DegenerateInputError("normal equations singular after ridge regularization");
        }
    }
    const Eigen::VectorXd k = llt.solve(eq.rhs);
    if (!k.allFinite()) throw DegenerateInputError("normal equations produced a non-finite kernel");
    return {k.data(), k.data() + k.size()};
}

double weighted_energy(const Plane& plane, const PosteriorMap& weights, std::span<const double> coeffs)
{
    int alpha = 1;
    while (alpha < 3 && kernel_length(alpha) != coeffs.size()) ++alpha;
    if (kernel_length(alpha) != coeffs.size()) throw ValidationError("bad kernel length");
    require_fits(plane, alpha);
    return parallel::energy(plane, weights, alpha, coeffs);
}

EmResult run_em(const Plane& plane, const EmConfig& config, const IterationObserver& observer)
{
    config.validate();
    require_fits(plane, config.alpha);

    const std::size_t m = kernel_length(config.alpha);
    std::vector<double> k(m, 1.0 / static_cast<double>(m));
    double sigma_sq = config.sigma_init * config.sigma_init;

    KernelEstimate est;
    est.alpha = config.alpha;
    ResidualMap residuals;
    PosteriorMap weights;
    for (int it = 1; it <= config.max_iters; ++it) {
        parallel::residuals(plane, config.alpha, k, residuals);
        weights = e_step(residuals, sigma_sq, config.prior_m1, config.uniform_density);
        sigma_sq = estimate_sigma(residuals, weights, config.sigma_floor);
        std::vector<double> next = m_step(plane, weights, config.alpha);

        double delta = 0.0;
        for (std::size_t i = 0; i < m; ++i) delta = std::max(delta, std::abs(next[i] - k[i]));
        if (observer) observer(IterationTrace{it, plane, weights, k, next, sigma_sq});
        k = std::move(next);
        est.iterations = it;
        if (delta < config.tol) {
            est.converged = true;
            break;
        }
    }

    parallel::residuals(plane, config.alpha, k, residuals);
    est.coeffs = std::move(k);
    est.sigma_sq = sigma_sq;
    return {std::move(est), e_step(residuals, sigma_sq, config.prior_m1, config.uniform_density)};
}

}  // namespace convtrace::em
