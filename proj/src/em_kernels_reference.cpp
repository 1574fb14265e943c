#include <algorithm>
#include <cmath>
#include <numbers>

#include "convtrace/em_kernels.hpp"

namespace convtrace::em::reference {
namespace {

double at(const Plane& p, std::size_t x, std::size_t y, const Tap& t)
{
    return p(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(x) + t.dx),
             static_cast<std::size_t>(static_cast<std::ptrdiff_t>(y) + t.dy));
}

}  // namespace

void residuals(const Plane& plane, int alpha, std::span<const double> coeffs, Grid& out)
{
    const auto a = static_cast<std::size_t>(alpha);
    const auto taps = stencil_taps(alpha);
    out = Grid(plane.width() - 2 * a, plane.height() - 2 * a);
    for (std::size_t y = a; y < plane.height() - a; ++y) {
        for (std::size_t x = a; x < plane.width() - a; ++x) {
            double pred = 0.0;
            for (std::size_t i = 0; i < taps.size(); ++i) pred += coeffs[i] * at(plane, x, y, taps[i]);
            out(x - a, y - a) = std::abs(plane(x, y) - pred);
        }
    }
}

void posterior(const Grid& residuals, double sigma_sq, double prior_m1, double uniform_density, Grid& out)
{
    out = Grid(residuals.width, residuals.height);
    const double sigma = std::sqrt(sigma_sq);
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        const double r = residuals.data[i];
        const double gauss = std::exp(-r * r / (2.0 * sigma_sq)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
        const double m1 = prior_m1 * gauss;
        const double m2 = (1.0 - prior_m1) * uniform_density;
        out.data[i] = std::clamp(m1 / (m1 + m2), kPosteriorFloor, std::nextafter(1.0, 0.0));
    }
}

WeightedMoments moments(const Grid& residuals, const Grid& weights)
{
    WeightedMoments total;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        total.weighted_sq += weights.data[i] * residuals.data[i] * residuals.data[i];
        total.weight += weights.data[i];
    }
    return total;
}

NormalEquations normal_equations(const Plane& plane, const Grid& weights, int alpha)
{
    const auto a = static_cast<std::size_t>(alpha);
    const auto taps = stencil_taps(alpha);
    const auto m = static_cast<Eigen::Index>(taps.size());
    NormalEquations eq{Eigen::MatrixXd::Zero(m, m), Eigen::VectorXd::Zero(m)};
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            double sum = 0.0;
            for (std::size_t y = a; y < plane.height() - a; ++y) {
                for (std::size_t x = a; x < plane.width() - a; ++x) {
                    sum += weights(x - a, y - a) * at(plane, x, y, taps[static_cast<std::size_t>(i)]) *
                           at(plane, x, y, taps[static_cast<std::size_t>(j)]);
                }
            }
            eq.lhs(i, j) = sum;
        }
        double sum = 0.0;
        for (std::size_t y = a; y < plane.height() - a; ++y) {
            for (std::size_t x = a; x < plane.width() - a; ++x) {
                sum += weights(x - a, y - a) * at(plane, x, y, taps[static_cast<std::size_t>(i)]) * plane(x, y);
            }
        }
        eq.rhs(i) = sum;
    }
    return eq;
}

double energy(const Plane& plane, const Grid& weights, int alpha, std::span<const double> coeffs)
{
    const auto a = static_cast<std::size_t>(alpha);
    const auto taps = stencil_taps(alpha);
    double total = 0.0;
    for (std::size_t y = a; y < plane.height() - a; ++y) {
        for (std::size_t x = a; x < plane.width() - a; ++x) {
            double pred = 0.0;
            for (std::size_t i = 0; i < taps.size(); ++i) pred += coeffs[i] * at(plane, x, y, taps[i]);
            const double e = plane(x, y) - pred;
            total += weights(x - a, y - a) * e * e;
        }
    }
    return total;
}

}  // namespace convtrace::em::reference
