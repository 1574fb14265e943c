#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "convtrace/em_kernels.hpp"

namespace convtrace::em::parallel {
namespace {

struct Layout {
    std::size_t alpha;
    std::size_t inner_w;
    std::size_t inner_h;
    std::size_t stride;
    std::vector<std::ptrdiff_t> offsets;  // tap offsets into the row-major plane
};

Layout make_layout(const Plane& plane, int alpha)
{
    Layout l;
    l.alpha = static_cast<std::size_t>(alpha);
    l.inner_w = plane.width() - 2 * l.alpha;
    l.inner_h = plane.height() - 2 * l.alpha;
    l.stride = plane.width();
    for (const Tap& t : stencil_taps(alpha)) {
        l.offsets.push_back(static_cast<std::ptrdiff_t>(t.dy) * static_cast<std::ptrdiff_t>(l.stride) + t.dx);
    }
    return l;
}

std::size_t block_count(std::size_t rows) { return (rows + kBlockRows - 1) / kBlockRows; }

double posterior_value(double r, double log_gauss_norm, double inv_two_var, double log_ratio_m2)
{
    // w = 1 / (1 + exp(log((1-p) u) - log(p N(r))))
    const double log_m1 = log_gauss_norm - r * r * inv_two_var;
    const double w = 1.0 / (1.0 + std::exp(log_ratio_m2 - log_m1));
    return std::clamp(w, kPosteriorFloor, std::nextafter(1.0, 0.0));
}

}  // namespace

void residuals(const Plane& plane, int alpha, std::span<const double> coeffs, Grid& out)
{
    const Layout l = make_layout(plane, alpha);
    out = Grid(l.inner_w, l.inner_h);
    const double* src = plane.data().data();
    const std::size_t m = l.offsets.size();
    const auto rows = static_cast<std::ptrdiff_t>(l.inner_h);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t y = 0; y < rows; ++y) {
        const double* row = src + (static_cast<std::size_t>(y) + l.alpha) * l.stride + l.alpha;
        double* dst = out.data.data() + static_cast<std::size_t>(y) * l.inner_w;
        for (std::size_t x = 0; x < l.inner_w; ++x) {
            const double* c = row + x;
            double pred = 0.0;
            for (std::size_t i = 0; i < m; ++i) pred += coeffs[i] * c[l.offsets[i]];
            dst[x] = std::abs(*c - pred);
        }
    }
}

void posterior(const Grid& residuals, double sigma_sq, double prior_m1, double uniform_density, Grid& out)
{
    out = Grid(residuals.width, residuals.height);
    const double log_gauss_norm = std::log(prior_m1) - 0.5 * std::log(2.0 * std::numbers::pi * sigma_sq);
    const double inv_two_var = 1.0 / (2.0 * sigma_sq);
    const double log_ratio_m2 = std::log1p(-prior_m1) + std::log(uniform_density);
    const auto n = static_cast<std::ptrdiff_t>(residuals.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out.data[static_cast<std::size_t>(i)] =
            posterior_value(residuals.data[static_cast<std::size_t>(i)], log_gauss_norm, inv_two_var, log_ratio_m2);
    }
}

WeightedMoments moments(const Grid& residuals, const Grid& weights)
{
    const std::size_t blocks = block_count(residuals.height);
    std::vector<WeightedMoments> partial(blocks);
    const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::size_t y0 = static_cast<std::size_t>(b) * kBlockRows;
        const std::size_t y1 = std::min(y0 + kBlockRows, residuals.height);
        WeightedMoments acc;
        for (std::size_t i = y0 * residuals.width; i < y1 * residuals.width; ++i) {
            const double r = residuals.data[i];
            const double w = weights.data[i];
            acc.weighted_sq += w * r * r;
            acc.weight += w;
        }
        partial[static_cast<std::size_t>(b)] = acc;
    }
    WeightedMoments total;
    for (const auto& p : partial) {
        total.weighted_sq += p.weighted_sq;
        total.weight += p.weight;
    }
    return total;
}

NormalEquations normal_equations(const Plane& plane, const Grid& weights, int alpha)
{
    const Layout l = make_layout(plane, alpha);
    const std::size_t m = l.offsets.size();
    const std::size_t tri = m * (m + 1) / 2;
    const std::size_t slot = tri + m;
    const std::size_t blocks = block_count(l.inner_h);
    std::vector<double> partial(blocks * slot, 0.0);
    const double* src = plane.data().data();
    const auto nb = static_cast<std::ptrdiff_t>(blocks);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        double* acc = partial.data() + static_cast<std::size_t>(b) * slot;
        double* acc_rhs = acc + tri;
        std::vector<double> nbr(m);
        const std::size_t y0 = static_cast<std::size_t>(b) * kBlockRows;
        const std::size_t y1 = std::min(y0 + kBlockRows, l.inner_h);
        for (std::size_t y = y0; y < y1; ++y) {
            const double* row = src + (y + l.alpha) * l.stride + l.alpha;
            const double* wrow = weights.data.data() + y * l.inner_w;
            for (std::size_t x = 0; x < l.inner_w; ++x) {
                const double* c = row + x;
                const double w = wrow[x];
                for (std::size_t i = 0; i < m; ++i) nbr[i] = c[l.offsets[i]];
                std::size_t t = 0;
                for (std::size_t i = 0; i < m; ++i) {
                    const double wi = w * nbr[i];
                    acc_rhs[i] += wi * *c;
                    for (std::size_t j = i; j < m; ++j) acc[t++] += wi * nbr[j];
                }
            }
        }
    }

    NormalEquations eq{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)),
                       Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m))};
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* acc = partial.data() + b * slot;
        std::size_t t = 0;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i; j < m; ++j) {
                eq.lhs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += acc[t++];
            }
            eq.rhs(static_cast<Eigen::Index>(i)) += acc[tri + i];
        }
    }
    eq.lhs.triangularView<Eigen::StrictlyLower>() = eq.lhs.transpose().triangularView<Eigen::StrictlyLower>();
    return eq;
}

double energy(const Plane& plane, const Grid& weights, int alpha, std::span<const double> coeffs)
{
    const Layout l = make_layout(plane, alpha);
    const std::size_t m = l.offsets.size();
    const std::size_t blocks = block_count(l.inner_h);
    std::vector<double> partial(blocks, 0.0);
    const double* src = plane.data().data();
    const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::size_t y0 = static_cast<std::size_t>(b) * kBlockRows;
        const std::size_t y1 = std::min(y0 + kBlockRows, l.inner_h);
        double acc = 0.0;
        for (std::size_t y = y0; y < y1; ++y) {
            const double* row = src + (y + l.alpha) * l.stride + l.alpha;
            const double* wrow = weights.data.data() + y * l.inner_w;
            for (std::size_t x = 0; x < l.inner_w; ++x) {
                const double* c = row + x;
                double pred = 0.0;
                for (std::size_t i = 0; i < m; ++i) pred += coeffs[i] * c[l.offsets[i]];
                const double e = *c - pred;
                acc += wrow[x] * e * e;
            }
        }
        partial[static_cast<std::size_t>(b)] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace convtrace::em::parallel
