#include "bch/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cstddef>

namespace bch::kernels {

namespace {

constexpr std::ptrdiff_t kBlocks = 64;

inline double quartic(double phi, double alpha, double beta)
{
    const double d = phi * phi - beta / alpha;
    return 0.25 * alpha * d * d;
}

template <class Body>
double blocked_sum(std::ptrdiff_t n, Body&& body)
{
    std::array<double, kBlocks> partial{};
    const std::ptrdiff_t chunk = (n + kBlocks - 1) / kBlocks;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < kBlocks; ++b) {
        const std::ptrdiff_t lo = b * chunk;
        const std::ptrdiff_t hi = std::min(n, lo + chunk);
        double s = 0.0;
        for (std::ptrdiff_t i = lo; i < hi; ++i)
            s += body(i);
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0.0;
    for (double s : partial)
        total += s;
    return total;
}

} // namespace

void explicit_chemical(std::span<const double> phi, std::span<double> out, double alpha,
                       double beta, double stabilizer)
{
    const auto n = static_cast<std::ptrdiff_t>(phi.size());
    const double lin = beta + stabilizer;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double p = phi[i];
        out[i] = alpha * p * p * p - lin * p;
    }
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out)
{
    const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[i] = a[i] * b[i];
}

void phase_update(std::span<Complex> phi, std::span<const Complex> chem,
                  std::span<const Complex> adv, std::span<const double> k, double dt,
                  double kappa, double stabilizer)
{
    const auto n = static_cast<std::ptrdiff_t>(phi.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        const double k2 = k[j] * k[j];
        const double denom = 1.0 + dt * kappa * k2 * k2 + dt * stabilizer * k2;
        phi[j] = (phi[j] - dt * k2 * chem[j] - dt * adv[j]) / denom;
    }
}

void velocity_update(std::span<Complex> v, std::span<const Complex> rhs,
                     std::span<const double> k, double dt, double nu)
{
    const auto n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j)
        v[j] = (v[j] + dt * rhs[j]) / (1.0 + dt * nu * k[j] * k[j]);
}

double energy_sum(std::span<const double> phi, std::span<const double> phi_x, double alpha,
                  double beta, double kappa, double dx)
{
    const double half_kappa = 0.5 * kappa;
    return dx * blocked_sum(static_cast<std::ptrdiff_t>(phi.size()), [&](std::ptrdiff_t i) {
               return quartic(phi[i], alpha, beta) + half_kappa * phi_x[i] * phi_x[i];
           });
}

double squared_sum(std::span<const double> f, double dx)
{
    return dx * blocked_sum(static_cast<std::ptrdiff_t>(f.size()),
                            [&](std::ptrdiff_t i) { return f[i] * f[i]; });
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n)
{
    if (n > 0)
        omp_set_num_threads(n);
}

namespace serial {

void explicit_chemical(std::span<const double> phi, std::span<double> out, double alpha,
                       double beta, double stabilizer)
{
    for (std::size_t i = 0; i < phi.size(); ++i)
        out[i] = alpha * phi[i] * phi[i] * phi[i] - (beta + stabilizer) * phi[i];
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] * b[i];
}

void phase_update(std::span<Complex> phi, std::span<const Complex> chem,
                  std::span<const Complex> adv, std::span<const double> k, double dt,
                  double kappa, double stabilizer)
{
    for (std::size_t j = 0; j < phi.size(); ++j) {
        const double k2 = k[j] * k[j];
        phi[j] = (phi[j] - dt * k2 * chem[j] - dt * adv[j]) /
                 (1.0 + dt * kappa * k2 * k2 + dt * stabilizer * k2);
    }
}

void velocity_update(std::span<Complex> v, std::span<const Complex> rhs,
                     std::span<const double> k, double dt, double nu)
{
    for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = (v[j] + dt * rhs[j]) / (1.0 + dt * nu * k[j] * k[j]);
}

double energy_sum(std::span<const double> phi, std::span<const double> phi_x, double alpha,
                  double beta, double kappa, double dx)
{
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i)
        s += quartic(phi[i], alpha, beta) + 0.5 * kappa * phi_x[i] * phi_x[i];
    return s * dx;
}

double squared_sum(std::span<const double> f, double dx)
{
    double s = 0.0;
    for (double v : f)
        s += v * v;
    return s * dx;
}

} // namespace serial

} // namespace bch::kernels
