#include "bch/elliptic.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bch {

namespace {

constexpr int kMaxAgmSteps = 32;

double agm(double a, double b)
{
    for (int i = 0; i < kMaxAgmSteps; ++i) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        a = an;
        b = bn;
        if (std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * a)
            break;
    }
    return 0.5 * (a + b);
}

} // namespace

double ellip_k_complementary(double kp)
{
    if (!(kp > 0.0) || kp > 1.0)
        throw std::domain_error("ellip_k: complementary modulus must lie in (0, 1]");
    return std::numbers::pi / (2.0 * agm(1.0, kp));
}

double ellip_k(double k)
{
    if (!(k >= 0.0) || k >= 1.0)
        throw std::domain_error("ellip_k: modulus must lie in [0, 1)");
    return ellip_k_complementary(std::sqrt((1.0 - k) * (1.0 + k)));
}

JacobiValues jacobi(double u, double k, double kp)
{
    if (!std::isfinite(u) || !(k >= 0.0) || k > 1.0)
        throw std::domain_error("jacobi: non-finite argument or modulus outside [0, 1]");
    if (k == 0.0)
        return {std::sin(u), std::cos(u), 1.0};
    if (kp == 0.0) {
        const double sech = 1.0 / std::cosh(u);
        return {std::tanh(u), sech, sech};
    }

    // Reduce into one real period 4K so the amplitude recursion stays small.
    const double quarter = ellip_k_complementary(kp);
    const double full = 4.0 * quarter;
    u -= full * std::round(u / full);

    // Descending Landen sequence (Abramowitz & Stegun 16.4).
    std::array<double, kMaxAgmSteps + 1> a{};
    std::array<double, kMaxAgmSteps + 1> c{};
    a[0] = 1.0;
    double b = kp;
    c[0] = k;
    int n = 0;
    while (n < kMaxAgmSteps &&
           std::abs(c[static_cast<std::size_t>(n)]) > std::numeric_limits<double>::epsilon()) {
        const auto i = static_cast<std::size_t>(n);
        a[i + 1] = 0.5 * (a[i] + b);
        c[i + 1] = 0.25 * c[i] * c[i] / a[i + 1];
        b = std::sqrt(a[i] * b);
        ++n;
    }
    double phi = std::ldexp(a[static_cast<std::size_t>(n)] * u, n);
    for (int i = n; i > 0; --i) {
        const auto idx = static_cast<std::size_t>(i);
        phi = 0.5 * (phi + std::asin(c[idx] / a[idx] * std::sin(phi)));
    }
    const double sn = std::sin(phi);
    const double cn = std::cos(phi);
    // dn^2 = 1 - k^2 sn^2 = k'^2 + k^2 cn^2; the second form has no cancellation.
    const double dn = std::sqrt(kp * kp + k * k * cn * cn);
    return {sn, cn, dn};
}

JacobiValues jacobi(double u, double k)
{
    if (!(k >= 0.0) || k > 1.0)
        throw std::domain_error("jacobi: modulus outside [0, 1]");
    return jacobi(u, k, std::sqrt((1.0 - k) * (1.0 + k)));
}

double jacobi_sn(double u, double k) { return jacobi(u, k).sn; }

} // namespace bch
