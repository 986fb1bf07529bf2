#include <doctest.h>

#include "bch/elliptic.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace bch;
using std::numbers::pi;

namespace {

// K(k) from the defining integral over s in [0, 1]; tanh-sinh copes with the
// endpoint singularity.
double k_by_quadrature(double k)
{
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(
        [k](double s, double one_minus_s) {
            const double oms = one_minus_s > 0 ? one_minus_s : 1.0 - s;
            return 1.0 / std::sqrt(oms * (1.0 + s) * (1.0 - k * k * s * s));
        },
        0.0, 1.0);
}

// Incomplete integral F(theta, k) by composite 30-point Gauss-Legendre; the
// integrand is analytic for k < 1.
double incomplete_f(double theta, double k)
{
    using Gauss = boost::math::quadrature::gauss<double, 30>;
    const auto f = [k](double z) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(z) * std::sin(z)); };
    const int panels = 16;
    double total = 0.0;
    for (int i = 0; i < panels; ++i)
        total += Gauss::integrate(f, theta * i / panels, theta * (i + 1) / panels);
    return total;
}

// sn(u, k) for 0 <= u <= K(k) by inverting the incomplete integral.
double sn_by_inversion(double u, double k)
{
    double lo = 0.0, hi = pi / 2;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (incomplete_f(mid, k) < u ? lo : hi) = mid;
    }
    return std::sin(0.5 * (lo + hi));
}

} // namespace

TEST_CASE("complete elliptic integral")
{
    CHECK(ellip_k(0.0) == doctest::Approx(pi / 2).epsilon(1e-15));
    for (double k : {0.1, 0.5, 0.9, 0.99}) {
        CAPTURE(k);
        CHECK(std::abs(ellip_k(k) - k_by_quadrature(k)) < 1e-10);
    }
    CHECK(ellip_k(0.999999) > 7.0);
    CHECK(ellip_k(0.999999) == doctest::Approx(k_by_quadrature(0.999999)).epsilon(1e-9));
    CHECK_THROWS_AS(ellip_k(1.0), std::domain_error);
    CHECK_THROWS_AS(ellip_k(-0.1), std::domain_error);
    // Complementary form agrees with the direct one.
    CHECK(ellip_k_complementary(std::sqrt(1 - 0.25)) == doctest::Approx(ellip_k(0.5)));
}

TEST_CASE("Jacobi sn limits")
{
    for (double u : {-2.0, -0.3, 0.0, 0.7, 1.9, 5.0}) {
        CHECK(jacobi_sn(u, 0.0) == doctest::Approx(std::sin(u)).epsilon(1e-15));
        CHECK(jacobi_sn(u, 1.0) == doctest::Approx(std::tanh(u)).epsilon(1e-15));
    }
}

TEST_CASE("Jacobi sn against quadrature inversion")
{
    const double k = 0.3;
    const double K = ellip_k(k);
    CHECK(jacobi_sn(K, k) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sn_by_inversion(K, k) == doctest::Approx(1.0).epsilon(1e-12));
    for (double k2 : {0.3, 0.8, 0.99}) {
        const double KK = ellip_k(k2);
        for (double frac : {0.1, 0.37, 0.6, 0.95}) {
            CAPTURE(k2);
            CAPTURE(frac);
            const double u = frac * KK;
            CHECK(std::abs(jacobi_sn(u, k2) - sn_by_inversion(u, k2)) < 1e-11);
        }
    }
}

TEST_CASE("Jacobi functions: symmetry, period, identities")
{
    for (double k : {0.2, 0.7, 0.95, 0.999999}) {
        const double K = ellip_k(k);
        for (double u : {0.13, 0.9, 2.2, 7.5, 31.0}) {
            CAPTURE(k);
            CAPTURE(u);
            const auto j = jacobi(u, k);
            CHECK(std::abs(j.sn) <= 1.0);
            CHECK(jacobi_sn(-u, k) == doctest::Approx(-j.sn).epsilon(1e-13));
            CHECK(jacobi_sn(u + 4 * K, k) == doctest::Approx(j.sn).epsilon(1e-11));
            CHECK(j.sn * j.sn + j.cn * j.cn == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(j.dn * j.dn + k * k * j.sn * j.sn == doctest::Approx(1.0).epsilon(1e-14));
            // d sn / du = cn dn
            const double h = 1e-5;
            const double fd = (jacobi_sn(u + h, k) - jacobi_sn(u - h, k)) / (2 * h);
            CHECK(fd == doctest::Approx(j.cn * j.dn).epsilon(1e-8).scale(1.0));
        }
    }
}
