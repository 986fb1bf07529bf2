#include "bch/waves.hpp"

#include "bch/elliptic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bch {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kQuadTol = 1e-14;
constexpr unsigned kQuadDepth = 20;

void require_amplitude(double a, const Params& p)
{
    if (!(a > 0.0) || !(a < p.binodal()))
        throw std::domain_error("amplitude must lie strictly between 0 and the binodal value");
}

// k'^2 = 2 (beta - alpha a^2) / (2 beta - alpha a^2), formed without cancellation.
double complementary_squared(double a, const Params& p)
{
    const double aa = p.alpha * a * a;
    return 2.0 * (p.beta - aa) / (2.0 * p.beta - aa);
}

// Period with +infinity at (or numerically at) the binodal amplitude.
double period_or_infinity(double a, const Params& p)
{
    const double kp2 = complementary_squared(a, p);
    if (!(kp2 > 0.0))
        return std::numeric_limits<double>::infinity();
    return 4.0 * ellip_k_complementary(std::sqrt(kp2)) / wave_scale(a, p);
}

// Period in terms of the moduli: h^2 = beta / (kappa (1 + k^2)).
double period_of_moduli(double k, double kp, const Params& p)
{
    return 4.0 * ellip_k_complementary(kp) * std::sqrt(p.kappa * (1.0 + k * k) / p.beta);
}

double amplitude_of_modulus(double k, const Params& p)
{
    return std::sqrt(2.0 * p.beta / p.alpha) * k / std::sqrt(1.0 + k * k);
}

struct Moduli {
    double k;
    double kp;
};

// Moduli with period_of_moduli == period. Short periods are bisected in k,
// long ones in log k', so both ends of the family keep full relative accuracy.
Moduli moduli_of_period(double period, const Params& p)
{
    const double p_min = minimum_period(p);
    if (!(period > p_min) || !std::isfinite(period))
        throw std::domain_error("period must exceed the minimum period");
    const double split = std::sqrt(0.5);
    auto from_k = [](double k) { return Moduli{k, std::sqrt((1.0 - k) * (1.0 + k))}; };
    auto from_kp = [](double kp) { return Moduli{std::sqrt((1.0 - kp) * (1.0 + kp)), kp}; };

    if (period <= period_of_moduli(split, split, p)) {
        double lo = 0.0, hi = split;
        for (int it = 0; it < 2000; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            const Moduli m = from_k(mid);
            (period_of_moduli(m.k, m.kp, p) < period ? lo : hi) = mid;
        }
        return from_k(0.5 * (lo + hi));
    }
    constexpr double kLogFloor = -690.0;
    if (period > period_of_moduli(1.0, std::exp(kLogFloor), p))
        throw std::domain_error("period too long to represent");
    double lo = kLogFloor, hi = std::log(split);
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const Moduli m = from_kp(std::exp(mid));
        (period_of_moduli(m.k, m.kp, p) < period ? hi : lo) = mid;
    }
    return from_kp(std::exp(0.5 * (lo + hi)));
}

} // namespace

void Params::validate() const
{
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(alpha) || !positive(beta) || !positive(kappa) || !positive(half_length))
        throw std::invalid_argument("alpha, beta, kappa and L must be positive and finite");
    if (!(nu >= 0.0) || !std::isfinite(nu))
        throw std::invalid_argument("viscosity must be non-negative");
    if (!std::isfinite(coupling))
        throw std::invalid_argument("coupling constant must be finite");
    if (mobility != 1.0)
        throw std::invalid_argument("only unit mobility M == 1 is supported");
}

double Params::binodal() const noexcept { return std::sqrt(beta / alpha); }

double Params::F(double phi) const noexcept
{
    const double d = phi * phi - beta / alpha;
    return 0.25 * alpha * d * d;
}

double Params::dF(double phi) const noexcept { return alpha * phi * phi * phi - beta * phi; }
double Params::d2F(double phi) const noexcept { return 3.0 * alpha * phi * phi - beta; }
double Params::d3F(double phi) const noexcept { return 6.0 * alpha * phi; }

double Params::max_energy() const noexcept { return 2.0 * half_length * F(0.0); }

double wave_modulus_squared(double a, const Params& p)
{
    const double aa = p.alpha * a * a;
    return aa / (2.0 * p.beta - aa);
}

double wave_scale(double a, const Params& p)
{
    return std::sqrt(p.alpha / (2.0 * p.kappa)) * std::sqrt(2.0 * p.beta / p.alpha - a * a);
}

WaveProfile::WaveProfile(double amplitude, const Params& params)
    : params_(params), amplitude_(amplitude)
{
    params_.validate();
    require_amplitude(amplitude, params_);
    modulus_ = std::sqrt(wave_modulus_squared(amplitude, params_));
    complementary_ = std::sqrt(complementary_squared(amplitude, params_));
    scale_ = wave_scale(amplitude, params_);
    period_ = 4.0 * ellip_k_complementary(complementary_) / scale_;
}

double WaveProfile::value(double x) const
{
    return amplitude_ * jacobi(scale_ * x, modulus_, complementary_).sn;
}

double WaveProfile::slope(double x) const
{
    const auto j = jacobi(scale_ * x, modulus_, complementary_);
    return amplitude_ * scale_ * j.cn * j.dn;
}

WaveJet WaveProfile::jet(double x) const
{
    const auto j = jacobi(scale_ * x, modulus_, complementary_);
    const double v = amplitude_ * j.sn;
    const double d1 = amplitude_ * scale_ * j.cn * j.dn;
    const double d2 = params_.dF(v) / params_.kappa;
    const double d3 = params_.d2F(v) * d1 / params_.kappa;
    return {v, d1, d2, d3};
}

WaveProfile::WaveProfile(const Params& params, double k, double kp)
    : params_(params), modulus_(k), complementary_(kp)
{
    amplitude_ = amplitude_of_modulus(k, params_);
    scale_ = std::sqrt(params_.beta / (params_.kappa * (1.0 + k * k)));
    period_ = 4.0 * ellip_k_complementary(kp) / scale_;
}

WaveProfile WaveProfile::from_period(double period, const Params& params)
{
    params.validate();
    const Moduli m = moduli_of_period(period, params);
    return WaveProfile(params, m.k, m.kp);
}

Field WaveProfile::sample(const Grid& grid) const
{
    return bch::sample(grid, [this](double x) { return value(x); });
}

double period_of_amplitude(double amplitude, const Params& params)
{
    params.validate();
    require_amplitude(amplitude, params);
    return period_or_infinity(amplitude, params);
}

double period_by_quadrature(double amplitude, const Params& params)
{
    params.validate();
    require_amplitude(amplitude, params);
    const double a = amplitude;
    const Params& p = params;
    // With y = a sin(t), F(y) - F(a) = a^2 cos^2(t) (beta/2 - alpha a^2 (1 + sin^2 t)/4)
    // and the a cos(t) factors cancel against dy.
    auto integrand = [&](double t) {
        const double s = std::sin(t);
        return 1.0 / std::sqrt(0.5 * p.beta - 0.25 * p.alpha * a * a * (1.0 + s * s));
    };
    const double integral = gauss_kronrod<double, 31>::integrate(
        integrand, 0.0, std::numbers::pi / 2, kQuadDepth, kQuadTol);
    return 4.0 * std::sqrt(0.5 * p.kappa) * integral;
}

double minimum_period(const Params& params)
{
    return 2.0 * std::numbers::pi * std::sqrt(params.kappa / params.beta);
}

double amplitude_of_period(double period, const Params& params)
{
    params.validate();
    return amplitude_of_modulus(moduli_of_period(period, params).k, params);
}

double period_derivative(double amplitude, const Params& params)
{
    params.validate();
    require_amplitude(amplitude, params);
    const double a = amplitude;
    const Params& p = params;
    // (F'(y) - F'(a)) / (F(y) - F(a))^{3/2} with the (a - y) factors pulled out
    // analytically; y = a sin(t) leaves a bounded integrand.
    auto integrand = [&](double t) {
        const double s = std::sin(t);
        const double y = a * s;
        const double num = p.beta - p.alpha * (y * y + a * y + a * a);
        const double q = (a + y) * (0.5 * p.beta - 0.25 * p.alpha * (y * y + a * a));
        return num * std::sqrt(a) * std::sqrt(1.0 + s) / (q * std::sqrt(q));
    };
    const double integral = gauss_kronrod<double, 31>::integrate(
        integrand, 0.0, std::numbers::pi / 2, kQuadDepth, kQuadTol);
    const double root = std::sqrt(2.0 * p.kappa);
    return 2.0 * root / std::sqrt(p.F(0.0) - p.F(a)) - root * integral;
}

double period_derivative_lower_bound(double amplitude, const Params& params)
{
    params.validate();
    require_amplitude(amplitude, params);
    const double a = amplitude;
    const double delta = std::sqrt(2.0 * params.beta / (params.alpha * a * a) - 1.0);
    return 4.0 * std::sqrt(params.kappa) /
           (a * a * std::sqrt(params.alpha) * std::pow(1.0 + delta, 1.5)) /
           (delta * (delta - 1.0));
}

SpinodalData spinodal(const Params& params)
{
    params.validate();
    SpinodalData s{};
    s.p_min = minimum_period(params);
    s.p_s = 2.0 * std::numbers::pi * std::sqrt(2.0 * params.kappa / params.beta);
    s.a_s = amplitude_of_period(s.p_s, params);
    s.lambda_top = params.beta * params.beta / (4.0 * params.kappa);
    return s;
}

double kink_profile(double x, const Params& p)
{
    return p.binodal() * std::tanh(std::sqrt(p.beta / (2.0 * p.kappa)) * x);
}

double kink_slope(double x, const Params& p)
{
    const double r = std::sqrt(p.beta / (2.0 * p.kappa));
    const double sech = 1.0 / std::cosh(r * x);
    return p.binodal() * r * sech * sech;
}

KinkData kink(const Params& params)
{
    params.validate();
    const double kl = kink_profile(params.half_length, params);
    KinkData k{};
    k.energy = std::sqrt(2.0 * params.kappa * params.alpha) * kl *
               (params.beta / params.alpha - kl * kl / 3.0);
    k.energy_infinite = 2.0 / 3.0 * params.beta * params.beta / params.alpha *
                        std::sqrt(2.0 * params.kappa / params.beta);
    k.width = std::sqrt(2.0 * params.kappa / params.beta);
    return k;
}

} // namespace bch
