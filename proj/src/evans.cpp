#include "bch/evans.hpp"

#include "bch/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bch {

namespace {

constexpr int kThetaGrid = 128;
constexpr int kMaxWiden = 40;
constexpr int kMaxBisect = 200;
constexpr double kRelTol = 1e-7;

// b, b', b'' sampled at every RK4 half step. Independent of lambda, so one
// table serves every spectrum test at a given amplitude.
struct Coefficients {
    double period = 0.0;
    double ell = 0.0; // sqrt(kappa)
    int steps = 0;
    std::vector<std::array<double, 3>> b;
};

Coefficients coefficients(const WaveProfile& wave, int rk_steps)
{
    if (rk_steps < 256)
        throw std::invalid_argument("monodromy needs at least 256 RK4 steps");
    const Params& p = wave.params();
    Coefficients c;
    c.period = wave.period();
    c.ell = std::sqrt(p.kappa);
    c.steps = rk_steps;
    c.b.resize(2 * static_cast<std::size_t>(rk_steps) + 1);
    const double half = c.period / (2.0 * rk_steps);
    for (std::size_t j = 0; j < c.b.size(); ++j) {
        const WaveJet jet = wave.jet(half * static_cast<double>(j));
        const double b0 = p.d2F(jet.value);
        const double b1 = 6.0 * p.alpha * jet.value * jet.d1;
        const double b2 = 6.0 * p.alpha * (jet.d1 * jet.d1 + jet.value * jet.d2);
        c.b[j] = {b0, b1, b2};
    }
    return c;
}

// y' = A y for y = (w, l w', l^2 w'', l^3 w'''): l A has unit superdiagonal
// and last row (l^2 (b'' - lambda), 2 l b', b, 0).
inline Eigen::Matrix4d system_matrix(const std::array<double, 3>& b, double lambda, double ell)
{
    Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
    const double inv = 1.0 / ell;
    a(0, 1) = inv;
    a(1, 2) = inv;
    a(2, 3) = inv;
    a(3, 0) = ell * (b[2] - lambda);
    a(3, 1) = 2.0 * b[1];
    a(3, 2) = b[0] * inv;
    return a;
}

// Index pairs (i < j) spanning the 2-vectors e_i ^ e_j.
constexpr std::array<std::array<int, 2>, 6> kPairs{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// Second compound: entry (I, J) is the 2x2 minor of rows I and columns J.
Eigen::Matrix<double, 6, 6> compound(const Eigen::Matrix4d& m)
{
    Eigen::Matrix<double, 6, 6> c;
    for (int r = 0; r < 6; ++r) {
        const auto [i, j] = kPairs[static_cast<std::size_t>(r)];
        for (int q = 0; q < 6; ++q) {
            const auto [k, l] = kPairs[static_cast<std::size_t>(q)];
            c(r, q) = m(i, k) * m(j, l) - m(i, l) * m(j, k);
        }
    }
    return c;
}

Monodromy integrate(const Coefficients& c, double lambda)
{
    const double h = c.period / c.steps;
    const Eigen::Matrix4d id = Eigen::Matrix4d::Identity();
    Monodromy m{};
    m.matrix.setIdentity();
    m.inverse.setIdentity();
    m.compound2.setIdentity();
    m.determinant = 1.0;
    m.period = c.period;
    m.lambda = lambda;
    for (int s = 0; s < c.steps; ++s) {
        const auto j = 2 * static_cast<std::size_t>(s);
        const Eigen::Matrix4d a0 = system_matrix(c.b[j], lambda, c.ell);
        const Eigen::Matrix4d a1 = system_matrix(c.b[j + 1], lambda, c.ell);
        const Eigen::Matrix4d a2 = system_matrix(c.b[j + 2], lambda, c.ell);
        // RK4 applied to the identity gives the step propagator.
        const Eigen::Matrix4d k1 = a0;
        const Eigen::Matrix4d k2 = a1 * (id + 0.5 * h * k1);
        const Eigen::Matrix4d k3 = a1 * (id + 0.5 * h * k2);
        const Eigen::Matrix4d k4 = a2 * (id + h * k3);
        const Eigen::Matrix4d step = id + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        m.matrix = step * m.matrix;
        m.inverse = m.inverse * step.inverse();
        m.compound2 = compound(step) * m.compound2;
        m.determinant *= step.determinant();
    }
    if (!m.matrix.allFinite() || !m.inverse.allFinite() || !m.compound2.allFinite())
        throw NumericalError("monodromy integration overflowed with " + std::to_string(c.steps) +
                             " RK4 steps");
    return m;
}

LeadingEigenvalue search(const Coefficients& c, const Params& params, double hint)
{
    const double top = params.beta * params.beta / (4.0 * params.kappa);
    const double ceiling = top * (1.0 + 1e-6);
    int tests = 0;
    auto test = [&](double lambda) {
        ++tests;
        return spectrum_test(integrate(c, lambda));
    };

    double hi = std::min(std::max(hint, 0.0) * 1.01, ceiling);
    if (hi <= 0.0)
        hi = ceiling;
    for (int i = 0; test(hi).in_spectrum; ++i) {
        if (hi >= ceiling || i >= kMaxWiden)
            throw NumericalError("leading eigenvalue: no upper bracket below beta^2/(4 kappa)");
        hi = std::min(2.0 * hi, ceiling);
    }

    double width = std::max(0.02 * hi, 1e-12 * top);
    double lo = hi - width;
    SpectrumTest lo_test{};
    bool found = false;
    for (int i = 0; i < kMaxWiden; ++i) {
        if (lo <= 0.0) {
            // lambda = 0 is always in the spectrum (translation mode).
            lo = 0.0;
            lo_test = test(0.0);
            found = true;
            break;
        }
        lo_test = test(lo);
        if (lo_test.in_spectrum) {
            found = true;
            break;
        }
        width *= 2.0;
        lo = hi - width;
    }
    if (!found)
        throw NumericalError("leading eigenvalue: no lower bracket after widening");

    for (int i = 0; i < kMaxBisect && hi - lo > kRelTol * hi && hi - lo > 1e-14 * top; ++i) {
        const double mid = 0.5 * (lo + hi);
        const SpectrumTest t = test(mid);
        if (t.in_spectrum) {
            lo = mid;
            lo_test = t;
        } else {
            hi = mid;
        }
    }
    return {0.5 * (lo + hi), lo_test.theta_min / c.period, tests};
}

} // namespace

Monodromy monodromy(double lambda, const WaveProfile& wave, int rk_steps)
{
    return integrate(coefficients(wave, rk_steps), lambda);
}

Monodromy monodromy(double lambda, double amplitude, const Params& params, int rk_steps)
{
    return monodromy(lambda, WaveProfile(amplitude, params), rk_steps);
}

std::array<double, 4> Monodromy::characteristic() const
{
    // e3 = tr adj(M) = det(M) tr(M^{-1}).
    return {matrix.trace(), compound2.trace(), determinant * inverse.trace(), determinant};
}

std::complex<double> evans(const Monodromy& m, double xi)
{
    const std::complex<double> z = std::polar(1.0, xi * m.period);
    const auto c = m.characteristic();
    return (((z - c[0]) * z + c[1]) * z - c[2]) * z + c[3];
}

std::complex<double> evans(double lambda, double xi, double amplitude, const Params& params)
{
    return evans(monodromy(lambda, amplitude, params), xi);
}

double tracking_function(const Monodromy& m, double theta)
{
    return (std::polar(1.0, -2.0 * theta) * evans(m, theta / m.period)).real();
}

SpectrumTest spectrum_test(const Monodromy& m)
{
    std::array<double, kThetaGrid> r{};
    const double dtheta = 2.0 * std::numbers::pi / kThetaGrid;
    for (int i = 0; i < kThetaGrid; ++i)
        r[static_cast<std::size_t>(i)] = tracking_function(m, dtheta * i);
    const auto [min_it, max_it] = std::minmax_element(r.begin(), r.end());
    const auto imin = static_cast<int>(min_it - r.begin());
    const auto imax = static_cast<int>(max_it - r.begin());

    auto refine = [&](int i, double sign) {
        const auto f = [&](double t) { return sign * tracking_function(m, t); };
        const auto res = boost::math::tools::brent_find_minima(f, dtheta * (i - 1),
                                                               dtheta * (i + 1), 52);
        return std::pair{res.first, sign * res.second};
    };

    SpectrumTest out{};
    out.r_min = *min_it;
    out.r_max = *max_it;
    out.theta_min = dtheta * imin;
    if (out.r_min > 0.0) {
        const auto [t, v] = refine(imin, 1.0);
        out.theta_min = t;
        out.r_min = std::min(out.r_min, v);
    } else if (out.r_max < 0.0) {
        const auto [t, v] = refine(imax, -1.0);
        out.theta_min = t;
        out.r_max = std::max(out.r_max, v);
    } else {
        out.theta_min = std::abs(out.r_min) < std::abs(out.r_max) ? dtheta * imin : dtheta * imax;
    }
    out.theta_min = std::remainder(out.theta_min, 2.0 * std::numbers::pi);
    out.theta_min = std::abs(out.theta_min);
    out.in_spectrum = out.r_min <= 0.0 && out.r_max >= 0.0;
    return out;
}

LeadingEigenvalue leading_eigenvalue(double amplitude, const Params& params, double hint,
                                     int rk_steps)
{
    params.validate();
    return search(coefficients(WaveProfile(amplitude, params), rk_steps), params, hint);
}

EigTable build_eig_table(const Params& params, double step, int rk_steps)
{
    params.validate();
    if (!(step > 0.0) || step >= params.binodal())
        throw std::invalid_argument("amplitude step must lie in (0, binodal)");
    EigTable t;
    t.params = params;
    for (int i = 1;; ++i) {
        const double a = step * i;
        if (a >= params.binodal() * (1.0 - 1e-9))
            break;
        t.amplitudes.push_back(a);
    }
    const std::size_t n = t.amplitudes.size();
    t.periods.resize(n);
    t.lambda_max.assign(n, 0.0);
    t.xi_max.assign(n, 0.0);

    // Coarse continuation pass: every tenth amplitude plus the first.
    std::vector<std::size_t> coarse;
    for (std::size_t i = 0; i < n; i += 10)
        coarse.push_back(i);
    if (coarse.back() != n - 1)
        coarse.push_back(n - 1);
    std::vector<bool> done(n, false);
    double hint = params.beta * params.beta / (4.0 * params.kappa);
    for (std::size_t i : coarse) {
        const auto r = leading_eigenvalue(t.amplitudes[i], params, hint, rk_steps);
        t.lambda_max[i] = r.lambda;
        t.xi_max[i] = r.xi;
        done[i] = true;
        hint = r.lambda;
    }

    // Fine pass: each amplitude starts from the coarse value just below it,
    // which bounds it from above when lambda_max decreases in a.
    std::vector<double> hints(n);
    double last = params.beta * params.beta / (4.0 * params.kappa);
    for (std::size_t i = 0; i < n; ++i) {
        if (done[i])
            last = t.lambda_max[i];
        hints[i] = last;
    }
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(n); ++s) {
        const auto i = static_cast<std::size_t>(s);
        if (done[i])
            continue;
        try {
            const auto r = leading_eigenvalue(t.amplitudes[i], params, hints[i], rk_steps);
            t.lambda_max[i] = r.lambda;
            t.xi_max[i] = r.xi;
        } catch (const std::exception& e) {
#pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty())
        throw NumericalError(failure);
    for (std::size_t i = 0; i < n; ++i)
        t.periods[i] = period_of_amplitude(t.amplitudes[i], params);
    return t;
}

EigTable rescale_table(const EigTable& table, double kappa_new)
{
    if (!(table.kappa_ref() > 0.0) || !(kappa_new > 0.0))
        throw std::invalid_argument("kappa must be positive");
    EigTable out = table;
    out.params.kappa = kappa_new;
    const double factor = table.kappa_ref() / kappa_new;
    for (std::size_t i = 0; i < out.amplitudes.size(); ++i) {
        out.lambda_max[i] = table.lambda_max[i] * factor;
        out.xi_max[i] = table.xi_max[i] * std::sqrt(factor);
        out.periods[i] = period_of_amplitude(out.amplitudes[i], out.params);
    }
    return out;
}

} // namespace bch
