#include "bch/energy.hpp"

#include "bch/errors.hpp"
#include "bch/kernels.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bch {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 10>;

constexpr double kCapTolerance = 1e-4;
constexpr double kGapFraction = 1.0 / 200.0;
constexpr int kBisectionSteps = 60;
constexpr int kMaxRefinePasses = 40;

double energy_density_integral(const WaveProfile& w, double from, double to)
{
    const Params& p = w.params();
    const double kink_width = std::sqrt(2.0 * p.kappa / p.beta);
    const double panel = std::min(w.period() / 16.0, 0.5 * kink_width);
    const auto panels = static_cast<std::size_t>(std::ceil((to - from) / panel));
    const double h = (to - from) / static_cast<double>(panels);
    auto density = [&](double x) {
        const double s = w.slope(x);
        return p.F(w.value(x)) + 0.5 * p.kappa * s * s;
    };
    double total = 0.0;
    for (std::size_t i = 0; i < panels; ++i) {
        const double lo = from + h * static_cast<double>(i);
        total += Gauss::integrate(density, lo, lo + h);
    }
    return total;
}

} // namespace

double free_energy(const Field& phi, const Params& params)
{
    for (double v : phi.values)
        if (!std::isfinite(v))
            throw NumericalError("free energy of a field with non-finite samples");
    const Field phi_x = derivative(phi, 1);
    return kernels::energy_sum(phi.values, phi_x.values, params.alpha, params.beta, params.kappa,
                               phi.grid.dx());
}

double wave_energy(double amplitude, const Params& params)
{
    params.validate();
    if (amplitude == 0.0)
        return params.max_energy();
    return wave_energy(WaveProfile(amplitude, params));
}

double wave_energy(const WaveProfile& wave)
{
    // The density is even because the wave is odd.
    return 2.0 * energy_density_integral(wave, 0.0, wave.params().half_length);
}

double energy_of_period(double period, const Params& params)
{
    params.validate();
    const double p_min = minimum_period(params);
    if (!(period >= p_min))
        throw std::domain_error("period below the minimum period");
    if (period == p_min)
        return params.max_energy();
    return wave_energy(WaveProfile::from_period(period, params));
}

EnergyScale energy_scale(const Params& params)
{
    params.validate();
    EnergyScale s{};
    s.e_max = params.max_energy();
    s.e_min = kink(params).energy;
    s.e_spinodal = wave_energy(spinodal(params).a_s, params);
    return s;
}

double plateau_slope_bound(const WaveProfile& wave)
{
    const Params& params = wave.params();
    const double a = wave.amplitude();
    const double k = wave.modulus();
    const double kp = wave.complementary_modulus();
    const double delta = 1.0 / k;
    const double delta_minus_one = kp * kp / ((1.0 + k) * k);
    return a * a * a * std::sqrt(params.alpha * params.kappa) * std::pow(1.0 + delta, 1.5) *
           delta * delta * delta * delta_minus_one / (2.0 * params.half_length);
}

EnergyPeriodTable EnergyPeriodTable::build(const Params& params, std::size_t initial_points)
{
    params.validate();
    if (initial_points < 2)
        throw std::invalid_argument("energy table needs at least two points");

    EnergyPeriodTable t;
    t.params_ = params;
    t.scale_ = energy_scale(params);
    const double range = t.scale_.e_max - t.scale_.e_min;
    const double p_min = minimum_period(params);

    // Cap: lengthen the period geometrically until the energy has settled
    // onto the kink energy.
    double p_cap = 2.0 * params.half_length;
    for (int it = 0; it < 60; ++it) {
        if (std::abs(energy_of_period(p_cap, params) - t.scale_.e_min) < kCapTolerance * range)
            break;
        p_cap *= 1.25;
    }

    // Geometric spacing: the staircase steps sit near p = 2L/m, crowding
    // towards p_min.
    std::vector<double> periods(initial_points);
    for (std::size_t i = 0; i < initial_points; ++i)
        periods[i] = p_min * std::pow(p_cap / p_min, static_cast<double>(i) /
                                                         static_cast<double>(initial_points - 1));
    periods.front() = p_min;
    periods.back() = p_cap;

    auto evaluate = [&](const std::vector<double>& ps, std::vector<double>& as,
                        std::vector<double>& es) {
        as.assign(ps.size(), 0.0);
        es.assign(ps.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(ps.size()); ++i) {
            const double p = ps[static_cast<std::size_t>(i)];
            if (p <= p_min) {
                as[static_cast<std::size_t>(i)] = 0.0;
                es[static_cast<std::size_t>(i)] = params.max_energy();
            } else {
                const WaveProfile w = WaveProfile::from_period(p, params);
                as[static_cast<std::size_t>(i)] = w.amplitude();
                es[static_cast<std::size_t>(i)] = wave_energy(w);
            }
        }
    };

    std::vector<double> amplitudes, energies;
    evaluate(periods, amplitudes, energies);

    const double max_gap = kGapFraction * range;
    for (int pass = 0; pass < kMaxRefinePasses; ++pass) {
        std::vector<double> midpoints;
        for (std::size_t i = 0; i + 1 < periods.size(); ++i)
            if (std::abs(energies[i + 1] - energies[i]) >= max_gap)
                midpoints.push_back(0.5 * (periods[i] + periods[i + 1]));
        if (midpoints.empty())
            break;
        std::vector<double> mid_a, mid_e;
        evaluate(midpoints, mid_a, mid_e);

        std::vector<double> np, na, ne;
        np.reserve(periods.size() + midpoints.size());
        std::size_t m = 0;
        for (std::size_t i = 0; i < periods.size(); ++i) {
            np.push_back(periods[i]);
            na.push_back(amplitudes[i]);
            ne.push_back(energies[i]);
            if (m < midpoints.size() && i + 1 < periods.size() && midpoints[m] > periods[i] &&
                midpoints[m] < periods[i + 1]) {
                np.push_back(midpoints[m]);
                na.push_back(mid_a[m]);
                ne.push_back(mid_e[m]);
                ++m;
            }
        }
        periods = std::move(np);
        amplitudes = std::move(na);
        energies = std::move(ne);
    }

    t.periods_ = std::move(periods);
    t.amplitudes_ = std::move(amplitudes);
    t.energies_ = std::move(energies);
    t.envelope_.resize(t.energies_.size());
    double running = t.energies_.front();
    for (std::size_t i = 0; i < t.energies_.size(); ++i) {
        running = std::min(running, t.energies_[i]);
        t.envelope_[i] = running;
        if (t.energies_[i] > t.scale_.e_max * (1.0 + 1e-12))
            ++t.above_max_;
    }
    return t;
}

double EnergyPeriodTable::rounding_floor() const noexcept
{
    return 64.0 * std::numeric_limits<double>::epsilon() * scale_.e_max;
}

PeriodLookup EnergyPeriodTable::period_from_energy(double energy) const
{
    const bool clamped = !(energy > scale_.e_min) || energy > scale_.e_max;
    if (energy >= energies_.front())
        return {periods_.front(), clamped};
    // First table node at or below the target: the envelope is non-increasing.
    const auto it = std::find_if(envelope_.begin(), envelope_.end(),
                                 [energy](double e) { return e <= energy; });
    if (it == envelope_.end())
        return {periods_.back(), true};
    const auto i = static_cast<std::size_t>(it - envelope_.begin());
    double lo = periods_[i - 1];
    double hi = periods_[i];
    for (int k = 0; k < kBisectionSteps; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        (energy_of_period(mid, params_) <= energy ? hi : lo) = mid;
    }
    return {hi, clamped};
}

PeriodLookup EnergyPeriodTable::interpolate_period(double energy) const
{
    const bool clamped = !(energy > scale_.e_min) || energy > scale_.e_max;
    if (energy >= envelope_.front())
        return {periods_.front(), clamped};
    const auto it = std::lower_bound(envelope_.begin(), envelope_.end(), energy,
                                     [](double env, double e) { return env > e; });
    if (it == envelope_.end())
        return {periods_.back(), true};
    const auto i = static_cast<std::size_t>(it - envelope_.begin());
    const double e0 = envelope_[i - 1];
    const double e1 = envelope_[i];
    const double w = e0 > e1 ? (e0 - energy) / (e0 - e1) : 1.0;
    return {periods_[i - 1] + w * (periods_[i] - periods_[i - 1]), clamped};
}

double kohn_otto_length(const Field& phi)
{
    const Grid& g = phi.grid;
    const double scale = std::max(1.0, max_abs(phi));
    if (std::abs(mean(phi)) > 1e-10 * scale)
        throw std::invalid_argument("Kohn-Otto length requires a mean-zero field");

    Spectrum s = to_spectral(phi);
    s[0] = 0.0;
    s.back() = 0.0;
    for (std::size_t j = 1; j + 1 < s.size(); ++j)
        s[j] /= Complex(0.0, g.wavenumber(j));
    Field antiderivative = from_spectral(g, s);

    std::vector<double> sorted = antiderivative.values;
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid),
                     sorted.end());
    const double c = sorted[mid];

    double total = 0.0;
    for (double v : antiderivative.values)
        total += std::abs(v - c);
    return total * g.dx() / g.length();
}

} // namespace bch
