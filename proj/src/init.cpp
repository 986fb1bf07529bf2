#include "bch/init.hpp"

#include "bch/energy.hpp"
#include "bch/solver.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bch {

namespace {

constexpr double kMinStep = 1e-12;

} // namespace

void InitRecipe::validate() const
{
    if (!(sigma > 0.0))
        throw std::invalid_argument("sigma must be positive");
    if (!(energy_target_frac > 0.0 && energy_target_frac <= 1.0))
        throw std::invalid_argument("energy_target_frac must lie in (0, 1]");
    if (!(energy_tol > 0.0))
        throw std::invalid_argument("energy_tol must be positive");
    if (fourier_cutoff < 1)
        throw std::invalid_argument("fourier_cutoff must be at least 1");
    if (!(initial_dt > 0.0))
        throw std::invalid_argument("initial_dt must be positive");
    if (!(stabilizer >= 0.0))
        throw std::invalid_argument("stabilizer must be non-negative");
}

double NormalStream::uniform()
{
    // 53 random bits mapped to (0, 1].
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 1.0 - u;
}

double NormalStream::next()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

Field random_phase_init(const InitRecipe& recipe, const Grid& grid)
{
    recipe.validate();
    NormalStream normal(recipe.seed);
    Field phi(grid);
    for (double& v : phi.values)
        v = recipe.sigma * normal.next();
    Spectrum s(grid.modes());
    grid.forward(phi.values, s);
    dealias(grid, s);
    grid.inverse_inplace(s, phi.values);
    return phi;
}

PreEvolution pre_evolve_to_energy(const Field& phi, const InitRecipe& recipe,
                                  const Params& params)
{
    recipe.validate();
    params.validate();
    const double target = recipe.energy_target_frac * params.max_energy();
    const double tol = recipe.energy_tol;

    PreEvolution out{phi, free_energy(phi, params), 0.0, 0, 0, false, {}};
    if (std::abs(out.energy - target) <= tol) {
        out.converged = true;
        return out;
    }
    if (out.energy < target - tol)
        throw std::domain_error("initial energy is already below the pre-evolution target");

    State state(phi, params, recipe.stabilizer);
    Stepper stepper(phi.grid);
    double dt = recipe.initial_dt;
    while (true) {
        State trial = state;
        stepper.advance(trial, dt);
        const double e = free_energy(trial.phi, params);
        if (e < target - tol) {
            ++out.rejections;
            dt *= 0.5;
            if (dt < kMinStep)
                break;
            continue;
        }
        const bool stalled = !(e < out.energy);
        state = std::move(trial);
        ++out.steps;
        out.energy = e;
        out.accepted_energies.push_back(e);
        if (std::abs(e - target) <= tol) {
            out.converged = true;
            break;
        }
        if (stalled)
            break;
    }
    out.phi = std::move(state.phi);
    out.time = state.t;
    return out;
}

double bump_constant()
{
    const double s = std::sqrt(2.0 - std::sqrt(3.0));
    return 1.0 / (s * std::exp(1.0 / (1.0 - std::sqrt(3.0))));
}

Field bump_velocity(const Grid& grid)
{
    const double c = bump_constant();
    const double l = grid.half_length();
    return sample(grid, [&](double x) {
        const double s = x / l;
        if (std::abs(s) >= 1.0)
            return 0.0;
        return c * s * std::exp(1.0 / (s * s - 1.0));
    });
}

Field random_fourier_velocity(const InitRecipe& recipe, const Grid& grid)
{
    recipe.validate();
    if (static_cast<std::size_t>(recipe.fourier_cutoff) >= grid.dealias_cutoff())
        throw std::invalid_argument("fourier_cutoff must be below n/4");
    NormalStream normal(recipe.seed);
    Spectrum s(grid.modes(), Complex(0.0, 0.0));
    for (int j = 1; j <= recipe.fourier_cutoff; ++j) {
        const double re = normal.next();
        const double im = normal.next();
        s[static_cast<std::size_t>(j)] = Complex(re, im);
    }
    Field v(grid);
    grid.inverse_inplace(s, v.values);
    return v;
}

} // namespace bch
