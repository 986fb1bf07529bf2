#pragma once

#include "bch/grid.hpp"
#include "bch/waves.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace bch {

struct InitRecipe {
    std::uint64_t seed = 0;
    double sigma = 0.1;
    double energy_target_frac = 0.99;
    double energy_tol = 1e-4;
    int fourier_cutoff = 32;
    double initial_dt = 1e-4; // first trial step of the pre-evolution
    double stabilizer = 2.0;  // A for the pre-evolution steps

    void validate() const;
};

/// Standard normal deviates from std::mt19937_64 (bit-specified by the C++
/// standard) through the Box-Muller transform on 53-bit uniforms, so a seed
/// gives the same stream on every conforming platform.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    double uniform(); // in (0, 1]
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// i.i.d. N(0, sigma) samples, transformed, modes j >= n/4 zeroed, and
/// transformed back.
Field random_phase_init(const InitRecipe& recipe, const Grid& grid);

struct PreEvolution {
    Field phi;
    double energy;
    double time;     // evolution time spent
    int steps;       // accepted steps
    int rejections;  // steps thrown away and retried with half the step
    bool converged;  // |E - target| <= tol
    std::vector<double> accepted_energies;
};

/// Evolves the uncoupled equation until |E - f E_max| <= tol. A step that
/// lands below target - tol is discarded and retried with half the step;
/// the halved step is kept afterwards. Stops unconverged when the step falls
/// below 1e-12, returning the closest state reached. A field already within
/// tolerance is returned unchanged; one below the band throws
/// std::domain_error.
PreEvolution pre_evolve_to_energy(const Field& phi, const InitRecipe& recipe,
                                  const Params& params);

/// C = 1 / (sqrt(2 - sqrt 3) exp(1 / (1 - sqrt 3))), approximately 7.5724.
double bump_constant();

/// v0(x) = (C / L) x exp(1 / ((x/L)^2 - 1)) on (-L, L), 0 at x = -L.
Field bump_velocity(const Grid& grid);

/// Real field whose modes 1 <= j <= cutoff carry c_j = N(0,1) + i N(0,1) in
/// the inverse DFT with 1/n normalization; the mean and all other modes are
/// zero. Throws std::invalid_argument unless cutoff < n/4.
Field random_fourier_velocity(const InitRecipe& recipe, const Grid& grid);

} // namespace bch
