#pragma once

// Data-parallel inner loops of the solver and diagnostics.
//
// bch::kernels holds the OpenMP versions used in production code paths;
// bch::kernels::serial holds straightforward single-threaded references with
// identical signatures. Tests check the two agree; bench/ compares their speed.
//
// Reductions are summed over a fixed number of blocks independent of the
// thread count, so results are bit-identical for any OMP_NUM_THREADS.

#include "bch/grid.hpp"

#include <span>

namespace bch::kernels {

/// out = alpha phi^3 - (beta + stabilizer) phi, the explicit part of the
/// linearly stabilized chemical potential.
void explicit_chemical(std::span<const double> phi, std::span<double> out, double alpha,
                       double beta, double stabilizer);

/// out = a * b elementwise.
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);

/// Implicit phase update in spectral space:
/// phi <- (phi - dt k^2 chem - dt adv) / (1 + dt kappa k^4 + dt A k^2).
void phase_update(std::span<Complex> phi, std::span<const Complex> chem,
                  std::span<const Complex> adv, std::span<const double> k, double dt,
                  double kappa, double stabilizer);

/// Helmholtz velocity update: v <- (v + dt rhs) / (1 + dt nu k^2).
void velocity_update(std::span<Complex> v, std::span<const Complex> rhs,
                     std::span<const double> k, double dt, double nu);

/// dx * sum [ alpha/4 (phi^2 - beta/alpha)^2 + kappa/2 phi_x^2 ].
double energy_sum(std::span<const double> phi, std::span<const double> phi_x, double alpha,
                  double beta, double kappa, double dx);

/// dx * sum f^2.
double squared_sum(std::span<const double> f, double dx);

namespace serial {

void explicit_chemical(std::span<const double> phi, std::span<double> out, double alpha,
                       double beta, double stabilizer);
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);
void phase_update(std::span<Complex> phi, std::span<const Complex> chem,
                  std::span<const Complex> adv, std::span<const double> k, double dt,
                  double kappa, double stabilizer);
void velocity_update(std::span<Complex> v, std::span<const Complex> rhs,
                     std::span<const double> k, double dt, double nu);
double energy_sum(std::span<const double> phi, std::span<const double> phi_x, double alpha,
                  double beta, double kappa, double dx);
double squared_sum(std::span<const double> f, double dx);

} // namespace serial

/// Threads OpenMP will use for the kernels above (after set_threads).
int max_threads();
void set_threads(int n);

} // namespace bch::kernels
