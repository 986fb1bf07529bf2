#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace bch {

using Complex = std::complex<double>;

/// Half-complex spectrum of a real periodic signal: modes j = 0 .. n/2.
using Spectrum = std::vector<Complex>;

/// Uniform periodic grid on [-L, L) with n points, plus the FFTW plans for
/// real-signal transforms of that size.
///
/// Normalization: the forward transform is unscaled, the inverse carries the
/// 1/n factor, so inverse(forward(f)) == f. Working in the half-complex
/// representation makes conjugate symmetry structural: every inverse returns
/// a real field with no imaginary residue to discard.
///
/// A Grid is cheap to copy (plans are shared) and immutable; transforms may be
/// called concurrently from several threads.
class Grid {
public:
    Grid(std::size_t n, double half_length);

    std::size_t size() const noexcept { return n_; }
    std::size_t modes() const noexcept { return n_ / 2 + 1; }
    double half_length() const noexcept { return half_length_; }
    double length() const noexcept { return 2.0 * half_length_; }
    double dx() const noexcept { return dx_; }
    double x(std::size_t i) const noexcept { return -half_length_ + dx_ * static_cast<double>(i); }
    std::vector<double> points() const;

    /// k_j = pi j / L for the non-negative half j = 0 .. n/2.
    double wavenumber(std::size_t j) const noexcept { return wavenumbers_[j]; }
    std::span<const double> wavenumbers() const noexcept { return wavenumbers_; }

    /// First mode index removed by dealiasing (n/4).
    std::size_t dealias_cutoff() const noexcept { return n_ / 4; }

    void forward(std::span<const double> values, std::span<Complex> spectrum) const;
    /// Overwrites `spectrum` (FFTW c2r destroys its input).
    void inverse_inplace(std::span<Complex> spectrum, std::span<double> values) const;
    void inverse(std::span<const Complex> spectrum, std::span<double> values) const;

    bool operator==(const Grid& other) const noexcept
    {
        return n_ == other.n_ && half_length_ == other.half_length_;
    }

private:
    struct Plans;
    std::size_t n_;
    double half_length_;
    double dx_;
    std::vector<double> wavenumbers_;
    std::shared_ptr<const Plans> plans_;
};

/// Real samples of a periodic function on a Grid.
struct Field {
    Grid grid;
    std::vector<double> values;

    explicit Field(Grid g) : grid(std::move(g)), values(grid.size(), 0.0) {}
    Field(Grid g, std::vector<double> v);

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const noexcept { return values[i]; }
    double& operator[](std::size_t i) noexcept { return values[i]; }
};

/// Samples f(x_i) on the grid.
template <class Fn>
Field sample(const Grid& grid, Fn&& fn)
{
    Field f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        f[i] = fn(grid.x(i));
    return f;
}

Spectrum to_spectral(const Field& f);
Field from_spectral(const Grid& grid, const Spectrum& spectrum);

/// Spectral derivative of order 1..4. The Nyquist mode is dropped for odd
/// orders so the result stays real and mean-free.
Field derivative(const Field& f, int order);
void derivative_spectrum(const Grid& grid, Spectrum& spectrum, int order);

/// Zeroes every mode with |j| >= n/4.
void dealias(const Grid& grid, Spectrum& spectrum);
Spectrum dealiased(const Grid& grid, Spectrum spectrum);

/// Rectangle-rule quadrature on the periodic grid: dx * sum f_i g_i.
double inner(const Field& f, const Field& g);
double l2_norm(const Field& f);
double mean(const Field& f);
double max_abs(const Field& f);

/// |f|^2 computed from the spectrum; equals l2_norm(f)^2 by Parseval.
double spectral_norm_squared(const Grid& grid, std::span<const Complex> spectrum);

} // namespace bch
