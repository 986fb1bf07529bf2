#include "bch/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace bch {

namespace {

// The FFTW planner is not thread-safe; execution with new-array functions is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace

struct Grid::Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    explicit Plans(std::size_t n)
    {
        std::vector<double> real(n);
        std::vector<Complex> cplx(n / 2 + 1);
        auto* cptr = reinterpret_cast<fftw_complex*>(cplx.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        std::lock_guard lock(planner_mutex());
        r2c = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(), cptr, flags);
        c2r = fftw_plan_dft_c2r_1d(static_cast<int>(n), cptr, real.data(), flags);
        if (!r2c || !c2r)
            throw std::runtime_error("FFTW planning failed");
    }
    ~Plans()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(r2c);
        fftw_destroy_plan(c2r);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

Grid::Grid(std::size_t n, double half_length)
    : n_(n), half_length_(half_length)
{
    if (!is_power_of_two(n) || n < 4)
        throw std::invalid_argument("grid size must be a power of two >= 4");
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw std::invalid_argument("grid half-length must be positive");
    dx_ = 2.0 * half_length / static_cast<double>(n);
    wavenumbers_.resize(n / 2 + 1);
    for (std::size_t j = 0; j < wavenumbers_.size(); ++j)
        wavenumbers_[j] = std::numbers::pi * static_cast<double>(j) / half_length;
    plans_ = std::make_shared<const Plans>(n);
}

std::vector<double> Grid::points() const
{
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i)
        xs[i] = x(i);
    return xs;
}

void Grid::forward(std::span<const double> values, std::span<Complex> spectrum) const
{
    if (values.size() != n_ || spectrum.size() != modes())
        throw std::invalid_argument("forward transform: size mismatch");
    // r2c does not modify its input; the const_cast only satisfies the C API.
    fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(values.data()),
                         reinterpret_cast<fftw_complex*>(spectrum.data()));
}

void Grid::inverse_inplace(std::span<Complex> spectrum, std::span<double> values) const
{
    if (values.size() != n_ || spectrum.size() != modes())
        throw std::invalid_argument("inverse transform: size mismatch");
    // Imaginary parts of the DC and Nyquist modes must vanish for a real signal.
    spectrum.front().imag(0.0);
    spectrum.back().imag(0.0);
    fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(spectrum.data()),
                         values.data());
    const double scale = 1.0 / static_cast<double>(n_);
    for (double& v : values)
        v *= scale;
}

void Grid::inverse(std::span<const Complex> spectrum, std::span<double> values) const
{
    std::vector<Complex> scratch(spectrum.begin(), spectrum.end());
    inverse_inplace(scratch, values);
}

Field::Field(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v))
{
    if (values.size() != grid.size())
        throw std::invalid_argument("field size does not match grid");
}

Spectrum to_spectral(const Field& f)
{
    Spectrum s(f.grid.modes());
    f.grid.forward(f.values, s);
    return s;
}

Field from_spectral(const Grid& grid, const Spectrum& spectrum)
{
    Field f(grid);
    grid.inverse(spectrum, f.values);
    return f;
}

void derivative_spectrum(const Grid& grid, Spectrum& spectrum, int order)
{
    if (order < 1 || order > 4)
        throw std::invalid_argument("derivative order must be in 1..4");
    const std::size_t nyquist = grid.modes() - 1;
    for (std::size_t j = 0; j < spectrum.size(); ++j) {
        const Complex ik(0.0, grid.wavenumber(j));
        Complex factor = ik;
        for (int m = 1; m < order; ++m)
            factor *= ik;
        spectrum[j] *= factor;
    }
    if (order % 2 == 1)
        spectrum[nyquist] = 0.0;
}

Field derivative(const Field& f, int order)
{
    Spectrum s = to_spectral(f);
    derivative_spectrum(f.grid, s, order);
    return from_spectral(f.grid, s);
}

void dealias(const Grid& grid, Spectrum& spectrum)
{
    std::fill(spectrum.begin() + static_cast<std::ptrdiff_t>(grid.dealias_cutoff()),
              spectrum.end(), Complex(0.0, 0.0));
}

Spectrum dealiased(const Grid& grid, Spectrum spectrum)
{
    dealias(grid, spectrum);
    return spectrum;
}

double inner(const Field& f, const Field& g)
{
    if (!(f.grid == g.grid))
        throw std::invalid_argument("inner product of fields on different grids");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        sum += f[i] * g[i];
    return sum * f.grid.dx();
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

double mean(const Field& f)
{
    double sum = 0.0;
    for (double v : f.values)
        sum += v;
    return sum / static_cast<double>(f.size());
}

double max_abs(const Field& f)
{
    double m = 0.0;
    for (double v : f.values)
        m = std::max(m, std::abs(v));
    return m;
}

double spectral_norm_squared(const Grid& grid, std::span<const Complex> spectrum)
{
    const std::size_t last = spectrum.size() - 1;
    double sum = std::norm(spectrum[0]) + std::norm(spectrum[last]);
    for (std::size_t j = 1; j < last; ++j)
        sum += 2.0 * std::norm(spectrum[j]);
    return sum * grid.dx() / static_cast<double>(grid.size());
}

} // namespace bch
