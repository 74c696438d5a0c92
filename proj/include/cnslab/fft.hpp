#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <stdexcept>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "cnslab/grid.hpp"

namespace cnslab {

using Complex = std::complex<double>;

namespace detail {

// FFTW planning is not thread-safe; execution with new arrays is.
class PlanCache {
public:
    static constexpr int real_to_complex = 2;
    static constexpr int complex_to_real = 3;

    static PlanCache& instance()
    {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int dim, int points, int sign)
    {
        std::lock_guard lock(mutex_);
        auto key = std::make_tuple(dim, points, sign);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;

        std::size_t total = 1;
        int n[3];
        for (int d = 0; d < dim; ++d) {
            n[d] = points;
            total *= static_cast<std::size_t>(points);
        }
        std::vector<Complex> scratch_in(total), scratch_out(total);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = nullptr;
        if (sign == real_to_complex)
            plan = fftw_plan_dft_r2c(dim, n, reinterpret_cast<double*>(scratch_in.data()),
                                     reinterpret_cast<fftw_complex*>(scratch_out.data()), flags);
        else if (sign == complex_to_real)
            plan = fftw_plan_dft_c2r(dim, n, reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                     reinterpret_cast<double*>(scratch_out.data()), flags);
        else
            plan = fftw_plan_dft(dim, n, reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                 reinterpret_cast<fftw_complex*>(scratch_out.data()), sign, flags);
        if (plan == nullptr)
            throw std::runtime_error("FFTW failed to create a plan");
        plans_.emplace(key, plan);
        return plan;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache()
    {
        for (auto& [key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

} // namespace detail

/// Forward transform normalised so that f(x) = sum_k c_k exp(i k.x).
inline std::vector<Complex> fft_forward(const Grid& grid, std::span<const Complex> data)
{
    if (data.size() != grid.size())
        throw std::invalid_argument("fft_forward: size mismatch");
    std::vector<Complex> in(data.begin(), data.end());
    std::vector<Complex> out(grid.size());
    fftw_plan plan = detail::PlanCache::instance().get(grid.dim(), grid.points_per_axis(), FFTW_FORWARD);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (auto& c : out)
        c *= scale;
    return out;
}

/// Inverse of fft_forward (plain synthesis sum, no scaling).
inline std::vector<Complex> fft_inverse(const Grid& grid, std::span<const Complex> coeffs)
{
    if (coeffs.size() != grid.size())
        throw std::invalid_argument("fft_inverse: size mismatch");
    std::vector<Complex> in(coeffs.begin(), coeffs.end());
    std::vector<Complex> out(grid.size());
    fftw_plan plan = detail::PlanCache::instance().get(grid.dim(), grid.points_per_axis(), FFTW_BACKWARD);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

namespace detail {

// Flat index of the mode -m for every prefix (all axes but the last).
inline std::vector<std::size_t> negated_prefixes(const Grid& grid)
{
    const std::size_t M = grid.points_per_axis();
    const std::size_t prefixes = grid.size() / M;
    std::vector<std::size_t> neg(prefixes);
    for (std::size_t p = 0; p < prefixes; ++p) {
        if (grid.dim() == 2) {
            neg[p] = (M - p) % M;
        } else {
            const std::size_t a = p / M, b = p % M;
            neg[p] = ((M - a) % M) * M + (M - b) % M;
        }
    }
    return neg;
}

} // namespace detail

/// fft_forward of real samples, via a real-to-complex transform.
inline std::vector<Complex> fft_forward_real(const Grid& grid, std::span<const double> data)
{
    if (data.size() != grid.size())
        throw std::invalid_argument("fft_forward_real: size mismatch");
    const std::size_t M = grid.points_per_axis();
    const std::size_t half = M / 2 + 1;
    const std::size_t prefixes = grid.size() / M;
    std::vector<double> in(data.begin(), data.end());
    std::vector<Complex> packed(prefixes * half);
    fftw_plan plan = detail::PlanCache::instance().get(grid.dim(), grid.points_per_axis(), detail::PlanCache::real_to_complex);
    fftw_execute_dft_r2c(plan, in.data(), reinterpret_cast<fftw_complex*>(packed.data()));
    const double scale = 1.0 / static_cast<double>(grid.size());
    const auto neg = detail::negated_prefixes(grid);
    std::vector<Complex> out(grid.size());
    for (std::size_t p = 0; p < prefixes; ++p)
        for (std::size_t j = 0; j < M; ++j)
            out[p * M + j] = j < half ? scale * packed[p * half + j]
                                      : scale * std::conj(packed[neg[p] * half + (M - j)]);
    return out;
}

/// Real part of fft_inverse, via a complex-to-real transform of the Hermitian part.
inline std::vector<double> fft_inverse_real(const Grid& grid, std::span<const Complex> coeffs)
{
    if (coeffs.size() != grid.size())
        throw std::invalid_argument("fft_inverse_real: size mismatch");
    const std::size_t M = grid.points_per_axis();
    const std::size_t half = M / 2 + 1;
    const std::size_t prefixes = grid.size() / M;
    const auto neg = detail::negated_prefixes(grid);
    std::vector<Complex> packed(prefixes * half);
    for (std::size_t p = 0; p < prefixes; ++p)
        for (std::size_t j = 0; j < half; ++j)
            packed[p * half + j] = 0.5 * (coeffs[p * M + j] + std::conj(coeffs[neg[p] * M + (M - j) % M]));
    std::vector<double> out(grid.size());
    fftw_plan plan = detail::PlanCache::instance().get(grid.dim(), grid.points_per_axis(), detail::PlanCache::complex_to_real);
    fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(packed.data()), out.data());
    return out;
}

} // namespace cnslab
