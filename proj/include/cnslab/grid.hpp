#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cnslab {

/// Periodic box [0, L)^N sampled by M points per axis.
///
/// Points are stored row-major with axis 0 slowest. The wavenumber lattice
/// along each axis is 2*pi*m/L for m in [-M/2, M/2).
class Grid {
public:
    Grid() = default;

    Grid(int dim, double box_length, int points_per_axis)
        : dim_(dim), box_length_(box_length), points_(points_per_axis)
    {
        if (dim != 2 && dim != 3)
            throw std::invalid_argument("grid dimension must be 2 or 3, got " + std::to_string(dim));
        if (!(box_length > 0.0) || !std::isfinite(box_length))
            throw std::invalid_argument("box length must be positive and finite");
        if (points_per_axis % 2 != 0)
            throw std::invalid_argument("odd resolution " + std::to_string(points_per_axis));
        if (points_per_axis < 8)
            throw std::invalid_argument("resolution " + std::to_string(points_per_axis) + " below minimum 8");
        size_ = 1;
        for (int d = 0; d < dim_; ++d)
            size_ *= static_cast<std::size_t>(points_);
    }

    int dim() const { return dim_; }
    double box_length() const { return box_length_; }
    int points_per_axis() const { return points_; }
    std::size_t size() const { return size_; }
    double spacing() const { return box_length_ / points_; }
    double cell_volume() const { return std::pow(spacing(), dim_); }
    double volume() const { return std::pow(box_length_, dim_); }

    /// Signed lattice index m in [-M/2, M/2) for storage index i.
    int mode_index(int i) const { return i < points_ / 2 ? i : i - points_; }
    double wavenumber(int i) const { return 2.0 * std::numbers::pi * mode_index(i) / box_length_; }
    bool is_nyquist(int i) const { return i == points_ / 2; }

    std::array<int, 3> unravel(std::size_t flat) const
    {
        std::array<int, 3> idx{0, 0, 0};
        for (int d = dim_ - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(flat % points_);
            flat /= points_;
        }
        return idx;
    }

    std::size_t ravel(const std::array<int, 3>& idx) const
    {
        std::size_t flat = 0;
        for (int d = 0; d < dim_; ++d) {
            int i = idx[d] % points_;
            if (i < 0)
                i += points_;
            flat = flat * points_ + static_cast<std::size_t>(i);
        }
        return flat;
    }

    std::array<double, 3> coordinate(std::size_t flat) const
    {
        auto idx = unravel(flat);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int d = 0; d < dim_; ++d)
            x[d] = idx[d] * spacing();
        return x;
    }

    std::array<double, 3> wavevector(std::size_t flat) const
    {
        auto idx = unravel(flat);
        std::array<double, 3> k{0.0, 0.0, 0.0};
        for (int d = 0; d < dim_; ++d)
            k[d] = wavenumber(idx[d]);
        return k;
    }

    double wavenumber_squared(std::size_t flat) const
    {
        auto k = wavevector(flat);
        return k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    }

    friend bool operator==(const Grid& a, const Grid& b)
    {
        return a.dim_ == b.dim_ && a.points_ == b.points_ && a.box_length_ == b.box_length_;
    }

private:
    int dim_ = 2;
    double box_length_ = 2.0 * std::numbers::pi;
    int points_ = 8;
    std::size_t size_ = 64;
};

inline Grid make_grid(int dim, double box_length, int points_per_axis)
{
    return Grid(dim, box_length, points_per_axis);
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* what)
{
    if (!(a == b))
        throw std::invalid_argument(std::string("mismatched grids in ") + what);
}

} // namespace cnslab
