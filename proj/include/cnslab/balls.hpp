#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "cnslab/fft.hpp"
#include "cnslab/grid.hpp"

namespace cnslab {

/// Volume of the Euclidean ball of radius r in dimension dim.
inline double ball_volume(int dim, double r)
{
    return dim == 2 ? std::numbers::pi * r * r : 4.0 / 3.0 * std::numbers::pi * r * r * r;
}

/// Discretised family of balls B(x, r): centres on a strided sub-lattice and
/// dyadic radii L/4, L/8, ... down to 4 grid cells. Radii are stored in
/// decreasing order; the largest admissible radius is the "cap".
class BallFamily {
public:
    BallFamily() = default;

    static BallFamily dyadic(const Grid& grid, int center_stride = 4,
                             double max_radius = std::numeric_limits<double>::infinity())
    {
        if (center_stride < 1)
            throw std::invalid_argument("ball centre stride must be >= 1");
        BallFamily f;
        f.grid_ = grid;
        f.stride_ = center_stride;
        f.cap_ = grid.box_length() / 4.0;
        const double r_min = 4.0 * grid.spacing();
        for (double r = grid.box_length() / 4.0; r >= r_min * (1.0 - 1e-12); r *= 0.5)
            if (r <= max_radius * (1.0 + 1e-12))
                f.radii_.push_back(r);
        const int m = grid.points_per_axis();
        std::array<int, 3> idx{0, 0, 0};
        auto push_all = [&](auto&& self, int axis) -> void {
            if (axis == grid.dim()) {
                f.centers_.push_back(grid.ravel(idx));
                return;
            }
            for (int i = 0; i < m; i += center_stride) {
                idx[axis] = i;
                self(self, axis + 1);
            }
        };
        push_all(push_all, 0);
        f.build_offsets();
        return f;
    }

    /// Same centres, radii restricted to r <= max_radius.
    BallFamily capped(double max_radius) const
    {
        BallFamily f = *this;
        f.radii_.clear();
        for (double r : radii_)
            if (r <= max_radius * (1.0 + 1e-12))
                f.radii_.push_back(r);
        f.build_offsets();
        return f;
    }

    const Grid& grid() const { return grid_; }
    int center_stride() const { return stride_; }
    const std::vector<double>& radii() const { return radii_; }
    const std::vector<std::size_t>& centers() const { return centers_; }
    bool empty() const { return radii_.empty() || centers_.empty(); }
    /// Largest radius the torus admits (L/4).
    double radius_cap() const { return cap_; }

    /// Number of grid points inside the ball of radius index ri.
    std::size_t ball_point_count(std::size_t ri) const { return offsets_[ri].size(); }
    double ball_quadrature_volume(std::size_t ri) const { return ball_point_count(ri) * grid_.cell_volume(); }

    /// sum_{y in B(center, r_ri)} g(y) * cell_volume, for every centre.
    std::vector<double> ball_integrals(std::span<const double> g, std::size_t ri) const
    {
        std::vector<double> out(centers_.size());
        if (!indicator_spectra_.empty() && !indicator_spectra_[ri].empty()) {
            // All-centre sums as a circular correlation with the ball indicator.
            std::vector<Complex> data(g.begin(), g.end());
            auto spec = fft_forward(grid_, data);
            const auto& ind = indicator_spectra_[ri];
            const double n = static_cast<double>(grid_.size());
            for (std::size_t k = 0; k < spec.size(); ++k)
                spec[k] *= n * std::conj(ind[k]);
            const auto full = fft_inverse(grid_, spec);
            for (std::size_t c = 0; c < centers_.size(); ++c)
                out[c] = full[centers_[c]].real() * grid_.cell_volume();
            return out;
        }
        for (std::size_t c = 0; c < centers_.size(); ++c)
            out[c] = ball_integral(g, ri, c);
        return out;
    }

    double ball_integral(std::span<const double> g, std::size_t ri, std::size_t center_pos) const
    {
        double s = 0.0;
        for_each_point(ri, center_pos, [&](std::size_t flat) { s += g[flat]; });
        return s * grid_.cell_volume();
    }

    /// Visit every grid index inside ball (ri, centre position).
    template <class Fn>
    void for_each_point(std::size_t ri, std::size_t center_pos, Fn&& fn) const
    {
        const int m = grid_.points_per_axis();
        const auto c = grid_.unravel(centers_[center_pos]);
        for (const auto& off : offsets_[ri]) {
            std::size_t flat = 0;
            for (int d = 0; d < grid_.dim(); ++d) {
                int i = c[d] + off[d];
                i = i < 0 ? i + m : (i >= m ? i - m : i);
                flat = flat * m + static_cast<std::size_t>(i);
            }
            fn(flat);
        }
    }

private:
    void build_offsets()
    {
        offsets_.clear();
        indicator_spectra_.clear();
        const double h = grid_.spacing();
        for (double r : radii_) {
            const int reach = static_cast<int>(std::ceil(r / h));
            std::vector<std::array<int, 3>> offs;
            for (int a = -reach; a <= reach; ++a)
                for (int b = -reach; b <= reach; ++b)
                    for (int c = (grid_.dim() == 3 ? -reach : 0); c <= (grid_.dim() == 3 ? reach : 0); ++c) {
                        const double d2 = (double(a) * a + double(b) * b + double(c) * c) * h * h;
                        if (d2 < r * r * (1.0 - 1e-12))
                            offs.push_back({a, b, c});
                    }
            // Direct summation costs centres x points; switch to FFT correlation when that is larger.
            const double direct = double(centers_.size()) * offs.size();
            const double n = double(grid_.size());
            if (direct > 8.0 * n * std::log2(n)) {
                std::vector<Complex> ind(grid_.size(), Complex(0.0, 0.0));
                for (const auto& off : offs)
                    ind[grid_.ravel(off)] = 1.0;
                indicator_spectra_.push_back(fft_forward(grid_, ind));
            } else {
                indicator_spectra_.emplace_back();
            }
            offsets_.push_back(std::move(offs));
        }
    }

    Grid grid_;
    int stride_ = 4;
    double cap_ = 0.0;
    std::vector<double> radii_;
    std::vector<std::size_t> centers_;
    std::vector<std::vector<std::array<int, 3>>> offsets_;
    std::vector<std::vector<Complex>> indicator_spectra_;
};

} // namespace cnslab
