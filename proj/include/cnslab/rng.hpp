#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cnslab {

/// Seedable stream used by every random preset.
///
/// Engine: std::mt19937_64 (MT19937-64, default seeding by the 64-bit seed).
/// uniform(): top 53 bits of one draw times 2^-53, in [0, 1).
/// normal(): Box-Muller on two uniforms, u1 mapped to (0, 1]; both outputs are
/// used, cosine branch first.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phase = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(phase);
        has_spare_ = true;
        return r * std::cos(phase);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace cnslab
