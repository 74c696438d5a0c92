#pragma once

#include <optional>

#include "cnslab/field.hpp"

namespace cnslab {

/// Oxygen c, cell density n, velocity u and, for the double-chemotaxis system,
/// the attractant v.
struct SolutionState {
    ScalarField c;
    ScalarField n;
    VectorField u;
    std::optional<ScalarField> v;

    const Grid& grid() const { return c.grid(); }
};

} // namespace cnslab
