#pragma once

#include <stdexcept>
#include <string>

namespace cnslab {

/// Invalid configuration or manifest; raised before any field storage is touched.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values or a failed quadrature.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cnslab
