#ifndef IASIM_TYPES_HPP
#define IASIM_TYPES_HPP

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace iasim {

using Real = double;
using Complex = std::complex<Real>;

/// Dense value field over the grid points (layout given by Grid::index)
/// and its complex counterpart used for amplitudes.
using RealField = Eigen::ArrayXd;
using ComplexField = Eigen::ArrayXcd;

inline constexpr Real kPi = std::numbers::pi_v<Real>;

/// Invalid user-supplied configuration (bad grid sizes, illegal parameter
/// regimes, malformed specs). CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values or other numerical-domain failures encountered while
/// evaluating fields or operators. CLI maps this to exit code 3.
struct NumericalDomainError : std::runtime_error {
    explicit NumericalDomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Operation received a state whose norm no longer satisfies the
/// normalization contract.
struct StaleStateError : std::runtime_error {
    explicit StaleStateError(const std::string& what) : std::runtime_error(what) {}
};

/// A diagnostic was asked of data that cannot support it (e.g. a time
/// series with too few samples for finite differences).
struct DiagnosticError : std::runtime_error {
    explicit DiagnosticError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace iasim

#endif
