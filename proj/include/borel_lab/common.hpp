#pragma once
// Shared scalar aliases, constants and the error taxonomy used across the library.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace borel_lab {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt2Pi = 2.5066282746310002;  // sqrt(2*pi)

// Every failure the library reports derives from Error; the CLI maps the kind to
// an exit code (config -> 2, everything mathematical -> 1).
class Error : public std::runtime_error {
public:
    enum class Kind { Domain, Usage, Precondition, Convergence, Geometry, NonContraction, Config };
    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(Kind::Domain, w) {}
};
struct UsageError : Error {
    explicit UsageError(const std::string& w) : Error(Kind::Usage, w) {}
};
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& w) : Error(Kind::Precondition, w) {}
};
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& w) : Error(Kind::Convergence, w) {}
};
struct GeometryError : Error {
    explicit GeometryError(const std::string& w) : Error(Kind::Geometry, w) {}
};
struct NonContractionError : Error {
    explicit NonContractionError(const std::string& w) : Error(Kind::NonContraction, w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(Kind::Config, w) {}
};

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

}  // namespace borel_lab
