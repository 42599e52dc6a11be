#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <limits>
#include <cmath>
#include <cstdint>
#include <vector>

namespace freeforms {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Input or precondition violation; the CLI maps this to exit code 2.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// Iterative solver did not reach its tolerance; the CLI maps this to exit code 3.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, int iterations, double residual)
        : std::runtime_error(what), iterations(iterations), residual(residual) {}
    int iterations = 0;
    double residual = std::numeric_limits<double>::quiet_NaN();
};

// Exact integer power; keeps repeated evaluations bit-reproducible across call sites.
inline double pow_int(double x, int n) {
    if (n < 0) return 1.0 / pow_int(x, -n);
    double r = 1.0, p = x;
    while (n > 0) {
        if (n & 1) r *= p;
        p *= p;
        n >>= 1;
    }
    return r;
}

inline cplx pow_int(cplx x, int n) {
    if (n < 0) return 1.0 / pow_int(x, -n);
    cplx r = 1.0, p = x;
    while (n > 0) {
        if (n & 1) r *= p;
        p *= p;
        n >>= 1;
    }
    return r;
}

inline bool in_upper_half_plane(cplx z) { return z.imag() > 0.0; }

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw validation_error(msg);
}

} // namespace freeforms
