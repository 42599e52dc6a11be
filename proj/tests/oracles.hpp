#pragma once

// Test-side oracles, independent of the library implementation paths they
// check: moments by non-crossing-partition enumeration, closed-form
// transforms of two-atom and semicircular laws, and the region boundary
// evaluated through the tangency profile of the quartic.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace oracles {

using cplx = std::complex<double>;
inline constexpr double pi = 3.141592653589793238462643383279502884;

// ---- non-crossing partition moment oracle ---------------------------------

namespace detail {

inline bool crossing(const std::vector<std::vector<int>>& blocks) {
    for (std::size_t A = 0; A < blocks.size(); ++A) {
        for (std::size_t B = A + 1; B < blocks.size(); ++B) {
            for (int a1 : blocks[A])
                for (int a2 : blocks[A])
                    for (int b1 : blocks[B])
                        for (int b2 : blocks[B])
                            if ((a1 < b1 && b1 < a2 && a2 < b2) || (b1 < a1 && a1 < b2 && b2 < a2))
                                return true;
        }
    }
    return false;
}

inline void enumerate_partitions(int next, int n, std::vector<std::vector<int>>& blocks,
                                 const std::function<void(const std::vector<std::vector<int>>&)>& visit) {
    if (next > n) {
        visit(blocks);
        return;
    }
    // index loop: the recursion grows and shrinks `blocks`, so references
    // taken before the call would dangle after a reallocation
    const std::size_t existing = blocks.size();
    for (std::size_t i = 0; i < existing; ++i) {
        blocks[i].push_back(next);
        enumerate_partitions(next + 1, n, blocks, visit);
        blocks[i].pop_back();
    }
    blocks.push_back({next});
    enumerate_partitions(next + 1, n, blocks, visit);
    blocks.pop_back();
}

} // namespace detail

// m_n = sum over non-crossing partitions of [n] of prod_{V} kappa_{|V|};
// kappa is 1-based through kappa[s-1], zero beyond.
inline double nc_partition_moment(const std::vector<double>& kappa, int n) {
    if (n == 0) return 1.0;
    auto kap = [&kappa](int s) {
        return (s >= 1 && s <= static_cast<int>(kappa.size())) ? kappa[static_cast<std::size_t>(s - 1)] : 0.0;
    };
    double total = 0.0;
    std::vector<std::vector<int>> blocks;
    detail::enumerate_partitions(1, n, blocks, [&](const std::vector<std::vector<int>>& p) {
        if (detail::crossing(p)) return;
        double prod = 1.0;
        for (const auto& block : p) prod *= kap(static_cast<int>(block.size()));
        total += prod;
    });
    return total;
}

// ---- closed-form transforms ------------------------------------------------

// sqrt branch with s ~ w at infinity in the upper half-plane
inline cplx branch_sqrt(cplx w2_minus_c, cplx w) {
    cplx s = std::sqrt(w2_minus_c);
    if (s.imag() * w.imag() < 0.0) s = -s;
    return s;
}

// two-atom (delta_{-1}+delta_{+1})/2
inline cplx bernoulli_g(cplx z) { return z / (z * z - 1.0); }
inline cplx bernoulli_f(cplx z) { return z - 1.0 / z; }
inline cplx bernoulli_phi(cplx z) { return 0.5 * (branch_sqrt(z * z + 4.0, z) - z); }

// standard semicircular (kappa2 = 1)
inline cplx semicircle_g(cplx z) { return 0.5 * (z - branch_sqrt(z * z - 4.0, z)); }
inline double semicircle_density(double x) {
    const double rad = 4.0 - x * x;
    return rad > 0.0 ? std::sqrt(rad) / (2.0 * pi) : 0.0;
}
inline double semicircle_density(double x, double a, double b) {
    const double rad = 4.0 * a * a - (x - b) * (x - b);
    return rad > 0.0 ? std::sqrt(rad) / (2.0 * pi * a * a) : 0.0;
}

// arcsine law on (-2, 2): the free additive square of the two-atom law
inline cplx arcsine_f(cplx z) { return branch_sqrt(z * z - 4.0, z); }
inline double arcsine_density(double x) {
    const double rad = 4.0 - x * x;
    return rad > 0.0 ? 1.0 / (pi * std::sqrt(rad)) : 0.0;
}

// ---- region boundary through the quartic tangency profile ------------------

// r(x, y) = sqrt( (1/3 + sqrt(1/9 - (4/3)(4x^2 - 1) y)) / 2 )
inline double profile_r(double x, double y) {
    return std::sqrt(0.5 * (1.0 / 3.0 + std::sqrt(1.0 / 9.0 - (4.0 / 3.0) * (4.0 * x * x - 1.0) * y)));
}
inline double profile_rho(double x, double y) {
    const double r = profile_r(x, y);
    return r * (1.0 - 2.0 * r * r);
}

// boundary |k3| = rho(x2, y)/x2 with the tangency abscissa x2
inline double boundary_from_profile(double y) {
    if (y >= 0.25) return 0.0; // x2 -> 0: removable endpoint
    if (y <= 1.0 / 36.0) return profile_rho(1.0, y); // x2 = x1 = 1
    const double x2 = 0.5 * std::sqrt(1.0 / std::sqrt(y) - 2.0);
    return profile_rho(x2, y) / x2;
}

// boundary as the minimum of rho(x, y)/x over (0, x1]; unimodal by the
// monotonicity structure, so ternary search converges
inline double boundary_by_minimization(double y) {
    const double x1 = (y <= 1.0 / 36.0) ? 1.0 : std::min(1.0, 0.5 * std::sqrt(1.0 + 1.0 / (12.0 * y)));
    double lo = 1e-9, hi = x1;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (profile_rho(m1, y) / m1 < profile_rho(m2, y) / m2) hi = m2;
        else lo = m1;
    }
    const double x = 0.5 * (lo + hi);
    return profile_rho(x, y) / x;
}

// printed first branch, re-evaluated through the substitution c = sqrt(1-36y)
inline double f1_by_substitution(double y) {
    const double c = std::sqrt(1.0 - 36.0 * y);
    return std::sqrt(1.0 + c) * (2.0 - c) / (3.0 * std::sqrt(6.0));
}

// Euclidean distance of (k3, k4) to the boundary curve of the region
inline double distance_to_boundary(double k3, double k4, int samples = 6000) {
    double best = std::numeric_limits<double>::infinity();
    const double y_lo = -1.0 / 12.0, y_hi = 0.25;
    for (int i = 0; i <= samples; ++i) {
        const double y = y_lo + (y_hi - y_lo) * static_cast<double>(i) / samples;
        const double f = (y <= 1.0 / 36.0) ? f1_by_substitution(y) : boundary_from_profile(y);
        const double dx1 = k3 - f, dx2 = k3 + f, dy = k4 - y;
        best = std::min({best, std::hypot(dx1, dy), std::hypot(dx2, dy)});
    }
    return best;
}

// deterministic linear-congruential helper for reproducible pseudo-random tests
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    double uniform(double lo, double hi) {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        const double u = static_cast<double>((state_ >> 11) & ((1ULL << 53) - 1)) / static_cast<double>(1ULL << 53);
        return lo + (hi - lo) * u;
    }
    int uniform_int(int lo, int hi) { // inclusive
        return lo + static_cast<int>(uniform(0.0, static_cast<double>(hi - lo + 1) - 1e-12));
    }

private:
    std::uint64_t state_;
};

} // namespace oracles
