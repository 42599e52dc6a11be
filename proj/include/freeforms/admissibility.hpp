#pragma once

// Decides whether a finite real sequence is the free-cumulant sequence of a
// compactly supported probability measure, and provides the closed-form
// boundary of the realizable (kappa3, kappa4) region for kappa = (0,1,k3,k4).
//
// The oracle rasterizes {z in C+ : Im(z + phi(z)) > 0} on a log-polar grid
// and flood-fills from the outer arc.  The sequence is rejected exactly when
// the filled component reaches the inner arc, i.e. when the component of the
// positivity set containing infinity also hangs onto the origin.

#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "freeforms/common.hpp"
#include "freeforms/cumulants.hpp"
#include "freeforms/parallel.hpp"
#include "freeforms/roots.hpp"
#include "freeforms/transforms.hpp"

namespace freeforms {

struct OmegaGrid {
    double eps = 0.0;
    double R = 0.0;
    int n_r = 0;
    int n_theta = 0;
    std::vector<std::uint8_t> mask; // row-major, n_r rows (radius) x n_theta columns (angle)
    bool outer_arc_clear = false;   // whole outer arc satisfied Im(z + phi) > 0

    double radius(int i) const {
        // log-uniform between eps and R, endpoints exact
        if (i == 0) return eps;
        if (i == n_r - 1) return R;
        const double t = static_cast<double>(i) / static_cast<double>(n_r - 1);
        return eps * std::exp(t * std::log(R / eps));
    }
    double theta(int j) const {
        // uniform strictly inside (0, pi)
        return pi * static_cast<double>(j + 1) / static_cast<double>(n_theta + 1);
    }
    bool at(int i, int j) const { return mask[static_cast<std::size_t>(i) * n_theta + j] != 0; }
};

// Rasterize Im(z + phi(z)) > 0 over the log-polar annulus.
inline OmegaGrid omega_mask(const PhiPoly& phi, double eps, double R, int n_r, int n_theta) {
    require(eps > 0.0 && eps < 1.0, "omega_mask: eps must lie in (0,1)");
    require(R > eps, "omega_mask: R must exceed eps");
    require(n_r >= 2 && n_theta >= 2, "omega_mask: resolution too small");
    OmegaGrid grid;
    grid.eps = eps;
    grid.R = R;
    grid.n_r = n_r;
    grid.n_theta = n_theta;
    grid.mask.assign(static_cast<std::size_t>(n_r) * n_theta, 0);

    std::vector<cplx> unit(static_cast<std::size_t>(n_theta));
    for (int j = 0; j < n_theta; ++j) {
        const double th = grid.theta(j);
        unit[static_cast<std::size_t>(j)] = cplx(std::cos(th), std::sin(th));
    }
    std::vector<double> radii(static_cast<std::size_t>(n_r));
    for (int i = 0; i < n_r; ++i) radii[static_cast<std::size_t>(i)] = grid.radius(i);

    parallel_chunks(static_cast<std::size_t>(n_r), 16, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            const double r = radii[i];
            for (int j = 0; j < n_theta; ++j) {
                const cplx z = r * unit[static_cast<std::size_t>(j)];
                const double v = (z + phi_eval(phi, z)).imag();
                grid.mask[i * n_theta + j] = (v > 0.0) ? 1 : 0;
            }
        }
    });

    grid.outer_arc_clear = true;
    for (int j = 0; j < n_theta; ++j) {
        if (!grid.at(n_r - 1, j)) {
            grid.outer_arc_clear = false;
            break;
        }
    }
    return grid;
}

namespace detail {

// True when the component of the mask touching the outer arc reaches the
// inner arc.  4-neighbor connectivity on the log-polar lattice.
inline bool outer_component_reaches_origin(const OmegaGrid& g) {
    std::vector<std::uint8_t> seen(g.mask.size(), 0);
    std::deque<std::pair<int, int>> queue;
    for (int j = 0; j < g.n_theta; ++j) {
        if (g.at(g.n_r - 1, j)) {
            seen[static_cast<std::size_t>(g.n_r - 1) * g.n_theta + j] = 1;
            queue.emplace_back(g.n_r - 1, j);
        }
    }
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        const auto [i, j] = queue.front();
        queue.pop_front();
        if (i == 0) return true;
        for (int d = 0; d < 4; ++d) {
            const int i2 = i + di[d];
            const int j2 = j + dj[d];
            if (i2 < 0 || i2 >= g.n_r || j2 < 0 || j2 >= g.n_theta) continue;
            const std::size_t idx = static_cast<std::size_t>(i2) * g.n_theta + j2;
            if (!seen[idx] && g.mask[idx]) {
                seen[idx] = 1;
                queue.emplace_back(i2, j2);
            }
        }
    }
    return false;
}

} // namespace detail

enum class Admissibility { Admissible, NotAdmissible, Indeterminate };

inline const char* to_string(Admissibility s) {
    switch (s) {
        case Admissibility::Admissible: return "Admissible";
        case Admissibility::NotAdmissible: return "NotAdmissible";
        default: return "Indeterminate";
    }
}

struct GridResolution {
    int n_r = 0;
    int n_theta = 0;
    double eps = 0.0;
    double R = 0.0;
};

struct AdmissibilityVerdict {
    Admissibility status = Admissibility::Indeterminate;
    double margin = 0.0; // parameter-scale proxy; 0.01 when refinements disagree
    GridResolution resolution;
};

struct AdmissibilityConfig {
    int n_r = 256;
    int n_theta = 512;
    double eps_factor = 1e-4; // inner radius = eps_factor * R
    double r_factor = 4.0;    // R = r_factor * max(1, growth_certificate)
    int refinements = 1;      // extra runs at doubled resolution, halved eps
    int auto_double_R = 3;    // enlargements tried when the outer arc fails
};

namespace detail {

inline bool reject_on_grid(const PhiPoly& phi, double R0, double eps_factor, int n_r, int n_theta,
                           int auto_double_R, GridResolution* used) {
    double R = R0;
    for (int attempt = 0;; ++attempt) {
        const OmegaGrid grid = omega_mask(phi, eps_factor * R, R, n_r, n_theta);
        if (grid.outer_arc_clear) {
            if (used) *used = GridResolution{n_r, n_theta, grid.eps, grid.R};
            return outer_component_reaches_origin(grid);
        }
        if (attempt >= auto_double_R)
            throw convergence_error("is_admissible: outer arc kept failing after enlarging R", attempt, R);
        R *= 2.0;
    }
}

} // namespace detail

// Oracle for "is this finite sequence the free-cumulant sequence of some
// compactly supported probability measure".  Indeterminate only when two
// successive grid refinements disagree.
inline AdmissibilityVerdict is_admissible(const CumulantSeq& k, const AdmissibilityConfig& cfg = {}) {
    require(k.length() <= max_poly_degree, "is_admissible: sequence longer than supported");
    AdmissibilityVerdict verdict;
    verdict.resolution = GridResolution{0, 0, 0.0, 0.0};

    // Point masses: phi is constant, always realizable.
    if (k.length() == 1) {
        verdict.status = Admissibility::Admissible;
        return verdict;
    }
    // Canonical sequences of length >= 2 end with a nonzero entry, so a
    // vanishing variance leaves a genuinely nonzero higher cumulant behind.
    if (k.kappa(2) <= 0.0) {
        verdict.status = Admissibility::NotAdmissible;
        return verdict;
    }

    const PhiPoly phi{k};
    const double R0 = cfg.r_factor * std::max(1.0, growth_certificate(k));

    GridResolution res_base;
    const bool reject_base = detail::reject_on_grid(phi, R0, cfg.eps_factor, cfg.n_r, cfg.n_theta,
                                                    cfg.auto_double_R, &res_base);
    bool agreed = true;
    GridResolution res_fine = res_base;
    bool reject_fine = reject_base;
    int n_r = cfg.n_r, n_theta = cfg.n_theta;
    double eps_factor = cfg.eps_factor;
    for (int level = 0; level < cfg.refinements; ++level) {
        n_r *= 2;
        n_theta *= 2;
        eps_factor *= 0.5;
        reject_fine = detail::reject_on_grid(phi, R0, eps_factor, n_r, n_theta, cfg.auto_double_R, &res_fine);
        if (reject_fine != reject_base) {
            agreed = false;
            break;
        }
    }
    verdict.resolution = res_fine;
    if (!agreed) {
        verdict.status = Admissibility::Indeterminate;
        verdict.margin = 0.01;
    } else {
        verdict.status = reject_fine ? Admissibility::NotAdmissible : Admissibility::Admissible;
        verdict.margin = 0.0;
    }
    return verdict;
}

// ---- closed-form region for kappa = (0, 1, k3, k4) ------------------------

// Branch on -1/12 <= y <= 1/36.
inline double region_d_f1(double y) {
    const double c = std::sqrt(1.0 - 36.0 * y);
    return std::sqrt(1.0 + c) * (2.0 - c) / (3.0 * std::sqrt(6.0));
}

// Branch on 1/36 < y <= 1/4, with the removable endpoint pinned to 0.
// Equivalent to rho(x2,y)/x2 for the tangency point x2 of the quartic
// profile below; both evaluations are cross-checked in the tests.
inline double region_d_f2(double y) {
    if (y == 0.25) return 0.0;
    const double s = std::sqrt(y);
    return 2.0 * s * std::sqrt(1.0 - 2.0 * s);
}

inline bool region_d_membership(double k3, double k4) {
    if (k4 < -1.0 / 12.0 || k4 > 0.25) return false;
    const double bound = (k4 <= 1.0 / 36.0) ? region_d_f1(k4) : region_d_f2(k4);
    return std::abs(k3) <= bound;
}

struct BoundarySample {
    double y = 0.0;
    double plus = 0.0;
    double minus = 0.0;
};

// Samples of the region boundary, uniform in y over [-1/12, 1/4] with exact
// endpoints.  plus/minus are +-f(y).
inline std::vector<BoundarySample> region_d_boundary(int n_samples) {
    require(n_samples >= 16, "region_d_boundary: need at least 16 samples");
    std::vector<BoundarySample> out(static_cast<std::size_t>(n_samples));
    const double y_lo = -1.0 / 12.0;
    const double y_hi = 0.25;
    for (int i = 0; i < n_samples; ++i) {
        double y = y_lo + (y_hi - y_lo) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
        if (i == 0) y = y_lo;
        if (i == n_samples - 1) y = y_hi;
        const double f = (y <= 1.0 / 36.0) ? region_d_f1(y) : region_d_f2(y);
        out[static_cast<std::size_t>(i)] = BoundarySample{y, f, f == 0.0 ? 0.0 : -f};
    }
    return out;
}

// Largest positive real root of the quartic profile
//   P(r, x) = r^4 - r^2 - 2 k3 x r + (1 - 4 x^2) k4,
// or nullopt when no positive real root exists.
inline std::optional<double> p_profile(double k3, double k4, double x) {
    const std::vector<cplx> coeffs = {1.0, 0.0, -1.0, -2.0 * k3 * x, (1.0 - 4.0 * x * x) * k4};
    double best = 0.0;
    bool found = false;
    for (double r : real_roots(coeffs, 1e-6)) {
        if (r > 1e-12 && (!found || r > best)) {
            best = r;
            found = true;
        }
    }
    if (!found) return std::nullopt;
    return best;
}

} // namespace freeforms
