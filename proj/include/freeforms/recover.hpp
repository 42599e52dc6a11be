#pragma once

// Density recovery from a Laurent-polynomial phi: for w = x + i*eps the
// map z + phi(z) = w is inverted by solving the associated degree-m
// polynomial and tracking the branch that behaves like z ~ w at infinity.
// G(w) = 1/z on that branch, and the density follows by Stieltjes
// inversion with Richardson extrapolation over the eps schedule.

#include <optional>
#include <vector>

#include "freeforms/admissibility.hpp"
#include "freeforms/common.hpp"
#include "freeforms/cumulants.hpp"
#include "freeforms/measures.hpp"
#include "freeforms/parallel.hpp"
#include "freeforms/roots.hpp"
#include "freeforms/transforms.hpp"

namespace freeforms {

struct GridSpec {
    double xmin = -3.0;
    double xmax = 3.0;
    int n = 1201;
};

inline std::vector<double> default_eps_schedule() { return {1e-2, 5e-3, 2.5e-3}; }

struct RecoverOptions {
    bool check_admissibility = true;
    AdmissibilityConfig admissibility;
    double mass_tol = 1e-3;     // allowed deviation of the raw integral from 1
    int max_subdivisions = 6;   // binary step refinements before tracking gives up
    std::size_t chunk = 256;    // grid points per independently seeded chunk
};

struct RecoverDiagnostics {
    double raw_integral = 0.0;
    int subdivision_max = 0;
};

namespace detail {

struct BranchTracker {
    const CumulantSeq* kappa;
    int degree;

    std::vector<cplx> roots_at(cplx w) const {
        std::vector<cplx> coeffs(static_cast<std::size_t>(degree) + 1);
        coeffs[0] = 1.0;
        coeffs[1] = kappa->kappa(1) - w;
        for (int s = 2; s <= degree; ++s) coeffs[static_cast<std::size_t>(s)] += kappa->kappa(s);
        return polynomial_roots(coeffs);
    }

    // Nearest root to z_prev; nullopt when the choice is ambiguous (the step
    // moved a substantial fraction of the separation between the two closest
    // distinct candidates).
    std::optional<cplx> select(cplx w, cplx z_prev) const {
        const std::vector<cplx> roots = roots_at(w);
        std::size_t best = 0, second = roots.size();
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = d1;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            const double d = std::abs(roots[i] - z_prev);
            if (d < d1) {
                second = best;
                d2 = d1;
                best = i;
                d1 = d;
            } else if (d < d2) {
                second = i;
                d2 = d;
            }
        }
        if (second < roots.size()) {
            const double separation = std::abs(roots[best] - roots[second]);
            const double scale = std::max(1.0, std::abs(roots[best]));
            if (separation > 1e-9 * scale && d1 > 0.45 * separation) return std::nullopt;
        }
        return roots[best];
    }

    cplx step_or_throw(cplx w_from, cplx w_to, cplx z_prev, int max_subdivisions, int* used) const {
        int levels = 0;
        for (;;) {
            const int steps = 1 << levels;
            cplx z = z_prev;
            bool ok = true;
            for (int s = 1; s <= steps; ++s) {
                const double t = static_cast<double>(s) / static_cast<double>(steps);
                const cplx w = w_from + t * (w_to - w_from);
                const auto next = select(w, z);
                if (!next) {
                    ok = false;
                    break;
                }
                z = *next;
            }
            if (ok) {
                if (used) *used = std::max(*used, levels);
                return z;
            }
            ++levels;
            if (levels > max_subdivisions)
                throw convergence_error("recover_measure: root tracking became ambiguous", levels, std::abs(w_to - w_from));
        }
    }

    // Continuation down the vertical ray x + i*[y0 .. eps].
    cplx seed(double x, double eps, double y0, int max_subdivisions, int* used) const {
        cplx w(x, y0);
        const auto top = select(w, w); // far out the physical branch sits next to w
        require(top.has_value(), "recover_measure: could not seed branch at the far field");
        cplx z = *top;
        const int stages = 48;
        for (int s = 1; s <= stages; ++s) {
            const double y = y0 * std::pow(eps / y0, static_cast<double>(s) / stages);
            const cplx w_next(x, y);
            z = step_or_throw(w, w_next, z, max_subdivisions, used);
            w = w_next;
        }
        return z;
    }
};

} // namespace detail

inline GridDensity recover_measure(const PhiPoly& phi, const GridSpec& grid,
                                   const std::vector<double>& eps_schedule = default_eps_schedule(),
                                   const RecoverOptions& opt = {},
                                   RecoverDiagnostics* diag = nullptr) {
    require(grid.n >= 2, "recover_measure: grid needs at least two points");
    require(grid.xmax > grid.xmin, "recover_measure: empty grid window");
    require(!eps_schedule.empty(), "recover_measure: eps schedule must be nonempty");
    for (std::size_t i = 0; i + 1 < eps_schedule.size(); ++i)
        require(eps_schedule[i] > eps_schedule[i + 1], "recover_measure: eps schedule must decrease");
    require(eps_schedule.back() > 0.0, "recover_measure: eps must be positive");

    if (opt.check_admissibility) {
        const AdmissibilityVerdict v = is_admissible(phi.kappa, opt.admissibility);
        require(v.status == Admissibility::Admissible,
                "recover_measure: cumulant sequence is not admissible");
    }

    const int m = phi.kappa.length();
    detail::BranchTracker tracker{&phi.kappa, m};
    const double y0 = 8.0 * std::max(1.0, growth_certificate(phi.kappa));
    const double dx = (grid.xmax - grid.xmin) / static_cast<double>(grid.n - 1);

    std::vector<std::vector<double>> layers(eps_schedule.size(),
                                            std::vector<double>(static_cast<std::size_t>(grid.n), 0.0));
    int subdivision_max = 0;

    for (std::size_t e = 0; e < eps_schedule.size(); ++e) {
        const double eps = eps_schedule[e];
        std::vector<double>& layer = layers[e];
        std::vector<int> sub_used((static_cast<std::size_t>(grid.n) + opt.chunk - 1) / opt.chunk, 0);
        parallel_chunks(static_cast<std::size_t>(grid.n), opt.chunk, [&](std::size_t i0, std::size_t i1) {
            // each chunk is seeded independently at its rightmost point, so
            // the output does not depend on the chunk execution order
            int* used = &sub_used[i0 / opt.chunk];
            const double x_right = grid.xmin + dx * static_cast<double>(i1 - 1);
            cplx z = tracker.seed(x_right, eps, y0, opt.max_subdivisions, used);
            cplx w(x_right, eps);
            layer[i1 - 1] = std::max(0.0, -(1.0 / z).imag() / pi);
            for (std::size_t i = i1 - 1; i-- > i0;) {
                const cplx w_next(grid.xmin + dx * static_cast<double>(i), eps);
                z = tracker.step_or_throw(w, w_next, z, opt.max_subdivisions, used);
                w = w_next;
                layer[i] = std::max(0.0, -(1.0 / z).imag() / pi);
            }
        });
        for (int s : sub_used) subdivision_max = std::max(subdivision_max, s);
    }

    // two-point Richardson in eps on the finest pair; single-layer schedules
    // use the raw smoothed density
    std::vector<double> rho(static_cast<std::size_t>(grid.n));
    if (eps_schedule.size() >= 2) {
        const double e1 = eps_schedule[eps_schedule.size() - 2];
        const double e2 = eps_schedule[eps_schedule.size() - 1];
        const std::vector<double>& r1 = layers[eps_schedule.size() - 2];
        const std::vector<double>& r2 = layers[eps_schedule.size() - 1];
        for (std::size_t i = 0; i < rho.size(); ++i)
            rho[i] = std::max(0.0, (e1 * r2[i] - e2 * r1[i]) / (e1 - e2));
    } else {
        rho = layers[0];
    }

    const double raw = GridDensity::trapezoid_integral(rho, dx);
    if (diag) {
        diag->raw_integral = raw;
        diag->subdivision_max = subdivision_max;
    }
    if (std::abs(raw - 1.0) > opt.mass_tol)
        throw convergence_error("recover_measure: recovered mass deviates from 1 beyond tolerance", 0,
                                std::abs(raw - 1.0));
    for (double& v : rho) v /= raw;
    return GridDensity(grid.xmin, dx, std::move(rho));
}

} // namespace freeforms
