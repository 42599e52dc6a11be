#pragma once

// Free additive convolution of two compactly supported measures via the
// subordination system
//   z = Z1(z) + Z2(z) - F_{mu1}(Z1(z)),   F_{mu1}(Z1(z)) = F_{mu2}(Z2(z)),
// solved pointwise by a damped fixed-point iteration, with the density
// obtained by Stieltjes inversion of G = 1/F along z = x + i*eps.

#include <optional>
#include <vector>

#include "freeforms/common.hpp"
#include "freeforms/measures.hpp"
#include "freeforms/parallel.hpp"
#include "freeforms/recover.hpp"
#include "freeforms/transforms.hpp"

namespace freeforms {

struct SubordinationPoint {
    cplx z;
    cplx Z1;
    cplx Z2;
    cplx F;
    int iterations = 0;
    double residual = 0.0; // |F_{mu1}(Z1) - F_{mu2}(Z2)| at the solution
};

struct SubordinationOptions {
    double tol = 1e-12;
    int max_iterations = 400;
};

namespace detail {

inline cplx h_transform(const Measure& mu, cplx w) { return reciprocal_f(mu, w) - w; }

// Fixed sort key so convolution arguments can be ordered canonically; the
// solver path is then identical for (mu1, mu2) and (mu2, mu1).
inline bool canonical_less(const Measure& lhs, const Measure& rhs) {
    const int tl = static_cast<int>(lhs.index());
    const int tr = static_cast<int>(rhs.index());
    if (tl != tr) return tl < tr;
    auto key = [](const Measure& m) {
        std::vector<double> k;
        if (std::holds_alternative<AtomicMeasure>(m)) {
            for (const Atom& a : std::get<AtomicMeasure>(m).atoms()) {
                k.push_back(a.position);
                k.push_back(a.weight);
            }
        } else {
            const GridDensity& g = std::get<GridDensity>(m);
            k.push_back(g.x0());
            k.push_back(g.dx());
            for (double v : g.values()) k.push_back(v);
        }
        return k;
    };
    return key(lhs) < key(rhs);
}

} // namespace detail

// Solves the subordination system at a single point.  The defect of the
// self-map w -> z + h2(z + h1(w)) is driven to zero by damped Newton; when a
// Newton step makes no progress the plain (Denjoy-Wolff) iteration step is
// taken instead.  Near the real axis inside the support the plain iteration
// alone contracts like 1 - O(Im z), which is impractically slow, hence the
// acceleration.
inline SubordinationPoint subordination_solve(const Measure& mu1, const Measure& mu2, cplx z,
                                              const SubordinationOptions& opt = {},
                                              std::optional<cplx> warm_start = std::nullopt) {
    require(in_upper_half_plane(z), "subordination_solve: z must lie in the upper half-plane");
    cplx w = warm_start.value_or(z);
    if (!(w.imag() > 0.0)) w = z;

    // defect S(w) = z + h2(z + h1(w)) - w and its derivative
    struct Eval {
        cplx S;
        cplx dS;
        cplx Z2;
        cplx Z1_next;
    };
    auto evaluate = [&](cplx at) {
        const ValueDeriv f1 = reciprocal_f_pair(mu1, at);
        const cplx Z2 = z + f1.value - at;
        const ValueDeriv f2 = reciprocal_f_pair(mu2, Z2);
        const cplx Z1n = z + f2.value - Z2;
        Eval e;
        e.S = Z1n - at;
        e.dS = (f2.derivative - 1.0) * (f1.derivative - 1.0) - 1.0;
        e.Z2 = Z2;
        e.Z1_next = Z1n;
        return e;
    };

    Eval cur = evaluate(w);
    double best_defect = std::abs(cur.S);
    int iterations = 1;
    double last_res = std::numeric_limits<double>::infinity();
    while (iterations <= opt.max_iterations) {
        if (std::abs(cur.S) <= 0.25 * opt.tol) {
            // verify the consistency relation at the converged point
            const cplx Z1 = cur.Z1_next;
            const cplx F1 = reciprocal_f(mu1, Z1);
            const cplx Z2v = z + F1 - Z1; // keeps z = Z1 + Z2 - F1 exact
            const cplx F2v = reciprocal_f(mu2, Z2v);
            last_res = std::abs(F1 - F2v);
            if (last_res <= opt.tol) {
                SubordinationPoint out;
                out.z = z;
                out.Z1 = Z1;
                out.Z2 = Z2v;
                out.F = F1;
                out.iterations = iterations;
                out.residual = last_res;
                return out;
            }
        }

        bool advanced = false;
        if (std::abs(cur.dS) > 1e-300) {
            cplx step = -cur.S / cur.dS;
            for (int half = 0; half < 8 && iterations < opt.max_iterations; ++half) {
                const cplx cand = w + step;
                if (cand.imag() > 0.0) {
                    const Eval trial = evaluate(cand);
                    ++iterations;
                    if (std::abs(trial.S) < std::abs(cur.S)) {
                        w = cand;
                        cur = trial;
                        advanced = true;
                        break;
                    }
                }
                step *= 0.5;
            }
        }
        if (!advanced) {
            // plain self-map step, damped toward the midpoint
            cplx cand = cur.Z1_next;
            if (!(cand.imag() > 0.0)) cand = w + 0.5 * (cand - w);
            if (!(cand.imag() > 0.0)) cand = z;
            w = cand;
            cur = evaluate(w);
            ++iterations;
        }
        best_defect = std::min(best_defect, std::abs(cur.S));
    }
    throw convergence_error("subordination_solve: fixed point did not reach tolerance",
                            opt.max_iterations, std::min(best_defect, last_res));
}

// F of the convolved measure evaluated through subordination.
inline cplx convolved_f(const Measure& mu1, const Measure& mu2, cplx z,
                        const SubordinationOptions& opt = {}) {
    if (detail::canonical_less(mu2, mu1)) return subordination_solve(mu2, mu1, z, opt).F;
    return subordination_solve(mu1, mu2, z, opt).F;
}

struct ConvolveOptions {
    SubordinationOptions solver;
    double mass_tol = 1e-3;
    std::size_t chunk = 256;
};

struct ConvolveDiagnostics {
    double raw_integral = 0.0;
    int max_iterations = 0;
};

// Density of mu1 boxplus mu2 on the requested grid.  Grid chunks are solved
// independently (warm starts stay inside a chunk), any solver failure aborts.
inline GridDensity free_convolve(const Measure& mu1_in, const Measure& mu2_in, const GridSpec& grid,
                                 const std::vector<double>& eps_schedule = default_eps_schedule(),
                                 const ConvolveOptions& opt = {}, ConvolveDiagnostics* diag = nullptr) {
    require(grid.n >= 2, "free_convolve: grid needs at least two points");
    require(grid.xmax > grid.xmin, "free_convolve: empty grid window");
    require(!eps_schedule.empty(), "free_convolve: eps schedule must be nonempty");
    for (std::size_t i = 0; i + 1 < eps_schedule.size(); ++i)
        require(eps_schedule[i] > eps_schedule[i + 1], "free_convolve: eps schedule must decrease");
    require(eps_schedule.back() > 0.0, "free_convolve: eps must be positive");

    const bool swap = detail::canonical_less(mu2_in, mu1_in);
    const Measure& mu1 = swap ? mu2_in : mu1_in;
    const Measure& mu2 = swap ? mu1_in : mu2_in;

    const double dx = (grid.xmax - grid.xmin) / static_cast<double>(grid.n - 1);
    std::vector<std::vector<double>> layers(eps_schedule.size(),
                                            std::vector<double>(static_cast<std::size_t>(grid.n), 0.0));
    std::vector<int> iter_peak((static_cast<std::size_t>(grid.n) + opt.chunk - 1) / opt.chunk, 0);

    for (std::size_t e = 0; e < eps_schedule.size(); ++e) {
        const double eps = eps_schedule[e];
        std::vector<double>& layer = layers[e];
        parallel_chunks(static_cast<std::size_t>(grid.n), opt.chunk, [&](std::size_t i0, std::size_t i1) {
            int* peak = &iter_peak[i0 / opt.chunk];
            // seed each chunk by descending from well above the axis; a cold
            // start right on z = x + i*eps can sit outside the Newton basin
            const double x_right = grid.xmin + dx * static_cast<double>(i1 - 1);
            std::optional<cplx> warm;
            const double y_top = 1.0;
            const int stages = 10;
            for (int s = 0; s <= stages; ++s) {
                const double y = y_top * std::pow(eps / y_top, static_cast<double>(s) / stages);
                const SubordinationPoint p =
                    subordination_solve(mu1, mu2, cplx(x_right, y), opt.solver, warm);
                warm = p.Z1;
                if (s == stages) {
                    *peak = std::max(*peak, p.iterations);
                    layer[i1 - 1] = std::max(0.0, -(1.0 / p.F).imag() / pi);
                }
            }
            for (std::size_t i = i1 - 1; i-- > i0;) {
                const cplx z(grid.xmin + dx * static_cast<double>(i), eps);
                const SubordinationPoint p = subordination_solve(mu1, mu2, z, opt.solver, warm);
                warm = p.Z1;
                *peak = std::max(*peak, p.iterations);
                layer[i] = std::max(0.0, -(1.0 / p.F).imag() / pi);
            }
        });
    }

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
        diag->max_iterations = 0;
        for (int it : iter_peak) diag->max_iterations = std::max(diag->max_iterations, it);
    }
    if (std::abs(raw - 1.0) > opt.mass_tol)
        throw convergence_error("free_convolve: output mass deviates from 1 beyond tolerance", 0,
                                std::abs(raw - 1.0));
    for (double& v : rho) v /= raw;
    return GridDensity(grid.xmin, dx, std::move(rho));
}

// Support interval of the convolution is contained in the Minkowski sum of
// the input supports; exposed for the mass check.
inline std::pair<double, double> minkowski_support(const Measure& mu1, const Measure& mu2) {
    return {support_min(mu1) + support_min(mu2), support_max(mu1) + support_max(mu2)};
}

} // namespace freeforms
