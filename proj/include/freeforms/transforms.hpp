#pragma once

// Cauchy transform G, reciprocal transform F = 1/G, Laurent-polynomial phi,
// and the Voiculescu transform obtained by inverting F.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "freeforms/common.hpp"
#include "freeforms/cumulants.hpp"
#include "freeforms/measures.hpp"

namespace freeforms {

// phi(z) = kappa_1 + kappa_2/z + ... + kappa_m/z^{m-1}
struct PhiPoly {
    CumulantSeq kappa;
};

inline cplx phi_eval(const PhiPoly& phi, cplx z) {
    require(z != cplx(0.0, 0.0), "phi_eval: z must be nonzero");
    const cplx inv = 1.0 / z;
    const int m = phi.kappa.length();
    cplx acc = phi.kappa.kappa(m);
    for (int s = m - 1; s >= 1; --s) acc = acc * inv + phi.kappa.kappa(s);
    return acc;
}

inline cplx phi_derivative(const PhiPoly& phi, cplx z) {
    require(z != cplx(0.0, 0.0), "phi_derivative: z must be nonzero");
    const cplx inv = 1.0 / z;
    cplx acc = 0.0;
    for (int s = phi.kappa.length(); s >= 2; --s) {
        acc = acc * inv - static_cast<double>(s - 1) * phi.kappa.kappa(s) * pow_int(inv, s);
    }
    return acc;
}

// Truncated cone {x + iy : |x| < alpha*y, y > beta} where F is inverted.
struct ConeDomain {
    double alpha = 1e6;
    double beta = 0.0;

    ConeDomain() = default;
    ConeDomain(double alpha, double beta) : alpha(alpha), beta(beta) {
        require(alpha > 0.0 && std::isfinite(alpha), "ConeDomain: alpha must be finite positive");
        require(beta >= 0.0 && std::isfinite(beta), "ConeDomain: beta must be finite");
    }

    bool contains(cplx z) const { return z.imag() > beta && std::abs(z.real()) < alpha * z.imag(); }
};

inline cplx cauchy(const AtomicMeasure& mu, cplx z) {
    require(in_upper_half_plane(z), "cauchy: z must lie in the upper half-plane");
    cplx g = 0.0;
    for (const Atom& a : mu.atoms()) g += a.weight / (z - a.position);
    return g;
}

namespace detail {

// Per-cell closed form for the Cauchy integral of a piecewise-linear density.
// With W = z - (cell center), q = (dx/2)/W:
//   L       = log((W + dx/2)/(W - dx/2)) = 2 atanh(q)
//   WL - dx = 2W (q^3/3 + q^5/5 + ...)
// The series branch keeps full relative precision for cells far from z,
// where the direct log would cancel catastrophically.
struct CellKernel {
    cplx L;
    cplx WL_minus_h;
};

inline CellKernel cell_kernel(cplx W, double h) {
    const cplx q = (0.5 * h) / W;
    CellKernel out;
    if (std::norm(q) < 9e-4) { // |q| < 0.03
        const cplx q2 = q * q;
        const cplx tail = q2 * (1.0 / 3.0 + q2 * (1.0 / 5.0 + q2 * (1.0 / 7.0 + q2 * (1.0 / 9.0 + q2 / 11.0))));
        out.L = 2.0 * q * (1.0 + tail);
        out.WL_minus_h = 2.0 * W * q * tail;
    } else {
        out.L = std::log((1.0 + q) / (1.0 - q));
        out.WL_minus_h = W * out.L - h;
    }
    return out;
}

} // namespace detail

// Exact Cauchy transform of the piecewise-linear interpolant of the grid values.
inline cplx cauchy(const GridDensity& mu, cplx z) {
    require(in_upper_half_plane(z), "cauchy: z must lie in the upper half-plane");
    const double h = mu.dx();
    cplx g = 0.0;
    for (std::size_t i = 0; i + 1 < mu.size(); ++i) {
        const double pc = 0.5 * (mu.values()[i] + mu.values()[i + 1]);
        const double slope = (mu.values()[i + 1] - mu.values()[i]) / h;
        const cplx W = z - (mu.x(i) + 0.5 * h);
        const auto kern = detail::cell_kernel(W, h);
        g += pc * kern.L + slope * kern.WL_minus_h;
    }
    return g;
}

inline cplx cauchy(const Measure& mu, cplx z) {
    return std::visit([z](const auto& v) { return cauchy(v, z); }, mu);
}

inline cplx cauchy_derivative(const AtomicMeasure& mu, cplx z) {
    require(in_upper_half_plane(z), "cauchy_derivative: z must lie in the upper half-plane");
    cplx g = 0.0;
    for (const Atom& a : mu.atoms()) {
        const cplx d = z - a.position;
        g -= a.weight / (d * d);
    }
    return g;
}

inline cplx cauchy_derivative(const GridDensity& mu, cplx z) {
    require(in_upper_half_plane(z), "cauchy_derivative: z must lie in the upper half-plane");
    const double h = mu.dx();
    cplx g = 0.0;
    for (std::size_t i = 0; i + 1 < mu.size(); ++i) {
        const double pc = 0.5 * (mu.values()[i] + mu.values()[i + 1]);
        const double slope = (mu.values()[i + 1] - mu.values()[i]) / h;
        const cplx W = z - (mu.x(i) + 0.5 * h);
        const cplx dL = -h / (W * W - 0.25 * h * h);
        const auto kern = detail::cell_kernel(W, h);
        g += pc * dL + slope * (kern.L + W * dL);
    }
    return g;
}

inline cplx cauchy_derivative(const Measure& mu, cplx z) {
    return std::visit([z](const auto& v) { return cauchy_derivative(v, z); }, mu);
}

template <class M>
inline cplx reciprocal_f(const M& mu, cplx z) {
    return 1.0 / cauchy(mu, z);
}

template <class M>
inline cplx reciprocal_f_derivative(const M& mu, cplx z) {
    const cplx g = cauchy(mu, z);
    return -cauchy_derivative(mu, z) / (g * g);
}

struct ValueDeriv {
    cplx value;
    cplx derivative;
};

// Fused evaluation of G and G' in one sweep over the measure.
inline ValueDeriv cauchy_pair(const AtomicMeasure& mu, cplx z) {
    require(in_upper_half_plane(z), "cauchy_pair: z must lie in the upper half-plane");
    cplx g = 0.0, dg = 0.0;
    for (const Atom& a : mu.atoms()) {
        const cplx inv = 1.0 / (z - a.position);
        g += a.weight * inv;
        dg -= a.weight * inv * inv;
    }
    return {g, dg};
}

inline ValueDeriv cauchy_pair(const GridDensity& mu, cplx z) {
    require(in_upper_half_plane(z), "cauchy_pair: z must lie in the upper half-plane");
    const double h = mu.dx();
    cplx g = 0.0, dg = 0.0;
    for (std::size_t i = 0; i + 1 < mu.size(); ++i) {
        const double pc = 0.5 * (mu.values()[i] + mu.values()[i + 1]);
        const double slope = (mu.values()[i + 1] - mu.values()[i]) / h;
        const cplx W = z - (mu.x(i) + 0.5 * h);
        const auto kern = detail::cell_kernel(W, h);
        const cplx dL = -h / (W * W - 0.25 * h * h);
        g += pc * kern.L + slope * kern.WL_minus_h;
        dg += pc * dL + slope * (kern.L + W * dL);
    }
    return {g, dg};
}

inline ValueDeriv cauchy_pair(const Measure& mu, cplx z) {
    return std::visit([z](const auto& v) { return cauchy_pair(v, z); }, mu);
}

// F = 1/G and F' = -G'/G^2 in one pass.
template <class M>
inline ValueDeriv reciprocal_f_pair(const M& mu, cplx z) {
    const ValueDeriv g = cauchy_pair(mu, z);
    const cplx f = 1.0 / g.value;
    return {f, -g.derivative * f * f};
}

struct InversionResult {
    cplx value;          // w with F(w) = z
    int iterations = 0;
    double residual = 0.0;
};

struct InversionOptions {
    double tol = 1e-11;
    int max_iterations = 200;
    int ray_stages = 24; // continuation stages along t*z, t in [1, 8]
};

// Solve F(w) = z by damped Newton started at w0.  Returns nullopt if the
// iteration leaves the upper half-plane or stalls.
template <class F, class DF>
inline std::optional<InversionResult> newton_invert(F&& f, DF&& df, cplx z, cplx w0,
                                                    const InversionOptions& opt, int* iter_count) {
    cplx w = w0;
    double res = std::abs(f(w) - z);
    for (int it = 0; it < opt.max_iterations; ++it) {
        ++*iter_count;
        if (res <= opt.tol) return InversionResult{w, *iter_count, res};
        const cplx deriv = df(w);
        if (!(std::abs(deriv) > 0.0)) return std::nullopt;
        cplx step = (z - f(w)) / deriv;
        // damp until the residual decreases
        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 40; ++half) {
            const cplx cand = w + lambda * step;
            if (cand.imag() > 0.0) {
                const double cres = std::abs(f(cand) - z);
                if (cres < res) {
                    w = cand;
                    res = cres;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) return std::nullopt;
    }
    if (res <= opt.tol) return InversionResult{w, *iter_count, res};
    return std::nullopt;
}

// Right inverse of F on the cone: first plain damped Newton from w0 = z, then
// a fallback continuation along the ray t*z from deep inside the basin.
template <class F, class DF>
inline InversionResult invert_f(F&& f, DF&& df, cplx z, const InversionOptions& opt = {}) {
    int iters = 0;
    if (auto direct = newton_invert(f, df, z, z, opt, &iters)) return *direct;
    const double tmax = 8.0;
    cplx w = tmax * z;
    double last_res = std::numeric_limits<double>::infinity();
    for (int stage = opt.ray_stages; stage >= 0; --stage) {
        const double t = std::exp(std::log(tmax) * static_cast<double>(stage) / static_cast<double>(opt.ray_stages));
        const cplx target = t * z;
        auto step = newton_invert(f, df, target, w, opt, &iters);
        if (!step) throw convergence_error("invert_f: Newton continuation failed", iters, last_res);
        w = step->value;
        last_res = step->residual;
    }
    return InversionResult{w, iters, last_res};
}

struct VoiculescuResult {
    cplx phi;
    int iterations = 0;
    double residual = 0.0;
};

// phi_mu(z) = F^{(-1)}(z) - z, computed by Newton inversion of F.
template <class M>
inline VoiculescuResult voiculescu_of_measure(const M& mu, cplx z, const ConeDomain& cone = {},
                                              const InversionOptions& opt = {}) {
    require(cone.contains(z), "voiculescu_of_measure: z outside the cone domain");
    auto f = [&mu](cplx w) { return reciprocal_f(mu, w); };
    auto df = [&mu](cplx w) { return reciprocal_f_derivative(mu, w); };
    const InversionResult inv = invert_f(f, df, z, opt);
    return VoiculescuResult{inv.value - z, inv.iterations, inv.residual};
}

inline VoiculescuResult voiculescu_of_measure(const Measure& mu, cplx z, const ConeDomain& cone = {},
                                              const InversionOptions& opt = {}) {
    return std::visit([&](const auto& v) { return voiculescu_of_measure(v, z, cone, opt); }, mu);
}

struct MomentAsymptotics {
    std::array<double, 3> heights{10.0, 20.0, 40.0};
    std::array<double, 3> values{};     // z^{2n+1}(G - partial sum) at z = i*height
    double target = 0.0;                // m_{2n}
    double max_deviation = 0.0;         // max |values - target|
};

// Checks z^{2n+1}(G(z) - 1/z - m_1/z^2 - ... - m_{2n-1}/z^{2n}) -> m_{2n}
// along z = iy.
template <class M>
inline MomentAsymptotics moment_asymptotic_check(const M& mu, int n) {
    require(n >= 1 && 2 * n <= max_moment_order, "moment_asymptotic_check: order out of range");
    const std::vector<double> m = moments(mu, 2 * n);
    MomentAsymptotics out;
    out.target = m[static_cast<std::size_t>(2 * n)];
    for (std::size_t j = 0; j < out.heights.size(); ++j) {
        const cplx z(0.0, out.heights[j]);
        cplx partial = 0.0;
        const cplx inv = 1.0 / z;
        for (int k = 0; k <= 2 * n - 1; ++k) partial += m[static_cast<std::size_t>(k)] * pow_int(inv, k + 1);
        const cplx v = pow_int(z, 2 * n + 1) * (cauchy(mu, z) - partial);
        out.values[j] = std::abs(v);
        out.max_deviation = std::max(out.max_deviation, std::abs(out.values[j] - out.target));
    }
    return out;
}

inline MomentAsymptotics moment_asymptotic_check(const Measure& mu, int n) {
    return std::visit([n](const auto& v) { return moment_asymptotic_check(v, n); }, mu);
}

} // namespace freeforms
