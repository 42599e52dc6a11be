#pragma once

// Polynomial root finding through companion-matrix eigenvalues.

#include <vector>
#include <span>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "freeforms/common.hpp"

namespace freeforms {

inline constexpr int max_poly_degree = 16;

// Roots of c[0]*z^d + c[1]*z^{d-1} + ... + c[d].  Leading zeros are trimmed,
// which lowers the degree (roots that escaped to infinity are dropped).
inline std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs) {
    std::size_t lead = 0;
    double scale = 0.0;
    for (const cplx& c : coeffs) scale = std::max(scale, std::abs(c));
    require(scale > 0.0, "polynomial_roots: zero polynomial");
    while (lead + 1 < coeffs.size() && std::abs(coeffs[lead]) <= 1e-14 * scale) ++lead;
    const int deg = static_cast<int>(coeffs.size() - lead) - 1;
    require(deg <= max_poly_degree, "polynomial_roots: degree above supported limit");
    if (deg <= 0) return {};
    if (deg == 1) return {-coeffs[lead + 1] / coeffs[lead]};

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
    const cplx lc = coeffs[lead];
    for (int i = 0; i < deg; ++i) {
        companion(i, deg - 1) = -coeffs[lead + deg - i] / lc;
        if (i > 0) companion(i, i - 1) = 1.0;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, /*computeEigenvectors=*/false);
    require(solver.info() == Eigen::Success, "polynomial_roots: eigensolver failed");
    std::vector<cplx> roots(deg);
    for (int i = 0; i < deg; ++i) roots[i] = solver.eigenvalues()(i);
    return roots;
}

inline std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs) {
    return polynomial_roots(std::span<const cplx>(coeffs));
}

// Real roots among the complex ones, filtered by a relative imaginary-part tolerance.
inline std::vector<double> real_roots(std::span<const cplx> coeffs, double imag_tol = 1e-7) {
    std::vector<double> out;
    for (const cplx& r : polynomial_roots(coeffs)) {
        if (std::abs(r.imag()) <= imag_tol * std::max(1.0, std::abs(r))) out.push_back(r.real());
    }
    return out;
}

} // namespace freeforms
