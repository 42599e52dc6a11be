#pragma once

// Compactly supported probability measures: finite atomic mixtures and
// densities sampled on a uniform grid, plus their raw moments.

#include <algorithm>
#include <variant>
#include <vector>

#include "freeforms/common.hpp"

namespace freeforms {

inline constexpr int max_moment_order = 64;

struct Atom {
    double position = 0.0;
    double weight = 0.0;
};

class AtomicMeasure {
public:
    explicit AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
        require(!atoms_.empty(), "AtomicMeasure: needs at least one atom");
        double total = 0.0;
        for (const Atom& a : atoms_) {
            require(std::isfinite(a.position), "AtomicMeasure: non-finite position");
            require(a.weight > 0.0 && a.weight <= 1.0, "AtomicMeasure: weight must lie in (0,1]");
            require(a.weight >= 1e-15, "AtomicMeasure: degenerate atom weight below 1e-15");
            total += a.weight;
        }
        require(std::abs(total - 1.0) <= 1e-12, "AtomicMeasure: weights must sum to 1");
        std::vector<double> pos;
        pos.reserve(atoms_.size());
        for (const Atom& a : atoms_) pos.push_back(a.position);
        std::sort(pos.begin(), pos.end());
        for (std::size_t i = 1; i < pos.size(); ++i)
            require(pos[i] != pos[i - 1], "AtomicMeasure: positions must be pairwise distinct");
    }

    static AtomicMeasure dirac(double a) { return AtomicMeasure({{a, 1.0}}); }

    // Symmetric two-point law (delta_{-1} + delta_{+1})/2 scaled to +-s.
    static AtomicMeasure symmetric_bernoulli(double s = 1.0) {
        return AtomicMeasure({{-s, 0.5}, {s, 0.5}});
    }

    const std::vector<Atom>& atoms() const { return atoms_; }

    double support_min() const {
        double m = atoms_.front().position;
        for (const Atom& a : atoms_) m = std::min(m, a.position);
        return m;
    }
    double support_max() const {
        double m = atoms_.front().position;
        for (const Atom& a : atoms_) m = std::max(m, a.position);
        return m;
    }

private:
    std::vector<Atom> atoms_;
};

class GridDensity {
public:
    GridDensity(double x0, double dx, std::vector<double> values)
        : x0_(x0), dx_(dx), values_(std::move(values)) {
        require(std::isfinite(x0_), "GridDensity: non-finite origin");
        require(dx_ > 0.0 && std::isfinite(dx_), "GridDensity: dx must be positive");
        require(values_.size() >= 2, "GridDensity: needs at least two grid values");
        for (double v : values_) require(std::isfinite(v) && v >= 0.0, "GridDensity: values must be finite and >= 0");
        require(std::abs(trapezoid_integral(values_, dx_) - 1.0) <= 1e-6,
                "GridDensity: trapezoidal integral must equal 1");
    }

    double x0() const { return x0_; }
    double dx() const { return dx_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double x(std::size_t i) const { return x0_ + dx_ * static_cast<double>(i); }
    double support_min() const { return x0_; }
    double support_max() const { return x(values_.size() - 1); }

    double integral() const { return trapezoid_integral(values_, dx_); }

    static double trapezoid_integral(const std::vector<double>& v, double dx) {
        double s = 0.5 * (v.front() + v.back());
        for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
        return s * dx;
    }

private:
    double x0_;
    double dx_;
    std::vector<double> values_;
};

using Measure = std::variant<AtomicMeasure, GridDensity>;

inline double support_min(const Measure& m) {
    return std::visit([](const auto& v) { return v.support_min(); }, m);
}
inline double support_max(const Measure& m) {
    return std::visit([](const auto& v) { return v.support_max(); }, m);
}

// Raw moments m_0..m_n.
inline std::vector<double> moments(const AtomicMeasure& mu, int n) {
    require(n >= 1 && n <= max_moment_order, "moments: order out of range");
    std::vector<double> m(static_cast<std::size_t>(n) + 1, 0.0);
    m[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        for (const Atom& a : mu.atoms()) s += a.weight * pow_int(a.position, k);
        m[static_cast<std::size_t>(k)] = s;
    }
    return m;
}

inline std::vector<double> moments(const GridDensity& mu, int n) {
    require(n >= 1 && n <= max_moment_order, "moments: order out of range");
    std::vector<double> m(static_cast<std::size_t>(n) + 1, 0.0);
    m[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        // trapezoid rule against x^k
        double s = 0.5 * (pow_int(mu.x(0), k) * mu.values().front() +
                          pow_int(mu.support_max(), k) * mu.values().back());
        for (std::size_t i = 1; i + 1 < mu.size(); ++i) s += pow_int(mu.x(i), k) * mu.values()[i];
        m[static_cast<std::size_t>(k)] = s * mu.dx();
    }
    return m;
}

inline std::vector<double> moments(const Measure& mu, int n) {
    return std::visit([n](const auto& v) { return moments(v, n); }, mu);
}

// Semicircular density with radius 2a centered at b, sampled on grid_points
// points over exactly [b-2a, b+2a].  The endpoints carry the value 0 and the
// sampled values are rescaled so the trapezoid integral is 1.
inline GridDensity semicircular(double a, double b, int grid_points) {
    require(a > 0.0, "semicircular: scale a must be positive");
    require(grid_points >= 64, "semicircular: need at least 64 grid points");
    const double dx = 4.0 * a / static_cast<double>(grid_points - 1);
    std::vector<double> v(static_cast<std::size_t>(grid_points));
    const double norm = 1.0 / (2.0 * pi * a * a);
    for (int i = 0; i < grid_points; ++i) {
        const double x = (b - 2.0 * a) + dx * static_cast<double>(i);
        const double rad = std::max(0.0, 4.0 * a * a - (x - b) * (x - b));
        v[static_cast<std::size_t>(i)] = norm * std::sqrt(rad);
    }
    v.front() = 0.0;
    v.back() = 0.0;
    const double total = GridDensity::trapezoid_integral(v, dx);
    for (double& y : v) y /= total;
    return GridDensity(b - 2.0 * a, dx, std::move(v));
}

// Standard semicircular measure (a=1, b=0).
inline GridDensity standard_semicircular(int grid_points = 4001) {
    return semicircular(1.0, 0.0, grid_points);
}

} // namespace freeforms
