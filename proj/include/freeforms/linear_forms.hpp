#pragma once

// Freeness of two linear forms L1 = sum a_j T_j, L2 = sum b_j T_j in free
// variables: residuals of the coefficient-weighted cumulant relations,
// mixed cumulants of (L1, L2), nullspace solving, and construction of
// witness cumulant families.

#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "freeforms/admissibility.hpp"
#include "freeforms/common.hpp"
#include "freeforms/cumulants.hpp"

namespace freeforms {

// Coefficient vectors of the two forms.  |a_j| <= 1 and |b_j| <= 1; indices
// with a_j * b_j != 0 are the "active" ones and must have pairwise-distinct
// ratios b_j/a_j for the freeness relations to apply.
class CoeffPair {
public:
    CoeffPair(std::vector<double> a, std::vector<double> b) : a_(std::move(a)), b_(std::move(b)) {
        require(a_.size() == b_.size(), "CoeffPair: a and b must have equal length");
        require(!a_.empty(), "CoeffPair: needs at least one coefficient");
        for (double v : a_) require(std::isfinite(v) && std::abs(v) <= 1.0, "CoeffPair: |a_j| must be <= 1");
        for (double v : b_) require(std::isfinite(v) && std::abs(v) <= 1.0, "CoeffPair: |b_j| must be <= 1");
        for (std::size_t j = 0; j < a_.size(); ++j)
            if (a_[j] * b_[j] != 0.0) active_.push_back(static_cast<int>(j));
    }

    int n() const { return static_cast<int>(a_.size()); }
    const std::vector<double>& a() const { return a_; }
    const std::vector<double>& b() const { return b_; }

    // Indices entering both forms, in input order.
    const std::vector<int>& active() const { return active_; }
    int m_active() const { return static_cast<int>(active_.size()); }

    // The relations require pairwise-distinct ratios b_j/a_j among active
    // indices; near-degenerate pairs are rejected rather than merged.
    void require_distinct_ratios(double tol = 1e-12) const {
        for (std::size_t p = 0; p < active_.size(); ++p) {
            for (std::size_t q = p + 1; q < active_.size(); ++q) {
                const double rp = b_[static_cast<std::size_t>(active_[p])] / a_[static_cast<std::size_t>(active_[p])];
                const double rq = b_[static_cast<std::size_t>(active_[q])] / a_[static_cast<std::size_t>(active_[q])];
                require(std::abs(rp - rq) > tol * std::max({1.0, std::abs(rp), std::abs(rq)}),
                        "CoeffPair: active indices with equal ratios b_j/a_j");
            }
        }
    }

private:
    std::vector<double> a_, b_;
    std::vector<int> active_;
};

struct FreenessReport {
    // (s, l, t) -> |sum_j a_j^l b_j^t kappa_s(T_j)| over active indices
    std::map<std::tuple<int, int, int>, double> residuals;
    // (j, s) with kappa_s(T_j) != 0 for s > m_active, j active
    std::vector<std::pair<int, int>> tail_violations;
    bool verdict = false;
    double tol = 0.0;

    double max_residual() const {
        double m = 0.0;
        for (const auto& [key, v] : residuals) m = std::max(m, v);
        return m;
    }
};

// kappa_s(L_{j_1},...,L_{j_s}) with q slots equal to L1 and s-q equal to L2
// collapses to sum_j a_j^q b_j^{s-q} kappa_s(T_j); zero coefficients drop out.
inline double mixed_cumulant(const CoeffPair& cp, const std::vector<CumulantSeq>& cums, int s, int q) {
    require(static_cast<int>(cums.size()) == cp.n(), "mixed_cumulant: one cumulant sequence per variable");
    require(s >= 2, "mixed_cumulant: order s must be >= 2");
    require(q >= 1 && q <= s - 1, "mixed_cumulant: slot count q must lie in [1, s-1]");
    double acc = 0.0;
    for (int j = 0; j < cp.n(); ++j) {
        acc += pow_int(cp.a()[static_cast<std::size_t>(j)], q) *
               pow_int(cp.b()[static_cast<std::size_t>(j)], s - q) *
               cums[static_cast<std::size_t>(j)].kappa(s);
    }
    return acc;
}

inline FreenessReport check_freeness(const CoeffPair& cp, const std::vector<CumulantSeq>& cums,
                                     double tol = 1e-12) {
    require(static_cast<int>(cums.size()) == cp.n(), "check_freeness: one cumulant sequence per variable");
    cp.require_distinct_ratios();
    FreenessReport report;
    report.tol = tol;
    const int m = cp.m_active();
    for (int s = 2; s <= m; ++s) {
        for (int l = 1; l <= s - 1; ++l) {
            const int t = s - l;
            double acc = 0.0;
            for (int j : cp.active()) {
                acc += pow_int(cp.a()[static_cast<std::size_t>(j)], l) *
                       pow_int(cp.b()[static_cast<std::size_t>(j)], t) *
                       cums[static_cast<std::size_t>(j)].kappa(s);
            }
            report.residuals[{s, l, t}] = std::abs(acc);
        }
    }
    for (int j : cp.active()) {
        const CumulantSeq& k = cums[static_cast<std::size_t>(j)];
        for (int s = m + 1; s <= k.length(); ++s) {
            if (k.kappa(s) != 0.0) report.tail_violations.emplace_back(j, s);
        }
    }
    report.verdict = report.tail_violations.empty() && report.max_residual() <= tol;
    return report;
}

// Orthonormal basis of the nullspace of M[(l,t), j] = a_j^l b_j^t over the
// active indices, for l + t = s, l,t >= 1.
inline std::vector<std::vector<double>> solve_nullspace(const CoeffPair& cp, int s) {
    require(s >= 2, "solve_nullspace: order s must be >= 2");
    cp.require_distinct_ratios();
    const int m = cp.m_active();
    if (m == 0) return {};
    Eigen::MatrixXd M(s - 1, m);
    for (int l = 1; l <= s - 1; ++l) {
        for (int c = 0; c < m; ++c) {
            const int j = cp.active()[static_cast<std::size_t>(c)];
            M(l - 1, c) = pow_int(cp.a()[static_cast<std::size_t>(j)], l) *
                          pow_int(cp.b()[static_cast<std::size_t>(j)], s - l);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-12 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    std::vector<std::vector<double>> basis;
    for (int c = rank; c < m; ++c) {
        std::vector<double> v(static_cast<std::size_t>(m));
        for (int r = 0; r < m; ++r) v[static_cast<std::size_t>(r)] = svd.matrixV()(r, c);
        basis.push_back(std::move(v));
    }
    return basis;
}

struct WitnessConfig {
    int shrink_rounds = 48;       // halvings allowed while seeking admissibility
    double safety = 0.8;          // initial fraction of the variance-based bound
    AdmissibilityConfig admissibility;
    double freeness_tol = 1e-12;
};

// Tries to build per-variable cumulant sequences making L1 and L2 free:
// nonnegative variances orthogonal to the s=2 constraint, higher orders from
// the s-homogeneous nullspaces, shrunk until every variable is admissible.
inline std::optional<std::vector<CumulantSeq>> construct_free_family(const CoeffPair& cp, int m_max,
                                                                     const WitnessConfig& cfg = {}) {
    require(m_max >= 2 && m_max <= 8, "construct_free_family: m_max must lie in [2, 8]");
    cp.require_distinct_ratios();
    const int n = cp.n();
    const int m = cp.m_active();

    // variances: strictly positive solution of sum_j p_j c_j = 0 over the
    // active products p_j = a_j b_j, when the signs allow one
    std::vector<double> variance(static_cast<std::size_t>(n), 1.0);
    if (m > 0) {
        double pos = 0.0, neg = 0.0;
        for (int j : cp.active()) {
            const double p = cp.a()[static_cast<std::size_t>(j)] * cp.b()[static_cast<std::size_t>(j)];
            if (p > 0.0) pos += p;
            else neg -= p;
        }
        if (pos > 0.0 && neg > 0.0) {
            for (int j : cp.active()) {
                const double p = cp.a()[static_cast<std::size_t>(j)] * cp.b()[static_cast<std::size_t>(j)];
                variance[static_cast<std::size_t>(j)] = (p > 0.0) ? 1.0 : pos / neg;
            }
            double vmax = 0.0;
            for (int j : cp.active()) vmax = std::max(vmax, variance[static_cast<std::size_t>(j)]);
            for (int j : cp.active()) variance[static_cast<std::size_t>(j)] /= vmax;
        } else {
            // no sign mixing: the only nonnegative solution is zero variance
            for (int j : cp.active()) variance[static_cast<std::size_t>(j)] = 0.0;
        }
    }

    // higher-order directions from the homogeneous nullspaces (orders above
    // m_active are forced to zero by the tail condition)
    std::vector<std::vector<double>> direction(static_cast<std::size_t>(m_max) + 1);
    for (int s = 3; s <= std::min(m_max, m); ++s) {
        const auto basis = solve_nullspace(cp, s);
        if (basis.empty()) continue;
        std::vector<double> v = basis.front();
        // deterministic sign: first nonzero component positive
        for (double c : v) {
            if (c != 0.0) {
                if (c < 0.0)
                    for (double& y : v) y = -y;
                break;
            }
        }
        direction[static_cast<std::size_t>(s)] = std::move(v);
    }

    // initial magnitudes: keep each |kappa_s| inside the admissible region of
    // a variance-kappa_s pair, then shrink until the oracle agrees
    std::vector<double> lambda(static_cast<std::size_t>(m_max) + 1, 0.0);
    const double third_order_bound = 1.0 / (3.0 * std::sqrt(3.0));
    for (int s = 3; s <= m_max; ++s) {
        if (direction[static_cast<std::size_t>(s)].empty()) continue;
        double lam = std::numeric_limits<double>::infinity();
        for (int c = 0; c < m; ++c) {
            const int j = cp.active()[static_cast<std::size_t>(c)];
            const double dir = direction[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)];
            if (dir == 0.0) continue;
            const double var = variance[static_cast<std::size_t>(j)];
            if (var <= 0.0) {
                lam = 0.0; // zero-variance variables admit no higher cumulants
                continue;
            }
            const double cap = cfg.safety * third_order_bound * std::pow(var, 0.5 * s);
            lam = std::min(lam, cap / std::abs(dir));
        }
        lambda[static_cast<std::size_t>(s)] = std::isfinite(lam) ? lam : 0.0;
    }

    auto assemble = [&](double shrink) {
        std::vector<CumulantSeq> fam;
        fam.reserve(static_cast<std::size_t>(n));
        std::vector<int> active_slot(static_cast<std::size_t>(n), -1);
        for (int c = 0; c < m; ++c) active_slot[static_cast<std::size_t>(cp.active()[static_cast<std::size_t>(c)])] = c;
        for (int j = 0; j < n; ++j) {
            if (active_slot[static_cast<std::size_t>(j)] < 0) {
                fam.push_back(CumulantSeq({0.0, 1.0})); // unconstrained variable
                continue;
            }
            std::vector<double> k(static_cast<std::size_t>(m_max), 0.0);
            k[1] = variance[static_cast<std::size_t>(j)];
            for (int s = 3; s <= m_max; ++s) {
                if (direction[static_cast<std::size_t>(s)].empty()) continue;
                k[static_cast<std::size_t>(s - 1)] =
                    shrink * lambda[static_cast<std::size_t>(s)] *
                    direction[static_cast<std::size_t>(s)][static_cast<std::size_t>(active_slot[static_cast<std::size_t>(j)])];
            }
            fam.push_back(CumulantSeq(std::move(k)));
        }
        return fam;
    };

    double shrink = 1.0;
    for (int round = 0; round <= cfg.shrink_rounds; ++round, shrink *= 0.5) {
        std::vector<CumulantSeq> fam = assemble(shrink);
        bool all_admissible = true;
        for (int j : cp.active()) {
            const auto v = is_admissible(fam[static_cast<std::size_t>(j)], cfg.admissibility);
            if (v.status != Admissibility::Admissible) {
                all_admissible = false;
                break;
            }
        }
        if (!all_admissible) continue;
        if (check_freeness(cp, fam, cfg.freeness_tol).verdict) return fam;
    }
    return std::nullopt;
}

} // namespace freeforms
