#pragma once

// Free-cumulant calculus: moment <-> cumulant conversion, scaling and
// shift rules, additive combination, and the compact-support growth bound.

#include <algorithm>
#include <span>
#include <vector>

#include "freeforms/common.hpp"

namespace freeforms {

inline constexpr int max_conversion_order = 64;

// Finite real sequence kappa_1..kappa_m; entries beyond m are implicitly 0.
// Stored canonically: trailing zeros trimmed, minimum length 1.
class CumulantSeq {
public:
    explicit CumulantSeq(std::vector<double> kappa) : k_(std::move(kappa)) {
        require(!k_.empty(), "CumulantSeq: needs at least one entry");
        for (double v : k_) require(std::isfinite(v), "CumulantSeq: entries must be finite");
        while (k_.size() > 1 && k_.back() == 0.0) k_.pop_back();
    }

    CumulantSeq(std::initializer_list<double> kappa) : CumulantSeq(std::vector<double>(kappa)) {}

    int length() const { return static_cast<int>(k_.size()); }

    // 1-based access, zero beyond the stored length.
    double kappa(int s) const {
        if (s < 1 || s > length()) return 0.0;
        return k_[static_cast<std::size_t>(s - 1)];
    }

    const std::vector<double>& entries() const { return k_; }

    bool operator==(const CumulantSeq& other) const { return k_ == other.k_; }

private:
    std::vector<double> k_;
};

// m_n = sum_{s=1}^{n} kappa_s * [x^{n-s}] M(x)^s with M(x) = sum m_k x^k.
// This inverts z = F(z + phi(z)) as a formal series.
inline std::vector<double> cumulants_to_moments(const CumulantSeq& k, int n) {
    require(n >= 1 && n <= max_conversion_order, "cumulants_to_moments: order out of range");
    std::vector<double> m(static_cast<std::size_t>(n) + 1, 0.0);
    m[0] = 1.0;
    for (int nn = 1; nn <= n; ++nn) {
        const int deg = nn - 1;
        std::vector<double> power(static_cast<std::size_t>(deg) + 1, 0.0); // coefficients of M^s
        power[0] = 1.0;
        double value = 0.0;
        for (int s = 1; s <= nn; ++s) {
            std::vector<double> next(static_cast<std::size_t>(deg) + 1, 0.0);
            for (int j = 0; j <= deg; ++j) {
                double acc = 0.0;
                for (int t = 0; t <= j; ++t) acc += m[static_cast<std::size_t>(t)] * power[static_cast<std::size_t>(j - t)];
                next[static_cast<std::size_t>(j)] = acc;
            }
            power = std::move(next);
            if (nn - s <= deg) value += k.kappa(s) * power[static_cast<std::size_t>(nn - s)];
        }
        m[static_cast<std::size_t>(nn)] = value;
    }
    return m;
}

// Exact left inverse of cumulants_to_moments on m_0..m_n with m_0 = 1.
inline CumulantSeq moments_to_cumulants(std::span<const double> m) {
    require(m.size() >= 2, "moments_to_cumulants: need m_0 and at least m_1");
    require(static_cast<int>(m.size()) - 1 <= max_conversion_order, "moments_to_cumulants: order out of range");
    require(std::abs(m[0] - 1.0) <= 1e-12, "moments_to_cumulants: m_0 must equal 1");
    const int n = static_cast<int>(m.size()) - 1;
    std::vector<double> kappa(static_cast<std::size_t>(n), 0.0);
    for (int nn = 1; nn <= n; ++nn) {
        const int deg = nn - 1;
        std::vector<double> power(static_cast<std::size_t>(deg) + 1, 0.0);
        power[0] = 1.0;
        double rhs = m[static_cast<std::size_t>(nn)];
        for (int s = 1; s < nn; ++s) {
            std::vector<double> next(static_cast<std::size_t>(deg) + 1, 0.0);
            for (int j = 0; j <= deg; ++j) {
                double acc = 0.0;
                for (int t = 0; t <= j; ++t) acc += m[static_cast<std::size_t>(t)] * power[static_cast<std::size_t>(j - t)];
                next[static_cast<std::size_t>(j)] = acc;
            }
            power = std::move(next);
            rhs -= kappa[static_cast<std::size_t>(s - 1)] * power[static_cast<std::size_t>(nn - s)];
        }
        // the s = nn term contributes kappa_nn * [x^0] M^nn = kappa_nn
        kappa[static_cast<std::size_t>(nn - 1)] = rhs;
    }
    return CumulantSeq(std::move(kappa));
}

inline CumulantSeq moments_to_cumulants(const std::vector<double>& m) {
    return moments_to_cumulants(std::span<const double>(m));
}

// Dilation rule kappa_s -> u^s kappa_s.  u = 0 collapses to the point mass at 0.
inline CumulantSeq scale(const CumulantSeq& k, double u) {
    std::vector<double> out(static_cast<std::size_t>(k.length()));
    for (int s = 1; s <= k.length(); ++s)
        out[static_cast<std::size_t>(s - 1)] = pow_int(u, s) * k.kappa(s);
    return CumulantSeq(std::move(out));
}

// Entrywise sum (zero padded): cumulants add under free additive convolution.
inline CumulantSeq add(const CumulantSeq& k1, const CumulantSeq& k2) {
    const int n = std::max(k1.length(), k2.length());
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int s = 1; s <= n; ++s) out[static_cast<std::size_t>(s - 1)] = k1.kappa(s) + k2.kappa(s);
    return CumulantSeq(std::move(out));
}

// Smallest c >= 0 with |kappa_s| <= c^s for all s, i.e. max_s |kappa_s|^{1/s}.
inline double growth_certificate(const CumulantSeq& k) {
    double c = 0.0;
    for (int s = 1; s <= k.length(); ++s)
        c = std::max(c, std::pow(std::abs(k.kappa(s)), 1.0 / static_cast<double>(s)));
    return c;
}

} // namespace freeforms
