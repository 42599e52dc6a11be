#pragma once

// Entire functions Lambda1/Lambda2 of the coefficient pair, location of the
// positive zeros of Lambda1, the classifier for the semicircular
// characterization conditions, and a gallery of special Voiculescu-transform
// evaluators with the functional-identity residual they satisfy.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freeforms/common.hpp"
#include "freeforms/linear_forms.hpp"

namespace freeforms {

// Lambda1(z) = sum |a_j|^z - sum |b_k|^z over nonzero coefficients (0^z := 0).
inline cplx lambda1(const CoeffPair& cp, cplx z) {
    cplx acc = 0.0;
    for (double a : cp.a())
        if (a != 0.0) acc += std::exp(z * std::log(std::abs(a)));
    for (double b : cp.b())
        if (b != 0.0) acc -= std::exp(z * std::log(std::abs(b)));
    return acc;
}

inline double lambda1_real(const CoeffPair& cp, double x) {
    double acc = 0.0;
    for (double a : cp.a())
        if (a != 0.0) acc += std::pow(std::abs(a), x);
    for (double b : cp.b())
        if (b != 0.0) acc -= std::pow(std::abs(b), x);
    return acc;
}

inline double lambda1_derivative_real(const CoeffPair& cp, double x) {
    double acc = 0.0;
    for (double a : cp.a())
        if (a != 0.0) acc += std::log(std::abs(a)) * std::pow(std::abs(a), x);
    for (double b : cp.b())
        if (b != 0.0) acc -= std::log(std::abs(b)) * std::pow(std::abs(b), x);
    return acc;
}

// Lambda2(m) = sum a_j^m - sum b_k^m with literal signed integer powers.
inline double lambda2_int(const CoeffPair& cp, int m) {
    require(m >= 1, "lambda2_int: m must be a positive integer");
    double acc = 0.0;
    for (double a : cp.a())
        if (a != 0.0) acc += pow_int(a, m);
    for (double b : cp.b())
        if (b != 0.0) acc -= pow_int(b, m);
    return acc;
}

// Multiset equality of |a| and |b| makes Lambda1 vanish identically.
inline bool lambda1_identically_zero(const CoeffPair& cp, double tol = 1e-12) {
    std::vector<double> va, vb;
    for (double a : cp.a())
        if (a != 0.0) va.push_back(std::abs(a));
    for (double b : cp.b())
        if (b != 0.0) vb.push_back(std::abs(b));
    if (va.size() != vb.size()) return false;
    std::sort(va.begin(), va.end());
    std::sort(vb.begin(), vb.end());
    for (std::size_t i = 0; i < va.size(); ++i)
        if (std::abs(va[i] - vb[i]) > tol) return false;
    return true;
}

// Beyond this abscissa the group with the largest absolute value dominates
// every other term, so Lambda1 keeps a fixed sign (10% margin included).
inline double lambda1_strip_bound(const CoeffPair& cp) {
    require(!lambda1_identically_zero(cp), "lambda1_strip_bound: Lambda1 is identically zero");
    // collect distinct absolute values with net multiplicity (a side minus b side)
    std::vector<std::pair<double, int>> groups; // value (descending), net count
    auto add = [&groups](double v, int sgn) {
        for (auto& g : groups) {
            if (std::abs(g.first - v) <= 1e-12) {
                g.second += sgn;
                return;
            }
        }
        groups.emplace_back(v, sgn);
    };
    for (double a : cp.a())
        if (a != 0.0) add(std::abs(a), +1);
    for (double b : cp.b())
        if (b != 0.0) add(std::abs(b), -1);
    std::sort(groups.begin(), groups.end(), [](const auto& l, const auto& r) { return l.first > r.first; });

    std::size_t lead = 0;
    while (lead < groups.size() && groups[lead].second == 0) ++lead;
    require(lead < groups.size(), "lambda1_strip_bound: no dominating coefficient group");
    const double v1 = groups[lead].first;
    const int n1 = std::abs(groups[lead].second);
    double rest = 0.0;
    double v2 = 0.0;
    for (std::size_t i = lead + 1; i < groups.size(); ++i) {
        rest += std::abs(groups[i].second);
        v2 = std::max(v2, groups[i].first);
    }
    if (rest == 0.0 || v2 == 0.0) return 1.0; // single group: sign fixed on all of (0, inf)
    // |n1| v1^x > rest * v2^x  <=>  x > ln(rest/|n1|) / ln(v1/v2)
    const double x = std::log(rest / static_cast<double>(n1)) / std::log(v1 / v2);
    return 1.1 * std::max(1.0, x);
}

struct LambdaZero {
    double x = 0.0;
    bool simple = true;
};

// Positive zeros of Lambda1 on (0, max(x_max, strip_bound)], found by a sign
// scan refined with bisection; zeros of even multiplicity are caught through
// sign changes of the derivative.  scan_points = 0 adapts the step to the
// exponent spread (fastest decay rate among the coefficients).
inline int lambda1_scan_points(const CoeffPair& cp, double upper) {
    double steepest = 1.0;
    for (double c : cp.a())
        if (c != 0.0) steepest = std::max(steepest, -std::log(std::abs(c)));
    for (double c : cp.b())
        if (c != 0.0) steepest = std::max(steepest, -std::log(std::abs(c)));
    return static_cast<int>(std::clamp(64.0 * upper * steepest, 4000.0, 200000.0));
}

inline std::vector<LambdaZero> lambda1_positive_zeros(const CoeffPair& cp, double x_max = 0.0,
                                                      double tol = 1e-11, int scan_points = 0) {
    require(!lambda1_identically_zero(cp), "lambda1_positive_zeros: Lambda1 is identically zero");
    const double upper = std::max(x_max, lambda1_strip_bound(cp));
    if (scan_points <= 0) scan_points = lambda1_scan_points(cp, upper);
    const double lower = std::min(1e-4, upper / scan_points);

    auto f = [&cp](double x) { return lambda1_real(cp, x); };
    auto fd = [&cp](double x) { return lambda1_derivative_real(cp, x); };
    auto bisect = [tol](auto&& g, double lo, double hi) {
        double glo = g(lo);
        for (int it = 0; it < 200 && hi - lo > tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = g(mid);
            if ((glo <= 0.0) == (gm <= 0.0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    std::vector<double> candidates;
    double x_prev = lower;
    double f_prev = f(x_prev);
    double d_prev = fd(x_prev);
    for (int i = 1; i <= scan_points; ++i) {
        const double x = lower + (upper - lower) * static_cast<double>(i) / scan_points;
        const double fx = f(x);
        const double dx = fd(x);
        if (f_prev == 0.0) candidates.push_back(x_prev);
        if ((f_prev < 0.0 && fx > 0.0) || (f_prev > 0.0 && fx < 0.0)) {
            candidates.push_back(bisect(f, x_prev, x));
        } else if ((d_prev < 0.0 && dx > 0.0) || (d_prev > 0.0 && dx < 0.0)) {
            // interior extremum: a zero without sign change hides here
            const double xc = bisect(fd, x_prev, x);
            if (std::abs(f(xc)) <= std::sqrt(tol)) candidates.push_back(xc);
        }
        x_prev = x;
        f_prev = fx;
        d_prev = dx;
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<LambdaZero> zeros;
    for (double x : candidates) {
        if (!zeros.empty() && std::abs(x - zeros.back().x) <= 50.0 * tol) continue;
        zeros.push_back(LambdaZero{x, std::abs(fd(x)) > tol});
    }
    return zeros;
}

struct LambdaProfile {
    CoeffPair cp;
    double strip_bound = 0.0;
    std::vector<LambdaZero> zeros;
    std::map<int, double> lambda2_values;
};

inline LambdaProfile lambda_profile(const CoeffPair& cp, int max_order = 25, double x_max = 0.0,
                                    double tol = 1e-11) {
    LambdaProfile prof{cp, 0.0, {}, {}};
    prof.strip_bound = lambda1_strip_bound(cp);
    prof.zeros = lambda1_positive_zeros(cp, x_max, tol);
    for (int m = 1; m <= std::max(2, max_order); ++m) prof.lambda2_values[m] = lambda2_int(cp, m);
    return prof;
}

// Classifier outcome.  Zero uniqueness is certified on (0, strip_bound] only;
// beyond it the dominant coefficient group fixes the sign of Lambda1.
struct ConditionVerdict {
    bool unique_simple_zero_at_two = false; // exactly one positive zero, simple, located at 2
    bool odd_lambda2_nonzero = false;       // Lambda2(2m+1) != 0 for m = 1..checked_m
    bool implication_holds = false;         // both of the above
    bool symmetric_case = false;            // zero condition alone decides the symmetric case
    bool moment_case = false;               // Lambda2(2) = 0 and Lambda2(m) != 0 for 2 < m <= checked_m
    bool shifted_case_hypotheses = false;   // Lambda2(1) = 0 with Lambda1(1) != Lambda2(1)
    bool polya_pattern = false;             // sum a_j^2 = 1 and b = (1, 0, ..., 0)
    bool scan_stable = false;               // zero count unchanged under a 4x finer scan
    int checked_m = 0;
    double strip_bound = 0.0;
    std::vector<LambdaZero> zeros;
    std::string caveat;
};

inline ConditionVerdict classify(const CoeffPair& cp, int max_order = 25, double zero_tol = 1e-9) {
    require(max_order >= 3, "classify: max_order must be at least 3");
    ConditionVerdict v;
    v.checked_m = max_order;
    v.strip_bound = lambda1_strip_bound(cp);
    v.zeros = lambda1_positive_zeros(cp);
    v.scan_stable =
        lambda1_positive_zeros(cp, 0.0, 1e-11, 4 * lambda1_scan_points(cp, v.strip_bound)).size() ==
        v.zeros.size();
    v.caveat = "zero uniqueness certified on (0, strip_bound]; beyond it the dominant "
               "coefficient group fixes the sign of Lambda1";

    v.unique_simple_zero_at_two =
        v.scan_stable && v.zeros.size() == 1 && v.zeros.front().simple &&
        std::abs(v.zeros.front().x - 2.0) <= zero_tol &&
        std::abs(lambda1_real(cp, 2.0)) <= 1e-9;
    v.symmetric_case = v.unique_simple_zero_at_two;

    v.odd_lambda2_nonzero = true;
    for (int m = 1; m <= max_order; ++m) {
        if (std::abs(lambda2_int(cp, 2 * m + 1)) <= 1e-12) {
            v.odd_lambda2_nonzero = false;
            break;
        }
    }
    v.implication_holds = v.unique_simple_zero_at_two && v.odd_lambda2_nonzero;

    v.moment_case = std::abs(lambda2_int(cp, 2)) <= 1e-12;
    for (int m = 3; v.moment_case && m <= max_order; ++m)
        if (std::abs(lambda2_int(cp, m)) <= 1e-12) v.moment_case = false;

    v.shifted_case_hypotheses = std::abs(lambda2_int(cp, 1)) <= 1e-12 &&
                                std::abs(lambda1_real(cp, 1.0) - lambda2_int(cp, 1)) > 1e-12;

    double sum_sq = 0.0;
    for (double a : cp.a()) sum_sq += a * a;
    int ones = 0, zeros_b = 0;
    for (double b : cp.b()) {
        if (b == 1.0) ++ones;
        else if (b == 0.0) ++zeros_b;
    }
    v.polya_pattern = std::abs(sum_sq - 1.0) <= 1e-12 && ones == 1 &&
                      zeros_b == cp.n() - 1;
    return v;
}

// ---- gallery of special transforms ----------------------------------------

enum class GalleryCase { Stable, Constant, Log, PerturbedStable, Moment };

inline GalleryCase gallery_case_from_name(const std::string& name) {
    if (name == "stable") return GalleryCase::Stable;
    if (name == "constant") return GalleryCase::Constant;
    if (name == "log") return GalleryCase::Log;
    if (name == "perturbed_stable" || name == "perturbed-stable") return GalleryCase::PerturbedStable;
    if (name == "moment") return GalleryCase::Moment;
    throw validation_error("gallery: unknown case '" + name + "'");
}

struct GalleryParams {
    double gamma = 1.5;
    double rho = 0.5;
    double eps = 0.01;
    int m = 4;
};

// Pointwise evaluators on the upper half-plane (principal branches).  Only
// the polynomial moment case corresponds to a checkable cumulant sequence.
class GalleryPhi {
public:
    GalleryPhi(GalleryCase c, const GalleryParams& p) : case_(c), p_(p) {
        switch (case_) {
            case GalleryCase::Stable:
                require(p_.gamma > 0.0 && p_.gamma <= 2.0, "gallery stable: gamma must lie in (0, 2]");
                require(p_.rho >= 0.0 && p_.rho <= 1.0, "gallery stable: rho must lie in [0, 1]");
                break;
            case GalleryCase::Constant:
                break;
            case GalleryCase::Log:
                require(p_.eps > 0.0 && p_.eps <= 0.5, "gallery log: eps must lie in (0, 0.5]");
                break;
            case GalleryCase::PerturbedStable: {
                const double alpha = p_.gamma - 1.0;
                require(alpha > 1.0, "gallery perturbed_stable: gamma must exceed 2");
                const double nearest_odd = 2.0 * std::round((alpha - 1.0) / 2.0) + 1.0;
                require(std::abs(alpha - nearest_odd) > 1e-9,
                        "gallery perturbed_stable: gamma - 1 must not be an odd integer");
                require(p_.eps > 0.0 && p_.eps <= 0.5, "gallery perturbed_stable: eps must lie in (0, 0.5]");
                break;
            }
            case GalleryCase::Moment:
                require(p_.m >= 3 && p_.m <= max_poly_degree, "gallery moment: m must lie in [3, 16]");
                require(std::abs(p_.eps) <= 0.5, "gallery moment: |eps| must be small");
                break;
        }
    }

    // Laurent cases evaluate anywhere off the origin; the branch-cut cases
    // only mean what they claim on the open upper half-plane.
    bool in_domain(cplx z) const {
        if (z == cplx(0.0, 0.0)) return false;
        switch (case_) {
            case GalleryCase::Constant:
            case GalleryCase::Moment:
                return true;
            default:
                return z.imag() > 0.0;
        }
    }

    cplx operator()(cplx z) const {
        require(in_domain(z), "gallery phi: z outside the evaluator domain");
        const cplx i(0.0, 1.0);
        switch (case_) {
            case GalleryCase::Stable: {
                if (p_.gamma == 2.0) return 1.0 / z;
                if (p_.gamma == 1.0) {
                    // constant for rho = 1/2, logarithmic drift otherwise
                    return -2.0 * p_.rho * i + (2.0 * (2.0 * p_.rho - 1.0) / pi) * std::log(z);
                }
                if (p_.gamma > 1.0)
                    return std::exp(i * (p_.gamma - 2.0) * p_.rho * pi) * std::pow(z, 1.0 - p_.gamma);
                return -std::exp(i * p_.gamma * p_.rho * pi) * std::pow(z, 1.0 - p_.gamma);
            }
            case GalleryCase::Constant:
                return cplx(0.0, -1.0);
            case GalleryCase::Log:
                return (1.0 + p_.eps * (std::log(z) - i * pi / 2.0)) / z;
            case GalleryCase::PerturbedStable: {
                const double alpha = p_.gamma - 1.0;
                return 1.0 / z - p_.eps * std::cos(alpha * pi / 2.0) * i *
                                     std::exp(i * alpha * pi / 2.0) * std::pow(z, -alpha);
            }
            case GalleryCase::Moment:
                return 1.0 / z + p_.eps * pow_int(1.0 / z, p_.m - 1);
        }
        return 0.0;
    }

    GalleryCase kind() const { return case_; }
    const GalleryParams& params() const { return p_; }

private:
    GalleryCase case_;
    GalleryParams p_;
};

inline GalleryPhi gallery_phi(GalleryCase c, const GalleryParams& p = {}) { return GalleryPhi(c, p); }
inline GalleryPhi gallery_phi(const std::string& name, const GalleryParams& p = {}) {
    return GalleryPhi(gallery_case_from_name(name), p);
}

// max over z in Z of |sum_j a_j phi(z/a_j) - sum_k b_k phi(z/b_k)|;
// zero coefficients contribute nothing.
template <class Phi>
inline double identity_residual(const CoeffPair& cp, Phi&& phi, std::span<const cplx> samples) {
    double worst = 0.0;
    for (cplx z : samples) {
        require(in_upper_half_plane(z), "identity_residual: samples must lie in the upper half-plane");
        cplx acc = 0.0;
        for (double a : cp.a())
            if (a != 0.0) acc += a * phi(z / a);
        for (double b : cp.b())
            if (b != 0.0) acc -= b * phi(z / b);
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

template <class Phi>
inline double identity_residual(const CoeffPair& cp, Phi&& phi, const std::vector<cplx>& samples) {
    return identity_residual(cp, std::forward<Phi>(phi), std::span<const cplx>(samples));
}

} // namespace freeforms
