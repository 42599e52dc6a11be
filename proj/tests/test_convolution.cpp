#include <catch_amalgamated.hpp>

#include <functional>

#include "freeforms/convolution.hpp"
#include "freeforms/cumulants.hpp"
#include "oracles.hpp"

using namespace freeforms;
using oracles::cplx;

namespace {
const Measure bernoulli = AtomicMeasure::symmetric_bernoulli();
const Measure delta0 = AtomicMeasure::dirac(0.0);

// Newton inversion of an arbitrary F with a finite-difference derivative.
cplx voiculescu_of_f(const std::function<cplx(cplx)>& f, cplx z) {
    auto df = [&f](cplx w) {
        const double h = 1e-6 * (1.0 + std::abs(w));
        return (f(w + cplx(h, 0)) - f(w - cplx(h, 0))) / (2.0 * h);
    };
    return invert_f(f, df, z).value - z;
}
} // namespace

TEST_CASE("subordination fixed point") {
    SECTION("two point masses at zero are a no-op") {
        const auto p = subordination_solve(delta0, delta0, cplx(0.4, 1.2));
        REQUIRE(std::abs(p.Z1 - cplx(0.4, 1.2)) < 1e-14);
        REQUIRE(std::abs(p.Z2 - cplx(0.4, 1.2)) < 1e-14);
        REQUIRE(std::abs(p.F - cplx(0.4, 1.2)) < 1e-14);
    }
    SECTION("point mass translates the other measure") {
        const double a = 0.7;
        for (cplx z : {cplx(0, 1), cplx(1.5, 0.3), cplx(-2.0, 2.0)}) {
            const auto p = subordination_solve(AtomicMeasure::dirac(a), bernoulli, z);
            REQUIRE(std::abs(p.Z2 - (z - a)) < 1e-10);
            REQUIRE(std::abs(p.F - oracles::bernoulli_f(z - a)) < 1e-10);
            REQUIRE(p.residual <= 1e-12);
        }
    }
    SECTION("class properties of the subordination pair") {
        for (cplx z : {cplx(0.0, 0.05), cplx(1.2, 0.4), cplx(-0.3, 2.5)}) {
            const auto p = subordination_solve(bernoulli, bernoulli, z);
            REQUIRE(p.Z1.imag() >= z.imag() - 1e-9);
            REQUIRE(p.Z2.imag() >= z.imag() - 1e-9);
            // first system relation holds by construction
            REQUIRE(std::abs(p.Z1 + p.Z2 - reciprocal_f(bernoulli, p.Z1) - z) < 1e-9);
        }
    }
    SECTION("two-atom square gives the exact closed form") {
        for (cplx z : {cplx(0.3, 0.01), cplx(0, 1), cplx(1.9, 0.002)}) {
            const auto p = subordination_solve(bernoulli, bernoulli, z);
            REQUIRE(std::abs(p.F - oracles::arcsine_f(z)) < 1e-9);
        }
    }
    SECTION("semicircular square matches the doubled variance") {
        const Measure w = standard_semicircular(400001);
        const cplx z(0, 2);
        const auto p = subordination_solve(w, w, z);
        // exact F of the variance-2 semicircular law
        const cplx g2 = (z - oracles::branch_sqrt(z * z - 8.0, z)) / 4.0;
        REQUIRE(std::abs(p.F - 1.0 / g2) < 1e-8);
    }
    SECTION("iteration budget is enforced") {
        SubordinationOptions opt;
        opt.max_iterations = 1;
        opt.tol = 1e-15;
        REQUIRE_THROWS_AS(subordination_solve(bernoulli, bernoulli, cplx(0.1, 0.01), opt),
                          convergence_error);
    }
}

TEST_CASE("free additive convolution densities") {
    SECTION("two-atom square is the arcsine law") {
        GridSpec grid;
        grid.xmin = -2.2;
        grid.xmax = 2.2;
        grid.n = 4401;
        const GridDensity out = free_convolve(bernoulli, bernoulli, grid, {4e-3, 2e-3, 1e-3});
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double x = out.x(i);
            if (std::abs(x) <= 1.8)
                REQUIRE(std::abs(out.values()[i] - oracles::arcsine_density(x)) <= 1e-2);
        }
        const auto m = moments(out, 2);
        REQUIRE(std::abs(m[2] - 2.0) <= 1e-3);
        // mass concentrates inside the Minkowski interval [-2, 2]; the
        // square-root edge leaks smoothing mass like sqrt(eps), so the
        // support check runs at a finer schedule
        const auto [lo, hi] = minkowski_support(bernoulli, bernoulli);
        REQUIRE(lo == -2.0);
        REQUIRE(hi == 2.0);
        GridSpec fine;
        fine.xmin = -2.2;
        fine.xmax = 2.2;
        fine.n = 44001;
        const GridDensity outf = free_convolve(bernoulli, bernoulli, fine, {4e-4, 2e-4, 1e-4});
        double inside = 0.0;
        for (std::size_t i = 0; i + 1 < outf.size(); ++i) {
            const double xm = 0.5 * (outf.x(i) + outf.x(i + 1));
            if (xm >= lo - outf.dx() && xm <= hi + outf.dx())
                inside += 0.5 * (outf.values()[i] + outf.values()[i + 1]) * outf.dx();
        }
        REQUIRE(inside >= 1.0 - 1e-3);
    }
    SECTION("semicircular square doubles the second cumulant") {
        const Measure w = standard_semicircular(2001);
        GridSpec grid;
        grid.xmin = -3.0;
        grid.xmax = 3.0;
        grid.n = 1501;
        const GridDensity out = free_convolve(w, w, grid, {4e-3, 2e-3, 1e-3});
        const CumulantSeq k = moments_to_cumulants(moments(out, 6));
        REQUIRE(std::abs(k.kappa(2) - 2.0) <= 1e-3);
        REQUIRE(std::abs(k.kappa(1)) <= 1e-3);
    }
    SECTION("point mass translates the density") {
        const Measure w = standard_semicircular(2001);
        GridSpec grid;
        grid.xmin = -1.5;
        grid.xmax = 3.5;
        grid.n = 1001;
        const GridDensity out = free_convolve(AtomicMeasure::dirac(1.0), w, grid, {4e-3, 2e-3, 1e-3});
        double worst = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i)
            worst = std::max(worst, std::abs(out.values()[i] - oracles::semicircle_density(out.x(i), 1.0, 1.0)));
        REQUIRE(worst <= 5e-3);
    }
    SECTION("argument order does not change the output") {
        const Measure w = standard_semicircular(2001);
        GridSpec grid;
        grid.xmin = -3.2;
        grid.xmax = 3.2;
        grid.n = 401;
        const GridDensity ab = free_convolve(bernoulli, w, grid, {4e-3, 2e-3});
        const GridDensity ba = free_convolve(w, bernoulli, grid, {4e-3, 2e-3});
        REQUIRE(ab.values() == ba.values());
    }
}

TEST_CASE("cumulant additivity through the density pipeline") {
    const Measure w = standard_semicircular(2001);
    GridSpec grid;
    grid.xmin = -3.2;
    grid.xmax = 3.2;
    grid.n = 1601;
    const GridDensity out = free_convolve(bernoulli, w, grid, {4e-3, 2e-3, 1e-3});
    const CumulantSeq k_out = moments_to_cumulants(moments(out, 6));
    const CumulantSeq k_sum = add(moments_to_cumulants(moments(bernoulli, 6)),
                                  moments_to_cumulants(moments(w, 6)));
    for (int s = 1; s <= 6; ++s) REQUIRE(std::abs(k_out.kappa(s) - k_sum.kappa(s)) <= 1e-2);
}

TEST_CASE("transform additivity at sample points") {
    const Measure half = AtomicMeasure::symmetric_bernoulli(0.5);
    auto f_out = [&](cplx z) { return convolved_f(bernoulli, half, z); };
    for (double y : {5.0, 10.0}) {
        const cplx z(0, y);
        const cplx phi_sum = voiculescu_of_measure(bernoulli, z).phi +
                             voiculescu_of_measure(half, z).phi;
        const cplx phi_conv = voiculescu_of_f(f_out, z);
        REQUIRE(std::abs(phi_conv - phi_sum) <= 1e-7);
    }
}
