#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "awm/density.hpp"
#include "awm/errors.hpp"
#include "awm/lorenz.hpp"
#include "awm/params.hpp"
#include "awm/serialize.hpp"
#include "oracles.hpp"

using namespace awm;

namespace {

CanonicalDensity uniform_density(double lo, double hi, std::size_t points) {
    CanonicalDensity p;
    p.grid.resize(points);
    p.density.resize(points);
    const double value = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < points; ++i) {
        p.grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        p.density[i] = value;
    }
    p.support_lo = lo;
    p.n_total = 1.0;
    p.w_total = 0.5 * (lo + hi);
    return p;
}

CanonicalDensity narrow_peak(double center, double halfwidth) {
    CanonicalDensity p;
    p.grid = {center - halfwidth, center, center + halfwidth};
    p.density = {0.0, 1.0 / halfwidth, 0.0};
    p.support_lo = center - halfwidth;
    p.n_total = 1.0;
    p.w_total = center;
    return p;
}

} // namespace

TEST_CASE("kappa/lambda conversions") {
    CHECK(kappa_to_lambda(0.0) == 0.0);
    CHECK(kappa_to_lambda(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    // direct evaluation of kappa/(1-kappa)
    CHECK(kappa_to_lambda(0.076) == doctest::Approx(0.076 / 0.924).epsilon(1e-15));
    CHECK(kappa_to_lambda(0.076) == doctest::Approx(0.0822510822510822).epsilon(1e-12));
    CHECK(lambda_to_kappa(1.0) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(kappa_to_lambda(-0.01), DomainError);
    CHECK_THROWS_AS(kappa_to_lambda(1.0), DomainError);
    CHECK_THROWS_AS(lambda_to_kappa(-0.5), DomainError);

    oracle::Gen gen(42);
    for (int i = 0; i < 1000; ++i) {
        const double kappa = gen.uniform(0.0, 0.999);
        CHECK(lambda_to_kappa(kappa_to_lambda(kappa)) == doctest::Approx(kappa).epsilon(1e-14));
    }
}

TEST_CASE("parameter vector validation") {
    CHECK_NOTHROW(make_params(0.05, 0.07, 0.08));
    CHECK_THROWS_AS(make_params(0.0, 0.1, 0.0), DomainError);
    CHECK_THROWS_AS(make_params(0.05, -0.1, 0.0), DomainError);
    CHECK_THROWS_AS(make_params(0.05, 0.1, 1.0), DomainError);
    // chi <= kappa*zeta is the infeasible oligarchy-exhausting regime
    CHECK_THROWS_AS(make_params(0.01, 0.5, 0.05), DomainError);
    CHECK(make_params(0.05, 0.07, 0.0).supercritical());
    CHECK_FALSE(make_params(0.07, 0.05, 0.0).supercritical());
}

TEST_CASE("potentials of the uniform density on [0,2]") {
    CanonicalDensity p = uniform_density(0.0, 2.0, 2001);
    Potentials pot = compute_potentials(p);

    // closed forms: F = w/2, L = w^2/4, B = w^3/12
    const std::size_t mid = 1000; // w = 1
    CHECK(p.grid[mid] == doctest::Approx(1.0));
    CHECK(pot.F[mid] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(pot.L[mid] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(pot.B.back() == doctest::Approx(2.0 / 3.0).epsilon(1e-6));

    CHECK(pot.A.front() == doctest::Approx(1.0));
    CHECK(pot.F.back() == doctest::Approx(1.0));
    CHECK(pot.L.back() == doctest::Approx(1.0));
    CHECK(pot.B.front() == 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        CHECK(pot.A[i] + pot.F[i] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("potentials step at a narrow peak") {
    CanonicalDensity p = narrow_peak(1.0, 1e-4);
    Potentials pot = compute_potentials(p);
    CHECK(pot.F.front() == 0.0);
    CHECK(pot.F.back() == doctest::Approx(1.0));
    CHECK(pot.L.back() == doctest::Approx(1.0));
}

TEST_CASE("potential invariants on random densities") {
    oracle::Gen gen(1234);
    for (int trial = 0; trial < 25; ++trial) {
        CanonicalDensity p;
        const int points = gen.uniform_int(64, 400);
        double w = gen.uniform(-1.0, 0.5);
        for (int i = 0; i < points; ++i) {
            p.grid.push_back(w);
            p.density.push_back(gen.uniform(0.0, 3.0));
            w += gen.uniform(1e-4, 0.2);
        }
        p.support_lo = p.grid.front();
        Potentials pot = compute_potentials(p);

        CHECK(pot.F.front() == 0.0);
        CHECK(pot.B.front() == 0.0);
        CHECK(pot.F.back() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(pot.L.back() == doctest::Approx(1.0).epsilon(1e-12));
        bool ok = true;
        for (std::size_t i = 1; i < p.size(); ++i) {
            if (pot.F[i] < pot.F[i - 1] || pot.B[i] < pot.B[i - 1])
                ok = false;
            if (p.grid[i] >= 0.0 && p.grid[i - 1] >= 0.0 && pot.L[i] < pot.L[i - 1] - 1e-15)
                ok = false;
            if (std::abs(pot.A[i] + pot.F[i] - 1.0) > 1e-14)
                ok = false;
        }
        CHECK(ok);
    }
}

TEST_CASE("potentials reject a non-monotone grid") {
    CanonicalDensity p = uniform_density(0.0, 2.0, 32);
    std::swap(p.grid[3], p.grid[4]);
    CHECK_THROWS_AS(compute_potentials(p), DomainError);
}

TEST_CASE("lorenz_from_density") {
    SUBCASE("equal wealth gives the diagonal") {
        LorenzCurve c = lorenz_from_density(narrow_peak(1.0, 1e-5), 2000);
        double worst = 0.0;
        for (std::size_t i = 0; i < c.f.size(); ++i)
            worst = std::max(worst, std::abs(c.l[i] - c.f[i]));
        CHECK(worst < 2e-4);
        CHECK(c.terminal == 1.0);
    }
    SUBCASE("uniform density on [0,2] gives l = f^2") {
        LorenzCurve c = lorenz_from_density(uniform_density(0.0, 2.0, 4001), 4000);
        double worst = 0.0;
        for (std::size_t i = 0; i < c.f.size(); ++i)
            worst = std::max(worst, std::abs(c.l[i] - c.f[i] * c.f[i]));
        CHECK(worst < 1e-6);
    }
    SUBCASE("negative-wealth mass dips the curve below zero") {
        // uniform on [-0.5, 2.5]: mean 1, 1/6 of agents below zero
        LorenzCurve c = lorenz_from_density(uniform_density(-0.5, 2.5, 4001), 4000);
        double min_l = 0.0;
        for (double v : c.l)
            min_l = std::min(min_l, v);
        CHECK(min_l < -0.03);
        CHECK(c.l.front() == 0.0);
        CHECK(c.l.back() == doctest::Approx(1.0));
    }
}

TEST_CASE("density_from_lorenz") {
    SUBCASE("diagonal collapses to the narrowest representable peak") {
        LorenzCurve diag;
        for (int i = 0; i <= 100; ++i) {
            diag.f.push_back(i / 100.0);
            diag.l.push_back(i / 100.0);
        }
        CanonicalDensity p = density_from_lorenz(diag, 1.0, 1.0);
        CHECK(p.grid[1] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(measure_agents(p) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(measure_wealth(p) == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("l = f^2 recovers the uniform density on [0,2]") {
        LorenzCurve parab;
        for (int i = 0; i <= 2000; ++i) {
            const double f = i / 2000.0;
            parab.f.push_back(f);
            parab.l.push_back(f * f);
        }
        CanonicalDensity p = density_from_lorenz(parab, 1.0, 1.0);
        CHECK(p.grid.front() == doctest::Approx(0.0).epsilon(1e-3));
        CHECK(p.grid.back() == doctest::Approx(2.0).epsilon(1e-3));
        for (std::size_t i = 5; i + 5 < p.size(); i += 50)
            CHECK(p.density[i] == doctest::Approx(0.5).epsilon(1e-3));
        CHECK(measure_agents(p) == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(measure_wealth(p) == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("round trip through a smooth curve") {
        CanonicalDensity p0 = uniform_density(0.2, 1.8, 3001);
        LorenzCurve c0 = lorenz_from_density(p0, 8000);
        CanonicalDensity p1 = density_from_lorenz(c0, 1.0, 1.0);
        LorenzCurve c1 = lorenz_from_density(p1, 8000);
        double worst = 0.0;
        for (std::size_t i = 0; i < c0.f.size(); ++i)
            worst = std::max(worst, std::abs(c0.l[i] - c1.l[i]));
        CHECK(worst < 5e-4);
    }
    SUBCASE("supercritical curves are rejected") {
        LorenzCurve sup;
        for (int i = 0; i <= 100; ++i) {
            const double f = i / 100.0;
            sup.f.push_back(f);
            sup.l.push_back(0.5 * f * f);
        }
        sup.terminal = 0.5;
        sup.is_supercritical = true;
        CHECK_THROWS_AS(density_from_lorenz(sup, 1.0, 1.0), DomainError);
    }
    SUBCASE("non-concave curves are rejected") {
        LorenzCurve bad;
        for (int i = 0; i <= 100; ++i) {
            const double f = i / 100.0;
            bad.f.push_back(f);
            bad.l.push_back(f * f * (1.0 + 0.5 * std::sin(12.0 * f)));
        }
        bad.l.front() = 0.0;
        bad.l.back() = 1.0;
        CHECK_THROWS_AS(density_from_lorenz(bad, 1.0, 1.0), DomainError);
    }
}

TEST_CASE("gini") {
    SUBCASE("diagonal is zero") {
        LorenzCurve diag;
        diag.f = {0.0, 0.5, 1.0};
        diag.l = {0.0, 0.5, 1.0};
        CHECK(gini(diag) == doctest::Approx(0.0));
    }
    SUBCASE("complete oligarchy is one") {
        LorenzCurve olig;
        olig.f = {0.0, 1.0};
        olig.l = {0.0, 0.0};
        olig.terminal = 0.0;
        olig.is_supercritical = true;
        CHECK(gini(olig) == doctest::Approx(1.0));
    }
    SUBCASE("uniform density: both formulas give 1/3") {
        CanonicalDensity p = uniform_density(0.0, 2.0, 4001);
        const double g_curve = gini(lorenz_from_density(p, 10000));
        const double g_direct = gini_density_form(p);
        CHECK(g_curve == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
        CHECK(g_direct == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
        CHECK(std::abs(g_curve - g_direct) < 1e-6);
    }
    SUBCASE("equal wealth scores zero in the density form") {
        CHECK(gini_density_form(narrow_peak(1.0, 1e-5)) == doctest::Approx(0.0).epsilon(1e-4));
    }
    SUBCASE("density form rejects negative support") {
        CHECK_THROWS_AS(gini_density_form(uniform_density(-0.5, 2.5, 101)), DomainError);
    }
    SUBCASE("gini is invariant under scale_density") {
        CanonicalDensity p = uniform_density(0.0, 2.0, 2001);
        const double g0 = gini(lorenz_from_density(p, 4000));
        oracle::Gen gen(7);
        for (int i = 0; i < 5; ++i) {
            const double n = gen.uniform(0.1, 20.0);
            const double w = gen.uniform(0.1, 20.0);
            const double g1 = gini(lorenz_from_density(scale_density(p, n, w), 4000));
            CHECK(g1 == doctest::Approx(g0).epsilon(1e-12));
        }
    }
}

TEST_CASE("scale_density") {
    CanonicalDensity p = uniform_density(0.0, 2.0, 101);
    SUBCASE("identity at (1, 1) is bitwise") {
        CanonicalDensity q = scale_density(p, 1.0, 1.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(q.grid[i] == p.grid[i]);
            CHECK(q.density[i] == p.density[i]);
        }
    }
    SUBCASE("(n, w) = (2, 6): grid stretched by 3, density scaled by 2/3") {
        CanonicalDensity q = scale_density(p, 2.0, 6.0);
        CHECK(q.grid.back() == doctest::Approx(6.0));
        CHECK(q.density[50] == doctest::Approx(0.5 * 2.0 / 3.0));
        CHECK(measure_agents(q) == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(measure_wealth(q) == doctest::Approx(6.0).epsilon(1e-9));
    }
    SUBCASE("nonpositive totals are rejected") {
        CHECK_THROWS_AS(scale_density(p, 0.0, 1.0), DomainError);
        CHECK_THROWS_AS(scale_density(p, 1.0, -2.0), DomainError);
    }
}

TEST_CASE("shift_density and the potential transforms") {
    const ParameterVector theta = make_params(0.05, 0.03, 0.076);
    const double lambda = theta.lambda();

    // A smooth positive-support stand-in for an EYSM solution, with
    // N = 1 and W = 1 + lambda as the shift construction requires.
    CanonicalDensity barred = scale_density(uniform_density(0.0, 2.0, 2001), 1.0, 1.0 + lambda);

    SUBCASE("kappa = 0 is the identity") {
        CanonicalDensity same = shift_density(barred, make_params(0.05, 0.03, 0.0));
        CHECK(same.grid == barred.grid);
        CHECK(same.density == barred.density);
    }

    CanonicalDensity shifted = shift_density(barred, theta);

    SUBCASE("moments and support") {
        CHECK(shifted.support_lo == doctest::Approx(-lambda).epsilon(1e-12));
        CHECK(measure_agents(shifted) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(measure_wealth(shifted) == doctest::Approx(1.0).epsilon(1e-9));
        const double mean_in = measure_wealth(barred) / measure_agents(barred);
        const double mean_out = measure_wealth(shifted) / measure_agents(shifted);
        CHECK(mean_out == doctest::Approx(mean_in - lambda).epsilon(1e-9));
    }

    SUBCASE("forward potential transforms hold on the grid") {
        Potentials b = compute_potentials(barred); // barred: normalized by N=1, W=1+lambda
        Potentials s = compute_potentials(shifted);
        const double mu_bar = 1.0 + lambda;
        const double kappa = theta.kappa;
        for (std::size_t i = 0; i < barred.size(); i += 37) {
            CHECK(s.F[i] == doctest::Approx(b.F[i]).epsilon(1e-12));
            CHECK(s.A[i] == doctest::Approx(b.A[i]).epsilon(1e-12));
            CHECK(s.L[i] ==
                  doctest::Approx((1.0 + lambda) * b.L[i] - lambda * b.F[i]).scale(1.0).epsilon(1e-10));
            const double expected_b =
                b.B[i] - kappa * mu_bar * mu_bar * (b.L[i] - kappa * b.F[i] / 2.0);
            CHECK(s.B[i] == doctest::Approx(expected_b).scale(1.0).epsilon(1e-10));
        }
    }

    SUBCASE("inverse potential transforms close the loop") {
        Potentials b = compute_potentials(barred);
        Potentials s = compute_potentials(shifted);
        const double kappa = theta.kappa;
        for (std::size_t i = 0; i < barred.size(); i += 53) {
            CHECK(b.L[i] ==
                  doctest::Approx((1.0 - kappa) * s.L[i] + kappa * s.F[i]).scale(1.0).epsilon(1e-10));
            const double expected_bbar =
                s.B[i] + lambda * (s.L[i] + lambda * s.F[i] / 2.0); // mu = 1 canonical
            CHECK(b.B[i] == doctest::Approx(expected_bbar).scale(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("dual_lorenz") {
    LorenzCurve sub;
    for (int i = 0; i <= 1000; ++i) {
        const double f = i / 1000.0;
        sub.f.push_back(f);
        sub.l.push_back(f * f);
    }

    SUBCASE("rejects non-supercritical targets") {
        CHECK_THROWS_AS(dual_lorenz(sub, 0.06, 0.03), DomainError);
        CHECK_THROWS_AS(dual_lorenz(sub, 0.05, 0.05), DomainError);
    }
    SUBCASE("terminal is chi/zeta") {
        LorenzCurve sup = dual_lorenz(sub, 0.03, 0.06);
        CHECK(sup.terminal == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(sup.is_supercritical);
        CHECK(sup.l[500] == doctest::Approx(0.5 * 0.25).epsilon(1e-15));
    }
    SUBCASE("near the critical ratio the map approaches the identity") {
        LorenzCurve sup = dual_lorenz(sub, 0.0599999999, 0.06);
        for (std::size_t i = 0; i < sub.l.size(); i += 100)
            CHECK(sup.l[i] == doctest::Approx(sub.l[i]).epsilon(1e-8));
    }
}

TEST_CASE("awm_lorenz") {
    LorenzCurve eysm;
    for (int i = 0; i <= 1000; ++i) {
        const double f = i / 1000.0;
        eysm.f.push_back(f);
        eysm.l.push_back(f * f);
    }

    SUBCASE("kappa = 0 is the identity") {
        LorenzCurve out = awm_lorenz(eysm, make_params(0.05, 0.0, 0.0));
        for (std::size_t i = 0; i < out.l.size(); i += 100)
            CHECK(out.l[i] == eysm.l[i]);
        CHECK(out.terminal == 1.0);
    }
    SUBCASE("subcritical terminal stays exactly 1") {
        LorenzCurve out = awm_lorenz(eysm, make_params(0.07, 0.05, 0.09));
        CHECK(out.terminal == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(out.l.front() == 0.0);
    }
    SUBCASE("supercritical terminal matches the boundary formula") {
        LorenzCurve sup = dual_lorenz(eysm, 0.036, 0.050);
        LorenzCurve out = awm_lorenz(sup, make_params(0.036, 0.050, 0.058));
        // 1 minus the reported 29.72% oligarchy share
        CHECK(out.terminal == doctest::Approx(0.7028).epsilon(2e-4));
        const double lambda = kappa_to_lambda(0.058);
        CHECK(out.terminal ==
              doctest::Approx((1.0 + lambda) * 0.72 - lambda).epsilon(1e-12));
    }
    SUBCASE("infeasible shift is rejected") {
        LorenzCurve sup = dual_lorenz(eysm, 0.01, 0.5);
        ParameterVector theta{0.01, 0.5, 0.05}; // chi < kappa*zeta
        CHECK_THROWS_AS(awm_lorenz(sup, theta), DomainError);
    }
}

TEST_CASE("oligarchy_fraction reproduces the reported shares") {
    CHECK(oligarchy_fraction(make_params(0.05, 0.05, 0.1)) == 0.0);
    CHECK(oligarchy_fraction(make_params(0.06, 0.05, 0.1)) == 0.0);

    struct Row {
        double chi, zeta, kappa, share;
    };
    const Row rows[] = {
        {0.088, 0.112, 0.092, 0.2360}, {0.102, 0.134, 0.100, 0.2653},
        {0.104, 0.146, 0.096, 0.3182}, {0.096, 0.134, 0.098, 0.3144},
        {0.074, 0.100, 0.080, 0.2826}, {0.070, 0.092, 0.080, 0.2599},
        {0.070, 0.100, 0.076, 0.3247}, {0.046, 0.058, 0.076, 0.2239},
        {0.048, 0.066, 0.078, 0.2958}, {0.036, 0.050, 0.058, 0.2972},
    };
    for (const Row& r : rows) {
        const double got = oligarchy_fraction(make_params(r.chi, r.zeta, r.kappa));
        CHECK(std::abs(got - r.share) < 5e-4); // 0.05 percentage points
    }
}

TEST_CASE("lorenz slope matches the wealth parameter") {
    CanonicalDensity p = uniform_density(0.0, 2.0, 4001);
    LorenzCurve c = lorenz_from_density(p, 10000);
    // dl/df at f = F(w) equals w / mean; here mean = 1 and w = 2f
    for (std::size_t i = 1000; i < 9000; i += 1000) {
        const double slope = (c.l[i + 1] - c.l[i - 1]) / (c.f[i + 1] - c.f[i - 1]);
        CHECK(slope == doctest::Approx(2.0 * c.f[i]).epsilon(5e-3));
    }
}

TEST_CASE("serialization round trips") {
    LorenzCurve c;
    oracle::Gen gen(2024);
    c.f.push_back(0.0);
    c.l.push_back(0.0);
    double f = 0.0, l = 0.0;
    for (int i = 0; i < 200; ++i) {
        f += gen.uniform(0.0, 0.01);
        l += gen.uniform(0.0, 0.008);
        c.f.push_back(f);
        c.l.push_back(l);
    }
    for (auto& v : c.f)
        v /= f;
    for (auto& v : c.l)
        v /= l;
    c.terminal = 1.0;

    SUBCASE("CSV is exact") {
        std::stringstream ss;
        write_lorenz_csv(c, ss);
        LorenzCurve back = read_lorenz_csv(ss);
        REQUIRE(back.f.size() == c.f.size());
        for (std::size_t i = 0; i < c.f.size(); ++i) {
            CHECK(back.f[i] == c.f[i]);
            CHECK(back.l[i] == c.l[i]);
        }
    }
    SUBCASE("JSON is exact and carries the terminal value") {
        LorenzCurve sup = dual_lorenz(c, 0.03, 0.06);
        LorenzCurve back = lorenz_from_json(lorenz_to_json(sup, {{"chi", 0.03}}));
        REQUIRE(back.f.size() == sup.f.size());
        CHECK(back.terminal == sup.terminal);
        CHECK(back.is_supercritical);
        for (std::size_t i = 0; i < sup.f.size(); i += 17)
            CHECK(back.l[i] == sup.l[i]);
    }
    SUBCASE("density JSON preserves the support and moments") {
        CanonicalDensity p = uniform_density(-0.3, 2.3, 301);
        CanonicalDensity back = density_from_json(density_to_json(p));
        CHECK(back.support_lo == p.support_lo);
        CHECK(back.n_total == p.n_total);
        CHECK(back.w_total == p.w_total);
        for (std::size_t i = 0; i < p.size(); i += 29)
            CHECK(back.density[i] == p.density[i]);
    }
    SUBCASE("density CSV round trip") {
        CanonicalDensity p = uniform_density(0.0, 2.0, 101);
        std::stringstream ss;
        write_density_csv(p, ss);
        CanonicalDensity back = read_density_csv(ss);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(back.grid[i] == p.grid[i]);
            CHECK(back.density[i] == p.density[i]);
        }
    }
}
