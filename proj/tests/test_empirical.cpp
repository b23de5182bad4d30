#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "awm/empirical.hpp"
#include "awm/errors.hpp"
#include "awm/lorenz.hpp"

using namespace awm;

namespace {

EmpiricalDistribution from_csv(const std::string& text) {
    std::istringstream in(text);
    return load_households(in);
}

} // namespace

TEST_CASE("load_households") {
    SUBCASE("two plain rows") {
        EmpiricalDistribution d = from_csv("weight,networth\n1,0.5\n1,1.5\n");
        CHECK(d.records.size() == 2);
        CHECK(d.records[0].networth == 0.5);
        CHECK(d.dropped_zero_weight == 0);
    }
    SUBCASE("rows come out sorted by networth") {
        EmpiricalDistribution d = from_csv("weight,networth\n2,5.0\n1,-1.0\n3,2.0\n");
        CHECK(d.records[0].networth == -1.0);
        CHECK(d.records[2].networth == 5.0);
    }
    SUBCASE("zero-weight rows are dropped and counted") {
        EmpiricalDistribution d = from_csv("weight,networth\n1,1\n0,99\n2,2\n0,3\n");
        CHECK(d.records.size() == 2);
        CHECK(d.dropped_zero_weight == 2);
    }
    SUBCASE("negative weight is rejected with its line number") {
        try {
            from_csv("weight,networth\n1,1\n-2,0.5\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 3);
        }
    }
    SUBCASE("malformed rows carry line numbers") {
        try {
            from_csv("weight,networth\n1,1\nbogus\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 3);
        }
        CHECK_THROWS_AS(from_csv("weight,networth\n1,1,9\n"), ParseError);
        CHECK_THROWS_AS(from_csv("weight,networth\n1,abc\n"), ParseError);
    }
    SUBCASE("empty or headerless input is rejected") {
        CHECK_THROWS_AS(from_csv(""), ParseError);
        CHECK_THROWS_AS(from_csv("w,n\n1,1\n"), ParseError);
        CHECK_THROWS_AS(from_csv("weight,networth\n"), ParseError);
    }
    SUBCASE("a survey-sized file loads with every row intact") {
        std::string text = "weight,networth\n";
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> wdist(0.1, 5.0), ndist(-2.0, 100.0);
        const int rows = 30000;
        for (int i = 0; i < rows; ++i)
            text += std::to_string(wdist(rng)) + "," + std::to_string(ndist(rng)) + "\n";
        EmpiricalDistribution d = from_csv(text);
        CHECK(d.records.size() == static_cast<std::size_t>(rows));
    }
}

TEST_CASE("merge") {
    EmpiricalDistribution base = from_csv("weight,networth\n1,1\n1,2\n1,3\n");
    SUBCASE("merging an empty extra set changes nothing") {
        EmpiricalDistribution empty;
        EmpiricalDistribution merged = merge(base, empty);
        CHECK(merged.records.size() == base.records.size());
    }
    SUBCASE("record count is the sum") {
        EmpiricalDistribution rich = from_csv("weight,networth\n1,400\n1,900\n");
        EmpiricalDistribution merged = merge(base, rich);
        CHECK(merged.records.size() == 5);
        CHECK(merged.records.back().networth == 900.0);
    }
}

TEST_CASE("canonicalize") {
    SUBCASE("already canonical data keeps its wealths") {
        EmpiricalDistribution d = from_csv("weight,networth\n1,0.5\n1,1.5\n");
        d = canonicalize(std::move(d));
        CHECK(d.records[0].weight == doctest::Approx(0.5));
        CHECK(d.records[0].networth == doctest::Approx(0.5));
        CHECK(d.records[1].networth == doctest::Approx(1.5));
        CHECK(d.normalized);
    }
    SUBCASE("wealths rescale to unit mean") {
        EmpiricalDistribution d = canonicalize(from_csv("weight,networth\n1,1\n1,3\n"));
        CHECK(d.records[0].networth == doctest::Approx(0.5));
        CHECK(d.records[1].networth == doctest::Approx(1.5));
    }
    SUBCASE("idempotent") {
        EmpiricalDistribution once = canonicalize(from_csv("weight,networth\n2,4\n6,9\n1,-3\n"));
        EmpiricalDistribution twice = canonicalize(once);
        for (std::size_t i = 0; i < once.records.size(); ++i) {
            CHECK(twice.records[i].weight == doctest::Approx(once.records[i].weight).epsilon(1e-15));
            CHECK(twice.records[i].networth ==
                  doctest::Approx(once.records[i].networth).epsilon(1e-15));
        }
    }
    SUBCASE("nonpositive total wealth is degenerate") {
        CHECK_THROWS_AS(canonicalize(from_csv("weight,networth\n1,-1\n1,0.5\n")), DomainError);
    }
}

TEST_CASE("lorenz_ordinates") {
    SUBCASE("requires canonical form") {
        EmpiricalDistribution raw = from_csv("weight,networth\n1,1\n1,2\n");
        CHECK_THROWS_AS(lorenz_ordinates(raw), DomainError);
    }
    SUBCASE("hand cumulative sums") {
        EmpiricalDistribution d = canonicalize(from_csv("weight,networth\n1,0.5\n1,1.5\n"));
        LorenzCurve c = lorenz_ordinates(d);
        REQUIRE(c.f.size() == 3);
        CHECK(c.f[1] == doctest::Approx(0.5));
        CHECK(c.l[1] == doctest::Approx(0.25));
        CHECK(c.f[2] == 1.0);
        CHECK(c.l[2] == 1.0);
    }
    SUBCASE("negative dip") {
        EmpiricalDistribution d = canonicalize(from_csv("weight,networth\n1,-0.5\n1,2.5\n"));
        LorenzCurve c = lorenz_ordinates(d);
        CHECK(c.l[1] == doctest::Approx(-0.25));
        CHECK(c.l[2] == doctest::Approx(1.0));
    }
    SUBCASE("equal wealths collapse to one diagonal ordinate") {
        EmpiricalDistribution d = canonicalize(from_csv("weight,networth\n1,2\n1,2\n1,2\n"));
        LorenzCurve c = lorenz_ordinates(d);
        REQUIRE(c.f.size() == 2); // (0,0) plus the pooled tie
        CHECK(c.f[1] == 1.0);
        CHECK(c.l[1] == 1.0);
    }
    SUBCASE("the dip bottom sits at the negative-wealth population share") {
        EmpiricalDistribution d = canonicalize(
            from_csv("weight,networth\n2,-1\n1,-0.25\n3,1\n4,2.5\n"));
        LorenzCurve c = lorenz_ordinates(d);
        double min_l = 1.0;
        double argmin_f = 0.0;
        for (std::size_t i = 0; i < c.l.size(); ++i)
            if (c.l[i] < min_l) {
                min_l = c.l[i];
                argmin_f = c.f[i];
            }
        CHECK(argmin_f == doctest::Approx(0.3)); // weight 3 of 10 below zero
    }
}

TEST_CASE("ordinate invariances") {
    const std::string rows[] = {"3,0.2", "1,-0.7", "2,4.0", "5,1.1", "4,0.9", "2,2.2"};

    SUBCASE("row order does not matter") {
        std::string a = "weight,networth\n";
        for (const auto& r : rows)
            a += r + "\n";
        std::string b = "weight,networth\n";
        for (int i = 5; i >= 0; --i)
            b += rows[i] + std::string("\n");
        LorenzCurve ca = lorenz_ordinates(canonicalize(from_csv(a)));
        LorenzCurve cb = lorenz_ordinates(canonicalize(from_csv(b)));
        REQUIRE(ca.f.size() == cb.f.size());
        for (std::size_t i = 0; i < ca.f.size(); ++i) {
            CHECK(ca.f[i] == doctest::Approx(cb.f[i]).epsilon(1e-15));
            CHECK(ca.l[i] == doctest::Approx(cb.l[i]).epsilon(1e-15));
        }
    }
    SUBCASE("scaling every raw weight leaves canonical ordinates unchanged") {
        std::string a = "weight,networth\n";
        std::string b = "weight,networth\n";
        for (const auto& r : rows) {
            a += r + "\n";
            const auto comma = r.find(',');
            const double w = std::stod(r.substr(0, comma)) * 7.25;
            b += std::to_string(w) + r.substr(comma) + "\n";
        }
        LorenzCurve ca = lorenz_ordinates(canonicalize(from_csv(a)));
        LorenzCurve cb = lorenz_ordinates(canonicalize(from_csv(b)));
        for (std::size_t i = 0; i < ca.f.size(); ++i) {
            CHECK(ca.f[i] == doctest::Approx(cb.f[i]).epsilon(1e-12));
            CHECK(ca.l[i] == doctest::Approx(cb.l[i]).epsilon(1e-12));
        }
    }
    SUBCASE("ordinates are monotone in f and end at (1, 1)") {
        std::string a = "weight,networth\n";
        for (const auto& r : rows)
            a += r + "\n";
        LorenzCurve c = lorenz_ordinates(canonicalize(from_csv(a)));
        for (std::size_t i = 1; i < c.f.size(); ++i)
            CHECK(c.f[i] > c.f[i - 1]);
        CHECK(c.f.back() == 1.0);
        CHECK(c.l.back() == 1.0);
    }
}
