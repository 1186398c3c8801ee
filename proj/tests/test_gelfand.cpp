#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isoshell/gelfand.hpp"
#include "isoshell/ivp.hpp"

using namespace isoshell;

namespace {

UProfile make_profile(int n, double t_max) {
    IvpConfig cfg;
    cfg.n = n;
    cfg.t_max = t_max;
    return integrate_U(cfg);
}

const UProfile& p3() {
    static const UProfile p = make_profile(3, 1e5);
    return p;
}

}  // namespace

TEST_CASE("exact oracles satisfy their equations (independent differences)") {
    for (int n : {1, 2}) {
        for (double t : {0.3, 1.1, 2.7, 6.0}) {
            const double h = 2e-3;  // balances h^4 truncation against roundoff
            const auto um2 = exact_oracle(n, t - 2 * h);
            const auto um = exact_oracle(n, t - h);
            const auto u0 = exact_oracle(n, t);
            const auto up = exact_oracle(n, t + h);
            const auto up2 = exact_oracle(n, t + 2 * h);
            const double upp =
                (-um2[0] + 16 * um[0] - 30 * u0[0] + 16 * up[0] - up2[0]) / (12 * h * h);
            const double residual = upp + (n - 1) / t * u0[1] + std::exp(u0[0]);
            CHECK(std::abs(residual) < 2e-9);
            // u' is consistent with u
            const double fd1 = (um2[0] - 8 * um[0] + 8 * up[0] - up2[0]) / (12 * h);
            CHECK(fd1 == doctest::Approx(u0[1]).epsilon(1e-10));
        }
    }
    const auto at0 = exact_oracle(1, 0.0);
    CHECK(at0[0] == 0.0);
    CHECK(at0[1] == 0.0);
    CHECK_THROWS_AS((void)exact_oracle(3, 1.0), std::invalid_argument);
}

TEST_CASE("neumann multiplier against the closed forms") {
    const auto p2 = make_profile(2, 1e5);
    for (double s : {0.4, 2.0, 11.0, 500.0}) {
        CHECK(neumann_multiplier(p2, s) ==
              doctest::Approx(-4.0 * s * s / (8.0 + s * s)).epsilon(1e-9));
    }
    const auto p1 = make_profile(1, 200.0);
    for (double s : {0.5, 3.0, 40.0}) {
        CHECK(neumann_multiplier(p1, s) ==
              doctest::Approx(-std::sqrt(2.0) * s * std::tanh(s / std::sqrt(2.0)))
                  .epsilon(1e-9));
    }
    CHECK(std::abs(neumann_multiplier(p2, 1e-6)) < 1e-11);  // -> 0 as sigma -> 0
}

TEST_CASE("dirichlet multiplier: exact n = 2 curve and its maximum") {
    const auto p2 = make_profile(2, 1e5);
    for (double s : {0.7, 2.0, 9.0}) {
        const double expected = s * s / std::pow(1.0 + s * s / 8.0, 2);
        CHECK(dirichlet_multiplier(p2, s) == doctest::Approx(expected).epsilon(1e-9));
    }
    // maximum value 2 at sigma^2 = 8
    CHECK(dirichlet_multiplier(p2, std::sqrt(8.0)) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(dirichlet_multiplier(p2, 1e-5) < 1e-9);
}

TEST_CASE("neumann multiplier is exactly W on a shared n = 3 profile") {
    for (double s : {0.3, 4.07, 98.0, 4.4e4}) {
        CHECK(neumann_multiplier(p3(), s) == p3().w(s));  // machine-equal
    }
}

TEST_CASE("dirichlet multiplier oscillates about 2(n-2) for n = 3") {
    for (double s : {2e4, 5e4, 9e4}) {
        CHECK(std::abs(dirichlet_multiplier(p3(), s) - 2.0) < 0.1);
    }
}

TEST_CASE("asymptotes for 3 <= n <= 9 and monotone regimes beyond") {
    for (int n : {3, 5, 7, 9}) {
        const auto p = make_profile(n, 2e4);
        CHECK(std::abs(neumann_multiplier(p, 1.5e4) + 2.0) < 0.1);
        if (n >= 3) CHECK(std::abs(dirichlet_multiplier(p, 1.5e4) - 2.0 * (n - 2)) < 0.1 * (n - 2) + 0.1);
    }
}

TEST_CASE("radial solution counts reproduce the dimension-dependent lists") {
    const auto p2 = make_profile(2, 1e5);
    {
        CountQuery q;
        q.kind = CountQuery::Kind::neumann;
        q.n = 2;
        q.level = -3.0;
        CHECK(count_radial_solutions(q, p2).count == 1);
        q.level = -5.0;  // below gamma_2^* = -4
        CHECK(count_radial_solutions(q, p2).count == 0);
    }
    {
        const auto p10 = make_profile(10, 1e5);
        CountQuery q;
        q.kind = CountQuery::Kind::dirichlet;
        q.n = 10;
        q.level = 15.0;  // below lambda_10^* = 16
        CHECK(count_radial_solutions(q, p10).count == 1);
        q.level = 16.0;  // at the bound: no solution
        const auto at_bound = count_radial_solutions(q, p10);
        CHECK(at_bound.count == 0);
        CHECK_FALSE(at_bound.truncated);  // flag reserved for 3 <= n <= 9

        CountQuery qn;
        qn.kind = CountQuery::Kind::neumann;
        qn.n = 10;
        for (double g : {-1.9, -1.0, -0.5}) {
            qn.level = g;
            CHECK(count_radial_solutions(qn, p10).count == 1);
        }
    }
}

TEST_CASE("infinite-multiplicity regime is reported as truncated counts") {
    CountQuery q;
    q.kind = CountQuery::Kind::neumann;
    q.n = 3;
    q.level = -2.0;
    const auto r = count_radial_solutions(q, p3());
    CHECK(r.count >= 5);
    CHECK(r.truncated);

    CountQuery qd;
    qd.kind = CountQuery::Kind::dirichlet;
    qd.n = 3;
    qd.level = 2.0;
    const auto rd = count_radial_solutions(qd, p3());
    CHECK(rd.count >= 5);
    CHECK(rd.truncated);
}

TEST_CASE("multiplicity is non-decreasing approaching gamma = -2") {
    const auto p = make_profile(3, 1e5);
    int prev = 0;
    for (int k = 1; k <= 3; ++k) {
        CountQuery q;
        q.kind = CountQuery::Kind::neumann;
        q.n = 3;
        q.level = -2.0 + std::pow(10.0, -k);
        const int above = count_radial_solutions(q, p).count;
        CHECK(above >= prev);
        prev = above;
    }
    prev = 0;
    for (int k = 1; k <= 3; ++k) {
        CountQuery q;
        q.kind = CountQuery::Kind::neumann;
        q.n = 3;
        q.level = -2.0 - std::pow(10.0, -k);
        const int below = count_radial_solutions(q, p).count;
        CHECK(below >= prev);
        prev = below;
    }
}

TEST_CASE("every counted root satisfies its multiplier equation") {
    CountQuery q;
    q.kind = CountQuery::Kind::neumann;
    q.n = 3;
    q.level = -1.9;
    const auto r = count_radial_solutions(q, p3());
    REQUIRE(r.count == 3);
    for (std::size_t i = 0; i < r.sigmas.size(); ++i) {
        if (i) CHECK(r.sigmas[i] > r.sigmas[i - 1]);
        CHECK(neumann_multiplier(p3(), r.sigmas[i]) == doctest::Approx(-1.9).epsilon(1e-9));
    }
}

TEST_CASE("n = 1 admits a solution for every negative slope") {
    // sigma U_1'(sigma) -> -infinity, so any gamma < 0 is crossed exactly once
    const auto p1 = make_profile(1, 300.0);
    for (double g : {-0.5, -4.0, -100.0, -300.0}) {
        CountQuery q;
        q.kind = CountQuery::Kind::neumann;
        q.n = 1;
        q.level = g;
        q.sigma_max = 300.0;
        CHECK(count_radial_solutions(q, p1).count == 1);
    }
}

TEST_CASE("neumann rescaling: identity, shift, and residual") {
    RadialSolution u;
    u.n = 3;
    u.sigma = 2.0;
    u.shift = std::log(u.sigma * u.sigma);  // lambda = 1 family member
    u.profile = &p3();

    const auto same = rescale_neumann(u, 1.0, 1.0);
    CHECK(same.sigma == u.sigma);
    CHECK(same.shift == u.shift);

    const auto doubled = rescale_neumann(u, 1.0, 2.0);
    CHECK(doubled.shift == doctest::Approx(u.shift + std::log(0.25)));
    // boundary slope at the new boundary r = R2 halves: gamma R1/R2
    CHECK(doubled.radial_derivative(2.0) ==
          doctest::Approx(0.5 * u.radial_derivative(1.0)).epsilon(1e-9));

    // transformed solution still satisfies Delta u + e^u = 0 (radial form)
    for (int k = 1; k <= 100; ++k) {
        const double r = static_cast<double>(k) / 100.0;
        const double res = doubled.radial_second_derivative(r) +
                           2.0 / r * doubled.radial_derivative(r) + std::exp(doubled.value(r));
        CHECK(std::abs(res) < 1e-7);
    }
}

TEST_CASE("dirichlet rescaling: boundary constant bookkeeping") {
    RadialSolution u;
    u.n = 3;
    u.sigma = 1.5;
    u.shift = std::log(u.sigma * u.sigma);  // lambda = 1
    u.profile = &p3();
    const double c1 = u.value(1.0);

    const auto same = rescale_dirichlet(u, 1.0, c1, 1.0, 1.0, 1.0);
    CHECK(same.c2 == doctest::Approx(c1));

    const auto quad = rescale_dirichlet(u, 1.0, c1, 1.0, 4.0, 1.0);
    CHECK(quad.c2 == doctest::Approx(c1 + std::log(0.25)));
    CHECK(quad.solution.value(1.0) == doctest::Approx(quad.c2).epsilon(1e-12));

    // mapping lambda 1 -> 2 keeps the multiplier relation consistent:
    // sigma'^2 e^{U(sigma')} = lambda' when the boundary value is zero
    const double lam2 = 2.0;
    const auto moved = rescale_dirichlet(u, 1.0, c1, 1.0, lam2, 1.0);
    const double expected_shift = std::log(1.0 / lam2);
    CHECK(moved.solution.shift == doctest::Approx(u.shift + expected_shift));
}
