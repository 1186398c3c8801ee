#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "isoshell/errors.hpp"
#include "isoshell/fd_scheme.hpp"

using namespace isoshell;

TEST_CASE("classical uniform weight sets") {
    const double h = 0.37;

    {
        const std::vector<double> off = {-h, 0.0, h};
        const auto w2 = fd_weights(off, 2);
        CHECK(w2[0] == doctest::Approx(1.0 / (h * h)).epsilon(1e-13));
        CHECK(w2[1] == doctest::Approx(-2.0 / (h * h)).epsilon(1e-13));
        CHECK(w2[2] == doctest::Approx(1.0 / (h * h)).epsilon(1e-13));

        const auto w1 = fd_weights(off, 1);
        CHECK(w1[0] == doctest::Approx(-0.5 / h).epsilon(1e-13));
        CHECK(w1[1] == doctest::Approx(0.0).scale(1.0 / h));
        CHECK(w1[2] == doctest::Approx(0.5 / h).epsilon(1e-13));
    }
    {
        // five-point second derivative {-1/12, 4/3, -5/2, 4/3, -1/12}/h^2
        const std::vector<double> off = {-2 * h, -h, 0.0, h, 2 * h};
        const auto w = fd_weights(off, 2);
        const double expect[5] = {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
        for (int j = 0; j < 5; ++j)
            CHECK(w[j] == doctest::Approx(expect[j] / (h * h)).epsilon(1e-12));
    }
}

TEST_CASE("weights reproduce monomial derivatives exactly") {
    // uniform spacing h = 0.1 per the stated exactness property, plus a
    // nonuniform set
    const std::vector<std::vector<double>> offset_sets = {
        {-0.2, -0.1, 0.0, 0.1, 0.2, 0.3},
        {-0.31, -0.1, 0.0, 0.07, 0.22},
        {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6},
    };
    for (const auto& off : offset_sets) {
        const int m = static_cast<int>(off.size());
        for (int nu : {1, 2}) {
            const auto w = fd_weights(off, nu);
            for (int k = 0; k < m; ++k) {
                double applied = 0.0;
                for (int j = 0; j < m; ++j) applied += w[j] * std::pow(off[j], k);
                double exact = 0.0;
                if (k == nu) exact = (nu == 1) ? 1.0 : 2.0;
                CHECK(applied == doctest::Approx(exact).epsilon(1e-10).scale(
                                     std::pow(10.0, nu)));
            }
        }
    }
}

TEST_CASE("clustered offsets are rejected with a condition estimate") {
    const std::vector<double> off = {0.0, 1e-9, 2e-9, 1.0, 1.0 + 1e-9, 2.0};
    CHECK_THROWS_AS((void)fd_weights(off, 2), SolveError);
    CHECK_THROWS_AS((void)fd_weights({{0.0, 1.0, 1.0}}, 1), std::invalid_argument);
}

TEST_CASE("scheme descriptors follow the stencil selection rules") {
    const Mesh mesh = Mesh::uniform(0.0, 1.0, 20);
    const int n = mesh.interval_count();

    {
        // order 2: classical centered differences for both derivatives
        const auto s = build_scheme(mesh, 2);
        CHECK(s.sr2[10] == std::pair<int, int>{1, 1});
        CHECK(s.sr1[10] == std::pair<int, int>{1, 1});
    }
    {
        const auto s = build_scheme(mesh, 6);
        // interior: symmetric second derivative, upwinded first derivative
        CHECK(s.sr2[10] == std::pair<int, int>{3, 3});
        CHECK(s.sr1[10] == std::pair<int, int>{3, 4});
        // near-boundary node i = 1: s_i = i, r_i = p - s_i + nu - 1
        CHECK(s.sr1[1] == std::pair<int, int>{1, 5});
        CHECK(s.sr2[1] == std::pair<int, int>{1, 6});
        // Neumann stencils at the endpoints are fully one-sided
        CHECK(s.sr1[0] == std::pair<int, int>{0, 6});
        CHECK(s.sr1[n] == std::pair<int, int>{6, 0});
    }
    {
        // right-end mirror at order 4, node n-1: r = 1, s = p - r + nu - 1
        const auto s = build_scheme(mesh, 4);
        CHECK(s.sr1[n - 1] == std::pair<int, int>{3, 1});
        CHECK(s.sr2[n - 1] == std::pair<int, int>{4, 1});
    }
}

TEST_CASE("upwind bias: interior first-derivative rows use r = s + 1 for p >= 4") {
    const Mesh mesh = Mesh::uniform(0.0, 1.0, 40);
    for (int p : {4, 6, 8}) {
        const auto s = build_scheme(mesh, p);
        for (int i = p / 2; i + p / 2 + 1 <= 40; ++i)
            CHECK(s.sr1[i].second == s.sr1[i].first + 1);
    }
}

TEST_CASE("scheme rows differentiate polynomials on a nonuniform mesh") {
    Mesh mesh;
    for (int i = 0; i <= 30; ++i) {
        const double x = static_cast<double>(i) / 30.0;
        mesh.nodes.push_back(x * x * 0.7 + 0.3 * x);  // graded
    }
    const int p = 6;
    const auto scheme = build_scheme(mesh, p);
    // y = x^5: rows of a degree-(p) exact scheme must differentiate it exactly
    std::vector<double> y(mesh.nodes.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::pow(mesh.nodes[i], 5);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double x = mesh.nodes[i];
        CHECK(scheme.d1[i].apply(y) == doctest::Approx(5.0 * std::pow(x, 4)).epsilon(1e-9));
        CHECK(scheme.d2[i].apply(y) == doctest::Approx(20.0 * std::pow(x, 3)).epsilon(1e-8));
    }
}

TEST_CASE("mesh validation and scheme size requirements") {
    CHECK_THROWS_AS(build_scheme(Mesh::uniform(0, 1, 4), 6), std::invalid_argument);
    CHECK_THROWS_AS(build_scheme(Mesh::uniform(0, 1, 20), 5), std::invalid_argument);
    Mesh bad;
    bad.nodes = {0.0, 0.5, 0.5, 1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
