#pragma once

#include <array>
#include <vector>

#include "isoshell/ivp.hpp"

namespace isoshell {

/// Closed-form U_n and U_n' for the two exactly solvable dimensions:
///   n = 1: u = -2 ln cosh(t/sqrt(2)),   n = 2: u = -2 ln(1 + t^2/8).
std::array<double, 2> exact_oracle(int n, double t);  // (u, u')

/// sigma * U_n'(sigma): level sets against gamma count radial Neumann
/// solutions of Delta u + e^u = 0 on the unit ball.
double neumann_multiplier(const UProfile& profile, double sigma);

/// sigma^2 * e^{U_n(sigma)}: level sets against lambda count radial Dirichlet
/// solutions of Delta u + lambda e^u = 0 on the unit ball with u = 0 on the
/// boundary.
double dirichlet_multiplier(const UProfile& profile, double sigma);

struct CountQuery {
    enum class Kind { neumann, dirichlet } kind = Kind::neumann;
    int n = 3;
    double level = -1.0;       ///< gamma (< 0) for Neumann, lambda (> 0) for Dirichlet
    double sigma_max = 1e5;    ///< search horizon
    double sigma_min = 1e-4;
    double trunc_margin = 1e-3;  ///< distance to the asymptote below which the
                                 ///< count is a lower bound only (3 <= n <= 9)
    void validate() const;
};

struct CountResult {
    int count = 0;
    bool truncated = false;  ///< query sits in the infinite-multiplicity regime
    std::vector<double> sigmas;
};

/// Count roots of the multiplier equation on (0, sigma_max] by scan-and-bracket
/// over a logarithmic grid. The profile dimension must match the query.
CountResult count_radial_solutions(const CountQuery& query, const UProfile& profile);

/// Radial member of the one-parameter family u(x) = U_n(sigma |x|) + shift.
struct RadialSolution {
    int n = 3;
    double sigma = 1.0;
    double shift = 0.0;  ///< additive constant; ln(sigma^2/lambda) for the canonical family
    const UProfile* profile = nullptr;

    double value(double r) const;
    double radial_derivative(double r) const;
    double radial_second_derivative(double r) const;
};

/// Neumann rescaling: a solution on the ball of radius R1 with boundary slope
/// gamma1 maps to x -> u((R1/R2) x) + ln(R1^2/R2^2) on the ball of radius R2,
/// with new slope gamma1 R1/R2.
RadialSolution rescale_neumann(const RadialSolution& u, double R1, double R2);

struct DirichletRescaled {
    RadialSolution solution;
    double c2 = 0.0;  ///< new boundary value
};

/// Dirichlet rescaling for (lambda1, R1, c1) -> (lambda2, R2):
/// x -> u((R1/R2) x) + ln(lambda1/lambda2 * R1^2/R2^2),
/// c2 = c1 + ln(lambda1/lambda2 * R1^2/R2^2).
DirichletRescaled rescale_dirichlet(const RadialSolution& u, double lambda1, double c1, double R1,
                                    double lambda2, double R2);

}  // namespace isoshell
