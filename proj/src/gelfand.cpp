#include "isoshell/gelfand.hpp"

#include <cmath>
#include <stdexcept>

#include "isoshell/numerics.hpp"

namespace isoshell {

std::array<double, 2> exact_oracle(int n, double t) {
    if (t < 0.0) throw std::invalid_argument("exact_oracle: t must be >= 0");
    if (n == 1) {
        const double s = t / std::sqrt(2.0);
        // -2 ln cosh(s), written to avoid overflow of cosh for large s
        const double u = -2.0 * (std::abs(s) + std::log1p(std::exp(-2.0 * std::abs(s))) -
                                 std::log(2.0));
        return {u, -std::sqrt(2.0) * std::tanh(s)};
    }
    if (n == 2) {
        const double u = -2.0 * std::log1p(t * t / 8.0);
        return {u, -4.0 * t / (8.0 + t * t)};
    }
    throw std::invalid_argument("exact_oracle: closed forms exist only for n = 1 and n = 2");
}

double neumann_multiplier(const UProfile& profile, double sigma) {
    return profile.w(sigma);
}

double dirichlet_multiplier(const UProfile& profile, double sigma) {
    if (!(sigma > 0.0) || sigma > profile.t_max() * (1.0 + 1e-14))
        throw std::out_of_range("dirichlet_multiplier: sigma outside (0, t_max]");
    return sigma * sigma * std::exp(profile.value(sigma));
}

void CountQuery::validate() const {
    if (n < 1) throw std::invalid_argument("CountQuery: n must be >= 1");
    if (kind == Kind::neumann && !(level < 0.0))
        throw std::invalid_argument("CountQuery: Neumann level gamma must be negative");
    if (kind == Kind::dirichlet && !(level > 0.0))
        throw std::invalid_argument("CountQuery: Dirichlet level lambda must be positive");
    if (!(sigma_min > 0.0) || !(sigma_min < sigma_max))
        throw std::invalid_argument("CountQuery: require 0 < sigma_min < sigma_max");
}

CountResult count_radial_solutions(const CountQuery& query, const UProfile& profile) {
    query.validate();
    if (profile.dimension() != query.n)
        throw std::invalid_argument("count_radial_solutions: profile dimension mismatch");
    const double sigma_max = std::min(query.sigma_max, profile.t_max());

    const auto multiplier = [&](double s) {
        return query.kind == CountQuery::Kind::neumann ? neumann_multiplier(profile, s)
                                                       : dirichlet_multiplier(profile, s);
    };
    const auto f = [&](double s) { return multiplier(s) - query.level; };

    const int points = 4000;
    const double lo = std::log(query.sigma_min), hi = std::log(sigma_max);
    std::vector<double> xs(points), fs(points);
    for (int i = 0; i < points; ++i) {
        xs[i] = std::min(std::exp(lo + (hi - lo) * i / (points - 1)), sigma_max);
        fs[i] = f(xs[i]);
    }
    CountResult result;
    result.sigmas = bracketed_roots(f, xs, fs, 1e-13);
    result.count = static_cast<int>(result.sigmas.size());

    const double asymptote =
        query.kind == CountQuery::Kind::neumann ? -2.0 : 2.0 * (query.n - 2.0);
    result.truncated =
        query.n >= 3 && query.n <= 9 && std::abs(query.level - asymptote) < query.trunc_margin;
    return result;
}

double RadialSolution::value(double r) const { return profile->value(sigma * r) + shift; }

double RadialSolution::radial_derivative(double r) const {
    return sigma * profile->derivative(sigma * r);
}

double RadialSolution::radial_second_derivative(double r) const {
    return sigma * sigma * profile->second_derivative(sigma * r);
}

RadialSolution rescale_neumann(const RadialSolution& u, double R1, double R2) {
    if (!(R1 > 0.0) || !(R2 > 0.0))
        throw std::invalid_argument("rescale_neumann: radii must be positive");
    RadialSolution v = u;
    v.sigma = u.sigma * R1 / R2;
    v.shift = u.shift + 2.0 * std::log(R1 / R2);
    return v;
}

DirichletRescaled rescale_dirichlet(const RadialSolution& u, double lambda1, double c1, double R1,
                                    double lambda2, double R2) {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0) || !(R1 > 0.0) || !(R2 > 0.0))
        throw std::invalid_argument("rescale_dirichlet: lambda and R must be positive");
    const double shift = std::log(lambda1 / lambda2 * (R1 * R1) / (R2 * R2));
    DirichletRescaled out;
    out.solution = u;
    out.solution.sigma = u.sigma * R1 / R2;
    out.solution.shift = u.shift + shift;
    out.c2 = c1 + shift;
    return out;
}

}  // namespace isoshell
