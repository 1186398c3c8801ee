#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace isoshell {

/// Refine a bracketed root of f to |b-a| <= xtol by Brent's method.
/// fa, fb must have opposite signs (fa*fb <= 0).
double brent_root(const std::function<double(double)>& f, double a, double b, double fa, double fb,
                  double xtol, int max_iter = 200);

/// Scan the sampled values (x[i], g[i]) for sign changes and refine each
/// bracket with brent_root. Exact zeros at samples are kept as-is.
std::vector<double> bracketed_roots(const std::function<double(double)>& g,
                                    std::span<const double> x, std::span<const double> gx,
                                    double xtol);

/// Nodes and weights of the 5-point Gauss-Legendre rule on [-1,1]
/// (exact for polynomials of degree <= 9).
struct GaussLegendre5 {
    static constexpr std::array<double, 5> nodes = {
        -0.90617984593866399280, -0.53846931010568309104, 0.0, 0.53846931010568309104,
        0.90617984593866399280};
    static constexpr std::array<double, 5> weights = {
        0.23692688505618908751, 0.47862867049936646804, 0.56888888888888888889,
        0.47862867049936646804, 0.23692688505618908751};
};

/// Integrate f over [a,b] with one 5-point Gauss-Legendre panel.
double gauss5(const std::function<double(double)>& f, double a, double b);

/// Composite 5-point Gauss-Legendre over the given breakpoints.
double gauss5_composite(const std::function<double(double)>& f, std::span<const double> breaks);

inline int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

}  // namespace isoshell
