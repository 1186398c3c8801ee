#include "isoshell/physics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "isoshell/errors.hpp"
#include "isoshell/numerics.hpp"

namespace isoshell {

void PhysicalParams::validate() const {
    const double fields[] = {G, R, T, a, m_g, r_scale, rho_scale};
    for (double f : fields)
        if (!(f > 0.0)) throw std::invalid_argument("PhysicalParams: all fields must be positive");
}

CharacteristicNumbers characteristic_numbers(const PhysicalParams& params) {
    params.validate();
    CharacteristicNumbers cn;
    cn.pi1 = 4.0 * std::numbers::pi * params.G * params.r_scale * params.r_scale *
             params.rho_scale / (params.R * params.T);
    cn.pi4 = params.a / params.r_scale;
    cn.N = params.G * params.m_g / (params.a * params.R * params.T);
    return cn;
}

PhysicalParams with_unit_scales(PhysicalParams params) {
    if (!(params.a > 0.0) || !(params.R > 0.0) || !(params.T > 0.0) || !(params.G > 0.0))
        throw std::invalid_argument("with_unit_scales: G, R, T, a must be positive");
    params.r_scale = params.a;
    params.rho_scale = params.R * params.T / (4.0 * std::numbers::pi * params.G * params.a * params.a);
    return params;
}

FieldProfiles fields_from_solution(std::span<const double> eta, std::span<const double> y,
                                   std::span<const double> y_prime, const PhysicalParams& params,
                                   const CharacteristicNumbers& numbers) {
    params.validate();
    if (eta.size() != y.size() || eta.size() != y_prime.size())
        throw std::invalid_argument("fields_from_solution: span lengths differ");
    if (eta.empty()) throw std::invalid_argument("fields_from_solution: empty solution");

    // Consistency between the solution and the characteristic numbers: the
    // boundary slope must be -N/Pi4.
    const double slope = y_prime.back();
    if (std::abs(slope * numbers.pi4 + numbers.N) > 1e-6 * std::max(1.0, numbers.N))
        throw DomainError(
            "fields_from_solution: solution inconsistent with the Pi values (boundary slope "
            "y'*Pi4 = " +
            std::to_string(slope * numbers.pi4) + " vs -N = " + std::to_string(-numbers.N) + ")");

    FieldProfiles out;
    out.r.resize(eta.size());
    out.rho.resize(eta.size());
    out.p.resize(eta.size());
    out.g.resize(eta.size());
    for (std::size_t i = 0; i < eta.size(); ++i) {
        out.r[i] = params.r_scale * eta[i];
        out.rho[i] = params.rho_scale * std::exp(y[i]);
        out.p[i] = out.rho[i] * params.R * params.T;
        out.g[i] = params.R * params.T / params.r_scale * y_prime[i];
    }
    return out;
}

double mass_residual(const BvpSolution& sol, const CharacteristicNumbers& numbers) {
    const auto f = [&](double eta) { return eta * eta * std::exp(sol.value(eta)); };
    const double integral = gauss5_composite(f, sol.mesh.nodes);
    return std::abs(integral - numbers.N * numbers.pi4 / numbers.pi1);
}

double mass_residual(const std::function<double(double)>& y, std::span<const double> breaks,
                     const CharacteristicNumbers& numbers) {
    const auto f = [&](double eta) { return eta * eta * std::exp(y(eta)); };
    const double integral = gauss5_composite(f, breaks);
    return std::abs(integral - numbers.N * numbers.pi4 / numbers.pi1);
}

}  // namespace isoshell
