#pragma once

#include <functional>
#include <span>
#include <vector>

#include "isoshell/bvp.hpp"

namespace isoshell {

/// Dimensional description of the gas-filled shell (SI units).
struct PhysicalParams {
    double G = 6.67428e-11;  ///< gravitational constant, m^3 kg^-1 s^-2
    double R = 0.0;          ///< gas constant, J kg^-1 K^-1
    double T = 0.0;          ///< temperature, K
    double a = 0.0;          ///< internal shell radius, m
    double m_g = 0.0;        ///< gas mass, kg
    double r_scale = 0.0;    ///< radial scale r~, m
    double rho_scale = 0.0;  ///< density scale rho~, kg m^-3

    void validate() const;  // all fields strictly positive
};

/// The three dimensionless groups controlling the problem:
/// Pi1 = 4 pi G r~^2 rho~ / (R T),  Pi4 = a / r~,  N = G m_g / (a R T).
struct CharacteristicNumbers {
    double pi1 = 1.0;
    double pi4 = 1.0;
    double N = 0.0;
};

CharacteristicNumbers characteristic_numbers(const PhysicalParams& params);

/// Fill in the scale factors so the nondimensional problem is the simplified
/// one: r~ = a (Pi4 = 1) and rho~ such that Pi1 = 1.
PhysicalParams with_unit_scales(PhysicalParams params);

/// Dimensional profiles along mapped radii r = r~ eta.
struct FieldProfiles {
    std::vector<double> r;    ///< m
    std::vector<double> rho;  ///< kg m^-3
    std::vector<double> p;    ///< Pa
    std::vector<double> g;    ///< m s^-2 (signed, inward negative)
};

/// rho = rho~ e^y, p = rho R T, g = (R T / r~) y'(eta). The solution spans are
/// on [0, Pi4] and must match the supplied numbers (boundary slope -N/Pi4).
FieldProfiles fields_from_solution(std::span<const double> eta, std::span<const double> y,
                                   std::span<const double> y_prime, const PhysicalParams& params,
                                   const CharacteristicNumbers& numbers);

/// Gas-mass identity residual | integral_0^{Pi4} e^y eta^2 d eta - N Pi4/Pi1 |
/// for a converged discrete solution (quadrature on its own mesh, the values
/// interpolated by stencil-order local polynomials).
double mass_residual(const BvpSolution& sol, const CharacteristicNumbers& numbers);

/// Same identity for an arbitrary evaluable solution on [0, Pi4]; quadrature
/// panels given by breaks.
double mass_residual(const std::function<double(double)>& y, std::span<const double> breaks,
                     const CharacteristicNumbers& numbers);

}  // namespace isoshell
