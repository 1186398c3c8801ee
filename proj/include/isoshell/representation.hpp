#pragma once

#include <functional>
#include <vector>

#include "isoshell/ivp.hpp"

namespace isoshell {

/// One positive root of W(sigma) = -N.
struct RootOfW {
    double sigma = 0.0;
    double w_residual = 0.0;      ///< |W(sigma) + N| after refinement
    bool fold = false;            ///< near-tangent double root collapsed to one entry
    bool ill_conditioned = false; ///< sigma beyond the large-t warning threshold
    double amplification = 0.0;   ///< |1/W'(sigma)|, local error amplification
};

/// Scan/refinement parameters of the root search. The scan grid is
/// logarithmically spaced because the oscillation of W has a roughly uniform
/// wavelength in ln t.
struct RootScanConfig {
    int scan_points = 2000;
    double sigma_min = 1e-2;
    double w_tol = 1e-10;       ///< tolerance on |W(sigma)+N|
    double warn_sigma = 1e3;    ///< roots beyond this get ill_conditioned = true
    double near2_margin = 1e-6; ///< |N-2| below this always marks counting truncated
};

/// Closed-form solution of the shell problem through the representation
///   y(eta) = U(sigma/Pi4 * eta) + ln(sigma^2/(Pi1 Pi4^2)),  eta in [0, Pi4].
struct ClosedFormSolution {
    double sigma = 0.0;
    double pi1 = 1.0;
    double pi4 = 1.0;
    const UProfile* profile = nullptr;  ///< must be an n = 3 profile

    double y0() const;                          ///< y(0) = ln(sigma^2/(Pi1 Pi4^2))
    double value(double eta) const;             ///< y(eta)
    double derivative(double eta) const;        ///< y'(eta)
    double second_derivative(double eta) const; ///< y''(eta)
};

struct Thresholds {
    double n1 = 0.0;        ///< first fold value N1 (unique solution iff 0 < N < N1)
    double n2 = 0.0;        ///< existence bound N2 (solutions iff N <= N2)
    double sigma_n2 = 0.0;  ///< location of the first minimum of W
};

struct SolutionCount {
    int count = 0;
    bool truncated = false;  ///< counting limited by t_max, lower bound only
    std::vector<RootOfW> roots;
};

/// All positive solutions of W(sigma) = -N on (sigma_min, t_max], sorted.
/// Near-tangent double roots at fold levels are reported once, fold-flagged.
/// Empty when N exceeds -min W.
std::vector<RootOfW> roots_of_W(double N, const UProfile& profile,
                                const RootScanConfig& config = {});

/// Build the closed-form solution for a given scale root sigma.
/// Throws std::out_of_range when sigma exceeds the profile range.
ClosedFormSolution reconstruct(double sigma, double pi1, double pi4, const UProfile& profile);

/// Number of solutions of the shell problem at parameter N, with a truncation
/// flag when completeness within t_max cannot be certified (N close to 2).
SolutionCount count_solutions(double N, const UProfile& profile,
                              const RootScanConfig& config = {});

/// N2 = -(first minimum of W), N1 = -(first maximum after it).
/// Throws DomainError when the profile is too short to contain both extrema.
Thresholds critical_thresholds(const UProfile& profile);

/// Map a solution of the Pi1 = Pi4 = 1 problem to general parameters:
/// y~(eta) = y(eta/Pi4) - ln(Pi1 Pi4^2) on [0, Pi4].
struct RescaledSolution {
    std::function<double(double)> base_value;
    std::function<double(double)> base_derivative;
    double pi1 = 1.0;
    double pi4 = 1.0;

    double value(double eta) const;
    double derivative(double eta) const;
};

RescaledSolution rescale_solution(std::function<double(double)> value,
                                  std::function<double(double)> derivative, double pi1,
                                  double pi4);

}  // namespace isoshell
