#include "isoshell/representation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "isoshell/errors.hpp"
#include "isoshell/numerics.hpp"

namespace isoshell {

double ClosedFormSolution::y0() const { return std::log(sigma * sigma / (pi1 * pi4 * pi4)); }

double ClosedFormSolution::value(double eta) const {
    return profile->value(sigma / pi4 * eta) + y0();
}

double ClosedFormSolution::derivative(double eta) const {
    return (sigma / pi4) * profile->derivative(sigma / pi4 * eta);
}

double ClosedFormSolution::second_derivative(double eta) const {
    const double s = sigma / pi4;
    return s * s * profile->second_derivative(s * eta);
}

std::vector<RootOfW> roots_of_W(double N, const UProfile& profile, const RootScanConfig& config) {
    if (!(N > 0.0)) throw std::invalid_argument("roots_of_W: N must be positive");
    if (profile.dimension() != 3)
        throw std::invalid_argument("roots_of_W: profile must have dimension 3");

    const double lo = std::log(config.sigma_min);
    const double hi = std::log(profile.t_max());
    const auto f = [&](double t) { return profile.w(t) + N; };

    std::vector<double> ts(config.scan_points), fs(config.scan_points);
    for (int i = 0; i < config.scan_points; ++i) {
        ts[i] = std::exp(lo + (hi - lo) * i / (config.scan_points - 1));
        fs[i] = f(ts[i]);
    }
    // Refine brackets in W-value: Brent on t until |W+N| < w_tol.
    std::vector<double> sigmas;
    for (int i = 0; i + 1 < config.scan_points; ++i) {
        if (fs[i] == 0.0) {
            sigmas.push_back(ts[i]);
        } else if (fs[i] * fs[i + 1] < 0.0) {
            const double xtol = 1e-15 * std::max(1.0, ts[i + 1]);
            sigmas.push_back(brent_root(f, ts[i], ts[i + 1], fs[i], fs[i + 1], xtol));
        }
    }

    // Fold levels: an extremum of W tangent to -N gives a double root that the
    // sign-change scan misses; report it once, flagged.
    for (const auto& ex : extrema_of_W(profile)) {
        if (ex.t_star < config.sigma_min) continue;
        if (std::abs(ex.w_star + N) < config.w_tol) {
            const bool dup = std::any_of(sigmas.begin(), sigmas.end(), [&](double s) {
                return std::abs(s - ex.t_star) < 1e-6 * std::max(1.0, ex.t_star);
            });
            if (!dup) sigmas.push_back(ex.t_star);
        }
    }
    std::sort(sigmas.begin(), sigmas.end());

    std::vector<RootOfW> roots;
    roots.reserve(sigmas.size());
    for (double s : sigmas) {
        RootOfW r;
        r.sigma = s;
        r.w_residual = std::abs(profile.w(s) + N);
        const double wp = profile.w_prime(s);
        r.amplification = (wp != 0.0) ? std::abs(1.0 / wp) : std::numeric_limits<double>::infinity();
        r.fold = std::abs(wp) * std::max(1.0, s) < 1e-6;
        r.ill_conditioned = s > config.warn_sigma;
        roots.push_back(r);
    }
    return roots;
}

ClosedFormSolution reconstruct(double sigma, double pi1, double pi4, const UProfile& profile) {
    if (!(sigma > 0.0) || !(pi1 > 0.0) || !(pi4 > 0.0))
        throw std::invalid_argument("reconstruct: sigma, pi1, pi4 must be positive");
    if (sigma > profile.t_max())
        throw std::out_of_range("reconstruct: sigma exceeds the profile range");
    return ClosedFormSolution{sigma, pi1, pi4, &profile};
}

SolutionCount count_solutions(double N, const UProfile& profile, const RootScanConfig& config) {
    SolutionCount result;
    result.roots = roots_of_W(N, profile, config);
    result.count = static_cast<int>(result.roots.size());

    // Completeness within t_max cannot be certified once |N-2| falls below the
    // last resolved oscillation amplitude of W about -2.
    result.truncated = std::abs(N - 2.0) < config.near2_margin;
    const auto extrema = extrema_of_W(profile);
    if (!extrema.empty()) {
        const double last_amplitude = std::abs(extrema.back().w_star + 2.0);
        if (std::abs(N - 2.0) <= last_amplitude) result.truncated = true;
    }
    return result;
}

Thresholds critical_thresholds(const UProfile& profile) {
    const auto extrema = extrema_of_W(profile);
    // first minimum, then the first maximum after it
    int i_min = -1, i_max = -1;
    for (std::size_t i = 0; i < extrema.size(); ++i) {
        if (i_min < 0 && extrema[i].kind == WExtremum::Kind::minimum) i_min = static_cast<int>(i);
        else if (i_min >= 0 && extrema[i].kind == WExtremum::Kind::maximum) {
            i_max = static_cast<int>(i);
            break;
        }
    }
    if (i_min < 0 || i_max < 0)
        throw DomainError("critical_thresholds: profile too short to contain both extrema of W");
    Thresholds th;
    th.n2 = -extrema[i_min].w_star;
    th.n1 = -extrema[i_max].w_star;
    th.sigma_n2 = extrema[i_min].t_star;
    return th;
}

double RescaledSolution::value(double eta) const {
    return base_value(eta / pi4) - std::log(pi1 * pi4 * pi4);
}

double RescaledSolution::derivative(double eta) const { return base_derivative(eta / pi4) / pi4; }

RescaledSolution rescale_solution(std::function<double(double)> value,
                                  std::function<double(double)> derivative, double pi1,
                                  double pi4) {
    if (!(pi1 > 0.0) || !(pi4 > 0.0))
        throw std::invalid_argument("rescale_solution: pi1, pi4 must be positive");
    return RescaledSolution{std::move(value), std::move(derivative), pi1, pi4};
}

}  // namespace isoshell
