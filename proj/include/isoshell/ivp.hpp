#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace isoshell {

/// Configuration of the singular initial value problem
///   u'' + ((n-1)/t) u' + e^u = 0,  u(0) = u'(0) = 0,
/// integrated forward on [0, t_max].
struct IvpConfig {
    int n = 3;               ///< spatial dimension, n >= 1
    double t_max = 1e5;      ///< right endpoint; accuracy of W degrades beyond ~1e3
    double rel_tol = 1e-10;  ///< local relative error tolerance
    double abs_tol = 1e-10;  ///< local absolute error tolerance
    double t_series = 1e-3;  ///< handoff point: series expansion used on [0, t_series]

    void validate() const;  // throws std::invalid_argument
};

/// Truncated series expansion of U_n about t = 0, through the t^6 term:
///   u = -t^2/(2n) + t^4/(8n(n+2)) - (n+1) t^6/(24 n^2 (n+2)(n+4)) + O(t^8).
/// Regularizes the singular start; pure evaluation, valid for small t.
std::array<double, 2> series_start(int n, double t);  // (u, u')

/// One dense-output piece: a degree-7 polynomial in theta = (t - t0)/width.
struct ProfilePiece {
    double t0 = 0.0;
    double width = 0.0;
    std::array<double, 8> c{};  // u(theta) = sum c[k] theta^k

    double value(double theta) const;
    double derivative(double theta) const;         // du/dt
    double second_derivative(double theta) const;  // d2u/dt2
};

/// Dense-output trajectory of U_n and its derivative. Immutable after
/// construction; evaluation is thread-safe.
///
/// The interpolant is a two-point Hermite polynomial of degree 7 per step,
/// matching u, u', u'' and u''' at both step ends with the higher derivatives
/// taken from the differential equation, so the dense output is C^2 across
/// joints and consistent with the ODE at every node.
class UProfile {
public:
    UProfile(IvpConfig config, std::vector<double> nodes, std::vector<double> u,
             std::vector<double> u_prime, std::vector<ProfilePiece> pieces);

    int dimension() const { return config_.n; }
    double t_max() const { return nodes_.back(); }
    const IvpConfig& config() const { return config_; }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& u() const { return u_; }
    const std::vector<double>& u_prime() const { return u_prime_; }

    double value(double t) const;              // U_n(t), t in [0, t_max]
    double derivative(double t) const;         // U_n'(t)
    double second_derivative(double t) const;  // U_n''(t)

    /// W(t) = t * U'(t); requires 0 < t <= t_max.
    double w(double t) const;
    /// W'(t) = U'(t) + t * U''(t).
    double w_prime(double t) const;

private:
    std::size_t piece_index(double t) const;

    IvpConfig config_;
    std::vector<double> nodes_;
    std::vector<double> u_;
    std::vector<double> u_prime_;
    std::vector<ProfilePiece> pieces_;
};

/// Integrate the IVP with an adaptive embedded Runge-Kutta 5(4) pair
/// (Dormand-Prince) after a series start on [0, t_series].
UProfile integrate_U(const IvpConfig& config);

/// W(t) = t U'(t) evaluated from the dense output; throws std::out_of_range
/// for t outside (0, t_max].
double eval_W(const UProfile& profile, double t);

/// Interior stationary point of W.
struct WExtremum {
    double t_star = 0.0;
    double w_star = 0.0;
    enum class Kind { minimum, maximum } kind = Kind::minimum;
    int index = 0;  ///< ordinal along increasing t
};

/// All interior stationary points of W on (0, t_max], located by sign changes
/// of W' = U' + t U'' with Brent refinement to root_tol (relative in t).
/// Stationary points whose prominence in W falls below the integration noise
/// floor are discarded (W' crosses zero by roundoff wherever W flattens).
/// Empty if W is monotone on the range.
std::vector<WExtremum> extrema_of_W(const UProfile& profile, double root_tol = 1e-12);

/// CSV export: header "t,u,uprime,w", one row per node, 17 significant digits.
void write_profile_csv(const UProfile& profile, std::ostream& out);

}  // namespace isoshell
