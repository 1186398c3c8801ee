#pragma once

#include <span>
#include <vector>

#include "isoshell/fd_scheme.hpp"

namespace isoshell {

enum class GuessStrategy {
    IntegralMatch,  ///< (a): c from the gas-mass identity, by quadrature
    Midpoint        ///< (b): c = N/8 + ln(3N) from the midpoint value 3N
};

/// Quadratic initial profile P(eta) = a eta^2 + b eta + c with P'(0) = 0 and
/// P'(1) = -N, so b = 0 and a = -N/2 always.
struct InitialGuess {
    GuessStrategy strategy = GuessStrategy::Midpoint;
    double a = 0.0, b = 0.0, c = 0.0;

    double value(double eta) const { return (a * eta + b) * eta + c; }
    double derivative(double eta) const { return 2.0 * a * eta + b; }
};

InitialGuess initial_guess(double N, GuessStrategy strategy);

struct NewtonConfig {
    double tol = 1e-8;       ///< residual max-norm tolerance
    int max_iter = 25;
    int max_backtracks = 20;  ///< step halvings per iteration
    double step_cap = 3.0;    ///< max-norm clamp on the Newton step: near a
                              ///< fold the Jacobian is close to singular and
                              ///< the raw direction can escape along the
                              ///< branch tangent
};

/// Closure of the discrete system at the right endpoint: either the plain
/// Neumann condition y'(1) = -N, or the pathfollowing hyperplane
/// v2 y(0) - v1 y'(1) = rhs that replaces it during corrector solves.
struct RightBoundary {
    enum class Kind { neumann, hyperplane } kind = Kind::neumann;
    double N = 0.0;
    double v1 = 0.0, v2 = 0.0, rhs = 0.0;

    static RightBoundary neumann(double N);
    static RightBoundary hyperplane(double v1, double v2, double rhs);
};

struct SolveStats {
    int nodes = 0;
    double h_min = 0.0;
    int newton_iters = 0;   ///< for adaptive solves: iterations of the first solve
    double residual = 0.0;  ///< final residual max-norm
    double scaled_residual = 0.0;  ///< residual relative to per-row magnitude
    int refine_rounds = 0;
    double error_estimate = 0.0;  ///< final two-order difference (max over nodes)
};

/// Converged discrete solution of y'' + (2/eta) y' + e^y = 0 on [0,1].
struct BvpSolution {
    Mesh mesh;
    std::vector<double> y;
    std::vector<double> y_prime;  ///< from the nu = 1 formulas at every node
    double N = 0.0;               ///< realized boundary parameter, -y'(1)
    int order = 6;                ///< scheme order of the final assembly
    SolveStats stats;

    double y0() const { return y.front(); }
    /// Local Lagrange interpolation on a stencil-sized node window.
    double value(double eta) const;
    /// Cubic Hermite interpolation using nodal y and y' (for warm starts).
    double hermite_value(double eta) const;
};

/// Residual of the closed nonlinear system: row 0 is the discrete y'(0) = 0,
/// rows 1..n-1 evaluate y'' + (2/eta) y' + e^y at interior nodes, the last row
/// is the right-end closure.
std::vector<double> assemble_residual(std::span<const double> y, const RightBoundary& rb,
                                      const FdScheme& scheme);
std::vector<double> assemble_residual(std::span<const double> y, double N,
                                      const FdScheme& scheme);

/// Damped Newton iteration with an analytic sparse Jacobian (banded stencil
/// blocks; e^y contributes to the diagonal; the hyperplane row adds a border
/// entry in column 0). Throws NoConvergenceError / SingularJacobianError.
///
/// Convergence: residual max-norm <= tol, or the row-scaled residual at the
/// floating-point assembly floor. On strongly layered meshes the stencil
/// rows reach magnitude 1/h_min^2 and their absolute residual cannot drop
/// below eps/h_min^2, so the scaled criterion is what "converged" can mean
/// there; stats records both norms.
BvpSolution newton_solve(std::vector<double> guess, const RightBoundary& rb,
                         const FdScheme& scheme, const NewtonConfig& config);
BvpSolution newton_solve(std::vector<double> guess, double N, const FdScheme& scheme,
                         const NewtonConfig& config);

/// Mesh refinement by error equidistribution: the per-interval indicator is
/// the difference of two converged solutions of consecutive orders (p and
/// p+2) on the same mesh; intervals are split so the order-p error estimate
/// falls below target_tol everywhere. The mesh is returned unchanged when the
/// indicator is already below tolerance. Throws DomainError at the node cap.
Mesh refine_mesh(const BvpSolution& low_order, const BvpSolution& high_order, double target_tol,
                 int max_nodes = 1'000'000);

struct AdaptConfig {
    int order = 6;          ///< p; the companion solve uses p + 2, so p <= 8
    double target_tol = 1e-8;
    int max_rounds = 40;
    int max_nodes = 1'000'000;
    NewtonConfig newton;
};

/// Solve with mesh adaptation: alternate converged solves at orders p and p+2
/// with equidistribution refinement until the order-p error estimate meets
/// target_tol; returns the order-(p+2) companion of the final round.
///
/// On strongly layered meshes the two-order difference bottoms out at the
/// algebraic noise floor before reaching target_tol; refinement stops when the
/// estimate stagnates and the achieved value is reported in
/// stats.error_estimate.
BvpSolution solve_adaptive(const Mesh& mesh0, std::span<const double> guess,
                           const RightBoundary& rb, const AdaptConfig& config);

/// Condition estimate of the Newton Jacobian at the converged solution (plain
/// Neumann closure at the realized N), as the componentwise (Skeel) number
/// || |J^{-1}| |J| ||_inf from a Hager-Higham 1-norm estimator. Row-scaling
/// invariance matters here: stencil rows carry 1/h^2 factors that would
/// otherwise dominate the estimate on refined meshes. A proxy for the
/// conditioning of the continuous problem, not the same quantity.
double condition_estimate(const BvpSolution& sol);

}  // namespace isoshell
