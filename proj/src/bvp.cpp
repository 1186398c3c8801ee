#include "isoshell/bvp.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "isoshell/condest.hpp"
#include "isoshell/errors.hpp"
#include "isoshell/numerics.hpp"

namespace isoshell {

InitialGuess initial_guess(double N, GuessStrategy strategy) {
    if (!(N > 0.0)) throw std::invalid_argument("initial_guess: N must be positive");
    InitialGuess g;
    g.strategy = strategy;
    g.a = -0.5 * N;
    g.b = 0.0;
    if (strategy == GuessStrategy::Midpoint) {
        g.c = N / 8.0 + std::log(3.0 * N);
    } else {
        // c = ln(N / integral_0^1 eta^2 e^{-N eta^2 / 2} d eta);
        // composite Gauss-Legendre, 64 panels of order 10.
        std::vector<double> breaks(65);
        for (int i = 0; i <= 64; ++i) breaks[i] = static_cast<double>(i) / 64.0;
        const double integral = gauss5_composite(
            [N](double eta) { return eta * eta * std::exp(-0.5 * N * eta * eta); }, breaks);
        g.c = std::log(N / integral);
    }
    return g;
}

RightBoundary RightBoundary::neumann(double N) {
    RightBoundary rb;
    rb.kind = Kind::neumann;
    rb.N = N;
    return rb;
}

RightBoundary RightBoundary::hyperplane(double v1, double v2, double rhs) {
    RightBoundary rb;
    rb.kind = Kind::hyperplane;
    rb.v1 = v1;
    rb.v2 = v2;
    rb.rhs = rhs;
    return rb;
}

std::vector<double> assemble_residual(std::span<const double> y, const RightBoundary& rb,
                                      const FdScheme& scheme) {
    const auto& eta = scheme.mesh->nodes;
    const int n = scheme.mesh->interval_count();
    if (static_cast<int>(y.size()) != n + 1)
        throw std::invalid_argument("assemble_residual: y size does not match the mesh");

    std::vector<double> F(n + 1);
    F[0] = scheme.d1[0].apply(y);  // y'(0) = 0
    for (int i = 1; i < n; ++i)
        F[i] = scheme.d2[i].apply(y) + (2.0 / eta[i]) * scheme.d1[i].apply(y) + std::exp(y[i]);
    const double slope_end = scheme.d1[n].apply(y);
    if (rb.kind == RightBoundary::Kind::neumann)
        F[n] = slope_end + rb.N;  // y'(1) = -N
    else
        F[n] = rb.v2 * y[0] - rb.v1 * slope_end - rb.rhs;
    return F;
}

std::vector<double> assemble_residual(std::span<const double> y, double N,
                                      const FdScheme& scheme) {
    return assemble_residual(y, RightBoundary::neumann(N), scheme);
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

std::string residual_str(double r) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", r);
    return buf;
}

void assemble_jacobian(std::span<const double> y, const RightBoundary& rb, const FdScheme& scheme,
                       std::vector<Eigen::Triplet<double>>& trips, SpMat& J) {
    const auto& eta = scheme.mesh->nodes;
    const int n = scheme.mesh->interval_count();
    trips.clear();

    const auto push_row = [&](int row, const StencilRow& st, double factor) {
        for (std::size_t j = 0; j < st.w.size(); ++j)
            trips.emplace_back(row, st.first_col + static_cast<int>(j), factor * st.w[j]);
    };

    push_row(0, scheme.d1[0], 1.0);
    for (int i = 1; i < n; ++i) {
        push_row(i, scheme.d2[i], 1.0);
        push_row(i, scheme.d1[i], 2.0 / eta[i]);
        trips.emplace_back(i, i, std::exp(y[i]));
    }
    if (rb.kind == RightBoundary::Kind::neumann) {
        push_row(n, scheme.d1[n], 1.0);
    } else {
        push_row(n, scheme.d1[n], -rb.v1);
        trips.emplace_back(n, 0, rb.v2);
    }
    J.setFromTriplets(trips.begin(), trips.end());
}

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(x));
    }
    return m;
}

// Per-row magnitude: the sum of absolute values of the terms entering the
// residual row, which bounds the row's floating-point assembly error / eps.
std::vector<double> row_scales(std::span<const double> y, const RightBoundary& rb,
                               const FdScheme& scheme) {
    const auto& eta = scheme.mesh->nodes;
    const int n = scheme.mesh->interval_count();
    std::vector<double> s(n + 1);

    const auto abs_apply = [&](const StencilRow& st) {
        double a = 0.0;
        for (std::size_t j = 0; j < st.w.size(); ++j)
            a += std::abs(st.w[j] * y[st.first_col + j]);
        return a;
    };
    s[0] = 1.0 + abs_apply(scheme.d1[0]);
    for (int i = 1; i < n; ++i)
        s[i] = 1.0 + abs_apply(scheme.d2[i]) + (2.0 / eta[i]) * abs_apply(scheme.d1[i]) +
               std::exp(y[i]);
    if (rb.kind == RightBoundary::Kind::neumann)
        s[n] = 1.0 + abs_apply(scheme.d1[n]) + std::abs(rb.N);
    else
        s[n] = 1.0 + std::abs(rb.v2 * y[0]) + std::abs(rb.v1) * abs_apply(scheme.d1[n]) +
               std::abs(rb.rhs);
    return s;
}

double scaled_norm(std::span<const double> F, std::span<const double> s) {
    double m = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        if (!std::isfinite(F[i])) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(F[i]) / s[i]);
    }
    return m;
}

constexpr double kScaledFloor = 200.0 * std::numeric_limits<double>::epsilon();
constexpr double kScaledStall = 1000.0 * std::numeric_limits<double>::epsilon();

}  // namespace

BvpSolution newton_solve(std::vector<double> guess, const RightBoundary& rb,
                         const FdScheme& scheme, const NewtonConfig& config) {
    const int n = scheme.mesh->interval_count();
    if (static_cast<int>(guess.size()) != n + 1)
        throw std::invalid_argument("newton_solve: guess size does not match the mesh");
    if (config.tol <= 0.0 || config.max_iter < 1)
        throw std::invalid_argument("newton_solve: invalid NewtonConfig");

    std::vector<double> x = std::move(guess);
    std::vector<double> F = assemble_residual(x, rb, scheme);
    std::vector<double> scales = row_scales(x, rb, scheme);
    double norm_f = inf_norm(F);
    double norm_scaled = scaled_norm(F, scales);
    std::vector<double> history{norm_f};

    SpMat J(n + 1, n + 1);
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::SparseLU<SpMat> lu;
    bool pattern_done = false;

    int iters = 0;
    while (norm_f > config.tol && norm_scaled > kScaledFloor) {
        if (iters >= config.max_iter)
            throw NoConvergenceError("newton_solve: no convergence after " +
                                         std::to_string(iters) + " iterations, residual " +
                                         residual_str(norm_f),
                                     x, history);
        assemble_jacobian(x, rb, scheme, trips, J);
        if (!pattern_done) {
            lu.analyzePattern(J);
            pattern_done = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success)
            throw SingularJacobianError("newton_solve: singular Jacobian (fold proximity?)");

        Eigen::Map<const Eigen::VectorXd> Fv(F.data(), n + 1);
        Eigen::VectorXd step = lu.solve(-Fv);
        const double step_norm = step.cwiseAbs().maxCoeff();
        if (config.step_cap > 0.0 && step_norm > config.step_cap)
            step *= config.step_cap / step_norm;

        // Backtracking on the row-scaled norm: on layered meshes the largest
        // absolute rows sit at their assembly floor and would pin a max-norm
        // search.
        double lambda = 1.0;
        std::vector<double> xt(n + 1), Ft;
        double norm_t = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int bt = 0; bt <= config.max_backtracks; ++bt) {
            for (int i = 0; i <= n; ++i) xt[i] = x[i] + lambda * step(i);
            Ft = assemble_residual(xt, rb, scheme);
            norm_t = scaled_norm(Ft, scales);
            if (std::isfinite(norm_t) && norm_t < norm_scaled) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        ++iters;
        if (!accepted) {
            // Stalling at the assembly roundoff floor is convergence.
            if (norm_scaled <= kScaledStall) break;
            throw NoConvergenceError(
                "newton_solve: line search stalled at residual " + residual_str(norm_f), x,
                history);
        }
        x.swap(xt);
        F.swap(Ft);
        scales = row_scales(x, rb, scheme);
        norm_f = inf_norm(F);
        norm_scaled = scaled_norm(F, scales);
        history.push_back(norm_f);
    }

    // The discrete system has a spurious near-root with e^y vanishing
    // identically (zero gas density); Newton reaching it means the boundary
    // data admits no solution.
    double max_density = 0.0;
    for (int i = 0; i <= n; ++i) max_density = std::max(max_density, std::exp(x[i]));
    if (max_density <= 10.0 * config.tol)
        throw NoConvergenceError(
            "newton_solve: iteration escaped to the zero-density state; the nonlinear term "
            "admits no zero for this boundary data",
            x, history);

    BvpSolution sol;
    sol.mesh = *scheme.mesh;
    sol.y = std::move(x);
    sol.y_prime.resize(n + 1);
    for (int i = 0; i <= n; ++i) sol.y_prime[i] = scheme.d1[i].apply(sol.y);
    sol.N = -sol.y_prime[n];
    sol.order = scheme.p;
    sol.stats.nodes = n + 1;
    sol.stats.h_min = sol.mesh.h_min();
    sol.stats.newton_iters = iters;
    sol.stats.residual = norm_f;
    sol.stats.scaled_residual = norm_scaled;
    return sol;
}

BvpSolution newton_solve(std::vector<double> guess, double N, const FdScheme& scheme,
                         const NewtonConfig& config) {
    return newton_solve(std::move(guess), RightBoundary::neumann(N), scheme, config);
}

double BvpSolution::value(double eta) const {
    const auto& x = mesh.nodes;
    const int n = mesh.interval_count();
    if (eta < x.front() - 1e-14 || eta > x.back() + 1e-14)
        throw std::out_of_range("BvpSolution::value: eta outside the mesh");
    const int m = std::min(order + 1, n + 1);
    auto it = std::upper_bound(x.begin(), x.end(), eta);
    int k = static_cast<int>(it - x.begin()) - 1;
    k = std::clamp(k, 0, n - 1);
    int first = std::clamp(k - (m - 1) / 2, 0, n + 1 - m);

    // barycentric Lagrange on the window
    double num = 0.0, den = 0.0;
    const double span = x[first + m - 1] - x[first];
    for (int j = 0; j < m; ++j) {
        const double xj = x[first + j];
        if (eta == xj) return y[first + j];
        double wj = 1.0;
        for (int l = 0; l < m; ++l)
            if (l != j) wj *= (xj - x[first + l]) / span;
        const double t = 1.0 / (wj * (eta - xj));
        num += t * y[first + j];
        den += t;
    }
    return num / den;
}

double BvpSolution::hermite_value(double eta) const {
    const auto& x = mesh.nodes;
    const int n = mesh.interval_count();
    auto it = std::upper_bound(x.begin(), x.end(), eta);
    int k = static_cast<int>(it - x.begin()) - 1;
    k = std::clamp(k, 0, n - 1);
    const double h = x[k + 1] - x[k];
    const double t = (eta - x[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y[k] + (t3 - 2 * t2 + t) * h * y_prime[k] +
           (-2 * t3 + 3 * t2) * y[k + 1] + (t3 - t2) * h * y_prime[k + 1];
}

Mesh refine_mesh(const BvpSolution& low_order, const BvpSolution& high_order, double target_tol,
                 int max_nodes) {
    const auto& x = low_order.mesh.nodes;
    if (high_order.mesh.nodes != x)
        throw std::invalid_argument("refine_mesh: the two solutions must share a mesh");
    const int n = low_order.mesh.interval_count();
    const int p = low_order.order;

    std::vector<double> node_err(n + 1);
    for (int i = 0; i <= n; ++i) node_err[i] = std::abs(low_order.y[i] - high_order.y[i]);

    double max_err = 0.0;
    std::vector<double> interval_err(n);
    for (int i = 0; i < n; ++i) {
        interval_err[i] = std::max(node_err[i], node_err[i + 1]);
        max_err = std::max(max_err, interval_err[i]);
    }
    if (max_err <= target_tol) return low_order.mesh;

    // Split interval i into k_i parts so its order-p error estimate drops
    // below a fraction of the target: e_i / k^p <= 0.2 * tol.
    std::vector<int> k(n, 1);
    for (int i = 0; i < n; ++i) {
        if (interval_err[i] > 0.2 * target_tol) {
            const double ratio = interval_err[i] / (0.2 * target_tol);
            k[i] = static_cast<int>(std::ceil(std::pow(ratio, 1.0 / p)));
            k[i] = std::clamp(k[i], 1, 24);
        }
    }

    // Smooth the subdivision counts so refinement spreads into the neighbors
    // of a strongly flagged interval over successive rounds.
    for (int i = 1; i < n; ++i) k[i] = std::min(24, std::max(k[i], k[i - 1] / 4));
    for (int i = n - 2; i >= 0; --i) k[i] = std::min(24, std::max(k[i], k[i + 1] / 4));
    long total = 0;
    for (int i = 0; i < n; ++i) total += k[i];
    if (total + 1 > max_nodes)
        throw DomainError("refine_mesh: node cap exceeded (" + std::to_string(total + 1) + " > " +
                          std::to_string(max_nodes) + ")");

    Mesh fine;
    fine.nodes.reserve(total + 1);
    for (int i = 0; i < n; ++i) {
        fine.nodes.push_back(x[i]);
        for (int j = 1; j < k[i]; ++j)
            fine.nodes.push_back(x[i] + (x[i + 1] - x[i]) * static_cast<double>(j) / k[i]);
    }
    fine.nodes.push_back(x[n]);
    return fine;
}

BvpSolution solve_adaptive(const Mesh& mesh0, std::span<const double> guess,
                           const RightBoundary& rb, const AdaptConfig& config) {
    if (config.order < 2 || config.order > 8 || config.order % 2 != 0)
        throw std::invalid_argument("solve_adaptive: order must be even in {2,...,8}");
    Mesh mesh = mesh0;
    std::vector<double> y(guess.begin(), guess.end());

    int first_iters = -1;
    double prev_estimate = std::numeric_limits<double>::infinity();
    for (int round = 0; round <= config.max_rounds; ++round) {
        const FdScheme scheme_p = build_scheme(mesh, config.order);
        BvpSolution sol_p = newton_solve(y, rb, scheme_p, config.newton);
        if (first_iters < 0) first_iters = sol_p.stats.newton_iters;

        const FdScheme scheme_q = build_scheme(mesh, config.order + 2);
        BvpSolution sol_q = newton_solve(sol_p.y, rb, scheme_q, config.newton);

        double estimate = 0.0;
        for (std::size_t i = 0; i < sol_p.y.size(); ++i)
            estimate = std::max(estimate, std::abs(sol_p.y[i] - sol_q.y[i]));

        // Stop on target, or once refinement no longer reduces the estimate
        // (it has bottomed out at the algebraic noise floor).
        const bool stagnated = estimate > 0.35 * prev_estimate;
        if (estimate <= config.target_tol || stagnated) {
            sol_q.stats.newton_iters = first_iters;
            sol_q.stats.refine_rounds = round;
            sol_q.stats.error_estimate = estimate;
            return sol_q;
        }
        prev_estimate = estimate;

        const Mesh fine = refine_mesh(sol_p, sol_q, config.target_tol, config.max_nodes);
        if (fine.nodes == mesh.nodes) {
            sol_q.stats.newton_iters = first_iters;
            sol_q.stats.refine_rounds = round;
            sol_q.stats.error_estimate = estimate;
            return sol_q;
        }
        y.resize(fine.nodes.size());
        for (std::size_t i = 0; i < fine.nodes.size(); ++i)
            y[i] = sol_q.hermite_value(fine.nodes[i]);
        mesh = std::move(fine);
    }
    throw NoConvergenceError("solve_adaptive: mesh adaptation did not reach the tolerance", y,
                             {});
}

double condition_estimate(const BvpSolution& sol) {
    const FdScheme scheme = build_scheme(sol.mesh, sol.order);
    const int n = sol.mesh.interval_count();
    SpMat J(n + 1, n + 1);
    std::vector<Eigen::Triplet<double>> trips;
    assemble_jacobian(sol.y, RightBoundary::neumann(sol.N), scheme, trips, J);
    // Componentwise condition of the final Newton Jacobian: row-scaling
    // invariant, so meshes with very different h_min remain comparable.
    return skeel_condition_estimate(J);
}

double inverse_norm1_estimate(Eigen::SparseLU<SpMat>& lu, Eigen::Index n) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    double est = 0.0;
    Eigen::Index jlast = -1;
    for (int iter = 0; iter < 5; ++iter) {
        const Eigen::VectorXd y = lu.solve(x);
        est = y.lpNorm<1>();
        Eigen::VectorXd xi(n);
        for (Eigen::Index i = 0; i < n; ++i) xi(i) = y(i) >= 0.0 ? 1.0 : -1.0;
        const Eigen::VectorXd z = lu.transpose().solve(xi);
        Eigen::Index j;
        const double zmax = z.cwiseAbs().maxCoeff(&j);
        if (zmax <= z.dot(x) || j == jlast) break;
        x.setZero();
        x(j) = 1.0;
        jlast = j;
    }
    // Alternating probe vector guards against symmetric cancellation.
    Eigen::VectorXd v(n);
    double alt = 1.0;
    for (Eigen::Index i = 0; i < n; ++i, alt = -alt)
        v(i) = alt * (1.0 + static_cast<double>(i) / std::max<double>(1.0, n - 1));
    const double est2 = 2.0 * lu.solve(v).lpNorm<1>() / (3.0 * static_cast<double>(n));
    return std::max(est, est2);
}

double condition_estimate_1norm(const Eigen::SparseMatrix<double>& A) {
    SpMat Ac = A;
    Ac.makeCompressed();
    Eigen::SparseLU<SpMat> lu;
    lu.compute(Ac);
    if (lu.info() != Eigen::Success)
        throw SingularJacobianError("condition_estimate_1norm: factorization failed");
    double norm1 = 0.0;
    for (int k = 0; k < Ac.outerSize(); ++k) {
        double col = 0.0;
        for (SpMat::InnerIterator it(Ac, k); it; ++it) col += std::abs(it.value());
        norm1 = std::max(norm1, col);
    }
    return norm1 * inverse_norm1_estimate(lu, Ac.rows());
}

double skeel_condition_estimate(const Eigen::SparseMatrix<double>& A) {
    SpMat Ac = A;
    Ac.makeCompressed();
    const Eigen::Index n = Ac.rows();
    Eigen::SparseLU<SpMat> lu;
    lu.compute(Ac);
    if (lu.info() != Eigen::Success)
        throw SingularJacobianError("skeel_condition_estimate: factorization failed");

    // row sums of |A| (column-major storage, so accumulate per row index)
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < Ac.outerSize(); ++k)
        for (SpMat::InnerIterator it(Ac, k); it; ++it) v(it.row()) += std::abs(it.value());

    // || A^{-1} diag(v) ||_inf = || B ||_1 with B = diag(v) A^{-T}; Hager's
    // estimator needs products with B and B^T only.
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    double est = 0.0;
    Eigen::Index jlast = -1;
    for (int iter = 0; iter < 5; ++iter) {
        const Eigen::VectorXd y = v.asDiagonal() * lu.transpose().solve(x);
        est = y.lpNorm<1>();
        Eigen::VectorXd xi(n);
        for (Eigen::Index i = 0; i < n; ++i) xi(i) = y(i) >= 0.0 ? 1.0 : -1.0;
        const Eigen::VectorXd z = lu.solve(Eigen::VectorXd(v.asDiagonal() * xi));
        Eigen::Index j;
        const double zmax = z.cwiseAbs().maxCoeff(&j);
        if (zmax <= z.dot(x) || j == jlast) break;
        x.setZero();
        x(j) = 1.0;
        jlast = j;
    }
    Eigen::VectorXd probe(n);
    double alt = 1.0;
    for (Eigen::Index i = 0; i < n; ++i, alt = -alt)
        probe(i) = alt * (1.0 + static_cast<double>(i) / std::max<double>(1.0, n - 1));
    const double est2 =
        2.0 * (v.asDiagonal() * lu.transpose().solve(probe)).lpNorm<1>() /
        (3.0 * static_cast<double>(n));
    return std::max(est, est2);
}

}  // namespace isoshell
