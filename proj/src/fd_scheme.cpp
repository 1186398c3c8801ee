#include "isoshell/fd_scheme.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "isoshell/errors.hpp"

namespace isoshell {

Mesh Mesh::uniform(double a, double b, int intervals) {
    if (intervals < 1) throw std::invalid_argument("Mesh::uniform: need at least 1 interval");
    Mesh mesh;
    mesh.nodes.resize(intervals + 1);
    for (int i = 0; i <= intervals; ++i)
        mesh.nodes[i] = a + (b - a) * static_cast<double>(i) / intervals;
    mesh.nodes.front() = a;
    mesh.nodes.back() = b;
    return mesh;
}

double Mesh::h_min() const {
    double h = nodes[1] - nodes[0];
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) h = std::min(h, nodes[i + 1] - nodes[i]);
    return h;
}

double Mesh::h_max() const {
    double h = nodes[1] - nodes[0];
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) h = std::max(h, nodes[i + 1] - nodes[i]);
    return h;
}

void Mesh::validate() const {
    if (nodes.size() < 2) throw std::invalid_argument("Mesh: need at least 2 nodes");
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        if (!(nodes[i + 1] > nodes[i]))
            throw std::invalid_argument("Mesh: nodes must be strictly increasing");
}

std::vector<double> fd_weights(std::span<const double> offsets, int nu, double* condition_out) {
    const int m = static_cast<int>(offsets.size());
    if (nu < 1 || nu > 2) throw std::invalid_argument("fd_weights: nu must be 1 or 2");
    if (m < nu + 1) throw std::invalid_argument("fd_weights: need at least nu+1 offsets");
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (offsets[i] == offsets[j])
                throw std::invalid_argument("fd_weights: offsets must be distinct");

    // Scale by the largest displacement for conditioning.
    double scale = 0.0;
    for (double d : offsets) scale = std::max(scale, std::abs(d));
    if (scale == 0.0) throw std::invalid_argument("fd_weights: all offsets are zero");

    Eigen::MatrixXd V(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < m; ++j) {
        const double x = offsets[j] / scale;
        double pw = 1.0;
        for (int k = 0; k < m; ++k) {
            V(k, j) = pw;
            pw *= x;
        }
    }
    double factorial = 1.0;
    for (int k = 1; k <= nu; ++k) factorial *= k;
    rhs(nu) = factorial;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(V);
    const double rc = lu.rcond();
    const double cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (condition_out) *condition_out = cond;
    if (!std::isfinite(cond) || cond > 1e15)
        throw SolveError("fd_weights: ill-conditioned moment system, condition ~ " +
                         std::to_string(cond));

    const Eigen::VectorXd w = lu.solve(rhs);
    std::vector<double> out(m);
    const double s = std::pow(scale, nu);
    for (int j = 0; j < m; ++j) out[j] = w(j) / s;
    return out;
}

double StencilRow::apply(std::span<const double> y) const {
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * y[first_col + j];
    return s;
}

namespace {

StencilRow make_row(const Mesh& mesh, int i, int s, int r, int nu) {
    std::vector<double> offsets(s + r + 1);
    for (int j = -s; j <= r; ++j) offsets[j + s] = mesh.nodes[i + j] - mesh.nodes[i];
    StencilRow row;
    row.first_col = i - s;
    row.w = fd_weights(offsets, nu);
    return row;
}

}  // namespace

FdScheme build_scheme(const Mesh& mesh, int p) {
    mesh.validate();
    if (p < 2 || p > 10 || p % 2 != 0)
        throw std::invalid_argument("build_scheme: order must be even in {2,...,10}");
    const int n = mesh.interval_count();
    if (n + 1 < p + 2)
        throw std::invalid_argument("build_scheme: mesh too small for order " + std::to_string(p));

    FdScheme scheme;
    scheme.p = p;
    scheme.mesh = &mesh;
    scheme.d1.resize(n + 1);
    scheme.d2.resize(n + 1);
    scheme.sr1.resize(n + 1);
    scheme.sr2.resize(n + 1);

    const int half = p / 2;
    for (int i = 0; i <= n; ++i) {
        // nu = 2: symmetric interior, one-sided near the ends
        int s2, r2;
        if (i < half) {
            s2 = i;
            r2 = p - s2 + 1;
        } else if (i > n - half) {
            r2 = n - i;
            s2 = p - r2 + 1;
        } else {
            s2 = half;
            r2 = half;
        }
        scheme.sr2[i] = {s2, r2};
        scheme.d2[i] = make_row(mesh, i, s2, r2, 2);

        // nu = 1: upwind (r = s + 1) interior for p >= 4, centered at p = 2
        int s1, r1;
        const int interior_r = (p == 2) ? half : half + 1;
        if (i < half) {
            s1 = i;
            r1 = p - s1;
        } else if (i + interior_r > n) {
            r1 = n - i;
            s1 = p - r1;
        } else {
            s1 = half;
            r1 = interior_r;
        }
        scheme.sr1[i] = {s1, r1};
        scheme.d1[i] = make_row(mesh, i, s1, r1, 1);
    }
    return scheme;
}

}  // namespace isoshell
