#pragma once

#include <span>
#include <utility>
#include <vector>

namespace isoshell {

/// Strictly increasing grid on [nodes.front(), nodes.back()].
struct Mesh {
    std::vector<double> nodes;

    static Mesh uniform(double a, double b, int intervals);

    int interval_count() const { return static_cast<int>(nodes.size()) - 1; }
    int node_count() const { return static_cast<int>(nodes.size()); }
    double h_min() const;
    double h_max() const;
    void validate() const;  // strictly increasing, at least 2 nodes
};

/// Finite-difference weights for the nu-th derivative at a point, given the
/// displacements of the participating nodes relative to that point. The
/// weights are obtained from the local moment system
///   sum_j w_j d_j^k = k! delta_{k,nu},  k = 0 .. m-1,
/// so the formula is exact for all polynomials of degree <= m-1.
///
/// If condition_out is non-null it receives the 1-norm condition number of the
/// scaled moment matrix. Throws SolveError when the system is numerically
/// singular (offsets too clustered), reporting the condition estimate.
std::vector<double> fd_weights(std::span<const double> offsets, int nu,
                               double* condition_out = nullptr);

/// One derivative formula: weights applied to y[first_col .. first_col+m-1].
struct StencilRow {
    int first_col = 0;
    std::vector<double> w;

    double apply(std::span<const double> y) const;
};

/// High-order finite-difference scheme on a (possibly nonuniform) mesh.
///
/// Interior stencils: symmetric for the second derivative (r = s = p/2); for
/// the first derivative, upwinded with r = s + 1 for p >= 4 (the coefficient
/// 2/eta of y' is positive on (0,1], so the bias direction is fixed), and the
/// classical centered 3-point formula at order 2. Near the boundaries the
/// one-sided choices s_i = i, r_i = p - s_i + nu - 1 (mirrored on the right)
/// keep the consistency order at p.
struct FdScheme {
    int p = 6;  ///< even order in {2,4,6,8,10}
    const Mesh* mesh = nullptr;
    std::vector<StencilRow> d1;  ///< first-derivative rows, one per node
    std::vector<StencilRow> d2;  ///< second-derivative rows, one per node
    std::vector<std::pair<int, int>> sr1;  ///< (s_i, r_i) for nu = 1
    std::vector<std::pair<int, int>> sr2;  ///< (s_i, r_i) for nu = 2
};

/// Build the scheme for all nodes. Throws std::invalid_argument when the mesh
/// has fewer than p + 2 nodes or p is not an even order in {2,...,10}.
FdScheme build_scheme(const Mesh& mesh, int p);

}  // namespace isoshell
