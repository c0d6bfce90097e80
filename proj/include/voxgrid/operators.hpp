#pragma once

// Discrete differential and integral operators assembled from the
// oriented edge-vertex incidence matrix M of a voxel complex:
//
//   gradient    G = Xi^-1 M          (vertex fields -> edge fields)
//   divergence  D = M^T Xi^-1 = G^T  (edge fields -> vertex fields)
//   Laplacian   L = D G = M^T Xi^-2 M
//   integrals   s1 = 1/2 xi^T |M|,  s2 = 1/4 alpha^T |M_FV|,
//               s3 = 1/8 beta^T |M_CV|
//   curl        A^-1 Omega, with Omega the oriented face-edge incidence
//               (the cycle basis rows, Omega M = 0)
//
// plus per-vertex Jacobian/Hessian reconstructions and an explicit-Euler
// heat step as the reference PDE solve.

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "complex.hpp"
#include "sparse.hpp"

namespace voxgrid {

using Mat3 = std::array<std::array<double, 3>, 3>;

struct EdgeGeometry {
    std::vector<Vec3> vectors;   // E, one row per edge
    std::vector<double> lengths; // xi, rowwise 2-norms of E
};

/// Edge vectors E = M V and their lengths. Computed rowwise; zero-length
/// edges are impossible by construction (distinct Morton codes).
inline EdgeGeometry edge_geometry(const VoxelComplex& X)
{
    EdgeGeometry g;
    g.vectors.reserve(X.edge_count());
    g.lengths.reserve(X.edge_count());
    for (std::size_t e = 0; e < X.edge_count(); ++e) {
        const auto row = X.M_EV_oriented.row(e);
        Vec3 v{};
        for (const SparseEntry& entry : row)
            v = v + entry.value * X.vertex_position(entry.col);
        g.vectors.push_back(v);
        g.lengths.push_back(norm(v));
    }
    return g;
}

/// G = Xi^-1 M: rows of the oriented incidence scaled by reciprocal edge
/// lengths. Exact on linear fields: (G f)_e = a . e_hat for f = a.x + b.
inline SparseMatrix gradient(const VoxelComplex& X)
{
    const EdgeGeometry g = edge_geometry(X);
    std::vector<double> inv(g.lengths.size());
    for (std::size_t e = 0; e < inv.size(); ++e)
        inv[e] = 1.0 / g.lengths[e];
    return scale_rows(X.M_EV_oriented, inv);
}

/// D = M^T Xi^-1, the exact dual of the gradient (equal to G^T since Xi
/// is diagonal).
inline SparseMatrix divergence(const VoxelComplex& X)
{
    return transpose(gradient(X));
}

/// L = D G = M^T Xi^-2 M: symmetric, rows sum to zero, positive
/// semidefinite.
inline SparseMatrix laplacian(const VoxelComplex& X)
{
    const SparseMatrix g = gradient(X);
    return multiply(transpose(g), g);
}

/// Face areas from sigma: the product of the two in-plane voxel sizes.
inline std::vector<double> face_areas(const VoxelComplex& X)
{
    std::vector<double> alpha(X.face_count());
    for (std::size_t f = 0; f < X.face_count(); ++f) {
        const PlaneTag tag = unpack_face_key(X.face_ids.id(f)).second;
        const auto [a1, a2] = detail::face_axes(tag);
        alpha[f] = X.cloud.grid.sigma[a1] * X.cloud.grid.sigma[a2];
    }
    return alpha;
}

/// Cell volumes from sigma.
inline std::vector<double> cell_volumes(const VoxelComplex& X)
{
    const Vec3 s = X.cloud.grid.sigma;
    return std::vector<double>(X.cell_count(), s.x * s.y * s.z);
}

/// s1 = 1/2 xi^T |M|: pairing with a vertex field approximates its line
/// integral over the network.
inline std::vector<double> integral_line(const VoxelComplex& X)
{
    const EdgeGeometry g = edge_geometry(X);
    std::vector<double> covector(X.vertex_count(), 0.0);
    for (const SparseEntry& e : X.M_EV_oriented.entries())
        covector[e.col] += 0.5 * g.lengths[e.row] * std::abs(e.value);
    return covector;
}

/// s2 = 1/4 alpha^T |M_FV|.
inline std::vector<double> integral_surface(const VoxelComplex& X)
{
    if (!X.faces_enumerated)
        throw std::logic_error("integral_surface: complex has no faces");
    const std::vector<double> alpha = face_areas(X);
    std::vector<double> covector(X.vertex_count(), 0.0);
    for (const SparseEntry& e : X.M_FV.entries())
        covector[e.col] += 0.25 * alpha[e.row] * std::abs(e.value);
    return covector;
}

/// s3 = 1/8 beta^T |M_CV|.
inline std::vector<double> integral_volume(const VoxelComplex& X)
{
    if (!X.cells_enumerated)
        throw std::logic_error("integral_volume: complex has no cells");
    const std::vector<double> beta = cell_volumes(X);
    std::vector<double> covector(X.vertex_count(), 0.0);
    for (const SparseEntry& e : X.M_CV.entries())
        covector[e.col] += 0.125 * beta[e.row] * std::abs(e.value);
    return covector;
}

/// The cycle basis Omega: oriented face-edge incidence built
/// constructively from the face orientation tags. Satisfies Omega M = 0
/// exactly (integer cancellation).
inline SparseMatrix cycle_basis(const VoxelComplex& X)
{
    if (!X.faces_enumerated)
        throw std::logic_error("cycle_basis: complex has no faces");
    return X.M_FE_oriented;
}

/// curl F ~= A^-1 Omega F: edge field to face field, scaled by reciprocal
/// face areas.
inline std::vector<double> curl(const VoxelComplex& X, std::span<const double> edge_field)
{
    if (!X.faces_enumerated)
        throw std::logic_error("curl: complex has no faces");
    std::vector<double> out = matvec(X.M_FE_oriented, edge_field);
    const std::vector<double> alpha = face_areas(X);
    for (std::size_t f = 0; f < out.size(); ++f)
        out[f] /= alpha[f];
    return out;
}

namespace detail {

// Degree-normalized reconstruction factor: with d/deg the axis-complete
// interior identity sum_e e_hat e_hat^T = (deg/3) I makes linear fields
// exact.
inline double reconstruction_factor(std::size_t degree)
{
    return degree == 0 ? 0.0 : 3.0 / double(degree);
}

} // namespace detail

/// Per-vertex Jacobian of a vertex vector field: project the per-edge
/// gradients back along the unit edge directions, degree-normalized.
/// Recovers A exactly for F(x) = A x at interior vertices of axis-complete
/// neighbourhoods.
inline std::vector<Mat3> jacobian(const VoxelComplex& X, std::span<const Vec3> vertex_field)
{
    if (vertex_field.size() != X.vertex_count())
        throw std::invalid_argument("jacobian: field length mismatch");
    const EdgeGeometry geom = edge_geometry(X);
    const std::vector<std::size_t> deg = vertex_degrees(X);

    std::vector<Mat3> out(X.vertex_count(), Mat3{});
    for (std::size_t e = 0; e < X.edge_count(); ++e) {
        const auto row = X.M_EV_oriented.row(e);
        std::size_t src = 0, dst = 0;
        for (const SparseEntry& entry : row)
            (entry.value < 0 ? src : dst) = entry.col;
        const double xi = geom.lengths[e];
        const Vec3 unit = geom.vectors[e] / xi;
        const Vec3 g = (vertex_field[dst] - vertex_field[src]) / xi; // (G F)_e
        for (std::size_t v : {src, dst})
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    out[v][i][j] += g[i] * unit[j];
    }
    for (std::size_t v = 0; v < out.size(); ++v) {
        const double f = detail::reconstruction_factor(deg[v]);
        for (auto& r : out[v])
            for (double& c : r)
                c *= f;
    }
    return out;
}

/// Per-vertex Hessian of a scalar field: reconstruct vertex gradients
/// from edge gradients (degree-normalized unoriented projection), apply
/// the Jacobian, and symmetrize. Exact for quadratics at deep-interior
/// vertices.
inline std::vector<Mat3> hessian(const VoxelComplex& X, std::span<const double> f)
{
    if (f.size() != X.vertex_count())
        throw std::invalid_argument("hessian: field length mismatch");
    const EdgeGeometry geom = edge_geometry(X);
    const std::vector<std::size_t> deg = vertex_degrees(X);

    std::vector<Vec3> grad(X.vertex_count(), Vec3{});
    for (std::size_t e = 0; e < X.edge_count(); ++e) {
        const auto row = X.M_EV_oriented.row(e);
        std::size_t src = 0, dst = 0;
        for (const SparseEntry& entry : row)
            (entry.value < 0 ? src : dst) = entry.col;
        const double xi = geom.lengths[e];
        const Vec3 unit = geom.vectors[e] / xi;
        const double ge = (f[dst] - f[src]) / xi;
        grad[src] = grad[src] + ge * unit;
        grad[dst] = grad[dst] + ge * unit;
    }
    for (std::size_t v = 0; v < grad.size(); ++v)
        grad[v] = detail::reconstruction_factor(deg[v]) * grad[v];

    std::vector<Mat3> H = jacobian(X, grad);
    for (Mat3& h : H)
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const double sym = 0.5 * (h[i][j] + h[j][i]);
                h[i][j] = h[j][i] = sym;
            }
    return H;
}

/// Explicit-Euler heat flow f <- f - dt L f. The stability guard
/// dt * max_degree / min(xi)^2 < 1 rejects unstable steps.
inline std::vector<double> solve_heat(const VoxelComplex& X, std::span<const double> f0,
                                      double dt, int steps)
{
    if (f0.size() != X.vertex_count())
        throw std::invalid_argument("solve_heat: field length mismatch");
    if (steps < 0)
        throw std::invalid_argument("solve_heat: negative step count");
    const EdgeGeometry geom = edge_geometry(X);
    double min_xi = geom.lengths.empty() ? 1.0 : geom.lengths[0];
    for (double xi : geom.lengths)
        min_xi = std::min(min_xi, xi);
    std::size_t max_degree = 0;
    for (std::size_t d : vertex_degrees(X))
        max_degree = std::max(max_degree, d);
    if (dt <= 0 || dt * double(max_degree) / (min_xi * min_xi) >= 1.0)
        throw std::invalid_argument("solve_heat: dt violates the explicit-Euler bound");

    const SparseMatrix L = laplacian(X);
    std::vector<double> f(f0.begin(), f0.end());
    for (int s = 0; s < steps; ++s) {
        const std::vector<double> Lf = matvec(L, f);
        for (std::size_t v = 0; v < f.size(); ++v)
            f[v] -= dt * Lf[v];
    }
    return f;
}

/// Everything the CLI exports, assembled in one pass.
struct OperatorSet {
    EdgeGeometry edges;
    SparseMatrix G, D, L;
    std::vector<double> s1;
    std::vector<double> s2;    // empty without faces
    std::vector<double> s3;    // empty without cells
    SparseMatrix Omega;        // 0 x m without faces
    std::vector<double> alpha; // face areas
    std::vector<double> a_inv; // reciprocal face areas (the curl scaling)
    std::vector<double> beta;  // cell volumes
};

inline OperatorSet assemble_operators(const VoxelComplex& X)
{
    OperatorSet ops;
    ops.edges = edge_geometry(X);
    ops.G = gradient(X);
    ops.D = transpose(ops.G);
    ops.L = multiply(ops.D, ops.G);
    ops.s1 = integral_line(X);
    if (X.faces_enumerated) {
        ops.s2 = integral_surface(X);
        ops.Omega = X.M_FE_oriented;
        ops.alpha = face_areas(X);
        ops.a_inv.reserve(ops.alpha.size());
        for (double a : ops.alpha)
            ops.a_inv.push_back(1.0 / a);
    } else {
        ops.Omega = SparseMatrix(0, X.edge_count());
    }
    if (X.cells_enumerated) {
        ops.s3 = integral_volume(X);
        ops.beta = cell_volumes(X);
    }
    return ops;
}

} // namespace voxgrid
