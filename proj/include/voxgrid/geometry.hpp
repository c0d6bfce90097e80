#pragma once

// Euclidean primitives and the closed-form batched ray/plane solver shared
// by the three samplers. The solver exploits that for a family of parallel
// frames only the right-hand side changes: with w = u x v and e = d x b,
//
//   [r s t]^T = (1 / -d.w) [ b.w, -e.v, e.u ]^T
//
// which is the cofactor expansion of the 3x3 system [-d u v][r s t]^T = b.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "morton.hpp"

namespace voxgrid {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    friend Vec3 operator*(Vec3 v, double s) { return s * v; }
    friend Vec3 operator/(Vec3 v, double s) { return {v.x / s, v.y / s, v.z / s}; }
    friend bool operator==(Vec3 a, Vec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
};

using Point3 = Vec3;

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline Vec3 cwise_mul(Vec3 a, Vec3 b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
inline Vec3 cwise_div(Vec3 a, Vec3 b) { return {a.x / b.x, a.y / b.y, a.z / b.z}; }
inline Vec3 axis_unit(int axis) { Vec3 v; v[axis] = 1.0; return v; }

/// Rounding used throughout the voxel maps: nearest integer, ties away
/// from zero (1.5 -> 2, -0.5 -> -1).
inline std::int64_t round_half_away(double v) { return std::llround(v); }

/// Oriented plane frame: an origin and two in-plane axes. Applied as a
/// rigid pre-transform of input geometry into grid space; the default is
/// the identity (global XY plane).
struct Frame {
    Point3 origin{};
    Vec3 u_axis{1, 0, 0};
    Vec3 v_axis{0, 1, 0};

    /// Express p in the frame's orthonormalized coordinates.
    Point3 to_grid(Point3 p) const
    {
        const Vec3 w = cross(u_axis, v_axis);
        const double wn = norm(w);
        if (wn == 0.0)
            throw std::invalid_argument("Frame: u_axis x v_axis is zero");
        const Vec3 wn1 = w / wn;
        const Vec3 un1 = u_axis / norm(u_axis);
        const Vec3 vn1 = cross(wn1, un1);
        const Vec3 q = p - origin;
        return {dot(q, un1), dot(q, vn1), dot(q, wn1)};
    }
};

struct LineSet {
    std::vector<Point3> vertices;
    std::vector<std::array<std::size_t, 2>> segments;
};

struct TriMesh {
    std::vector<Point3> vertices;
    std::vector<std::array<std::size_t, 3>> faces;
};

/// Check segment indices and forbid zero-length segments.
inline void validate(const LineSet& lines)
{
    for (const auto& seg : lines.segments) {
        if (seg[0] >= lines.vertices.size() || seg[1] >= lines.vertices.size())
            throw std::invalid_argument("LineSet: segment index out of range");
        const Vec3 d = lines.vertices[seg[1]] - lines.vertices[seg[0]];
        if (dot(d, d) == 0.0)
            throw std::invalid_argument("LineSet: zero-length segment");
    }
}

/// Check face indices and drop exactly degenerate (zero-area) triangles.
inline TriMesh validated(const TriMesh& mesh)
{
    TriMesh out;
    out.vertices = mesh.vertices;
    out.faces.reserve(mesh.faces.size());
    for (const auto& f : mesh.faces) {
        if (f[0] >= mesh.vertices.size() || f[1] >= mesh.vertices.size() ||
            f[2] >= mesh.vertices.size())
            throw std::invalid_argument("TriMesh: face index out of range");
        const Vec3 n = cross(mesh.vertices[f[1]] - mesh.vertices[f[0]],
                             mesh.vertices[f[2]] - mesh.vertices[f[0]]);
        if (dot(n, n) > 0.0)
            out.faces.push_back(f);
    }
    return out;
}

/// Regular grid metadata: voxel sizes, integer minimum corner and extents.
struct GridSpec {
    Vec3 sigma{1, 1, 1};
    Index3 min_corner{0, 0, 0};
    Index3 dims{0, 0, 0};
};

namespace detail {

inline GridSpec bounding_grid_of_points(const std::vector<Point3>& pts, Vec3 sigma)
{
    if (pts.empty())
        throw std::invalid_argument("bounding_grid: empty geometry");
    if (sigma.x <= 0 || sigma.y <= 0 || sigma.z <= 0)
        throw std::invalid_argument("bounding_grid: sigma must be positive");
    Vec3 lo = pts.front(), hi = pts.front();
    for (const Point3& p : pts)
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    GridSpec g;
    g.sigma = sigma;
    for (int a = 0; a < 3; ++a) {
        g.min_corner[a] = round_half_away(lo[a] / sigma[a]);
        // Flat axes are padded to one voxel so grids are never empty.
        g.dims[a] = std::max<std::int64_t>(round_half_away(hi[a] / sigma[a]) - g.min_corner[a], 1);
    }
    return g;
}

} // namespace detail

/// Rounded bounding grid of a line network (all vertices considered).
inline GridSpec bounding_grid(const LineSet& lines, Vec3 sigma)
{
    return detail::bounding_grid_of_points(lines.vertices, sigma);
}

/// Rounded bounding grid of a triangle mesh.
inline GridSpec bounding_grid(const TriMesh& mesh, Vec3 sigma)
{
    return detail::bounding_grid_of_points(mesh.vertices, sigma);
}

struct RaySolution {
    double r = 0, s = 0, t = 0;
};

/// Determinant threshold for the parallel-rejection test, scale-relative.
inline double determinant_eps(Vec3 d, Vec3 u, Vec3 v)
{
    return 1e-12 * std::max({norm(d), norm(u), norm(v)});
}

/// Solve [-d u v][r s t]^T = p - c without interval checks; empty when the
/// ray is parallel to the frame (|d.w| <= eps).
inline std::optional<RaySolution> solve_ray_frame(Point3 p, Vec3 d, Point3 c, Vec3 u, Vec3 v,
                                                  double eps)
{
    const Vec3 w = cross(u, v);
    const double delta = -dot(d, w);
    if (delta >= -eps && delta <= eps)
        return std::nullopt;
    const Vec3 b = p - c;
    const double r = dot(b, w) / delta;
    const Vec3 e = cross(d, b);
    const double s = -dot(e, v) / delta;
    const double t = dot(e, u) / delta;
    return RaySolution{r, s, t};
}

/// Bounded intersection of the segment p + r d, r in [0,1], with the
/// parallelogram c + s u + t v, s,t in [0,1]. Absence encodes rejection.
inline std::optional<RaySolution> intersect_ray_parallelogram(Point3 p, Vec3 d, Point3 c, Vec3 u,
                                                              Vec3 v, double eps)
{
    const Vec3 w = cross(u, v);
    const double delta = -dot(d, w);
    if (delta >= -eps && delta <= eps)
        return std::nullopt;
    const Vec3 b = p - c;
    const double r = dot(b, w) / delta;
    if (r < 0.0 || r > 1.0)
        return std::nullopt;
    const Vec3 e = cross(d, b);
    const double s = -dot(e, v) / delta;
    if (s < 0.0 || s > 1.0)
        return std::nullopt;
    const double t = dot(e, u) / delta;
    if (t < 0.0 || t > 1.0)
        return std::nullopt;
    return RaySolution{r, s, t};
}

} // namespace voxgrid
