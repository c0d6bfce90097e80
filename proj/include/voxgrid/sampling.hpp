#pragma once

// Topological sampling of line networks, surface meshes and closed
// volumes: intersect the geometry with axis-perpendicular planes (1D
// inputs) or axis-parallel rays (2D/3D inputs) anchored on the voxel
// lattice, so that the voxelized samples preserve the source's
// connectivity. Conservative mode anchors on voxel corners/boundaries
// (26-separating), thin mode on voxel centroids.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace voxgrid {

enum class SampleMode { conservative, thin };

struct SampleOptions {
    SampleMode mode = SampleMode::conservative;
    /// Emit segment endpoints so sub-voxel segments are not lost.
    bool emit_endpoints = true;
};

/// Instrumentation for complexity assertions.
struct SampleStats {
    std::uint64_t solver_calls = 0;
    std::uint64_t planes = 0;
    std::uint64_t rays = 0;
};

/// Raised when a volume boundary fails the even-crossing test.
struct BoundaryNotClosedError : std::runtime_error {
    BoundaryNotClosedError() : std::runtime_error("boundary is not closed") {}
};

namespace detail {

// A conservative hit sits exactly on a voxel boundary and touches every
// incident voxel. Anchors are nudged up by epsilon and each hit is
// witnessed by one point per incident voxel (the hit itself plus copies
// shifted -2 epsilon across each boundary axis), so voxelization marks
// them all and the shell stays 6-connected without double-thick seams.
inline constexpr double kAnchorNudge = 1.0 / (1 << 30);

// Anchor offset in grid units: voxel boundary (corner) for conservative
// sampling, voxel centroid for thin sampling.
inline double anchor_shift(SampleMode mode)
{
    return mode == SampleMode::conservative ? -0.5 + kAnchorNudge : 0.0;
}

inline double anchor_coord(const GridSpec& g, int axis, std::int64_t k, SampleMode mode)
{
    return (double(g.min_corner[axis] + k) + anchor_shift(mode)) * g.sigma[axis];
}

// Inclusive anchor-index window covering [lo, hi] on an axis.
inline std::pair<std::int64_t, std::int64_t> anchor_range(const GridSpec& g, int axis, double lo,
                                                          double hi, SampleMode mode)
{
    const double shift = anchor_shift(mode);
    const double pad = 1e-9 * g.sigma[axis];
    const double klo = (lo - pad) / g.sigma[axis] - double(g.min_corner[axis]) - shift;
    const double khi = (hi + pad) / g.sigma[axis] - double(g.min_corner[axis]) - shift;
    return {std::max<std::int64_t>(std::int64_t(std::ceil(klo)), 0),
            std::min<std::int64_t>(std::int64_t(std::floor(khi)), g.dims[axis])};
}

inline void sort_points(std::vector<Point3>& pts)
{
    std::sort(pts.begin(), pts.end(), [](const Point3& a, const Point3& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    });
}

struct RayHit {
    double r;
    std::size_t face;
};

// Collapse coincident hits (shared triangle edges and vertices produce
// duplicates): keep the smallest face index of each group.
inline void dedupe_hits(std::vector<RayHit>& hits, double r_tol)
{
    std::sort(hits.begin(), hits.end(), [](const RayHit& a, const RayHit& b) {
        return a.r != b.r ? a.r < b.r : a.face < b.face;
    });
    std::vector<RayHit> out;
    for (std::size_t i = 0; i < hits.size();) {
        RayHit keep = hits[i];
        std::size_t j = i + 1;
        while (j < hits.size() && hits[j].r - hits[i].r <= r_tol) {
            keep.face = std::min(keep.face, hits[j].face);
            ++j;
        }
        out.push_back(keep);
        i = j;
    }
    hits.swap(out);
}

// Candidate (ray, triangle) pairs per sweep axis, grouped by ray.
struct RayBin {
    std::int64_t k0, k1;
    std::size_t face;
};

template <typename OnRay>
void sweep_rays(const TriMesh& mesh, const GridSpec& grid, int axis, SampleMode mode,
                SampleStats* stats, const OnRay& on_ray)
{
    const int ar = (axis + 1) % 3;
    const int af = (axis + 2) % 3;
    const Vec3 d = axis_unit(axis) * (double(grid.dims[axis] + 1) * grid.sigma[axis]);
    const double origin = (double(grid.min_corner[axis]) - 0.5) * grid.sigma[axis];

    std::vector<RayBin> bins;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Point3 x0 = mesh.vertices[mesh.faces[f][0]];
        const Point3 x1 = mesh.vertices[mesh.faces[f][1]];
        const Point3 x2 = mesh.vertices[mesh.faces[f][2]];
        const Vec3 w = cross(x1 - x0, x2 - x0);
        if (std::abs(-dot(d, w)) <= determinant_eps(d, x1 - x0, x2 - x0))
            continue; // triangle parallel to this ray family
        const double rlo = std::min({x0[ar], x1[ar], x2[ar]});
        const double rhi = std::max({x0[ar], x1[ar], x2[ar]});
        const double flo = std::min({x0[af], x1[af], x2[af]});
        const double fhi = std::max({x0[af], x1[af], x2[af]});
        const auto [k0lo, k0hi] = anchor_range(grid, ar, rlo, rhi, mode);
        const auto [k1lo, k1hi] = anchor_range(grid, af, flo, fhi, mode);
        for (std::int64_t k0 = k0lo; k0 <= k0hi; ++k0)
            for (std::int64_t k1 = k1lo; k1 <= k1hi; ++k1)
                bins.push_back({k0, k1, f});
    }
    std::sort(bins.begin(), bins.end(), [](const RayBin& a, const RayBin& b) {
        if (a.k0 != b.k0) return a.k0 < b.k0;
        if (a.k1 != b.k1) return a.k1 < b.k1;
        return a.face < b.face;
    });

    constexpr double param_slop = 1e-12;
    std::vector<RayHit> hits;
    for (std::size_t i = 0; i < bins.size();) {
        std::size_t j = i;
        while (j < bins.size() && bins[j].k0 == bins[i].k0 && bins[j].k1 == bins[i].k1)
            ++j;
        Point3 p;
        p[axis] = origin;
        p[ar] = anchor_coord(grid, ar, bins[i].k0, mode);
        p[af] = anchor_coord(grid, af, bins[i].k1, mode);
        if (stats)
            ++stats->rays;
        hits.clear();
        for (std::size_t b = i; b < j; ++b) {
            const auto& face = mesh.faces[bins[b].face];
            const Point3 c = mesh.vertices[face[0]];
            const Vec3 u = mesh.vertices[face[1]] - c;
            const Vec3 v = mesh.vertices[face[2]] - c;
            if (stats)
                ++stats->solver_calls;
            const auto sol = solve_ray_frame(p, d, c, u, v, determinant_eps(d, u, v));
            if (!sol)
                continue;
            if (sol->r < 0.0 || sol->r > 1.0)
                continue;
            if (sol->s < -param_slop || sol->t < -param_slop ||
                sol->s + sol->t > 1.0 + param_slop)
                continue;
            hits.push_back({sol->r, bins[b].face});
        }
        dedupe_hits(hits, 1e-9);
        on_ray(p, d, axis, hits);
        i = j;
    }
}

} // namespace detail

/// Sample a line network with axis-perpendicular boundary planes
/// (Algorithm style: every segment against every plane family). Every
/// accepted intersection point and, by default, every segment endpoint is
/// emitted; the output is sorted lexicographically.
inline std::vector<Point3> sample_line_network(const LineSet& lines, const Frame& frame,
                                               Vec3 sigma, SampleOptions options = {},
                                               SampleStats* stats = nullptr)
{
    validate(lines);

    LineSet local = lines;
    for (Point3& p : local.vertices)
        p = frame.to_grid(p);
    const GridSpec grid = bounding_grid(local, sigma);

    std::vector<Point3> out;
    for (int axis = 0; axis < 3; ++axis) {
        const int ar = (axis + 1) % 3;
        const int af = (axis + 2) % 3;
        // Plane frame padded half a voxel beyond the rounded bbox so no
        // geometry escapes the s,t in [0,1] window.
        const Vec3 u = axis_unit(ar) * (double(grid.dims[ar] + 1) * grid.sigma[ar]);
        const Vec3 v = axis_unit(af) * (double(grid.dims[af] + 1) * grid.sigma[af]);
        const std::int64_t klo = options.mode == SampleMode::conservative ? 1 : 0;
        for (std::int64_t k = klo; k <= grid.dims[axis]; ++k) {
            Point3 c;
            c[axis] = detail::anchor_coord(grid, axis, k, options.mode);
            c[ar] = (double(grid.min_corner[ar]) - 0.5) * grid.sigma[ar];
            c[af] = (double(grid.min_corner[af]) - 0.5) * grid.sigma[af];
            if (stats)
                ++stats->planes;
            for (const auto& seg : local.segments) {
                const Point3 p = local.vertices[seg[0]];
                const Vec3 d = local.vertices[seg[1]] - p;
                if (stats)
                    ++stats->solver_calls;
                const auto hit =
                    intersect_ray_parallelogram(p, d, c, u, v, determinant_eps(d, u, v));
                if (!hit)
                    continue;
                out.push_back(p + hit->r * d);
                if (options.mode == SampleMode::conservative) {
                    // Witness for the voxel on the other side of the plane.
                    Point3 twin = p + hit->r * d;
                    twin[axis] -= 2 * detail::kAnchorNudge * grid.sigma[axis];
                    out.push_back(twin);
                }
            }
        }
    }
    if (options.emit_endpoints)
        for (const auto& seg : local.segments) {
            out.push_back(local.vertices[seg[0]]);
            out.push_back(local.vertices[seg[1]]);
        }
    detail::sort_points(out);
    return out;
}

/// Sample a triangle mesh surface with the three axis-parallel ray
/// families anchored on the voxel lattice; accepted (r,s,t) hits become
/// points. Duplicate hits on shared triangle edges are collapsed to the
/// smaller face index.
inline std::vector<Point3> sample_surface_mesh(const TriMesh& mesh, const Frame& frame,
                                               Vec3 sigma, SampleOptions options = {},
                                               SampleStats* stats = nullptr)
{
    TriMesh local = validated(mesh);
    for (Point3& p : local.vertices)
        p = frame.to_grid(p);
    const GridSpec grid = bounding_grid(local, sigma);

    std::vector<Point3> out;
    for (int axis = 0; axis < 3; ++axis) {
        const int ar = (axis + 1) % 3;
        const int af = (axis + 2) % 3;
        const double dr = 2 * detail::kAnchorNudge * grid.sigma[ar];
        const double df = 2 * detail::kAnchorNudge * grid.sigma[af];
        detail::sweep_rays(local, grid, axis, options.mode, stats,
                           [&](const Point3& p, const Vec3& d, int, const auto& hits) {
                               for (const auto& h : hits) {
                                   const Point3 q = p + h.r * d;
                                   out.push_back(q);
                                   if (options.mode != SampleMode::conservative)
                                       continue;
                                   // Witnesses for the other three voxels
                                   // sharing the anchor's corner line.
                                   for (int wr = 0; wr < 2; ++wr)
                                       for (int wf = 0; wf < 2; ++wf) {
                                           if (wr == 0 && wf == 0)
                                               continue;
                                           Point3 w = q;
                                           w[ar] -= wr * dr;
                                           w[af] -= wf * df;
                                           out.push_back(w);
                                       }
                               }
                           });
    }
    detail::sort_points(out);
    return out;
}

/// Sample the interior of a closed boundary mesh: per ray, sorted hit
/// parameters form entry/exit intervals and one point is emitted at every
/// integer station with odd crossing parity. Hits exactly at a station
/// count as greater (half-open intervals). Throws BoundaryNotClosedError
/// on any ray with an odd crossing count.
inline std::vector<Point3> sample_volume_mesh(const TriMesh& boundary, const Frame& frame,
                                              Vec3 sigma, SampleOptions options = {},
                                              SampleStats* stats = nullptr)
{
    TriMesh local = validated(boundary);
    for (Point3& p : local.vertices)
        p = frame.to_grid(p);
    const GridSpec grid = bounding_grid(local, sigma);

    std::vector<Point3> out;
    for (int axis = 0; axis < 3; ++axis)
        detail::sweep_rays(
            local, grid, axis, options.mode, stats,
            [&](const Point3& p, const Vec3& d, int a, const auto& hits) {
                if (hits.size() % 2 != 0)
                    throw BoundaryNotClosedError{};
                if (hits.empty())
                    return;
                std::vector<double> coords;
                coords.reserve(hits.size());
                for (const auto& h : hits)
                    coords.push_back(p[a] + h.r * d[a]);
                for (std::int64_t k = 0; k <= grid.dims[a]; ++k) {
                    const double station = double(grid.min_corner[a] + k) * grid.sigma[a];
                    const auto below =
                        std::lower_bound(coords.begin(), coords.end(), station);
                    if ((below - coords.begin()) % 2 != 0) {
                        Point3 q = p;
                        q[a] = station;
                        out.push_back(q);
                    }
                }
            });
    detail::sort_points(out);
    return out;
}

} // namespace voxgrid
