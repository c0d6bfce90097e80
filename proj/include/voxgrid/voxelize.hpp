#pragma once

// The R^3 -> Z^3 -> N^3 -> N pipeline: snap points to voxel indices,
// shift them into the first octant and interleave into Morton codes.

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "morton.hpp"

namespace voxgrid {

/// Snap a point to its voxel index: componentwise round(p / sigma).
inline Index3 voxelate(Point3 p, Vec3 sigma)
{
    if (sigma.x <= 0 || sigma.y <= 0 || sigma.z <= 0)
        throw std::invalid_argument("voxelate: sigma must be positive");
    return {round_half_away(p.x / sigma.x), round_half_away(p.y / sigma.y),
            round_half_away(p.z / sigma.z)};
}

/// Voxel centroid: the (lossy) inverse of voxelate.
inline Point3 poxelate(Index3 v, Vec3 sigma)
{
    return {double(v[0]) * sigma.x, double(v[1]) * sigma.y, double(v[2]) * sigma.z};
}

/// Shift a voxel index into the first octant relative to corner c.
/// Throws std::out_of_range when c is not a lower bound of v.
inline Index3 ioxelate(Index3 v, Index3 c)
{
    Index3 rho;
    for (int a = 0; a < 3; ++a) {
        rho[a] = v[a] - c[a];
        if (rho[a] < 0)
            throw std::out_of_range("ioxelate: corner is not the grid minimum");
    }
    return rho;
}

/// Sorted, deduplicated set of Morton-indexed voxels plus grid metadata.
struct VoxelCloud {
    std::vector<MortonCode3> codes; // strictly increasing
    GridSpec grid;                  // sigma, min_corner, dims

    std::size_t size() const { return codes.size(); }

    bool contains(MortonCode3 code) const
    {
        return std::binary_search(codes.begin(), codes.end(), code);
    }

    /// Dense ordinal of a code in [0, size()).
    std::size_t ordinal(MortonCode3 code) const
    {
        const auto it = std::lower_bound(codes.begin(), codes.end(), code);
        if (it == codes.end() || *it != code)
            throw std::out_of_range("VoxelCloud: unknown code");
        return std::size_t(it - codes.begin());
    }

    /// Absolute voxel index of a code (corner added back).
    Index3 voxel(MortonCode3 code) const
    {
        const Index3 rho = decode3(code);
        return {rho[0] + grid.min_corner[0], rho[1] + grid.min_corner[1],
                rho[2] + grid.min_corner[2]};
    }

    Point3 centroid(MortonCode3 code) const { return poxelate(voxel(code), grid.sigma); }
};

/// Voxelate, shift and encode a point cloud into a canonical VoxelCloud.
/// The minimum voxel defines the corner unless an override is given.
inline VoxelCloud voxelate_point_cloud(std::span<const Point3> points, const Frame& frame,
                                       Vec3 sigma, std::optional<Index3> corner = std::nullopt)
{
    if (points.empty())
        throw std::invalid_argument("voxelate_point_cloud: empty input");

    std::vector<Index3> voxels;
    voxels.reserve(points.size());
    for (const Point3& p : points)
        voxels.push_back(voxelate(frame.to_grid(p), sigma));

    Index3 lo = voxels.front(), hi = voxels.front();
    for (const Index3& v : voxels)
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], v[a]);
            hi[a] = std::max(hi[a], v[a]);
        }
    const Index3 c = corner.value_or(lo);

    VoxelCloud cloud;
    cloud.grid.sigma = sigma;
    cloud.grid.min_corner = c;
    for (int a = 0; a < 3; ++a)
        cloud.grid.dims[a] = hi[a] - c[a] + 1;

    cloud.codes.reserve(voxels.size());
    for (const Index3& v : voxels)
        cloud.codes.push_back(encode3(ioxelate(v, c)));
    std::sort(cloud.codes.begin(), cloud.codes.end());
    cloud.codes.erase(std::unique(cloud.codes.begin(), cloud.codes.end()), cloud.codes.end());
    return cloud;
}

} // namespace voxgrid
