// End-to-end library walkthrough: voxelate a solid sphere, build its
// graph, and diffuse heat from the hottest voxel with the assembled
// Laplacian. Prints the temperature range every few steps.

#include <voxgrid/voxgrid.hpp>

#include <cstdio>
#include <vector>

using namespace voxgrid;

namespace {

TriMesh sphere_mesh(double radius, int subdivisions)
{
    // Octahedron subdivided and projected onto the sphere.
    TriMesh m;
    m.vertices = {{radius, 0, 0}, {-radius, 0, 0}, {0, radius, 0},
                  {0, -radius, 0}, {0, 0, radius}, {0, 0, -radius}};
    m.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
               {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    for (int level = 0; level < subdivisions; ++level) {
        std::vector<std::array<std::size_t, 3>> next;
        for (const auto& f : m.faces) {
            const auto mid = [&](std::size_t a, std::size_t b) {
                Vec3 p = 0.5 * (m.vertices[a] + m.vertices[b]);
                p = p * (radius / norm(p));
                m.vertices.push_back(p);
                return m.vertices.size() - 1;
            };
            const std::size_t ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        m.faces = std::move(next);
    }
    return m;
}

} // namespace

int main()
{
    const double radius = 4.0;
    const TriMesh boundary = sphere_mesh(radius, 4);

    const std::vector<Point3> samples = sample_volume_mesh(boundary, Frame{}, {1, 1, 1});
    const VoxelCloud cloud = voxelate_point_cloud(samples, Frame{}, {1, 1, 1});
    const VoxelComplex ball = construct(cloud, standard(StencilKind::face6));
    std::printf("solid sphere: %zu voxels, %zu edges\n", ball.vertex_count(),
                ball.edge_count());

    std::vector<double> heat(ball.vertex_count(), 0.0);
    heat[ball.vertex_ids.ordinal(encode3(decode3(cloud.codes[0])).bits)] = 100.0;

    const double dt = 0.9 / 6.0;
    for (int step = 0; step <= 50; step += 10) {
        double lo = heat[0], hi = heat[0], total = 0;
        for (double v : heat) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            total += v;
        }
        std::printf("step %3d: min %.4f max %.4f total %.4f\n", step, lo, hi, total);
        if (step < 50)
            heat = solve_heat(ball, heat, dt, 10);
    }
    return 0;
}
