#include <catch2/catch_amalgamated.hpp>

#include <voxgrid/voxelize.hpp>

#include <algorithm>
#include <random>

using namespace voxgrid;

TEST_CASE("voxelate rounds half away from zero")
{
    CHECK(voxelate({0, 0, 0}, {1, 1, 1}) == Index3{0, 0, 0});
    CHECK(voxelate({1.4, -0.6, 2.5}, {1, 1, 1}) == Index3{1, -1, 3});
    CHECK(voxelate({0.2, 0.2, 0.2}, {0.1, 0.1, 0.1}) == Index3{2, 2, 2});
    CHECK_THROWS_AS(voxelate({0, 0, 0}, {0, 1, 1}), std::invalid_argument);
}

TEST_CASE("poxelate is the centroid inverse")
{
    CHECK(poxelate({0, 0, 0}, {1, 1, 1}) == Point3{0, 0, 0});
    CHECK(poxelate({1, -1, 3}, {1, 1, 1}) == Point3{1, -1, 3});
    CHECK(norm(poxelate({2, 2, 2}, {0.1, 0.1, 0.1}) - Point3{0.2, 0.2, 0.2}) <= 1e-15);

    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<std::int64_t> idx(-500, 500);
    std::uniform_real_distribution<double> size(0.05, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const Index3 v{idx(rng), idx(rng), idx(rng)};
        const Vec3 sigma{size(rng), size(rng), size(rng)};
        CHECK(voxelate(poxelate(v, sigma), sigma) == v);
    }
}

TEST_CASE("ioxelate shifts into the first octant")
{
    CHECK(ioxelate({3, -2, 5}, {3, -2, 5}) == Index3{0, 0, 0});
    CHECK(ioxelate({1, -1, 3}, {0, -2, 0}) == Index3{1, 1, 3});
    CHECK_THROWS_AS(ioxelate({0, 0, 0}, {1, 0, 0}), std::out_of_range);
}

TEST_CASE("voxelate_point_cloud canonicalizes")
{
    const Frame identity;

    const Point3 one[] = {{0.2, 0.2, 0.2}};
    const VoxelCloud single = voxelate_point_cloud(one, identity, {1, 1, 1});
    REQUIRE(single.codes.size() == 1);
    CHECK(single.codes[0] == encode3({0, 0, 0}));
    CHECK(single.grid.dims == Index3{1, 1, 1});

    const Point3 dup[] = {{0.1, 0.1, 0.1}, {0.2, -0.2, 0.3}};
    CHECK(voxelate_point_cloud(dup, identity, {1, 1, 1}).codes.size() == 1);

    // The 8 corners of [0,1]^3 round to 8 distinct voxels at offsets {0,1}^3.
    std::vector<Point3> corners;
    for (int i = 0; i < 8; ++i)
        corners.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
    const VoxelCloud cube = voxelate_point_cloud(corners, identity, {1, 1, 1});
    REQUIRE(cube.codes.size() == 8);
    for (std::uint64_t k = 0; k < 8; ++k)
        CHECK(cube.codes[k].bits == k);

    CHECK_THROWS_AS(voxelate_point_cloud({}, identity, {1, 1, 1}), std::invalid_argument);
}

TEST_CASE("voxelate_point_cloud properties")
{
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    const Frame identity;
    const Vec3 sigma{0.4, 0.7, 1.3};

    std::vector<Point3> pts;
    for (int i = 0; i < 300; ++i)
        pts.push_back({coord(rng), coord(rng), coord(rng)});
    const VoxelCloud cloud = voxelate_point_cloud(pts, identity, sigma);

    SECTION("codes are strictly increasing and inside the grid")
    {
        for (std::size_t i = 0; i + 1 < cloud.codes.size(); ++i)
            CHECK(cloud.codes[i] < cloud.codes[i + 1]);
        for (const MortonCode3 code : cloud.codes) {
            const Index3 rho = decode3(code);
            for (int a = 0; a < 3; ++a)
                CHECK(rho[a] < cloud.grid.dims[a]);
        }
    }

    SECTION("round-trip containment: every centroid is near an input point")
    {
        for (const MortonCode3 code : cloud.codes) {
            const Point3 c = cloud.centroid(code);
            double best = 1e300;
            for (const Point3& p : pts) {
                const Vec3 d = p - c;
                best = std::min(best, std::max({std::abs(d.x) / sigma.x,
                                                std::abs(d.y) / sigma.y,
                                                std::abs(d.z) / sigma.z}));
            }
            CHECK(best <= 0.5 + 1e-12);
        }
    }

    SECTION("idempotence on its own centroids")
    {
        std::vector<Point3> centroids;
        for (const MortonCode3 code : cloud.codes)
            centroids.push_back(cloud.centroid(code));
        const VoxelCloud again = voxelate_point_cloud(centroids, identity, sigma);
        CHECK(again.codes == cloud.codes);
        CHECK(again.grid.min_corner == cloud.grid.min_corner);
    }

    SECTION("order independence")
    {
        std::vector<Point3> shuffled = pts;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(voxelate_point_cloud(shuffled, identity, sigma).codes == cloud.codes);
    }
}

TEST_CASE("corner override extends the grid")
{
    const Point3 pts[] = {{1, 1, 1}};
    const VoxelCloud cloud =
        voxelate_point_cloud(pts, Frame{}, {1, 1, 1}, Index3{0, 0, 0});
    CHECK(cloud.grid.min_corner == Index3{0, 0, 0});
    CHECK(cloud.grid.dims == Index3{2, 2, 2});
    CHECK(cloud.codes[0] == encode3({1, 1, 1}));
}
