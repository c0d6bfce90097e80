#include <catch2/catch_amalgamated.hpp>

#include <voxgrid/operators.hpp>

#include <random>

using namespace voxgrid;

namespace {

VoxelCloud block_cloud(std::int64_t m, std::int64_t n, std::int64_t o, Vec3 sigma = {1, 1, 1})
{
    std::vector<Point3> pts;
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < n; ++j)
            for (std::int64_t k = 0; k < o; ++k)
                pts.push_back(poxelate({i, j, k}, sigma));
    return voxelate_point_cloud(pts, Frame{}, sigma);
}

double max_abs(const std::vector<double>& v)
{
    double worst = 0;
    for (double x : v)
        worst = std::max(worst, std::abs(x));
    return worst;
}

double entry(const SparseMatrix& a, std::size_t r, std::size_t c)
{
    for (const SparseEntry& e : a.row(r))
        if (e.col == c)
            return e.value;
    return 0.0;
}

double max_entry_diff(const SparseMatrix& a, const SparseMatrix& b)
{
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    double worst = 0;
    for (const SparseEntry& e : a.entries())
        worst = std::max(worst, std::abs(e.value - entry(b, e.row, e.col)));
    for (const SparseEntry& e : b.entries())
        worst = std::max(worst, std::abs(e.value - entry(a, e.row, e.col)));
    return worst;
}

} // namespace

TEST_CASE("edge geometry on anisotropic grids")
{
    const VoxelComplex single =
        construct(block_cloud(1, 1, 2), standard(StencilKind::face6));
    const EdgeGeometry g = edge_geometry(single);
    REQUIRE(g.vectors.size() == 1);
    CHECK(norm(g.vectors[0] - Vec3{0, 0, 1}) <= 1e-15);
    CHECK(g.lengths[0] == Catch::Approx(1.0));

    const VoxelComplex block =
        construct(block_cloud(2, 2, 2, {1, 2, 3}), standard(StencilKind::face6));
    const EdgeGeometry gb = edge_geometry(block);
    for (std::size_t e = 0; e < gb.lengths.size(); ++e) {
        const Vec3 v = gb.vectors[e];
        const double expect = std::abs(v.x) > 0 ? 1.0 : (std::abs(v.y) > 0 ? 2.0 : 3.0);
        CHECK(gb.lengths[e] == Catch::Approx(expect));
    }
}

TEST_CASE("gradient hand cases")
{
    const VoxelComplex two = construct(block_cloud(1, 1, 2), standard(StencilKind::face6));
    const SparseMatrix G = gradient(two);
    const double f[] = {0.0, 1.0};
    const std::vector<double> gf = matvec(G, f);
    REQUIRE(gf.size() == 1);
    CHECK(gf[0] == Catch::Approx(1.0));

    const double constant[] = {5.0, 5.0};
    CHECK(max_abs(matvec(G, constant)) == 0.0);
}

TEST_CASE("gradient is exact on linear fields for any sigma")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> sig(0.5, 2.0), coef(-2.0, 2.0);
    for (int round = 0; round < 10; ++round) {
        const Vec3 sigma{sig(rng), sig(rng), sig(rng)};
        const VoxelComplex X = construct(block_cloud(4, 3, 3, sigma), standard(StencilKind::face6));
        const Vec3 a{coef(rng), coef(rng), coef(rng)};
        const double b = coef(rng);
        std::vector<double> f(X.vertex_count());
        for (std::size_t v = 0; v < f.size(); ++v)
            f[v] = dot(a, X.vertex_position(v)) + b;
        const std::vector<double> gf = matvec(gradient(X), f);
        const EdgeGeometry geom = edge_geometry(X);
        for (std::size_t e = 0; e < gf.size(); ++e) {
            const Vec3 unit = geom.vectors[e] / geom.lengths[e];
            CHECK(std::abs(gf[e] - dot(a, unit)) <= 1e-12);
        }
    }
}

TEST_CASE("divergence is the exact transpose and balances flows")
{
    const VoxelComplex path = construct(block_cloud(1, 1, 3), standard(StencilKind::face6));
    CHECK(divergence(path) == transpose(gradient(path)));

    // Uniform unit inflow along a path: zero net divergence in the middle.
    const double flow[] = {1.0, 1.0};
    const std::vector<double> div = matvec(divergence(path), flow);
    REQUIRE(div.size() == 3);
    CHECK(div[0] == Catch::Approx(-1.0));
    CHECK(div[1] == Catch::Approx(0.0).margin(1e-15));
    CHECK(div[2] == Catch::Approx(1.0));

    const VoxelComplex single = construct(block_cloud(1, 1, 2), standard(StencilKind::face6));
    const SparseMatrix D = divergence(single);
    CHECK(entry(D, 0, 0) == -1.0);
    CHECK(entry(D, 1, 0) == 1.0);
}

TEST_CASE("laplacian of the unit path")
{
    const VoxelComplex path = construct(block_cloud(1, 1, 3), standard(StencilKind::face6));
    const SparseMatrix L = laplacian(path);
    const double expected[3][3] = {{1, -1, 0}, {-1, 2, -1}, {0, -1, 1}};
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(entry(L, r, c) == Catch::Approx(expected[r][c]));
}

TEST_CASE("laplacian identities on random blocks")
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> sig(0.5, 2.0), val(-1.0, 1.0);
    for (int round = 0; round < 6; ++round) {
        const Vec3 sigma{sig(rng), sig(rng), sig(rng)};
        const VoxelComplex X =
            construct(block_cloud(3, 4, 2, sigma), standard(StencilKind::face6));
        const SparseMatrix G = gradient(X);
        const SparseMatrix D = divergence(X);
        const SparseMatrix L = laplacian(X);

        CHECK(max_entry_diff(L, multiply(D, G)) == 0.0);

        // Second route: M^T Xi^-2 M.
        const EdgeGeometry geom = edge_geometry(X);
        std::vector<double> inv2(geom.lengths.size());
        for (std::size_t e = 0; e < inv2.size(); ++e)
            inv2[e] = 1.0 / (geom.lengths[e] * geom.lengths[e]);
        const SparseMatrix route2 =
            multiply(transpose(X.M_EV_oriented), scale_rows(X.M_EV_oriented, inv2));
        CHECK(max_entry_diff(L, route2) <= 1e-12);

        CHECK(max_entry_diff(L, transpose(L)) == 0.0);

        std::vector<double> ones(X.vertex_count(), 1.0);
        CHECK(max_abs(matvec(L, ones)) <= 1e-12);

        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> x(X.vertex_count());
            for (double& v : x)
                v = val(rng);
            const std::vector<double> lx = matvec(L, x);
            double quad = 0;
            for (std::size_t v = 0; v < x.size(); ++v)
                quad += x[v] * lx[v];
            CHECK(quad >= -1e-12);
        }
    }
}

TEST_CASE("uniform-grid laplacian matches the 7-point stencil")
{
    for (double h : {0.5, 1.0, 2.0}) {
        const VoxelComplex X =
            construct(block_cloud(3, 3, 3, {h, h, h}), standard(StencilKind::face6));
        const SparseMatrix L = laplacian(X);
        const std::size_t centre = X.vertex_ids.ordinal(encode3({1, 1, 1}).bits);
        CHECK(entry(L, centre, centre) == Catch::Approx(6.0 / (h * h)));
        std::size_t offdiag = 0;
        for (const SparseEntry& e : L.row(centre))
            if (e.col != centre) {
                CHECK(e.value == Catch::Approx(-1.0 / (h * h)));
                ++offdiag;
            }
        CHECK(offdiag == 6);
    }
}

TEST_CASE("integral covectors")
{
    SECTION("line integral of 1 over a 2-edge unit path is its length")
    {
        const VoxelComplex path = construct(block_cloud(1, 1, 3), standard(StencilKind::face6));
        const std::vector<double> s1 = integral_line(path);
        double total = 0;
        for (double v : s1)
            total += v;
        CHECK(total == Catch::Approx(2.0));
    }

    SECTION("surface integral of 1 over a single unit face")
    {
        const VoxelComplex X =
            construct(block_cloud(2, 2, 1), standard_complex_stencil(false));
        REQUIRE(X.face_count() == 1);
        const std::vector<double> s2 = integral_surface(X);
        double total = 0;
        for (double v : s2)
            total += v;
        CHECK(total == Catch::Approx(1.0));
    }

    SECTION("volume integral of 1 over a block is the total cell volume")
    {
        const Vec3 sigma{0.5, 1.0, 2.0};
        const VoxelComplex X =
            construct(block_cloud(4, 3, 3, sigma), standard_complex_stencil(true));
        const std::vector<double> s3 = integral_volume(X);
        double total = 0;
        for (double v : s3)
            total += v;
        CHECK(total == Catch::Approx(3.0 * 2.0 * 2.0 * sigma.x * sigma.y * sigma.z));
    }

    SECTION("missing faces or cells raise")
    {
        const VoxelComplex X = construct(block_cloud(2, 2, 2), standard(StencilKind::face6));
        CHECK_THROWS_AS(integral_surface(X), std::logic_error);
        CHECK_THROWS_AS(integral_volume(X), std::logic_error);
    }
}

TEST_CASE("cycle basis annihilates the incidence matrix")
{
    const VoxelComplex cube = construct(block_cloud(2, 2, 2), standard_complex_stencil(true));
    const SparseMatrix omega = cycle_basis(cube);
    CHECK(omega.rows() == 6);
    CHECK(omega.cols() == 12);
    for (std::size_t f = 0; f < omega.rows(); ++f) {
        CHECK(omega.row(f).size() == 4);
        for (const SparseEntry& e : omega.row(f))
            CHECK(std::abs(e.value) == 1.0);
    }
    CHECK(multiply(omega, cube.M_EV_oriented).nnz() == 0);

    // Null-space cross-check on this small complex: rank(Omega) spans the
    // whole cycle space m - rank(M) = m - (n - components).
    // For the cube: 12 - (8 - 1) = 5, and the 6 face rows sum to zero.
    std::vector<std::vector<double>> rows;
    for (std::size_t f = 0; f < omega.rows(); ++f) {
        std::vector<double> dense(omega.cols(), 0.0);
        for (const SparseEntry& e : omega.row(f))
            dense[e.col] = e.value;
        rows.push_back(dense);
    }
    // Gaussian elimination for rank.
    std::size_t rank = 0;
    for (std::size_t col = 0; col < omega.cols() && rank < rows.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && std::abs(rows[pivot][col]) < 1e-9)
            ++pivot;
        if (pivot == rows.size())
            continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && std::abs(rows[r][col]) > 1e-9) {
                const double f2 = rows[r][col] / rows[rank][col];
                for (std::size_t c = 0; c < omega.cols(); ++c)
                    rows[r][c] -= f2 * rows[rank][c];
            }
        ++rank;
    }
    CHECK(rank == 5);
}

TEST_CASE("curl")
{
    const VoxelComplex X = construct(block_cloud(2, 2, 1), standard_complex_stencil(false));
    REQUIRE(X.face_count() == 1);

    SECTION("zero field has zero curl")
    {
        const std::vector<double> zero(X.edge_count(), 0.0);
        CHECK(max_abs(curl(X, zero)) == 0.0);
    }

    SECTION("unit circulation around one face reads 4 / area")
    {
        std::vector<double> f(X.edge_count(), 0.0);
        for (const SparseEntry& e : X.M_FE_oriented.row(0))
            f[e.col] = e.value; // +1 along the cycle orientation
        const std::vector<double> c = curl(X, f);
        CHECK(c[0] == Catch::Approx(4.0));
    }

    SECTION("curl of a gradient vanishes on uniform grids")
    {
        const VoxelComplex Y =
            construct(block_cloud(3, 3, 3, {0.7, 0.7, 0.7}), standard_complex_stencil(false));
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> val(-1, 1);
        std::vector<double> f(Y.vertex_count());
        for (double& v : f)
            v = val(rng);
        const std::vector<double> gf = matvec(gradient(Y), f);
        CHECK(max_abs(curl(Y, gf)) <= 1e-12);
    }
}

TEST_CASE("jacobian recovers linear vector fields at interior vertices")
{
    const VoxelComplex X =
        construct(block_cloud(4, 4, 4, {0.8, 1.1, 1.7}), standard(StencilKind::face6));
    const Mat3 A{{{0.5, -1.0, 2.0}, {0.25, 3.0, -0.5}, {1.5, 0.0, -2.0}}};
    std::vector<Vec3> F(X.vertex_count());
    for (std::size_t v = 0; v < F.size(); ++v) {
        const Point3 p = X.vertex_position(v);
        for (int i = 0; i < 3; ++i)
            F[v][i] = A[std::size_t(i)][0] * p.x + A[std::size_t(i)][1] * p.y +
                      A[std::size_t(i)][2] * p.z;
    }
    const std::vector<Mat3> J = jacobian(X, F);
    const std::vector<bool> interior = interior_mask(X);
    std::size_t checked = 0;
    for (std::size_t v = 0; v < J.size(); ++v) {
        if (!interior[v])
            continue;
        ++checked;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(J[v][std::size_t(i)][std::size_t(j)] -
                               A[std::size_t(i)][std::size_t(j)]) <= 1e-10);
    }
    CHECK(checked == 8); // the 2x2x2 interior of a 4^3 block

    // Constant and identity fields.
    std::vector<Vec3> constant(X.vertex_count(), Vec3{1, 2, 3});
    for (const Mat3& m : jacobian(X, constant))
        for (const auto& row : m)
            for (double c : row)
                CHECK(std::abs(c) <= 1e-14);

    std::vector<Vec3> id_field(X.vertex_count());
    for (std::size_t v = 0; v < id_field.size(); ++v)
        id_field[v] = X.vertex_position(v);
    const std::vector<Mat3> Jid = jacobian(X, id_field);
    for (std::size_t v = 0; v < Jid.size(); ++v) {
        if (!interior[v])
            continue;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(Jid[v][std::size_t(i)][std::size_t(j)] - (i == j ? 1.0 : 0.0)) <=
                      1e-12);
    }
}

TEST_CASE("hessian of quadratics at deep-interior vertices")
{
    const double h = 1.0;
    const VoxelComplex X =
        construct(block_cloud(6, 6, 6, {h, h, h}), standard(StencilKind::face6));
    const Mat3 Q{{{1.0, 0.25, -0.5}, {0.25, 2.0, 0.75}, {-0.5, 0.75, -1.0}}}; // symmetric
    std::vector<double> f(X.vertex_count());
    for (std::size_t v = 0; v < f.size(); ++v) {
        const Point3 p = X.vertex_position(v);
        const double x[3] = {p.x, p.y, p.z};
        double q = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                q += x[i] * Q[std::size_t(i)][std::size_t(j)] * x[j];
        f[v] = q;
    }
    const std::vector<Mat3> H = hessian(X, f);

    // Deep interior: the vertex and all its neighbours are interior.
    const std::vector<bool> interior = interior_mask(X);
    std::size_t checked = 0;
    for (std::size_t v = 0; v < H.size(); ++v) {
        const Index3 idx = decode3(MortonCode3{X.vertex_ids.id(v)});
        const bool deep = idx[0] >= 2 && idx[0] <= 3 && idx[1] >= 2 && idx[1] <= 3 &&
                          idx[2] >= 2 && idx[2] <= 3;
        if (!deep)
            continue;
        REQUIRE(interior[v]);
        ++checked;
        double worst = 0, scale = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                worst = std::max(worst, std::abs(H[v][std::size_t(i)][std::size_t(j)] -
                                                 2.0 * Q[std::size_t(i)][std::size_t(j)]));
                scale = std::max(scale, std::abs(2.0 * Q[std::size_t(i)][std::size_t(j)]));
            }
        CHECK(worst <= 0.1 * scale);
    }
    CHECK(checked == 8);

    // Linear and constant fields have vanishing Hessians.
    std::vector<double> linear(X.vertex_count());
    for (std::size_t v = 0; v < linear.size(); ++v)
        linear[v] = dot(Vec3{1.0, -2.0, 0.5}, X.vertex_position(v)) + 3.0;
    const std::vector<Mat3> Hl = hessian(X, linear);
    for (std::size_t v = 0; v < Hl.size(); ++v) {
        const Index3 idx = decode3(MortonCode3{X.vertex_ids.id(v)});
        const bool deep = idx[0] >= 2 && idx[0] <= 3 && idx[1] >= 2 && idx[1] <= 3 &&
                          idx[2] >= 2 && idx[2] <= 3;
        if (!deep)
            continue;
        for (const auto& row : Hl[v])
            for (double c : row)
                CHECK(std::abs(c) <= 1e-10);
    }
}

TEST_CASE("heat flow")
{
    SECTION("two-voxel hand iteration")
    {
        const VoxelComplex X = construct(block_cloud(1, 1, 2), standard(StencilKind::face6));
        const double f0[] = {1.0, 0.0};
        const std::vector<double> f1 = solve_heat(X, f0, 0.25, 1);
        CHECK(f1[0] == Catch::Approx(0.75));
        CHECK(f1[1] == Catch::Approx(0.25));
    }

    SECTION("constant fields are fixed points")
    {
        const VoxelComplex X = construct(block_cloud(3, 3, 3), standard(StencilKind::face6));
        const std::vector<double> f0(X.vertex_count(), 2.5);
        const std::vector<double> f = solve_heat(X, f0, 0.1, 50);
        for (double v : f)
            CHECK(v == Catch::Approx(2.5));
    }

    SECTION("total mass is conserved")
    {
        const VoxelComplex X = construct(block_cloud(4, 4, 4), standard(StencilKind::face6));
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> val(0, 1);
        std::vector<double> f0(X.vertex_count());
        double sum0 = 0;
        for (double& v : f0)
            sum0 += (v = val(rng));
        const std::vector<double> f = solve_heat(X, f0, 0.1, 200);
        double sum = 0;
        for (double v : f)
            sum += v;
        CHECK(std::abs(sum - sum0) <= 1e-9);
    }

    SECTION("stability guard rejects large steps")
    {
        const VoxelComplex X = construct(block_cloud(3, 3, 3), standard(StencilKind::face6));
        const std::vector<double> f0(X.vertex_count(), 1.0);
        CHECK_THROWS_AS(solve_heat(X, f0, 1.0 / 6.0, 1), std::invalid_argument);
        CHECK_NOTHROW(solve_heat(X, f0, 0.9 / 6.0, 1));
    }
}
