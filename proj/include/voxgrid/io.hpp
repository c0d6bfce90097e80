#pragma once

// File formats: OBJ meshes/line sets in; voxel clouds, stencils, fields
// and MatrixMarket matrices in and out. All writers emit rows sorted by
// global ID with fixed float formatting, so output is byte-identical
// across runs.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "complex.hpp"
#include "geometry.hpp"
#include "sparse.hpp"
#include "stencil.hpp"
#include "voxelize.hpp"

namespace voxgrid {

struct ParseError : std::runtime_error {
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what)
    {
    }
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string fmt_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

inline std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open: " + path);
    return in;
}

// OBJ indices are 1-based; negative values count back from the end.
inline std::size_t obj_index(long long raw, std::size_t count, const std::string& path,
                             std::size_t line)
{
    long long idx = raw;
    if (idx < 0)
        idx += static_cast<long long>(count) + 1;
    if (idx < 1 || std::size_t(idx) > count)
        throw ParseError(path, line, "vertex index out of range");
    return std::size_t(idx) - 1;
}

} // namespace detail

struct ObjData {
    TriMesh mesh;
    LineSet lines;
};

/// Parse v/f/l records; polygons are fanned into triangles, vt/vn and
/// material statements are ignored. Files mixing f and l records return
/// both; the caller selects.
inline ObjData read_obj(const std::string& path)
{
    std::ifstream in = detail::open_in(path);
    ObjData data;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string keyword;
        if (!(ss >> keyword) || keyword[0] == '#')
            continue;
        if (keyword == "v") {
            Point3 p;
            if (!(ss >> p.x >> p.y >> p.z))
                throw ParseError(path, lineno, "malformed vertex record");
            data.mesh.vertices.push_back(p);
        } else if (keyword == "f") {
            std::vector<std::size_t> poly;
            std::string token;
            while (ss >> token) {
                // Take the vertex index before any '/'.
                const std::size_t slash = token.find('/');
                const std::string head = token.substr(0, slash);
                try {
                    poly.push_back(detail::obj_index(std::stoll(head),
                                                     data.mesh.vertices.size(), path, lineno));
                } catch (const std::invalid_argument&) {
                    throw ParseError(path, lineno, "malformed face record");
                } catch (const std::out_of_range&) {
                    throw ParseError(path, lineno, "malformed face record");
                }
            }
            if (poly.size() < 3)
                throw ParseError(path, lineno, "face with fewer than 3 vertices");
            for (std::size_t k = 1; k + 1 < poly.size(); ++k)
                data.mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
        } else if (keyword == "l") {
            std::vector<std::size_t> chain;
            long long raw;
            while (ss >> raw)
                chain.push_back(
                    detail::obj_index(raw, data.mesh.vertices.size(), path, lineno));
            if (chain.size() < 2)
                throw ParseError(path, lineno, "line with fewer than 2 vertices");
            for (std::size_t k = 0; k + 1 < chain.size(); ++k)
                data.lines.segments.push_back({chain[k], chain[k + 1]});
        }
        // vt, vn, vp, o, g, s, usemtl, mtllib: ignored.
    }
    data.lines.vertices = data.mesh.vertices;
    return data;
}

/// CSV with comment lines "# sigma=..." and "# corner=..." followed by a
/// "iota,i,j,k,x,y,z" table sorted by code.
inline void write_voxel_cloud(const VoxelCloud& cloud, const std::string& path)
{
    std::ofstream out = detail::open_out(path);
    const GridSpec& g = cloud.grid;
    out << "# sigma=" << detail::fmt_double(g.sigma.x) << ',' << detail::fmt_double(g.sigma.y)
        << ',' << detail::fmt_double(g.sigma.z) << '\n';
    out << "# corner=" << g.min_corner[0] << ',' << g.min_corner[1] << ',' << g.min_corner[2]
        << '\n';
    out << "iota,i,j,k,x,y,z\n";
    for (const MortonCode3 code : cloud.codes) {
        const Index3 rho = decode3(code);
        const Point3 c = cloud.centroid(code);
        out << code.bits << ',' << rho[0] << ',' << rho[1] << ',' << rho[2] << ','
            << detail::fmt_double(c.x) << ',' << detail::fmt_double(c.y) << ','
            << detail::fmt_double(c.z) << '\n';
    }
}

inline VoxelCloud read_voxel_cloud(const std::string& path)
{
    std::ifstream in = detail::open_in(path);
    VoxelCloud cloud;
    std::string line;
    std::size_t lineno = 0;
    bool have_sigma = false, have_corner = false, have_header = false;
    Index3 max_rho{0, 0, 0};
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line[0] == '#') {
            double sx, sy, sz;
            long long cx, cy, cz;
            if (std::sscanf(line.c_str(), "# sigma=%lf,%lf,%lf", &sx, &sy, &sz) == 3) {
                cloud.grid.sigma = {sx, sy, sz};
                have_sigma = true;
            } else if (std::sscanf(line.c_str(), "# corner=%lld,%lld,%lld", &cx, &cy, &cz) ==
                       3) {
                cloud.grid.min_corner = {cx, cy, cz};
                have_corner = true;
            }
            continue;
        }
        if (!have_header) {
            if (line != "iota,i,j,k,x,y,z")
                throw ParseError(path, lineno, "expected header iota,i,j,k,x,y,z");
            have_header = true;
            continue;
        }
        std::uint64_t iota;
        long long i, j, k;
        double x, y, z;
        if (std::sscanf(line.c_str(), "%" SCNu64 ",%lld,%lld,%lld,%lf,%lf,%lf", &iota, &i, &j,
                        &k, &x, &y, &z) != 7)
            throw ParseError(path, lineno, "malformed voxel row");
        if (encode3({i, j, k}).bits != iota)
            throw ParseError(path, lineno, "morton code does not match its indices");
        cloud.codes.push_back(MortonCode3{iota});
        max_rho = {std::max(max_rho[0], std::int64_t(i)), std::max(max_rho[1], std::int64_t(j)),
                   std::max(max_rho[2], std::int64_t(k))};
    }
    if (!have_sigma || !have_corner || !have_header || cloud.codes.empty())
        throw ParseError(path + ": missing sigma/corner/header or no voxels");
    for (std::size_t n = 0; n + 1 < cloud.codes.size(); ++n)
        if (!(cloud.codes[n] < cloud.codes[n + 1]))
            throw ParseError(path + ": codes not strictly increasing");
    for (int a = 0; a < 3; ++a)
        cloud.grid.dims[a] = max_rho[a] + 1;
    return cloud;
}

/// Plain point list with an "x,y,z" header.
inline void write_points_csv(const std::vector<Point3>& points, const std::string& path)
{
    std::ofstream out = detail::open_out(path);
    out << "x,y,z\n";
    for (const Point3& p : points)
        out << detail::fmt_double(p.x) << ',' << detail::fmt_double(p.y) << ','
            << detail::fmt_double(p.z) << '\n';
}

inline std::vector<Point3> read_points_csv(const std::string& path)
{
    std::ifstream in = detail::open_in(path);
    std::vector<Point3> pts;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        if (!have_header) {
            if (line != "x,y,z")
                throw ParseError(path, lineno, "expected header x,y,z");
            have_header = true;
            continue;
        }
        Point3 p;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &p.x, &p.y, &p.z) != 3)
            throw ParseError(path, lineno, "malformed point row");
        pts.push_back(p);
    }
    if (!have_header)
        throw ParseError(path + ": missing x,y,z header");
    return pts;
}

inline constexpr const char* kMatrixMarketHeader =
    "%%MatrixMarket matrix coordinate real general";

inline void write_matrix(const SparseMatrix& a, const std::string& path)
{
    std::ofstream out = detail::open_out(path);
    out << kMatrixMarketHeader << '\n';
    out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    for (const SparseEntry& e : a.entries())
        out << (e.row + 1) << ' ' << (e.col + 1) << ' ' << detail::fmt_double(e.value) << '\n';
}

inline SparseMatrix read_matrix(const std::string& path)
{
    std::ifstream in = detail::open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind(kMatrixMarketHeader, 0) != 0)
        throw ParseError(path + ": not a MatrixMarket coordinate real general file");
    std::size_t lineno = 1;
    std::size_t rows = 0, cols = 0, nnz = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%')
            continue;
        if (std::sscanf(line.c_str(), "%zu %zu %zu", &rows, &cols, &nnz) != 3)
            throw ParseError(path, lineno, "malformed size line");
        break;
    }
    std::vector<SparseEntry> coo;
    coo.reserve(nnz);
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%')
            continue;
        std::size_t r, c;
        double v;
        if (std::sscanf(line.c_str(), "%zu %zu %lf", &r, &c, &v) != 3)
            throw ParseError(path, lineno, "malformed entry");
        if (r < 1 || r > rows || c < 1 || c > cols)
            throw ParseError(path, lineno, "entry index out of range");
        coo.push_back({r - 1, c - 1, v});
    }
    if (coo.size() != nnz)
        throw ParseError(path + ": entry count does not match header");
    return {rows, cols, std::move(coo)};
}

/// Field table "id,value" keyed by global ID.
inline void write_field(const std::vector<std::uint64_t>& ids,
                        const std::vector<double>& values, const std::string& path)
{
    if (ids.size() != values.size())
        throw std::invalid_argument("write_field: id/value length mismatch");
    std::ofstream out = detail::open_out(path);
    out << "id,value\n";
    for (std::size_t i = 0; i < ids.size(); ++i)
        out << ids[i] << ',' << detail::fmt_double(values[i]) << '\n';
}

inline std::vector<std::pair<std::uint64_t, double>> read_field(const std::string& path)
{
    std::ifstream in = detail::open_in(path);
    std::vector<std::pair<std::uint64_t, double>> rows;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        if (!have_header) {
            if (line != "id,value")
                throw ParseError(path, lineno, "expected header id,value");
            have_header = true;
            continue;
        }
        std::uint64_t id;
        double v;
        if (std::sscanf(line.c_str(), "%" SCNu64 ",%lf", &id, &v) != 2)
            throw ParseError(path, lineno, "malformed field row");
        rows.emplace_back(id, v);
    }
    if (!have_header)
        throw ParseError(path + ": missing id,value header");
    return rows;
}

/// Stencil description: "rel i j k" lines, then "edge a b",
/// "face a b c d" and "cell a b c d e f g h" lines; '#' comments.
inline void write_stencil(const Stencil& s, const std::string& path)
{
    std::ofstream out = detail::open_out(path);
    for (const Index3& offset : s.cond)
        out << "rel " << offset[0] << ' ' << offset[1] << ' ' << offset[2] << '\n';
    for (const auto& tuple : s.hyper_edges) {
        out << (tuple.size() == 2 ? "edge" : tuple.size() == 4 ? "face" : "cell");
        for (int idx : tuple)
            out << ' ' << idx;
        out << '\n';
    }
}

inline Stencil read_stencil(const std::string& path)
{
    std::ifstream in = detail::open_in(path);
    std::vector<Index3> cond;
    std::vector<std::vector<int>> tuples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string keyword;
        if (!(ss >> keyword) || keyword[0] == '#')
            continue;
        if (keyword == "rel") {
            Index3 offset;
            if (!(ss >> offset[0] >> offset[1] >> offset[2]))
                throw ParseError(path, lineno, "malformed rel line");
            cond.push_back(offset);
        } else if (keyword == "edge" || keyword == "face" || keyword == "cell") {
            const std::size_t arity = keyword == "edge" ? 2 : keyword == "face" ? 4 : 8;
            std::vector<int> tuple(arity);
            for (int& idx : tuple)
                if (!(ss >> idx))
                    throw ParseError(path, lineno, "malformed " + keyword + " line");
            tuples.push_back(std::move(tuple));
        } else {
            throw ParseError(path, lineno, "unknown keyword: " + keyword);
        }
    }
    try {
        return compile(std::move(cond), std::move(tuples));
    } catch (const std::invalid_argument& err) {
        throw ParseError(path + ": " + err.what());
    }
}

} // namespace voxgrid
