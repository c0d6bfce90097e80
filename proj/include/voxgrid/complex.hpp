#pragma once

// Voxel graph / hypergraph construction: sweep a compiled stencil over the
// cloud with bitwise Morton arithmetic and assemble the incidence and
// adjacency matrix family. A hyper-edge is emitted at an anchor iff every
// cond entry it references is present in the cloud; global IDs are
// interleaved 6D Morton codes for edges and min-corner codes plus an
// orientation tag for faces (no tag for cells).

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "morton.hpp"
#include "sparse.hpp"
#include "stencil.hpp"
#include "voxelize.hpp"

namespace voxgrid {

/// Orientation tag of a quad face: the flat (normal) axis.
enum class PlaneTag : int { yz = 0, zx = 1, xy = 2 };

inline std::uint64_t pack_face_key(MortonCode3 min_corner, PlaneTag tag)
{
    return (min_corner.bits << 2) | std::uint64_t(int(tag));
}

inline std::pair<MortonCode3, PlaneTag> unpack_face_key(std::uint64_t key)
{
    return {MortonCode3{key >> 2}, PlaneTag(int(key & 3))};
}

struct VoxelComplex {
    VoxelCloud cloud;

    IndexMap vertex_ids; // iota
    IndexMap edge_ids;   // epsilon
    IndexMap face_ids;   // packed (min-corner, tag) keys
    IndexMap cell_ids;   // min-corner codes

    SparseMatrix M_EV_oriented; // m x n, one -1 (source) and one +1 (destination) per row
    SparseMatrix M_FV;          // |F| x n, unoriented, 4 ones per row
    SparseMatrix M_FE_oriented; // |F| x m, the face cycles (cycle basis rows)
    SparseMatrix M_CV;          // |C| x n, unoriented, 8 ones per row
    SparseMatrix M_CF_oriented; // |C| x |F|, +1 min-side faces, -1 max-side
    SparseMatrix M_CE;          // |C| x m, unoriented, 12 ones per row

    bool faces_enumerated = false;
    bool cells_enumerated = false;

    /// Vertex degree of a complete (interior) neighbourhood under the
    /// stencil that built the complex.
    std::size_t full_degree = 0;

    std::size_t vertex_count() const { return vertex_ids.size(); }
    std::size_t edge_count() const { return edge_ids.size(); }
    std::size_t face_count() const { return face_ids.size(); }
    std::size_t cell_count() const { return cell_ids.size(); }

    Point3 vertex_position(std::size_t ordinal) const
    {
        return cloud.centroid(MortonCode3{vertex_ids.id(ordinal)});
    }
};

namespace detail {

inline Index3 index_add(const Index3& a, const Index3& b)
{
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

// In-plane axes of a face tag, in counterclockwise order as seen from the
// positive normal.
inline std::pair<int, int> face_axes(PlaneTag tag)
{
    switch (tag) {
    case PlaneTag::yz: return {1, 2};
    case PlaneTag::zx: return {2, 0};
    case PlaneTag::xy: return {0, 1};
    }
    throw std::logic_error("face_axes: bad tag");
}

// The 4 corner offsets of a face key's canonical cycle.
inline std::array<Index3, 4> face_cycle(MortonCode3 min_corner, PlaneTag tag)
{
    const Index3 v = decode3(min_corner);
    const auto [a1, a2] = face_axes(tag);
    Index3 e1{0, 0, 0}, e2{0, 0, 0};
    e1[a1] = 1;
    e2[a2] = 1;
    return {v, index_add(v, e1), index_add(index_add(v, e1), e2), index_add(v, e2)};
}

} // namespace detail

/// Sweep one or more compiled stencils over a voxel cloud (Algorithm
/// style: neighbour codes via MortonSum3D, edge codes via MortonSum6D on
/// the interleaved anchor) and assemble the incidence matrices.
inline VoxelComplex construct(const VoxelCloud& cloud, std::span<const Stencil> stencils)
{
    VoxelComplex X;
    X.cloud = cloud;

    bool wants_edges = false, wants_faces = false, wants_cells = false;
    for (const Stencil& s : stencils)
        for (const auto& tuple : s.hyper_edges) {
            wants_edges |= tuple.size() == 2;
            wants_faces |= tuple.size() == 4;
            wants_cells |= tuple.size() == 8;
        }
    if (wants_edges && !cloud.codes.empty() &&
        cloud.codes.back().bits >= (std::uint64_t(1) << (3 * kMortonAxisBits6)))
        throw std::out_of_range("construct: cloud exceeds the edge-index range (10 bits/axis)");
    if ((wants_faces || wants_cells) && !cloud.codes.empty() &&
        cloud.codes.back().bits >= (std::uint64_t(1) << 61))
        throw std::out_of_range("construct: cloud exceeds the face/cell key range");

    // Per-stencil emission rules, precompiled once.
    struct PairRule {
        int i, j;
        MortonCode6 edge_code;
    };
    struct TupleRule {
        std::vector<int> verts;
        MortonCode3 min_code;
        PlaneTag tag; // faces only
    };
    struct Rules {
        const Stencil* stencil;
        std::vector<PairRule> pairs;
        std::vector<TupleRule> faces;
        std::vector<TupleRule> cells;
    };
    std::vector<Rules> rules;
    for (const Stencil& s : stencils) {
        Rules r;
        r.stencil = &s;
        std::size_t pair_idx = 0;
        for (const auto& tuple : s.hyper_edges) {
            if (tuple.size() == 2) {
                r.pairs.push_back({tuple[0], tuple[1], s.edge_codes[pair_idx++]});
                continue;
            }
            TupleRule t;
            t.verts = tuple;
            Index3 lo = s.cond[std::size_t(tuple[0])];
            for (int idx : tuple)
                for (int a = 0; a < 3; ++a)
                    lo[a] = std::min(lo[a], s.cond[std::size_t(idx)][a]);
            t.min_code = encode3(lo);
            if (tuple.size() == 4) {
                int flat = 0;
                for (int a = 0; a < 3; ++a) {
                    bool spans = false;
                    for (int idx : tuple)
                        spans |= s.cond[std::size_t(idx)][a] != lo[a];
                    if (!spans)
                        flat = a;
                }
                t.tag = PlaneTag(flat);
                r.faces.push_back(std::move(t));
            } else {
                r.cells.push_back(std::move(t));
            }
        }
        X.full_degree += 2 * r.pairs.size();
        rules.push_back(std::move(r));
    }

    struct EdgeRecord {
        std::uint64_t eps, src, dst;
    };
    std::vector<EdgeRecord> edges;
    std::vector<std::uint64_t> face_keys, cell_keys;

    std::vector<MortonCode3> neighbour;
    std::vector<char> present;
    for (const MortonCode3 anchor : cloud.codes) {
        for (const Rules& r : rules) {
            const Stencil& s = *r.stencil;
            neighbour.resize(s.cond.size());
            present.resize(s.cond.size());
            for (std::size_t i = 0; i < s.cond.size(); ++i) {
                neighbour[i] = morton_sum3(anchor, s.cond_codes[i]);
                present[i] = cloud.contains(neighbour[i]);
            }
            if (!r.pairs.empty()) {
                const MortonCode6 eps0 = interleave2(anchor, anchor);
                for (const PairRule& p : r.pairs)
                    if (present[std::size_t(p.i)] && present[std::size_t(p.j)]) {
                        const MortonCode6 eps = morton_sum6(eps0, p.edge_code);
                        edges.push_back({eps.bits, neighbour[std::size_t(p.i)].bits,
                                         neighbour[std::size_t(p.j)].bits});
                    }
            }
            const auto all_present = [&](const std::vector<int>& verts) {
                return std::all_of(verts.begin(), verts.end(),
                                   [&](int idx) { return present[std::size_t(idx)] != 0; });
            };
            for (const TupleRule& t : r.faces)
                if (all_present(t.verts))
                    face_keys.push_back(
                        pack_face_key(morton_sum3(anchor, t.min_code), t.tag));
            for (const TupleRule& t : r.cells)
                if (all_present(t.verts))
                    cell_keys.push_back(morton_sum3(anchor, t.min_code).bits);
        }
    }

    std::sort(edges.begin(), edges.end(),
              [](const EdgeRecord& a, const EdgeRecord& b) { return a.eps < b.eps; });
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const EdgeRecord& a, const EdgeRecord& b) {
                                return a.eps == b.eps;
                            }),
                edges.end());
    std::sort(face_keys.begin(), face_keys.end());
    face_keys.erase(std::unique(face_keys.begin(), face_keys.end()), face_keys.end());
    std::sort(cell_keys.begin(), cell_keys.end());
    cell_keys.erase(std::unique(cell_keys.begin(), cell_keys.end()), cell_keys.end());

    std::vector<std::uint64_t> vertex_bits;
    vertex_bits.reserve(cloud.codes.size());
    for (const MortonCode3 c : cloud.codes)
        vertex_bits.push_back(c.bits);
    X.vertex_ids = IndexMap(std::move(vertex_bits));

    std::vector<std::uint64_t> edge_bits;
    edge_bits.reserve(edges.size());
    for (const EdgeRecord& e : edges)
        edge_bits.push_back(e.eps);
    X.edge_ids = IndexMap(std::move(edge_bits));
    X.face_ids = IndexMap(face_keys);
    X.cell_ids = IndexMap(cell_keys);
    X.faces_enumerated = wants_faces;
    X.cells_enumerated = wants_cells;

    const std::size_t n = X.vertex_count();
    {
        std::vector<SparseEntry> coo;
        coo.reserve(2 * edges.size());
        for (std::size_t e = 0; e < edges.size(); ++e) {
            coo.push_back({e, X.vertex_ids.ordinal(edges[e].src), -1.0});
            coo.push_back({e, X.vertex_ids.ordinal(edges[e].dst), +1.0});
        }
        X.M_EV_oriented = SparseMatrix(edges.size(), n, std::move(coo));
    }

    if (wants_faces) {
        std::vector<SparseEntry> fv, fe;
        for (std::size_t f = 0; f < face_keys.size(); ++f) {
            const auto [min_corner, tag] = unpack_face_key(face_keys[f]);
            const auto cycle = detail::face_cycle(min_corner, tag);
            for (const Index3& corner : cycle)
                fv.push_back({f, X.vertex_ids.ordinal(encode3(corner).bits), 1.0});
            for (int k = 0; k < 4; ++k) {
                const MortonCode3 a = encode3(cycle[std::size_t(k)]);
                const MortonCode3 b = encode3(cycle[std::size_t((k + 1) % 4)]);
                const std::uint64_t fwd = interleave2(a, b).bits;
                if (X.edge_ids.contains(fwd)) {
                    fe.push_back({f, X.edge_ids.ordinal(fwd), +1.0});
                    continue;
                }
                const std::uint64_t rev = interleave2(b, a).bits;
                if (!X.edge_ids.contains(rev))
                    throw std::logic_error(
                        "construct: face boundary edge missing; include an axis-edge stencil");
                fe.push_back({f, X.edge_ids.ordinal(rev), -1.0});
            }
        }
        X.M_FV = SparseMatrix(face_keys.size(), n, std::move(fv));
        X.M_FE_oriented = SparseMatrix(face_keys.size(), X.edge_count(), std::move(fe));
    }

    if (wants_cells) {
        std::vector<SparseEntry> cv, cf, ce;
        for (std::size_t c = 0; c < cell_keys.size(); ++c) {
            const Index3 v = decode3(MortonCode3{cell_keys[c]});
            for (int dz = 0; dz < 2; ++dz)
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx)
                        cv.push_back({c,
                                      X.vertex_ids.ordinal(
                                          encode3({v[0] + dx, v[1] + dy, v[2] + dz}).bits),
                                      1.0});
            for (int axis = 0; axis < 3; ++axis) {
                const PlaneTag tag = PlaneTag(axis);
                Index3 vmax = v;
                ++vmax[axis];
                const std::uint64_t min_key = pack_face_key(encode3(v), tag);
                const std::uint64_t max_key = pack_face_key(encode3(vmax), tag);
                if (!X.face_ids.contains(min_key) || !X.face_ids.contains(max_key))
                    throw std::logic_error(
                        "construct: cell boundary face missing; include square stencils");
                cf.push_back({c, X.face_ids.ordinal(min_key), +1.0});
                cf.push_back({c, X.face_ids.ordinal(max_key), -1.0});
                // The 4 cube edges parallel to this axis.
                const auto [a1, a2] = detail::face_axes(tag);
                for (int d1 = 0; d1 < 2; ++d1)
                    for (int d2 = 0; d2 < 2; ++d2) {
                        Index3 base = v;
                        base[a1] += d1;
                        base[a2] += d2;
                        Index3 tip = base;
                        ++tip[axis];
                        const std::uint64_t fwd =
                            interleave2(encode3(base), encode3(tip)).bits;
                        const std::uint64_t rev =
                            interleave2(encode3(tip), encode3(base)).bits;
                        if (X.edge_ids.contains(fwd))
                            ce.push_back({c, X.edge_ids.ordinal(fwd), 1.0});
                        else if (X.edge_ids.contains(rev))
                            ce.push_back({c, X.edge_ids.ordinal(rev), 1.0});
                        else
                            throw std::logic_error("construct: cell boundary edge missing");
                    }
            }
        }
        X.M_CV = SparseMatrix(cell_keys.size(), n, std::move(cv));
        X.M_CF_oriented = SparseMatrix(cell_keys.size(), X.face_count(), std::move(cf));
        X.M_CE = SparseMatrix(cell_keys.size(), X.edge_count(), std::move(ce));
    }

    return X;
}

inline VoxelComplex construct(const VoxelCloud& cloud, const Stencil& stencil)
{
    return construct(cloud, std::span<const Stencil>{&stencil, 1});
}

enum class CellDim { vertex, edge, face, cell };

/// Unoriented adjacency among same-dimensional cells, via products of
/// unoriented incidence matrices. The diagonal carries the incidence
/// degrees; callers may strip it.
inline SparseMatrix adjacency(const VoxelComplex& X, CellDim dim)
{
    switch (dim) {
    case CellDim::vertex: {
        const SparseMatrix m = abs(X.M_EV_oriented);
        return multiply(transpose(m), m);
    }
    case CellDim::edge: {
        const SparseMatrix m = abs(X.M_EV_oriented);
        return multiply(m, transpose(m));
    }
    case CellDim::face: {
        if (!X.faces_enumerated)
            throw std::logic_error("adjacency: complex has no faces");
        return multiply(X.M_FV, transpose(X.M_FV));
    }
    case CellDim::cell: {
        if (!X.cells_enumerated)
            throw std::logic_error("adjacency: complex has no cells");
        return multiply(X.M_CV, transpose(X.M_CV));
    }
    }
    throw std::logic_error("adjacency: bad dimension");
}

/// V - E + F, the surface Euler characteristic (2 - 2g for closed
/// orientable surfaces of genus g).
inline std::int64_t euler_characteristic(const VoxelComplex& X)
{
    return std::int64_t(X.vertex_count()) - std::int64_t(X.edge_count()) +
           std::int64_t(X.face_count());
}

/// V - E + F - C, reported separately when cells are enumerated.
inline std::int64_t euler_characteristic_solid(const VoxelComplex& X)
{
    return euler_characteristic(X) - std::int64_t(X.cell_count());
}

/// Multilinear blend of a vertex field over one cell's 8 corners at local
/// coordinates (u,v,w) in [0,1]^3.
inline double trilinear_interpolate(const VoxelComplex& X, std::uint64_t cell_key,
                                    std::span<const double> vertex_field,
                                    std::array<double, 3> local)
{
    if (vertex_field.size() != X.vertex_count())
        throw std::invalid_argument("trilinear_interpolate: field length mismatch");
    for (double c : local)
        if (c < 0.0 || c > 1.0)
            throw std::out_of_range("trilinear_interpolate: local coordinate outside [0,1]^3");
    X.cell_ids.ordinal(cell_key); // throws for unknown cells
    const Index3 v = decode3(MortonCode3{cell_key});
    const double wts[3][2] = {{1.0 - local[0], local[0]},
                              {1.0 - local[1], local[1]},
                              {1.0 - local[2], local[2]}};
    double out = 0.0;
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                const std::size_t ord =
                    X.vertex_ids.ordinal(encode3({v[0] + dx, v[1] + dy, v[2] + dz}).bits);
                out += vertex_field[ord] * wts[0][dx] * wts[1][dy] * wts[2][dz];
            }
    return out;
}

/// Per-vertex degree (number of incident edges).
inline std::vector<std::size_t> vertex_degrees(const VoxelComplex& X)
{
    std::vector<std::size_t> deg(X.vertex_count(), 0);
    for (const SparseEntry& e : X.M_EV_oriented.entries())
        ++deg[e.col];
    return deg;
}

/// Vertices whose neighbourhood is complete under the constructing
/// stencil; differential reconstructions are only exact there.
inline std::vector<bool> interior_mask(const VoxelComplex& X)
{
    const std::vector<std::size_t> deg = vertex_degrees(X);
    std::vector<bool> interior(deg.size());
    for (std::size_t i = 0; i < deg.size(); ++i)
        interior[i] = deg[i] == X.full_degree;
    return interior;
}

} // namespace voxgrid
