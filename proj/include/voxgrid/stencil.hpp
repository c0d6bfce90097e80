#pragma once

// Stencils: a condition array of relative voxel offsets plus relative
// hyper-edges (pairs for edges, 4-tuples for square faces, 8-tuples for
// cube cells), precompiled to Morton form. Offsets are kept nonnegative;
// symmetric neighbourhoods arise from sweeping the stencil over every
// anchor, which visits each unordered pair exactly once.

#include <algorithm>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "morton.hpp"

namespace voxgrid {

struct Stencil {
    std::vector<Index3> cond;                 // relative offsets, cond[0] is the anchor
    std::vector<std::vector<int>> hyper_edges; // index tuples into cond, arity 2/4/8
    std::vector<MortonCode3> cond_codes;      // encode3 over cond
    std::vector<MortonCode6> edge_codes;      // interleaved pair codes, 2-tuples in order

    /// Number of 2-tuple hyper-edges.
    std::size_t pair_count() const { return edge_codes.size(); }
};

namespace detail {

// A 4-tuple must be a unit axis-aligned square, an 8-tuple the unit cube;
// returns the componentwise minimum offset of the tuple.
inline Index3 tuple_min(const std::vector<Index3>& cond, const std::vector<int>& tuple)
{
    Index3 lo = cond[std::size_t(tuple[0])];
    for (int idx : tuple)
        for (int a = 0; a < 3; ++a)
            lo[a] = std::min(lo[a], cond[std::size_t(idx)][a]);
    return lo;
}

inline void check_cell_shape(const std::vector<Index3>& cond, const std::vector<int>& tuple)
{
    const Index3 lo = tuple_min(cond, tuple);
    std::vector<Index3> rel;
    for (int idx : tuple)
        rel.push_back({cond[std::size_t(idx)][0] - lo[0], cond[std::size_t(idx)][1] - lo[1],
                       cond[std::size_t(idx)][2] - lo[2]});
    std::sort(rel.begin(), rel.end());
    if (std::adjacent_find(rel.begin(), rel.end()) != rel.end())
        throw std::invalid_argument("Stencil: repeated vertex in hyper-edge");
    if (tuple.size() == 4) {
        // Two spanned unit axes, one flat axis.
        int flat = 0, spanned = 0;
        for (int a = 0; a < 3; ++a) {
            std::int64_t hi = 0;
            for (const Index3& r : rel)
                hi = std::max(hi, r[a]);
            if (hi == 0)
                ++flat;
            else if (hi == 1)
                ++spanned;
        }
        if (flat != 1 || spanned != 2)
            throw std::invalid_argument("Stencil: 4-tuple is not a unit square");
    } else {
        for (std::size_t k = 0; k < 8; ++k)
            if (rel[k] != Index3{std::int64_t(k >> 2) & 1, std::int64_t(k >> 1) & 1,
                                 std::int64_t(k) & 1})
                throw std::invalid_argument("Stencil: 8-tuple is not a unit cube");
    }
}

} // namespace detail

/// Validate and precompile a stencil: populates cond_codes and the
/// interleaved edge codes of every 2-tuple.
inline Stencil compile(std::vector<Index3> cond, std::vector<std::vector<int>> hyper_edges)
{
    if (cond.empty() || cond[0] != Index3{0, 0, 0})
        throw std::invalid_argument("Stencil: cond[0] must be the (0,0,0) anchor");
    for (const Index3& offset : cond)
        for (std::int64_t c : offset)
            if (c < 0)
                throw std::invalid_argument("Stencil: offsets must be nonnegative");

    Stencil s;
    s.cond = std::move(cond);
    s.hyper_edges = std::move(hyper_edges);
    s.cond_codes.reserve(s.cond.size());
    for (const Index3& offset : s.cond)
        s.cond_codes.push_back(encode3(offset));

    for (const auto& tuple : s.hyper_edges) {
        if (tuple.size() != 2 && tuple.size() != 4 && tuple.size() != 8)
            throw std::invalid_argument("Stencil: hyper-edge arity must be 2, 4 or 8");
        for (int idx : tuple)
            if (idx < 0 || std::size_t(idx) >= s.cond.size())
                throw std::invalid_argument("Stencil: hyper-edge index out of range");
        if (tuple.size() == 2) {
            if (tuple[0] == tuple[1])
                throw std::invalid_argument("Stencil: degenerate edge");
            s.edge_codes.push_back(interleave2(s.cond_codes[std::size_t(tuple[0])],
                                               s.cond_codes[std::size_t(tuple[1])]));
        } else {
            detail::check_cell_shape(s.cond, tuple);
        }
    }
    return s;
}

enum class StencilKind { face6, edge18, vertex26, squareYZ, squareZX, squareXY, cube8 };

/// Canned stencils for the standard connectivity taxonomy. Forward
/// offsets only: face6 carries the 3 axis pairs, edge18 adds the 6
/// in-plane diagonals, vertex26 all 13 forward directions of the unit
/// cube. The square kinds carry one oriented 4-tuple, cube8 one 8-tuple.
inline Stencil standard(StencilKind kind)
{
    using T = std::vector<int>;
    const Index3 o{0, 0, 0}, ex{1, 0, 0}, ey{0, 1, 0}, ez{0, 0, 1};
    const Index3 exy{1, 1, 0}, exz{1, 0, 1}, eyz{0, 1, 1}, exyz{1, 1, 1};
    switch (kind) {
    case StencilKind::face6:
        return compile({o, ex, ey, ez}, {T{0, 1}, T{0, 2}, T{0, 3}});
    case StencilKind::edge18:
        return compile({o, ex, ey, ez, exy, exz, eyz},
                       {T{0, 1}, T{0, 2}, T{0, 3},          // axis steps
                        T{0, 4}, T{1, 2},                   // xy-plane diagonals
                        T{0, 5}, T{1, 3},                   // xz-plane diagonals
                        T{0, 6}, T{2, 3}});                 // yz-plane diagonals
    case StencilKind::vertex26:
        return compile({o, ex, ey, ez, exy, exz, eyz, exyz},
                       {T{0, 1}, T{0, 2}, T{0, 3},
                        T{0, 4}, T{1, 2}, T{0, 5}, T{1, 3}, T{0, 6}, T{2, 3},
                        T{0, 7}, T{1, 6}, T{2, 5}, T{3, 4}}); // body diagonals
    case StencilKind::squareYZ:
        return compile({o, ey, eyz, ez}, {T{0, 1, 2, 3}});
    case StencilKind::squareZX:
        return compile({o, ez, exz, ex}, {T{0, 1, 2, 3}});
    case StencilKind::squareXY:
        return compile({o, ex, exy, ey}, {T{0, 1, 2, 3}});
    case StencilKind::cube8:
        return compile({o, ex, ey, ez, exy, exz, eyz, exyz}, {T{0, 1, 2, 3, 4, 5, 6, 7}});
    }
    throw std::invalid_argument("standard: unknown stencil kind");
}

/// Merge several stencils into one: offsets are pooled (deduplicated) and
/// hyper-edge tuples remapped. Sweeping the merged stencil is equivalent
/// to sweeping each input in turn.
inline Stencil merge_stencils(std::span<const Stencil> stencils)
{
    std::vector<Index3> cond{{0, 0, 0}};
    std::map<Index3, int> lookup{{{0, 0, 0}, 0}};
    std::vector<std::vector<int>> tuples;
    for (const Stencil& s : stencils)
        for (const auto& tuple : s.hyper_edges) {
            std::vector<int> mapped;
            mapped.reserve(tuple.size());
            for (int idx : tuple) {
                const Index3& offset = s.cond[std::size_t(idx)];
                auto [it, inserted] = lookup.try_emplace(offset, int(cond.size()));
                if (inserted)
                    cond.push_back(offset);
                mapped.push_back(it->second);
            }
            tuples.push_back(std::move(mapped));
        }
    return compile(std::move(cond), std::move(tuples));
}

/// The stencil family behind the full cell complex: axis edges, the three
/// square orientations and (optionally) cube cells, merged into one.
inline Stencil standard_complex_stencil(bool with_cells)
{
    std::vector<Stencil> parts{standard(StencilKind::face6), standard(StencilKind::squareYZ),
                               standard(StencilKind::squareZX), standard(StencilKind::squareXY)};
    if (with_cells)
        parts.push_back(standard(StencilKind::cube8));
    return merge_stencils(parts);
}

inline StencilKind stencil_kind_from_string(const std::string& name)
{
    if (name == "face6") return StencilKind::face6;
    if (name == "edge18") return StencilKind::edge18;
    if (name == "vertex26") return StencilKind::vertex26;
    if (name == "squareYZ") return StencilKind::squareYZ;
    if (name == "squareZX") return StencilKind::squareZX;
    if (name == "squareXY") return StencilKind::squareXY;
    if (name == "cube8") return StencilKind::cube8;
    throw std::invalid_argument("unknown stencil kind: " + name);
}

} // namespace voxgrid
