#pragma once

// Bit-interleaved (Z-order) spatial indices for voxels and voxel edges,
// plus carry-correct bitwise addition on the interleaved form.
//
// Bit layout convention: for a triple rho, the component with the highest
// array index occupies bit position 0, i.e. rho[2] lands on bits 3k,
// rho[1] on bits 3k+1 and rho[0] on bits 3k+2, so that
// (0,0,1) -> 0b001 and (0,1,0) -> 0b010.

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace voxgrid {

using Index3 = std::array<std::int64_t, 3>;

/// Interleaved index of a voxel: 21 bits per axis in a 64-bit word.
struct MortonCode3 {
    std::uint64_t bits = 0;
    friend auto operator<=>(const MortonCode3&, const MortonCode3&) = default;
};

/// Interleaved index of a directed voxel edge: the 6 axes of the
/// (source, destination) pair, 10 effective bits per original axis.
struct MortonCode6 {
    std::uint64_t bits = 0;
    friend auto operator<=>(const MortonCode6&, const MortonCode6&) = default;
};

inline constexpr std::int64_t kMortonAxisBits3 = 21;
inline constexpr std::int64_t kMortonAxisLimit3 = std::int64_t(1) << kMortonAxisBits3;
inline constexpr std::int64_t kMortonAxisBits6 = 10;
inline constexpr std::int64_t kMortonAxisLimit6 = std::int64_t(1) << kMortonAxisBits6;

namespace detail {

// Insert two 0 bits between each of the low 21 bits of v.
constexpr std::uint64_t spread3(std::uint64_t v)
{
    v &= 0x1FFFFF;
    v = (v | (v << 32)) & 0x1F00000000FFFF;
    v = (v | (v << 16)) & 0x1F0000FF0000FF;
    v = (v | (v << 8)) & 0x100F00F00F00F00F;
    v = (v | (v << 4)) & 0x10C30C30C30C30C3;
    v = (v | (v << 2)) & 0x1249249249249249;
    return v;
}

// Inverse of spread3: keep every third bit.
constexpr std::uint64_t compact3(std::uint64_t v)
{
    v &= 0x1249249249249249;
    v = (v ^ (v >> 2)) & 0x10C30C30C30C30C3;
    v = (v ^ (v >> 4)) & 0x100F00F00F00F00F;
    v = (v ^ (v >> 8)) & 0x1F0000FF0000FF;
    v = (v ^ (v >> 16)) & 0x1F00000000FFFF;
    v = (v ^ (v >> 32)) & 0x1FFFFF;
    return v;
}

// Insert one 0 bit between each of the low 32 bits of v.
constexpr std::uint64_t spread2(std::uint64_t v)
{
    v &= 0xFFFFFFFF;
    v = (v | (v << 16)) & 0x0000FFFF0000FFFF;
    v = (v | (v << 8)) & 0x00FF00FF00FF00FF;
    v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0F;
    v = (v | (v << 2)) & 0x3333333333333333;
    v = (v | (v << 1)) & 0x5555555555555555;
    return v;
}

// Inverse of spread2: keep every other bit.
constexpr std::uint64_t compact2(std::uint64_t v)
{
    v &= 0x5555555555555555;
    v = (v ^ (v >> 1)) & 0x3333333333333333;
    v = (v ^ (v >> 2)) & 0x0F0F0F0F0F0F0F0F;
    v = (v ^ (v >> 4)) & 0x00FF00FF00FF00FF;
    v = (v ^ (v >> 8)) & 0x0000FFFF0000FFFF;
    v = (v ^ (v >> 16)) & 0x00000000FFFFFFFF;
    return v;
}

// Channel mask for stride-interleaved words: bits at positions stride*k + channel.
constexpr std::uint64_t channel_mask(int stride, int channel, int digits)
{
    std::uint64_t m = 0;
    for (int k = 0; k < digits; ++k)
        m |= std::uint64_t(1) << (stride * k + channel);
    return m;
}

// Masked-carry addition on one interleaved channel: filler bits of the
// other channels are set to 1 so the carry ripples across them, then the
// channel is masked back out. Returns the channel bits of the sum.
constexpr std::uint64_t masked_add(std::uint64_t a, std::uint64_t b, std::uint64_t mask)
{
    return ((a | ~mask) + (b & mask)) & mask;
}

inline constexpr std::uint64_t kMask3[3] = {
    channel_mask(3, 0, 21),
    channel_mask(3, 1, 21),
    channel_mask(3, 2, 21),
};

inline constexpr std::uint64_t kMask6[6] = {
    channel_mask(6, 0, 10), channel_mask(6, 1, 10), channel_mask(6, 2, 10),
    channel_mask(6, 3, 10), channel_mask(6, 4, 10), channel_mask(6, 5, 10),
};

} // namespace detail

/// Interleave a nonnegative triple into a MortonCode3.
/// Throws std::out_of_range if any component is negative or >= 2^21.
inline MortonCode3 encode3(const Index3& rho)
{
    for (std::int64_t c : rho)
        if (c < 0 || c >= kMortonAxisLimit3)
            throw std::out_of_range("encode3: component outside [0, 2^21)");
    return MortonCode3{(detail::spread3(std::uint64_t(rho[0])) << 2) |
                       (detail::spread3(std::uint64_t(rho[1])) << 1) |
                       detail::spread3(std::uint64_t(rho[2]))};
}

/// Deinterleave a MortonCode3 back into its triple.
inline Index3 decode3(MortonCode3 iota)
{
    return {std::int64_t(detail::compact3(iota.bits >> 2)),
            std::int64_t(detail::compact3(iota.bits >> 1)),
            std::int64_t(detail::compact3(iota.bits))};
}

/// Interleave a (source, destination) code pair into edge-space: source
/// bits land on even positions 2k, destination bits on odd positions 2k+1.
/// Throws std::out_of_range unless both codes fit 10 bits per axis.
inline MortonCode6 interleave2(MortonCode3 src, MortonCode3 dst)
{
    constexpr std::uint64_t limit = std::uint64_t(1) << (3 * kMortonAxisBits6);
    if (src.bits >= limit || dst.bits >= limit)
        throw std::out_of_range("interleave2: code exceeds 10 bits per axis");
    return MortonCode6{detail::spread2(src.bits) | (detail::spread2(dst.bits) << 1)};
}

/// Inverse of interleave2.
inline std::pair<MortonCode3, MortonCode3> deinterleave2(MortonCode6 eps)
{
    return {MortonCode3{detail::compact2(eps.bits)},
            MortonCode3{detail::compact2(eps.bits >> 1)}};
}

/// Componentwise addition carried out directly on the interleaved form:
/// morton_sum3(encode3(a), encode3(b)) == encode3(a + b).
/// Throws std::out_of_range if any per-axis sum exceeds 21 bits.
inline MortonCode3 morton_sum3(MortonCode3 i0, MortonCode3 i1)
{
    std::uint64_t out = 0;
    for (std::uint64_t mask : detail::kMask3) {
        const std::uint64_t sum = detail::masked_add(i0.bits, i1.bits, mask);
        // A wrapped channel compares below its first addend.
        if (sum < (i0.bits & mask))
            throw std::out_of_range("morton_sum3: per-axis overflow");
        out |= sum;
    }
    return MortonCode3{out};
}

/// Six-channel analogue of morton_sum3 for edge codes.
inline MortonCode6 morton_sum6(MortonCode6 e0, MortonCode6 e1)
{
    std::uint64_t out = 0;
    for (std::uint64_t mask : detail::kMask6) {
        const std::uint64_t sum = detail::masked_add(e0.bits, e1.bits, mask);
        if (sum < (e0.bits & mask))
            throw std::out_of_range("morton_sum6: per-axis overflow");
        out |= sum;
    }
    return MortonCode6{out};
}

/// Signed neighbour offset applied on the interleaved form via per-axis
/// two's complement; equal to decode3 -> add -> encode3 where that is in
/// range, and throws std::out_of_range where it is not.
inline MortonCode3 morton_add_delta3(MortonCode3 iota, const Index3& delta)
{
    std::uint64_t out = 0;
    for (int axis = 0; axis < 3; ++axis) {
        const std::uint64_t mask = detail::kMask3[2 - axis]; // rho[axis] lives on channel 2-axis
        const std::int64_t d = delta[axis];
        if (d <= -kMortonAxisLimit3 || d >= kMortonAxisLimit3)
            throw std::out_of_range("morton_add_delta3: delta exceeds axis width");
        const std::uint64_t wrapped = std::uint64_t(d) & (std::uint64_t(kMortonAxisLimit3) - 1);
        const std::uint64_t addend = detail::spread3(wrapped) << (2 - axis);
        const std::uint64_t sum = detail::masked_add(iota.bits, addend, mask);
        const std::uint64_t before = iota.bits & mask;
        if (d >= 0 ? sum < before : sum > before)
            throw std::out_of_range("morton_add_delta3: result outside [0, 2^21)");
        out |= sum;
    }
    return MortonCode3{out};
}

} // namespace voxgrid
