#pragma once

// Minimal sparse real-matrix kernel for incidence algebra and operator
// assembly: canonical coordinate storage (row-major sorted, duplicates
// summed, exact zeros dropped) with a compressed-row offset table.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace voxgrid {

struct SparseEntry {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0;

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

class SparseMatrix {
public:
    SparseMatrix() = default;

    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<SparseEntry> coo = {})
        : rows_(rows), cols_(cols), entries_(std::move(coo))
    {
        for (const SparseEntry& e : entries_)
            if (e.row >= rows_ || e.col >= cols_)
                throw std::out_of_range("SparseMatrix: entry index out of range");
        canonicalize();
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return entries_.size(); }
    const std::vector<SparseEntry>& entries() const { return entries_; }

    /// Offset of each row's first entry; size rows()+1.
    const std::vector<std::size_t>& row_offsets() const { return offsets_; }

    std::span<const SparseEntry> row(std::size_t r) const
    {
        return {entries_.data() + offsets_[r], entries_.data() + offsets_[r + 1]};
    }

    /// Canonical forms are unique, so equality is entrywise.
    friend bool operator==(const SparseMatrix& a, const SparseMatrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
    }

private:
    void canonicalize()
    {
        std::sort(entries_.begin(), entries_.end(),
                  [](const SparseEntry& a, const SparseEntry& b) {
                      return a.row != b.row ? a.row < b.row : a.col < b.col;
                  });
        std::size_t out = 0;
        for (std::size_t i = 0; i < entries_.size();) {
            std::size_t j = i + 1;
            double sum = entries_[i].value;
            while (j < entries_.size() && entries_[j].row == entries_[i].row &&
                   entries_[j].col == entries_[i].col)
                sum += entries_[j++].value;
            if (sum != 0.0)
                entries_[out++] = {entries_[i].row, entries_[i].col, sum};
            i = j;
        }
        entries_.resize(out);
        offsets_.assign(rows_ + 1, 0);
        for (const SparseEntry& e : entries_)
            ++offsets_[e.row + 1];
        for (std::size_t r = 0; r < rows_; ++r)
            offsets_[r + 1] += offsets_[r];
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<SparseEntry> entries_;
    std::vector<std::size_t> offsets_;
};

inline SparseMatrix transpose(const SparseMatrix& a)
{
    std::vector<SparseEntry> coo;
    coo.reserve(a.nnz());
    for (const SparseEntry& e : a.entries())
        coo.push_back({e.col, e.row, e.value});
    return {a.cols(), a.rows(), std::move(coo)};
}

inline SparseMatrix abs(const SparseMatrix& a)
{
    std::vector<SparseEntry> coo;
    coo.reserve(a.nnz());
    for (const SparseEntry& e : a.entries())
        coo.push_back({e.row, e.col, std::abs(e.value)});
    return {a.rows(), a.cols(), std::move(coo)};
}

/// Multiply row i by d[i]; realizes diagonal products without
/// materializing the diagonal.
inline SparseMatrix scale_rows(const SparseMatrix& a, std::span<const double> d)
{
    if (d.size() != a.rows())
        throw std::invalid_argument("scale_rows: diagonal length mismatch");
    std::vector<SparseEntry> coo;
    coo.reserve(a.nnz());
    for (const SparseEntry& e : a.entries())
        coo.push_back({e.row, e.col, d[e.row] * e.value});
    return {a.rows(), a.cols(), std::move(coo)};
}

inline SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b)
{
    if (a.cols() != b.rows())
        throw std::invalid_argument("multiply: shape mismatch");
    std::vector<SparseEntry> coo;
    std::vector<double> accum(b.cols(), 0.0);
    std::vector<std::size_t> touched;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        touched.clear();
        for (const SparseEntry& ae : a.row(r))
            for (const SparseEntry& be : b.row(ae.col)) {
                if (accum[be.col] == 0.0)
                    touched.push_back(be.col);
                accum[be.col] += ae.value * be.value;
            }
        std::sort(touched.begin(), touched.end());
        for (std::size_t c : touched) {
            if (accum[c] != 0.0)
                coo.push_back({r, c, accum[c]});
            accum[c] = 0.0;
        }
    }
    return {a.rows(), b.cols(), std::move(coo)};
}

inline std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x)
{
    if (x.size() != a.cols())
        throw std::invalid_argument("matvec: vector length mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (const SparseEntry& e : a.entries())
        y[e.row] += e.value * x[e.col];
    return y;
}

/// y = A^T x without materializing the transpose.
inline std::vector<double> matvec_transposed(const SparseMatrix& a, std::span<const double> x)
{
    if (x.size() != a.rows())
        throw std::invalid_argument("matvec_transposed: vector length mismatch");
    std::vector<double> y(a.cols(), 0.0);
    for (const SparseEntry& e : a.entries())
        y[e.col] += e.value * x[e.row];
    return y;
}

/// Bijection between a strictly increasing sequence of global 64-bit IDs
/// (Morton codes, packed face/cell keys) and dense ordinals 0..n-1.
class IndexMap {
public:
    IndexMap() = default;

    explicit IndexMap(std::vector<std::uint64_t> sorted_ids) : ids_(std::move(sorted_ids))
    {
        for (std::size_t i = 0; i + 1 < ids_.size(); ++i)
            if (ids_[i] >= ids_[i + 1])
                throw std::invalid_argument("IndexMap: ids must be strictly increasing");
    }

    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    const std::vector<std::uint64_t>& ids() const { return ids_; }

    bool contains(std::uint64_t id) const
    {
        return std::binary_search(ids_.begin(), ids_.end(), id);
    }

    std::size_t ordinal(std::uint64_t id) const
    {
        const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it == ids_.end() || *it != id)
            throw std::out_of_range("IndexMap: unknown id");
        return std::size_t(it - ids_.begin());
    }

    std::uint64_t id(std::size_t ordinal) const { return ids_.at(ordinal); }

private:
    std::vector<std::uint64_t> ids_;
};

} // namespace voxgrid
