#pragma once

#include <vector>

#include "oddsym/coefficient.hpp"

namespace oddsym {

// Dense exact linear algebra over the Gaussian rationals; enough for the
// kernel/image computations of the spectral module.
namespace linalg {

using Row = std::vector<Coefficient>;
using Matrix = std::vector<Row>;

// In-place reduced row echelon form; returns the pivot columns.
inline std::vector<std::size_t> rref(Matrix& m) {
    std::vector<std::size_t> pivots;
    if (m.empty())
        return pivots;
    std::size_t rows = m.size(), cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t sel = r;
        while (sel < rows && m[sel][c].is_zero())
            ++sel;
        if (sel == rows)
            continue;
        std::swap(m[sel], m[r]);
        Coefficient inv = m[r][c].inverse();
        for (std::size_t j = c; j < cols; ++j)
            m[r][j] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c].is_zero())
                continue;
            Coefficient f = m[i][c];
            for (std::size_t j = c; j < cols; ++j)
                m[i][j] -= f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank(Matrix m) { return rref(m).size(); }

// Basis of the null space of A (columns = unknowns), one vector per free column.
inline std::vector<Row> kernel_basis(Matrix a) {
    if (a.empty())
        return {};
    std::size_t cols = a[0].size();
    auto pivots = rref(a);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivots)
        is_pivot[c] = true;
    std::vector<Row> basis;
    for (std::size_t free_c = 0; free_c < cols; ++free_c) {
        if (is_pivot[free_c])
            continue;
        Row v(cols, Coefficient(0));
        v[free_c] = Coefficient(1);
        for (std::size_t pi = 0; pi < pivots.size(); ++pi)
            v[pivots[pi]] = -a[pi][free_c];
        basis.push_back(std::move(v));
    }
    return basis;
}

// One solution of A x = b, if any.
inline bool solve(const Matrix& a, const Row& b, Row* solution) {
    if (a.empty()) {
        for (const auto& v : b)
            if (!v.is_zero())
                return false;
        if (solution)
            solution->clear();
        return true;
    }
    std::size_t rows = a.size(), cols = a[0].size();
    Matrix aug = a;
    for (std::size_t i = 0; i < rows; ++i)
        aug[i].push_back(b[i]);
    auto pivots = rref(aug);
    // Inconsistent iff a pivot lands in the augmented column.
    if (!pivots.empty() && pivots.back() == cols)
        return false;
    if (solution) {
        solution->assign(cols, Coefficient(0));
        for (std::size_t pi = 0; pi < pivots.size(); ++pi)
            (*solution)[pivots[pi]] = aug[pi][cols];
    }
    return true;
}

// Reduces v against an RREF basis (rows with identified pivot columns);
// returns the residue.
inline Row reduce_against(const Matrix& rref_rows, const std::vector<std::size_t>& pivots, Row v) {
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        const Coefficient& f = v[pivots[i]];
        if (f.is_zero())
            continue;
        Coefficient factor = f;
        for (std::size_t j = 0; j < v.size(); ++j)
            v[j] -= factor * rref_rows[i][j];
    }
    return v;
}

} // namespace linalg
} // namespace oddsym
