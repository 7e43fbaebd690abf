#pragma once

#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "oddsym/io.hpp"
#include "oddsym/polynomial.hpp"
#include "oddsym/sampling.hpp"

namespace oddsym {

using PolyMatrix = std::vector<std::vector<SuperPolynomial>>;

inline PolyMatrix poly_matrix(int rows, int cols, const GenSetPtr& gens) {
    return PolyMatrix(rows, std::vector<SuperPolynomial>(cols, SuperPolynomial::zero(gens)));
}

inline PolyMatrix poly_identity(int n, const GenSetPtr& gens) {
    PolyMatrix m = poly_matrix(n, n, gens);
    for (int i = 0; i < n; ++i)
        m[i][i] = SuperPolynomial::constant(gens, 1);
    return m;
}

inline PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
    PolyMatrix r = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            r[i][j] += b[i][j];
    return r;
}

inline PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b) {
    PolyMatrix r = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            r[i][j] -= b[i][j];
    return r;
}

// Entry order is preserved: (AB)_ij = sum_k A_ik * B_kj with the A entry on
// the left, which matters once entries anticommute.
inline PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
    std::size_t rows = a.size(), inner = b.size(), cols = b[0].size();
    PolyMatrix r = poly_matrix(rows, cols, a[0][0].gens());
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < inner; ++k) {
            if (a[i][k].is_zero())
                continue;
            for (std::size_t j = 0; j < cols; ++j)
                r[i][j] += a[i][k] * b[k][j];
        }
    return r;
}

inline PolyMatrix transpose(const PolyMatrix& a) {
    std::size_t rows = a.size(), cols = a[0].size();
    PolyMatrix r = poly_matrix(cols, rows, a[0][0].gens());
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            r[j][i] = a[i][j];
    return r;
}

inline bool matrices_equal(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size())
            return false;
        for (std::size_t j = 0; j < a[i].size(); ++j)
            if (a[i][j] != b[i][j])
                return false;
    }
    return true;
}

namespace detail {
inline SuperPolynomial det_recursive(const PolyMatrix& m, const std::vector<int>& cols, int row,
                                     const GenSetPtr& gens) {
    if (cols.empty())
        return SuperPolynomial::constant(gens, 1);
    SuperPolynomial acc = SuperPolynomial::zero(gens);
    for (std::size_t pick = 0; pick < cols.size(); ++pick) {
        int c = cols[pick];
        if (m[row][c].is_zero())
            continue;
        std::vector<int> rest;
        rest.reserve(cols.size() - 1);
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (j != pick)
                rest.push_back(cols[j]);
        SuperPolynomial sub = det_recursive(m, rest, row + 1, gens);
        SuperPolynomial term = m[row][c] * sub;
        if (pick & 1)
            acc -= term;
        else
            acc += term;
    }
    return acc;
}
} // namespace detail

// Leibniz determinant of a square matrix with commuting (even) entries.
inline SuperPolynomial det_even(const PolyMatrix& m) {
    if (m.empty())
        throw PreconditionError("det_even: empty matrix");
    for (const auto& row : m)
        for (const auto& e : row)
            if (!e.is_even())
                throw PreconditionError("det_even: matrix has an odd entry");
    std::vector<int> cols(m.size());
    for (std::size_t j = 0; j < m.size(); ++j)
        cols[j] = static_cast<int>(j);
    return detail::det_recursive(m, cols, 0, m[0][0].gens());
}

// Inverse of an even-entry matrix via the adjugate; requires det to be a unit
// of the Grassmann polynomial ring.
inline PolyMatrix invert_even_matrix(const PolyMatrix& m) {
    int n = static_cast<int>(m.size());
    const GenSetPtr& gens = m[0][0].gens();
    SuperPolynomial det = det_even(m);
    SuperPolynomial det_inv = invert_even(det);
    PolyMatrix inv = poly_matrix(n, n, gens);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // cofactor C_ji for the (i,j) entry of the inverse
            SuperPolynomial cof = SuperPolynomial::constant(gens, 1);
            if (n > 1) {
                PolyMatrix minor = poly_matrix(n - 1, n - 1, gens);
                for (int r = 0, rr = 0; r < n; ++r) {
                    if (r == j)
                        continue;
                    for (int c = 0, cc = 0; c < n; ++c) {
                        if (c == i)
                            continue;
                        minor[rr][cc] = m[r][c];
                        ++cc;
                    }
                    ++rr;
                }
                cof = det_even(minor);
            }
            if ((i + j) & 1)
                cof = -cof;
            inv[i][j] = cof * det_inv;
        }
    }
    return inv;
}

// Block matrix in n|n format. J00 and J11 carry even entries, J01 and J10 odd
// ones; rows of each block are indexed first.
struct SuperMatrix {
    int n = 0;
    GenSetPtr gens;
    PolyMatrix j00, j01, j10, j11;

    static SuperMatrix identity(int n, const GenSetPtr& gens) {
        SuperMatrix j;
        j.n = n;
        j.gens = gens;
        j.j00 = poly_identity(n, gens);
        j.j11 = poly_identity(n, gens);
        j.j01 = poly_matrix(n, n, gens);
        j.j10 = poly_matrix(n, n, gens);
        return j;
    }

    void validate() const {
        auto check_block = [&](const PolyMatrix& b, Parity p, const char* name) {
            if (static_cast<int>(b.size()) != n)
                throw PreconditionError(std::string("block ") + name + " has wrong shape");
            for (const auto& row : b) {
                if (static_cast<int>(row.size()) != n)
                    throw PreconditionError(std::string("block ") + name + " has wrong shape");
                for (const auto& e : row) {
                    auto ep = e.parity();
                    if (!e.is_zero() && (!ep || *ep != p))
                        throw PreconditionError(std::string("block ") + name +
                                                " violates its parity constraint");
                }
            }
        };
        check_block(j00, Parity::even, "J00");
        check_block(j11, Parity::even, "J11");
        check_block(j01, Parity::odd, "J01");
        check_block(j10, Parity::odd, "J10");
    }

    friend bool operator==(const SuperMatrix& a, const SuperMatrix& b) {
        return a.n == b.n && matrices_equal(a.j00, b.j00) && matrices_equal(a.j01, b.j01) &&
               matrices_equal(a.j10, b.j10) && matrices_equal(a.j11, b.j11);
    }
};

inline SuperMatrix operator*(const SuperMatrix& a, const SuperMatrix& b) {
    SuperMatrix r;
    r.n = a.n;
    r.gens = a.gens;
    r.j00 = a.j00 * b.j00 + a.j01 * b.j10;
    r.j01 = a.j00 * b.j01 + a.j01 * b.j11;
    r.j10 = a.j10 * b.j00 + a.j11 * b.j10;
    r.j11 = a.j10 * b.j01 + a.j11 * b.j11;
    return r;
}

// Transpose respecting block parities: the (0,1) block picks up a minus sign.
inline SuperMatrix supertranspose(const SuperMatrix& j) {
    SuperMatrix r;
    r.n = j.n;
    r.gens = j.gens;
    r.j00 = transpose(j.j00);
    r.j01 = transpose(j.j10);
    r.j11 = transpose(j.j11);
    r.j10 = transpose(j.j01);
    for (auto& row : r.j10)
        for (auto& e : row)
            e = -e;
    return r;
}

// The odd symplectic form [[0, 1], [1, 0]].
inline SuperMatrix odd_symplectic_form(int n, const GenSetPtr& gens) {
    SuperMatrix b;
    b.n = n;
    b.gens = gens;
    b.j00 = poly_matrix(n, n, gens);
    b.j11 = poly_matrix(n, n, gens);
    b.j01 = poly_identity(n, gens);
    b.j10 = poly_identity(n, gens);
    return b;
}

inline PolyMatrix schur_complement(const SuperMatrix& j) {
    return j.j11 - j.j10 * invert_even_matrix(j.j00) * j.j01;
}

// Ber J = det J00 / det(J11 - J10 J00^{-1} J01), the inverse taken through the
// terminating Neumann series.
inline SuperPolynomial berezinian(const SuperMatrix& j) {
    SuperPolynomial num = det_even(j.j00);
    SuperPolynomial den = det_even(schur_complement(j));
    return num * invert_even(den);
}

struct SymplecticReport {
    bool symplectic = false;    // J B J^st == B
    bool symp1 = false;         // J00 J01^T symmetric
    bool symp2 = false;         // J11 J10^T antisymmetric
    bool symp3 = false;         // J00 J11^T + J01 J10^T = 1
    bool id_constraint = false; // J11 - J10 J00^{-1} J01 = (J00^T)^{-1}
    bool id_evaluated = false;  // false when J00 has a singular body

    bool all_hold() const {
        return symplectic && symp1 && symp2 && symp3 && id_evaluated && id_constraint;
    }
    std::vector<std::string> failed() const {
        std::vector<std::string> f;
        if (!symplectic)
            f.push_back("JBJ^st=B");
        if (!symp1)
            f.push_back("symp1");
        if (!symp2)
            f.push_back("symp2");
        if (!symp3)
            f.push_back("symp3");
        if (!id_evaluated)
            f.push_back("id(not evaluated: singular J00)");
        else if (!id_constraint)
            f.push_back("id");
        return f;
    }
};

inline SymplecticReport is_symplectic(const SuperMatrix& j) {
    SymplecticReport rep;
    SuperMatrix b = odd_symplectic_form(j.n, j.gens);
    rep.symplectic = (j * b * supertranspose(j)) == b;

    PolyMatrix p1 = j.j00 * transpose(j.j01);
    rep.symp1 = matrices_equal(p1, transpose(p1));
    PolyMatrix p2 = j.j11 * transpose(j.j10);
    PolyMatrix p2t = transpose(p2);
    for (auto& row : p2t)
        for (auto& e : row)
            e = -e;
    rep.symp2 = matrices_equal(p2, p2t);
    PolyMatrix p3 = j.j00 * transpose(j.j11) + j.j01 * transpose(j.j10);
    rep.symp3 = matrices_equal(p3, poly_identity(j.n, j.gens));

    try {
        PolyMatrix lhs = schur_complement(j);
        PolyMatrix rhs = invert_even_matrix(transpose(j.j00));
        rep.id_constraint = matrices_equal(lhs, rhs);
        rep.id_evaluated = true;
    } catch (const PreconditionError&) {
        rep.id_evaluated = false;
    }
    return rep;
}

// Theorem: Ber J = (det J00)^2 for odd symplectic J.
inline bool check_berezinian_identity(const SuperMatrix& j) {
    if (!is_symplectic(j).symplectic)
        throw PreconditionError("check_berezinian_identity: matrix is not symplectic");
    SuperPolynomial d = det_even(j.j00);
    return berezinian(j) == d * d;
}

// ---------------------------------------------------------------------------
// Sampler: pseudorandom products of exactly symplectic factors
//   (a) diag(G, (G^T)^{-1})      with G an invertible rational matrix,
//   (b) [[1, A], [0, 1]]         with A symmetric, entries rational * theta,
//   (c) [[1, 0], [C, 1]]         with C antisymmetric, same entry shape.
// ---------------------------------------------------------------------------

namespace detail {

// Exact inverse of a rational matrix by Gauss-Jordan elimination.
inline std::vector<std::vector<Rational>> rational_inverse(std::vector<std::vector<Rational>> m) {
    std::size_t n = m.size();
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        inv[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t sel = c;
        while (sel < n && m[sel][c] == 0)
            ++sel;
        if (sel == n)
            throw PreconditionError("rational_inverse: singular matrix");
        std::swap(m[sel], m[c]);
        std::swap(inv[sel], inv[c]);
        Rational piv = m[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            m[c][j] /= piv;
            inv[c][j] /= piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || m[i][c] == 0)
                continue;
            Rational f = m[i][c];
            for (std::size_t j = 0; j < n; ++j) {
                m[i][j] -= f * m[c][j];
                inv[i][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

inline std::vector<std::vector<Rational>>
rational_transpose(const std::vector<std::vector<Rational>>& m) {
    std::size_t n = m.size();
    std::vector<std::vector<Rational>> r(n, std::vector<Rational>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            r[j][i] = m[i][j];
    return r;
}

inline std::vector<std::vector<Rational>> random_invertible_rational(Rng& rng, int n) {
    for (;;) {
        std::vector<std::vector<Rational>> g(n, std::vector<Rational>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                g[i][j] = Rational(rng.range(-2, 2));
        if (rng.chance(1, 3)) {
            static const int nums[] = {1, -1, 2, -2, 1, 1};
            int r = rng.range(0, n - 1);
            Rational scale = rng.chance(1, 2) ? Rational(nums[rng.range(0, 5)], 2)
                                              : Rational(nums[rng.range(0, 5)]);
            if (scale == 0)
                scale = 1;
            for (int j = 0; j < n; ++j)
                g[r][j] *= scale;
        }
        try {
            rational_inverse(g);
            return g;
        } catch (const PreconditionError&) {
            // singular draw; try again
        }
    }
}

inline SuperPolynomial rational_theta_entry(Rng& rng, const GenSetPtr& gens, int theta_budget) {
    if (theta_budget == 0 || rng.chance(1, 2))
        return SuperPolynomial::zero(gens);
    static const int nums[] = {1, -1, 2, -2};
    Rational q(nums[rng.range(0, 3)], rng.chance(1, 3) ? 2 : 1);
    int k = rng.range(1, theta_budget);
    return Coefficient(q) * SuperPolynomial::generator(gens, GenKind::th, k);
}

} // namespace detail

inline SuperMatrix sample_symplectic_factor(Rng& rng, int n, int theta_budget,
                                            const GenSetPtr& gens) {
    int type = theta_budget > 0 ? rng.range(0, 2) : 0;
    SuperMatrix j = SuperMatrix::identity(n, gens);
    if (type == 0) {
        auto g = detail::random_invertible_rational(rng, n);
        auto ginv_t = detail::rational_transpose(detail::rational_inverse(g));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                j.j00[i][k] = SuperPolynomial::constant(gens, Coefficient(g[i][k]));
                j.j11[i][k] = SuperPolynomial::constant(gens, Coefficient(ginv_t[i][k]));
            }
    } else if (type == 1) {
        for (int i = 0; i < n; ++i)
            for (int k = i; k < n; ++k) {
                SuperPolynomial e = detail::rational_theta_entry(rng, gens, theta_budget);
                j.j01[i][k] = e;
                j.j01[k][i] = e;
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int k = i + 1; k < n; ++k) {
                SuperPolynomial e = detail::rational_theta_entry(rng, gens, theta_budget);
                j.j10[i][k] = e;
                j.j10[k][i] = -e;
            }
    }
    return j;
}

// Deterministic per seed; every factor and hence the product is exactly
// symplectic. Factor count is uniform in 3..8.
inline SuperMatrix sample_symplectic(int n, int theta_budget, uint64_t seed,
                                     GenSetPtr gens = nullptr) {
    if (n < 1)
        throw PreconditionError("sample_symplectic: n must be >= 1");
    if (theta_budget < 0)
        throw PreconditionError("sample_symplectic: negative theta budget");
    if (!gens)
        gens = GeneratorSet::make(n, theta_budget);
    if (gens->thetas() < theta_budget)
        throw PreconditionError("sample_symplectic: generator set lacks thetas");
    Rng rng(seed);
    int factors = rng.range(3, 8);
    SuperMatrix j = SuperMatrix::identity(n, gens);
    for (int f = 0; f < factors; ++f)
        j = j * sample_symplectic_factor(rng, n, theta_budget, gens);
    return j;
}

// ---------------------------------------------------------------------------
// Text serialization: header line "n=<k> thetas=<t>", then the 4 n^2-entry
// blocks J00, J01, J10, J11 row-major, one expression per line. '#' starts a
// comment; blank lines are skipped.
// ---------------------------------------------------------------------------

inline std::string to_text(const SuperMatrix& j) {
    std::ostringstream os;
    os << "n=" << j.n << " thetas=" << j.gens->thetas() << "\n";
    const char* names[4] = {"J00", "J01", "J10", "J11"};
    const PolyMatrix* blocks[4] = {&j.j00, &j.j01, &j.j10, &j.j11};
    for (int b = 0; b < 4; ++b) {
        os << "# " << names[b] << "\n";
        for (const auto& row : *blocks[b])
            for (const auto& e : row)
                os << to_string(e) << "\n";
    }
    return os.str();
}

inline SuperMatrix supermatrix_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    auto next_line = [&]() -> std::string {
        while (std::getline(is, line)) {
            std::size_t h = line.find('#');
            if (h != std::string::npos)
                line = line.substr(0, h);
            std::size_t a = line.find_first_not_of(" \t\r");
            if (a == std::string::npos)
                continue;
            std::size_t b = line.find_last_not_of(" \t\r");
            return line.substr(a, b - a + 1);
        }
        throw IoError("matrix text ended early");
    };
    std::string header = next_line();
    int n = 0, thetas = 0;
    if (std::sscanf(header.c_str(), "n=%d thetas=%d", &n, &thetas) != 2)
        throw IoError("matrix header must be 'n=<k> thetas=<t>'");
    GenSetPtr gens = GeneratorSet::make(n, thetas);
    SuperMatrix j = SuperMatrix::identity(n, gens);
    PolyMatrix* blocks[4] = {&j.j00, &j.j01, &j.j10, &j.j11};
    for (auto* block : blocks)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                (*block)[r][c] = parse_polynomial(next_line(), gens);
    j.validate();
    return j;
}

} // namespace oddsym
