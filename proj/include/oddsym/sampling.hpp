#pragma once

#include <random>
#include <vector>

#include "oddsym/polynomial.hpp"

namespace oddsym {

// Deterministic seeded randomness. The generator is std::mt19937_64 (a fully
// specified algorithm, so seeds are portable); values are reduced by plain
// modulo, never through library distributions.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t u64() { return eng_(); }

    int range(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(u64() % static_cast<uint64_t>(hi - lo + 1));
    }

    bool chance(int num, int den) { return range(1, den) <= num; }

    Rational rational(int max_abs_num = 3, int max_den = 2) {
        Rational num(range(-max_abs_num, max_abs_num));
        Rational den(range(1, max_den));
        return num / den;
    }

    Rational nonzero_rational(int max_abs_num = 3, int max_den = 2) {
        for (;;) {
            Rational r = rational(max_abs_num, max_den);
            if (r != 0)
                return r;
        }
    }

    Coefficient coefficient(bool allow_imaginary = true) {
        if (allow_imaginary && chance(1, 4))
            return Coefficient(rational(), nonzero_rational());
        return Coefficient(nonzero_rational());
    }

    template <typename T> const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(u64() % v.size())];
    }

  private:
    std::mt19937_64 eng_;
};

// Degree bounds for sampled monomials; odd generators are drawn freely from
// the kinds switched on.
struct SampleBounds {
    int x_degree = 2;       // total degree in the x's
    int dxi_degree = 0;     // total degree in the dxi's
    bool use_xi = true;
    bool use_dx = false;
    bool use_theta = false;
};

inline Monomial random_monomial(Rng& rng, const GeneratorSet& gens, const SampleBounds& b) {
    Monomial m;
    m.even.assign(gens.num_even(), 0);
    int xd = rng.range(0, b.x_degree);
    for (int j = 0; j < xd; ++j)
        m.even[rng.range(0, gens.n() - 1)] += 1;
    int qd = b.dxi_degree ? rng.range(0, b.dxi_degree) : 0;
    for (int j = 0; j < qd; ++j)
        m.even[gens.n() + rng.range(0, gens.n() - 1)] += 1;
    if (b.use_xi)
        m.odd |= rng.u64() & gens.xi_mask();
    if (b.use_dx)
        m.odd |= rng.u64() & gens.dx_mask();
    if (b.use_theta)
        m.odd |= rng.u64() & gens.theta_mask();
    return m;
}

inline SuperPolynomial random_polynomial(Rng& rng, const GenSetPtr& gens, const SampleBounds& b,
                                         int max_terms = 4) {
    SuperPolynomial p(gens);
    int k = rng.range(1, max_terms);
    for (int j = 0; j < k; ++j)
        p.add_term(random_monomial(rng, *gens, b), rng.coefficient());
    return p;
}

// Form sample with the homotopy-inadmissible combination (top dx-degree with
// no dxi factor) dropped from every monomial.
inline SuperPolynomial random_admissible_form(Rng& rng, const GenSetPtr& gens,
                                              const SampleBounds& b, int max_terms = 4) {
    SampleBounds fb = b;
    fb.use_dx = true;
    SuperPolynomial p(gens);
    int k = rng.range(1, max_terms);
    for (int j = 0; j < k; ++j) {
        Monomial m = random_monomial(rng, *gens, fb);
        bool top_dx = (m.odd & gens->dx_mask()) == gens->dx_mask();
        bool no_dxi = true;
        for (int i = 0; i < gens->n(); ++i)
            if (m.even[gens->n() + i])
                no_dxi = false;
        if (top_dx && no_dxi)
            m.odd &= ~(uint64_t(1) << gens->odd_bit({GenKind::dx, 1}));
        p.add_term(m, rng.coefficient());
    }
    return p;
}

// Parity-homogeneous sample (zero is avoided by retrying a few times).
inline SuperPolynomial random_homogeneous(Rng& rng, const GenSetPtr& gens, const SampleBounds& b,
                                          Parity parity, int max_terms = 3) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        SuperPolynomial p(gens);
        int k = rng.range(1, max_terms);
        for (int j = 0; j < k; ++j) {
            Monomial m = random_monomial(rng, *gens, b);
            if (m.parity() != parity)
                continue;
            p.add_term(m, rng.coefficient());
        }
        if (!p.is_zero())
            return p;
    }
    // Fall back to a bare generator / pair of generators of the right parity.
    if (parity == Parity::odd)
        return SuperPolynomial::generator(gens, GenKind::xi, 1);
    return SuperPolynomial::constant(gens, 1);
}

} // namespace oddsym
