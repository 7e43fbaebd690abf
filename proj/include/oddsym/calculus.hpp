#pragma once

#include "oddsym/polynomial.hpp"

namespace oddsym {

// Shared first-order operators on raw polynomials. Everything uses left
// derivatives; differentials multiply from the left.

// Darboux symplectic form: sum_i dx^i dxi_i (odd).
inline SuperPolynomial omega_poly(const GenSetPtr& gens) {
    SuperPolynomial w(gens);
    for (int i = 1; i <= gens->n(); ++i)
        w += SuperPolynomial::generator(gens, GenKind::dx, i) *
             SuperPolynomial::generator(gens, GenKind::dxi, i);
    return w;
}

// Even primitive of omega: Theta = sum_i xi_i dx^i, d Theta = omega.
inline SuperPolynomial theta_one_form(const GenSetPtr& gens) {
    SuperPolynomial t(gens);
    for (int i = 1; i <= gens->n(); ++i)
        t += SuperPolynomial::generator(gens, GenKind::xi, i) *
             SuperPolynomial::generator(gens, GenKind::dx, i);
    return t;
}

// d = sum_i dx^i d/dx^i + sum_i dxi_i d/dxi_i (theta's are constants).
inline SuperPolynomial de_rham_body(const SuperPolynomial& p) {
    const GenSetPtr& gens = p.gens();
    SuperPolynomial r(gens);
    for (int i = 1; i <= gens->n(); ++i) {
        r += SuperPolynomial::generator(gens, GenKind::dx, i) * p.derive(GenKind::x, i);
        r += SuperPolynomial::generator(gens, GenKind::dxi, i) * p.derive(GenKind::xi, i);
    }
    return r;
}

// The odd Laplacian / divergence engine: sum_i d/dx^i d/dxi_i.
inline SuperPolynomial delta_body(const SuperPolynomial& p) {
    const GenSetPtr& gens = p.gens();
    SuperPolynomial r(gens);
    for (int i = 1; i <= gens->n(); ++i)
        r += p.derive(GenKind::xi, i).derive(GenKind::x, i);
    return r;
}

// Canonical odd (Schouten) bracket in Darboux coordinates:
//   {F,G} = -sum_i dF/dx^i dG/dxi_i - (-1)^{|F|} sum_i dF/dxi_i dG/dx^i.
// The sign is frozen by {xi_1, x^1 xi_1} = xi_1 (the Lie bracket on vector
// fields) and makes L_{{H,G}} = [L_H, L_G] hold; see docs/CONVENTIONS.md.
// Only the first argument needs a definite parity.
inline SuperPolynomial bracket_body(const SuperPolynomial& f, const SuperPolynomial& g) {
    Parity pf = f.parity_or_throw("odd bracket");
    const GenSetPtr& gens = f.gens();
    SuperPolynomial r(gens);
    for (int i = 1; i <= gens->n(); ++i) {
        r -= f.derive(GenKind::x, i) * g.derive(GenKind::xi, i);
        SuperPolynomial second = f.derive(GenKind::xi, i) * g.derive(GenKind::x, i);
        if (pf == Parity::even)
            r -= second;
        else
            r += second;
    }
    return r;
}

} // namespace oddsym
