#pragma once

#include <string>

#include "oddsym/calculus.hpp"
#include "oddsym/chart.hpp"
#include "oddsym/transform.hpp"

namespace oddsym {

// Frozen unit constants (see docs/CONVENTIONS.md). All Fourier-side operators
// are coherent conjugates of the density-side ones with these choices:
//   fourier∘delta = unit(n) · d∘fourier
//   i_H symbol map: xi_a -> -unit(n) * d/d(dx^a), theta_K -> (-1)^{n|K|} theta_K
//   L_H on forms  = unit(n) · [d, i_H]
inline Coefficient fourier_unit(int n) {
    return (n % 2) ? Coefficient::i() : -Coefficient::i();
}

// Normalisation of the inverse Fourier transform, fixed by
// inverse_fourier∘fourier = id.
inline Coefficient inverse_fourier_constant(int n) {
    return (n % 2) ? Coefficient(Rational(0), Rational(-1)) : Coefficient(1);
}

struct OperatorReport {
    GeometricObject input;
    GeometricObject output;
    std::string operator_name;
};

inline OperatorReport make_report(std::string name, GeometricObject in, GeometricObject out) {
    if (!(in.chart == out.chart))
        throw PreconditionError("operator report: output chart differs from input chart");
    return {std::move(in), std::move(out), std::move(name)};
}

// -- the canonical odd Laplacian / divergence --------------------------------

// On half-densities sigma = s (D(x,xi))^{1/2}: body -> sum_i d/dx^i d/dxi_i s.
inline GeometricObject odd_laplacian(const GeometricObject& sigma) {
    require_kind(sigma, ObjectKind::multivector_density, "delta");
    return make_density(sigma.chart, delta_body(sigma.body));
}

// The same engine read as the divergence of multivector densities on M.
inline GeometricObject divergence(const GeometricObject& sigma) {
    require_kind(sigma, ObjectKind::multivector_density, "divergence");
    return make_density(sigma.chart, delta_body(sigma.body));
}

// -- odd Poisson / Schouten bracket ------------------------------------------

inline GeometricObject schouten_bracket(const GeometricObject& f, const GeometricObject& g) {
    require_kind(f, ObjectKind::multivector_field, "bracket");
    require_kind(g, ObjectKind::multivector_field, "bracket");
    f.body.parity_or_throw("bracket");
    g.body.parity_or_throw("bracket");
    return make_field(f.chart, bracket_body(f.body, g.body));
}

// Odd Laplacian on functions for the volume form rho = r D(x,xi):
//   Delta_rho f = Delta f + 1/2 r^{-1} {r, f}.
// For the Darboux volume (r = 1) this is exactly the coordinate operator.
inline GeometricObject laplacian_with_volume(const GeometricObject& f,
                                             const GeometricObject& rho) {
    require_kind(f, ObjectKind::multivector_field, "laplacian");
    require_kind(rho, ObjectKind::volume_form, "laplacian");
    SuperPolynomial r = rho.body;
    SuperPolynomial correction = invert_even(r) * bracket_body(r, f.body);
    return make_field(f.chart, delta_body(f.body) + correction * Coefficient(Rational(1, 2)));
}

// Master equation predicate: Delta_rho e^{S/2} = 0 for even S. A constant
// part of S only scales e^{S/2} and is stripped before exponentiating.
inline bool master_equation_holds(const GeometricObject& rho, const GeometricObject& s) {
    require_kind(s, ObjectKind::multivector_field, "master equation");
    if (!s.body.is_even())
        throw PreconditionError("master equation: S must be even");
    SuperPolynomial n = s.body - SuperPolynomial::constant(s.body.gens(), s.body.constant_term());
    if (!n.is_nilpotent())
        throw PreconditionError("master equation: S has a non-nilpotent part, cannot exponentiate");
    SuperPolynomial e = exp_nilpotent(n * Coefficient(Rational(1, 2)));
    return laplacian_with_volume(make_field(s.chart, e), rho).body.is_zero();
}

// -- the double complex D = d + omega ----------------------------------------

inline GeometricObject de_rham(const GeometricObject& w) {
    require_kind(w, ObjectKind::pseudodifferential_form, "d");
    return make_form(w.chart, de_rham_body(w.body));
}

inline GeometricObject omega_multiply(const GeometricObject& w) {
    require_kind(w, ObjectKind::pseudodifferential_form, "omega");
    return make_form(w.chart, omega_poly(w.body.gens()) * w.body);
}

inline GeometricObject total_differential(const GeometricObject& w) {
    require_kind(w, ObjectKind::pseudodifferential_form, "D");
    return make_form(w.chart, de_rham_body(w.body) + omega_poly(w.body.gens()) * w.body);
}

// D = e^{-Theta} d e^{Theta} for Theta = sum xi_i dx^i (d Theta = omega);
// the exponentials are polynomial because Theta is nilpotent.
inline bool theta_conjugation_holds(const GeometricObject& w) {
    require_kind(w, ObjectKind::pseudodifferential_form, "theta conjugation");
    const GenSetPtr& gens = w.body.gens();
    SuperPolynomial theta = theta_one_form(gens);
    SuperPolynomial lhs =
        exp_nilpotent(-theta) * de_rham_body(exp_nilpotent(theta) * w.body);
    SuperPolynomial rhs = de_rham_body(w.body) + omega_poly(gens) * w.body;
    return lhs == rhs;
}

// -- Koszul homotopy ---------------------------------------------------------

// H sigma = int_0^1 dt t^{n-1} (d^2 sigma / d(dx^i) d(dxi_i))(x,xi,t^{-1}dx,t dxi).
// On a monomial of bidegree (p,q) in (dx,dxi) the t-integral evaluates to the
// exact factor 1/(n-p+q); terms with p = n, q = 0 are inadmissible.
inline GeometricObject koszul_homotopy(const GeometricObject& w) {
    require_kind(w, ObjectKind::pseudodifferential_form, "homotopy");
    const GenSetPtr& gens = w.body.gens();
    int n = gens->n();
    SuperPolynomial result(gens);
    for (const auto& [m, c] : w.body.terms()) {
        int p = std::popcount(m.odd & gens->dx_mask());
        int q = 0;
        for (int i = 0; i < n; ++i)
            q += m.even[n + i];
        if (p == n && q == 0) {
            SuperPolynomial offending(gens);
            offending.add_term(m, c);
            throw PreconditionError("homotopy: inadmissible top-degree term " +
                                    std::to_string(p) + "|dxi^0: " + to_string(offending));
        }
        SuperPolynomial term(gens);
        term.add_term(m, c);
        SuperPolynomial second(gens);
        for (int i = 1; i <= n; ++i)
            second += term.derive(GenKind::dxi, i).derive(GenKind::dx, i);
        result += second * Coefficient(Rational(1, n - p + q));
    }
    return make_form(w.chart, result);
}

// -- interior product and Lie derivatives ------------------------------------

// i_H: the differential operator in the dx's with symbol H. Coherent with the
// Fourier transform below: xi_a -> -unit(n) d/d(dx^a) applied in the sorted
// monomial order, and each theta factor contributes a sign (-1)^n.
inline GeometricObject interior_product(const GeometricObject& h, const GeometricObject& w) {
    require_kind(h, ObjectKind::multivector_field, "interior product");
    require_kind(w, ObjectKind::pseudodifferential_form, "interior product");
    const GenSetPtr& gens = w.body.gens();
    int n = gens->n();
    Coefficient deriv_unit = -fourier_unit(n);
    SuperPolynomial result(gens);
    for (const auto& [m, c] : h.body.terms()) {
        // split the monomial into its theta part and its xi part
        uint64_t theta_bits = m.odd & gens->theta_mask();
        uint64_t xi_bits = m.odd & gens->xi_mask();
        SuperPolynomial acted = w.body;
        // apply derivative operators, innermost (largest index) first
        std::vector<int> xis;
        uint64_t rest = xi_bits;
        while (rest) {
            int bit = std::countr_zero(rest);
            rest &= rest - 1;
            xis.push_back(bit - gens->thetas() + 1);
        }
        for (auto it = xis.rbegin(); it != xis.rend(); ++it)
            acted = deriv_unit * acted.derive(GenKind::dx, *it);
        Monomial prefix;
        prefix.even = m.even;
        prefix.odd = theta_bits;
        Coefficient pc = c;
        if ((n * std::popcount(theta_bits)) & 1)
            pc = -pc;
        SuperPolynomial prefix_poly(gens);
        prefix_poly.add_term(prefix, pc);
        result += prefix_poly * acted;
    }
    return make_form(w.chart, result);
}

// L_H on multivector densities: the graded commutator [delta, H].
inline GeometricObject lie_derivative_density(const GeometricObject& h,
                                              const GeometricObject& sigma) {
    require_kind(h, ObjectKind::multivector_field, "Lie derivative");
    require_kind(sigma, ObjectKind::multivector_density, "Lie derivative");
    Parity p = h.body.parity_or_throw("Lie derivative");
    SuperPolynomial first = delta_body(h.body * sigma.body);
    SuperPolynomial second = h.body * delta_body(sigma.body);
    return make_density(sigma.chart, p == Parity::odd ? first + second : first - second);
}

// L_H on forms: unit(n) [d, i_H]; for xi-degree-1 H this is the classical
// Cartan formula L_X = [d, i_X] on the nose.
inline GeometricObject lie_derivative_form(const GeometricObject& h, const GeometricObject& w) {
    require_kind(h, ObjectKind::multivector_field, "Lie derivative");
    require_kind(w, ObjectKind::pseudodifferential_form, "Lie derivative");
    Parity p = h.body.parity_or_throw("Lie derivative");
    const GenSetPtr& gens = w.body.gens();
    SuperPolynomial first = de_rham_body(interior_product(h, w).body);
    SuperPolynomial second = interior_product(h, make_form(w.chart, de_rham_body(w.body))).body;
    SuperPolynomial commutator = p == Parity::odd ? first + second : first - second;
    return make_form(w.chart, fourier_unit(gens->n()) * commutator);
}

// -- fiberwise Fourier transform ---------------------------------------------

namespace detail {
inline SuperPolynomial fourier_kernel(const GenSetPtr& gens, bool inverse) {
    SuperPolynomial k = SuperPolynomial::constant(gens, 1);
    Coefficient unit = inverse ? -Coefficient::i() : Coefficient::i();
    for (int a = 1; a <= gens->n(); ++a) {
        SuperPolynomial pair = SuperPolynomial::generator(gens, GenKind::xi, a) *
                               SuperPolynomial::generator(gens, GenKind::dx, a);
        k *= SuperPolynomial::constant(gens, 1) + unit * pair;
    }
    return k;
}
} // namespace detail

// Multivector densities to pseudodifferential forms: Berezin integration of
// e^{i xi_a dx^a} s(x, xi) over the fiber.
inline GeometricObject fourier_transform(const GeometricObject& sigma) {
    require_kind(sigma, ObjectKind::multivector_density, "fourier");
    const GenSetPtr& gens = sigma.body.gens();
    std::vector<Generator> xis;
    for (int a = 1; a <= gens->n(); ++a)
        xis.push_back({GenKind::xi, a});
    SuperPolynomial integrand = detail::fourier_kernel(gens, false) * sigma.body;
    return make_form(sigma.chart, integrand.berezin_integral(xis));
}

// Base-manifold forms back to multivector densities; the constant is frozen
// by inverse_fourier∘fourier = id.
inline GeometricObject inverse_fourier(const GeometricObject& w) {
    require_kind(w, ObjectKind::pseudodifferential_form, "inverse fourier");
    if (w.body.depends_on(GenKind::xi) || w.body.depends_on(GenKind::dxi))
        throw PreconditionError("inverse fourier: input must be a base-manifold form (x, dx only)");
    const GenSetPtr& gens = w.body.gens();
    std::vector<Generator> dxs;
    for (int a = 1; a <= gens->n(); ++a)
        dxs.push_back({GenKind::dx, a});
    SuperPolynomial integrand = detail::fourier_kernel(gens, true) * w.body;
    SuperPolynomial body = integrand.berezin_integral(dxs) * inverse_fourier_constant(gens->n());
    return make_density(w.chart, body);
}

// The non-local action of canonical transformations on base forms, computed
// by conjugating the density pullback with the Fourier transform.
inline GeometricObject pullback_form_via_fourier(const CanonicalTransformation& f,
                                                 const GeometricObject& w) {
    require_kind(w, ObjectKind::pseudodifferential_form, "pullback via fourier");
    GeometricObject density = inverse_fourier(w);
    GeometricObject pulled = f.pullback(density);
    return fourier_transform(pulled);
}

} // namespace oddsym
