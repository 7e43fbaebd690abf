#include <catch2/catch_amalgamated.hpp>

#include "oddsym/bv.hpp"
#include "oddsym/sampling.hpp"

using namespace oddsym;

namespace {
SuperPolynomial P(const Chart& c, const std::string& s) { return parse_polynomial(s, c.gens); }

SuperPolynomial random_field_body(Rng& rng, const Chart& c, int x_degree = 2) {
    return random_polynomial(rng, c.gens,
                             {.x_degree = x_degree, .use_xi = true, .use_theta = c.thetas() > 0});
}

SuperPolynomial random_form_body(Rng& rng, const Chart& c, int x_degree = 2, int dxi_degree = 2) {
    return random_polynomial(rng, c.gens,
                             {.x_degree = x_degree,
                              .dxi_degree = dxi_degree,
                              .use_xi = true,
                              .use_dx = true,
                              .use_theta = c.thetas() > 0});
}

SuperPolynomial random_admissible_form_body(Rng& rng, const Chart& c, int x_degree = 2,
                                            int dxi_degree = 2) {
    const GenSetPtr& gens = c.gens;
    SuperPolynomial p(gens);
    int terms = rng.range(1, 4);
    for (int t = 0; t < terms; ++t) {
        Monomial m = random_monomial(rng, *gens,
                                     {.x_degree = x_degree,
                                      .dxi_degree = dxi_degree,
                                      .use_xi = true,
                                      .use_dx = true,
                                      .use_theta = c.thetas() > 0});
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

SuperPolynomial random_homog_field(Rng& rng, const Chart& c, Parity parity) {
    return random_homogeneous(
        rng, c.gens, {.x_degree = 2, .use_xi = true, .use_theta = c.thetas() > 0}, parity);
}
} // namespace

TEST_CASE("odd Laplacian on half-densities") {
    Chart c = make_chart("c", 1, 0);
    CHECK(odd_laplacian(make_density(c, P(c, "5"))).body.is_zero());
    CHECK(odd_laplacian(make_density(c, P(c, "x1*xi1"))).body == P(c, "1"));
    CHECK(odd_laplacian(make_density(c, P(c, "x1^2*xi1 + x1"))).body == P(c, "2*x1"));
    CHECK_THROWS_AS(odd_laplacian(make_form(c, P(c, "dx1"))), PreconditionError);

    // divergence is the same engine on multivector densities
    CHECK(divergence(make_density(c, P(c, "x1^2*xi1 + x1"))).body == P(c, "2*x1"));
}

TEST_CASE("nilpotency of the four differentials") {
    Chart c = make_chart("c", 3, 2);
    for (uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed * 3 + 1);
        auto s = random_field_body(rng, c, 4);
        CHECK(delta_body(delta_body(s)).is_zero());

        auto w = make_form(c, random_form_body(rng, c, 4, 2));
        CHECK(de_rham(de_rham(w)).body.is_zero());
        CHECK(omega_multiply(omega_multiply(w)).body.is_zero());
        CHECK(total_differential(total_differential(w)).body.is_zero());
        // d omega + omega d = 0
        CHECK((de_rham(omega_multiply(w)).body + omega_multiply(de_rham(w)).body).is_zero());
    }
}

TEST_CASE("odd bracket anchors") {
    Chart c = make_chart("c", 2, 0);
    auto F = [&](const std::string& s) { return make_field(c, P(c, s)); };
    CHECK(schouten_bracket(F("x1"), F("xi1")).body == P(c, "-1")); // frozen sign
    CHECK(schouten_bracket(F("xi1"), F("x1")).body == P(c, "1"));
    CHECK(schouten_bracket(F("x1"), F("x2")).body.is_zero());
    // restriction to vector fields is the Lie bracket: [d/dx1, x1 d/dx1] = d/dx1
    CHECK(schouten_bracket(F("xi1"), F("x1*xi1")).body == P(c, "xi1"));
    CHECK_THROWS_AS(schouten_bracket(F("x1 + xi1"), F("x1")), PreconditionError);
}

TEST_CASE("odd bracket: parity, shifted antisymmetry, Leibniz, Jacobi") {
    Chart c = make_chart("c", 2, 2);
    for (uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed * 7 + 5);
        Parity pf = seed % 2 ? Parity::odd : Parity::even;
        Parity pg = (seed / 2) % 2 ? Parity::odd : Parity::even;
        Parity ph = (seed / 4) % 2 ? Parity::odd : Parity::even;
        auto f = random_homog_field(rng, c, pf);
        auto g = random_homog_field(rng, c, pg);
        auto h = random_homog_field(rng, c, ph);

        auto fg = bracket_body(f, g);
        // parity |{f,g}| = |f| + |g| + 1
        if (!fg.is_zero()) {
            auto want = static_cast<Parity>((static_cast<int>(pf) + static_cast<int>(pg) + 1) & 1);
            CHECK(fg.parity() == want);
        }
        // shifted antisymmetry
        int sign = ((static_cast<int>(pf) + 1) * (static_cast<int>(pg) + 1)) & 1 ? 1 : -1;
        auto gf = bracket_body(g, f);
        CHECK(fg == (sign > 0 ? gf : -gf));
        // Leibniz in the second slot: {f, gh} = {f,g}h +- g{f,h}
        auto lhs = bracket_body(f, g * h);
        auto rhs = bracket_body(f, g) * h;
        if (((static_cast<int>(pf) + 1) * static_cast<int>(pg)) & 1)
            rhs -= g * bracket_body(f, h);
        else
            rhs += g * bracket_body(f, h);
        CHECK(lhs == rhs);
        // shifted Jacobi: {f,{g,h}} = {{f,g},h} + (-1)^{(f+1)(g+1)} {g,{f,h}}
        auto jac = bracket_body(f, bracket_body(g, h)) - bracket_body(bracket_body(f, g), h);
        if (((static_cast<int>(pf) + 1) * (static_cast<int>(pg) + 1)) & 1)
            jac += bracket_body(g, bracket_body(f, h));
        else
            jac -= bracket_body(g, bracket_body(f, h));
        CHECK(jac.is_zero());
    }
}

TEST_CASE("BV relation: the Leibniz defect of Delta is the bracket") {
    Chart c = make_chart("c", 2, 2);
    for (uint64_t seed = 0; seed < 25; ++seed) {
        Rng rng(seed + 41);
        Parity pf = seed % 2 ? Parity::odd : Parity::even;
        auto f = random_homog_field(rng, c, pf);
        auto g = random_field_body(rng, c);
        auto defect = delta_body(f * g) - delta_body(f) * g;
        if (pf == Parity::odd)
            defect += f * delta_body(g);
        else
            defect -= f * delta_body(g);
        // defect = -(-1)^{|f|} {f, g}
        auto expected = bracket_body(f, g);
        if (pf == Parity::even)
            expected = -expected;
        CHECK(defect == expected);
    }
}

TEST_CASE("odd Laplacian with a volume form") {
    Chart c = make_chart("c", 2, 2);
    auto darboux = make_volume(c, P(c, "1"));
    // Darboux volume: Delta_rho = Delta exactly (frozen global factor 1)
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed + 7);
        auto f = random_field_body(rng, c);
        CHECK(laplacian_with_volume(make_field(c, f), darboux).body == delta_body(f));
    }
    CHECK(laplacian_with_volume(make_field(c, P(c, "7")), darboux).body.is_zero());

    // Leibniz defect with a nontrivial volume equals the bracket as well
    auto rho = make_volume(c, P(c, "2 + th1*th2*x1"));
    for (uint64_t seed = 0; seed < 15; ++seed) {
        Rng rng(seed + 77);
        Parity pf = seed % 2 ? Parity::odd : Parity::even;
        auto f = random_homog_field(rng, c, pf);
        auto g = random_field_body(rng, c);
        auto dr = [&](const SuperPolynomial& p) {
            return laplacian_with_volume(make_field(c, p), rho).body;
        };
        auto defect = dr(f * g) - dr(f) * g;
        if (pf == Parity::odd)
            defect += f * dr(g);
        else
            defect -= f * dr(g);
        auto expected = bracket_body(f, g);
        if (pf == Parity::even)
            expected = -expected;
        CHECK(defect == expected);
    }
}

TEST_CASE("master equation predicate") {
    Chart c = make_chart("c", 1, 2);
    auto darboux = make_volume(c, P(c, "1"));
    CHECK(master_equation_holds(darboux, make_field(c, P(c, "0"))));
    // S = 2 c th1 th2: e^{S/2} = 1 + c th1 th2, Delta kills x-free terms
    CHECK(master_equation_holds(darboux, make_field(c, P(c, "2/3*th1*th2"))));
    // S = 2 x1 xi1 th1 (even): Delta e^{S/2} = -th1 != 0
    CHECK_FALSE(master_equation_holds(darboux, make_field(c, P(c, "2*x1*xi1*th1"))));
    // odd S is rejected outright
    CHECK_THROWS_AS(master_equation_holds(darboux, make_field(c, P(c, "2*x1*xi1*th1*th2"))),
                    PreconditionError);
    // non-nilpotent part cannot be exponentiated
    CHECK_THROWS_AS(master_equation_holds(darboux, make_field(c, P(c, "x1^2"))),
                    PreconditionError);
    CHECK_THROWS_AS(master_equation_holds(darboux, make_field(c, P(c, "xi1"))),
                    PreconditionError);
}

TEST_CASE("de Rham differential and the double complex") {
    Chart c = make_chart("c", 1, 0);
    CHECK(de_rham(make_form(c, P(c, "x1"))).body == P(c, "dx1"));
    // left convention: d(x1 xi1) = dx1*xi1 + x1*dxi1 = -xi1*dx1 + x1*dxi1
    CHECK(de_rham(make_form(c, P(c, "x1*xi1"))).body == P(c, "dx1*xi1 + x1*dxi1"));
    CHECK(de_rham(make_form(c, P(c, "x1*xi1"))).body == P(c, "x1*dxi1 - xi1*dx1"));

    // d Theta = omega
    Chart c2 = make_chart("c", 2, 0);
    CHECK(de_rham_body(theta_one_form(c2.gens)) == omega_poly(c2.gens));
}

TEST_CASE("theta conjugation: D = e^{-Theta} d e^{Theta}") {
    Chart c = make_chart("c", 2, 1);
    CHECK(theta_conjugation_holds(make_form(c, P(c, "1"))));
    CHECK(theta_conjugation_holds(make_form(c, omega_poly(c.gens))));
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed * 9 + 2);
        CHECK(theta_conjugation_holds(make_form(c, random_form_body(rng, c))));
    }
}

TEST_CASE("Koszul homotopy basics") {
    Chart c = make_chart("c", 1, 0);
    CHECK(koszul_homotopy(make_form(c, P(c, "1"))).body.is_zero());
    CHECK(koszul_homotopy(make_form(c, P(c, "dx1*dxi1"))).body == P(c, "1"));
    CHECK_THROWS_AS(koszul_homotopy(make_form(c, P(c, "x1*dx1"))), PreconditionError);

    Chart c2 = make_chart("c", 2, 0);
    CHECK_THROWS_AS(koszul_homotopy(make_form(c2, P(c2, "dx1*dx2"))), PreconditionError);
    CHECK_NOTHROW(koszul_homotopy(make_form(c2, P(c2, "dx1*dx2*dxi1"))));
}

TEST_CASE("homotopy identity (H d0 + d0 H) sigma = sigma") {
    for (int n = 1; n <= 3; ++n) {
        Chart c = make_chart("c", n, 1);
        for (uint64_t seed = 0; seed < 25; ++seed) {
            Rng rng(seed * 13 + n);
            auto sigma = make_form(c, random_admissible_form_body(rng, c));
            auto lhs = koszul_homotopy(omega_multiply(sigma)).body +
                       omega_multiply(koszul_homotopy(sigma)).body;
            CAPTURE(n, seed, to_string(sigma.body));
            CHECK(lhs == sigma.body);
        }
    }
}

TEST_CASE("interior product") {
    Chart c = make_chart("c", 1, 1);
    auto w = make_form(c, P(c, "dx1"));
    CHECK(interior_product(make_field(c, P(c, "1")), w).body == w.body);
    CHECK(interior_product(make_field(c, P(c, "xi1")), w).body == P(c, "-i"));

    // symbol calculus: i_H i_G = i_{HG}
    Chart c2 = make_chart("c", 2, 2);
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed + 3);
        auto h = make_field(c2, random_field_body(rng, c2));
        auto g = make_field(c2, random_field_body(rng, c2));
        auto w2 = make_form(c2, random_form_body(rng, c2));
        auto lhs = interior_product(h, interior_product(g, w2));
        auto rhs = interior_product(make_field(c2, h.body * g.body), w2);
        CHECK(lhs.body == rhs.body);
    }
}

TEST_CASE("Lie derivative on densities") {
    Chart c = make_chart("c", 1, 0);
    // constants act trivially
    auto sigma = make_density(c, P(c, "x1^3 + x1*xi1"));
    CHECK(lie_derivative_density(make_field(c, P(c, "4")), sigma).body.is_zero());
    // H = xi1 is d/dx; on s(x) dx the classical answer is s'(x) dx
    auto s = make_density(c, P(c, "x1^3"));
    CHECK(lie_derivative_density(make_field(c, P(c, "xi1")), s).body == P(c, "3*x1^2"));

    // graded commutator [delta, L_H] = 0: L_H has parity |H|+1
    Chart c2 = make_chart("c", 2, 2);
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed * 5 + 21);
        Parity ph = seed % 2 ? Parity::odd : Parity::even;
        auto h = make_field(c2, random_homog_field(rng, c2, ph));
        auto sig = make_density(c2, random_field_body(rng, c2));
        auto ld = lie_derivative_density(h, divergence(sig)).body;
        auto dl = delta_body(lie_derivative_density(h, sig).body);
        CHECK(dl == (ph == Parity::odd ? ld : -ld));
    }
}

TEST_CASE("classical agreement for xi-degree-1 multivector fields") {
    for (int n = 1; n <= 2; ++n) {
        Chart c = make_chart("c", n, 0);
        const GenSetPtr& gens = c.gens;
        for (uint64_t seed = 0; seed < 10; ++seed) {
            Rng rng(seed * 3 + n * 100);
            // X = sum_a X^a(x) d/dx^a as the odd function sum_a X^a xi_a
            std::vector<SuperPolynomial> comps;
            SuperPolynomial h(gens);
            for (int a = 1; a <= n; ++a) {
                auto xa = random_polynomial(rng, gens, {.x_degree = 2, .use_xi = false}, 2);
                comps.push_back(xa);
                h += xa * SuperPolynomial::generator(gens, GenKind::xi, a);
            }
            if (h.is_zero())
                continue;
            auto field = make_field(c, h);

            // densities: L_H (s Dx) = sum_a d(X^a s)/dx^a Dx
            auto s = random_polynomial(rng, gens, {.x_degree = 3, .use_xi = false}, 3);
            auto classical_dens = SuperPolynomial::zero(gens);
            for (int a = 1; a <= n; ++a)
                classical_dens += (comps[a - 1] * s).derive(GenKind::x, a);
            CHECK(lie_derivative_density(field, make_density(c, s)).body == classical_dens);

            // forms: i_H = (-unit) i_X and L_H = [d, i_X] exactly
            auto w = random_polynomial(rng, gens,
                                       {.x_degree = 2, .use_xi = false, .use_dx = true}, 3);
            auto classical_ix = SuperPolynomial::zero(gens);
            for (int a = 1; a <= n; ++a)
                classical_ix += comps[a - 1] * w.derive(GenKind::dx, a);
            CHECK(interior_product(field, make_form(c, w)).body ==
                  -fourier_unit(n) * classical_ix);

            auto classical_cartan = SuperPolynomial::zero(gens);
            for (int a = 1; a <= n; ++a) {
                classical_cartan += de_rham_body(comps[a - 1] * w.derive(GenKind::dx, a));
                classical_cartan += comps[a - 1] * de_rham_body(w).derive(GenKind::dx, a);
            }
            CHECK(lie_derivative_form(field, make_form(c, w)).body == classical_cartan);
        }
    }
}

TEST_CASE("L is a bracket morphism on densities and forms") {
    Chart c = make_chart("c", 2, 2);
    for (uint64_t seed = 0; seed < 15; ++seed) {
        Rng rng(seed * 11 + 6);
        Parity ph = seed % 2 ? Parity::odd : Parity::even;
        Parity pg = (seed / 2) % 2 ? Parity::odd : Parity::even;
        auto h = make_field(c, random_homog_field(rng, c, ph));
        auto g = make_field(c, random_homog_field(rng, c, pg));
        auto hg = schouten_bracket(h, g);
        int commutator_sign =
            ((static_cast<int>(ph) + 1) * (static_cast<int>(pg) + 1)) & 1 ? -1 : 1;

        auto sigma = make_density(c, random_field_body(rng, c));
        auto lhs_d = lie_derivative_density(hg, sigma).body;
        auto rhs_d = lie_derivative_density(h, lie_derivative_density(g, sigma)).body;
        auto swap_d = lie_derivative_density(g, lie_derivative_density(h, sigma)).body;
        rhs_d = commutator_sign > 0 ? rhs_d - swap_d : rhs_d + swap_d;
        CHECK(lhs_d == rhs_d);

        auto w = make_form(c, random_form_body(rng, c));
        auto lhs_f = lie_derivative_form(hg, w).body;
        auto rhs_f = lie_derivative_form(h, lie_derivative_form(g, w)).body;
        auto swap_f = lie_derivative_form(g, lie_derivative_form(h, w)).body;
        rhs_f = commutator_sign > 0 ? rhs_f - swap_f : rhs_f + swap_f;
        CHECK(lhs_f == rhs_f);

        // d-invariance: the graded commutator [d, L_H] vanishes on forms
        auto dl = de_rham(lie_derivative_form(h, w)).body;
        auto ld = lie_derivative_form(h, de_rham(w)).body;
        CHECK(dl == (ph == Parity::odd ? ld : -ld));
    }
}

TEST_CASE("fourier transform anchors") {
    Chart c = make_chart("c", 1, 0);
    CHECK(fourier_transform(make_density(c, P(c, "1"))).body == P(c, "i*dx1"));
    CHECK(fourier_transform(make_density(c, P(c, "xi1"))).body == P(c, "1"));
    CHECK(inverse_fourier(make_form(c, P(c, "i*dx1"))).body == P(c, "1"));
    CHECK_THROWS_AS(inverse_fourier(make_form(c, P(c, "xi1"))), PreconditionError);
}

TEST_CASE("inverse_fourier . fourier = id") {
    for (int n = 1; n <= 3; ++n) {
        Chart c = make_chart("c", n, 2);
        for (uint64_t seed = 0; seed < 20; ++seed) {
            Rng rng(seed * 17 + n);
            auto sigma = make_density(c, random_field_body(rng, c));
            auto back = inverse_fourier(fourier_transform(sigma));
            CAPTURE(n, seed);
            CHECK(back.body == sigma.body);
        }
    }
}

TEST_CASE("fourier intertwines delta with d and H with i_H") {
    for (int n = 1; n <= 3; ++n) {
        Chart c = make_chart("c", n, 2);
        Coefficient u = fourier_unit(n);
        for (uint64_t seed = 0; seed < 15; ++seed) {
            Rng rng(seed * 23 + n * 7);
            auto sigma = make_density(c, random_field_body(rng, c));
            auto lhs = fourier_transform(divergence(sigma)).body;
            auto rhs = u * de_rham(fourier_transform(sigma)).body;
            CAPTURE(n, seed);
            CHECK(lhs == rhs);

            auto h = make_field(c, random_field_body(rng, c));
            auto lhs2 = fourier_transform(make_density(c, h.body * sigma.body)).body;
            auto rhs2 = interior_product(h, fourier_transform(sigma)).body;
            CHECK(lhs2 == rhs2);
        }
    }
}

TEST_CASE("pullback of forms through the fourier transform") {
    Chart c = make_chart("c", 1, 1);
    auto id = CanonicalTransformation::identity(c);
    auto w = make_form(c, P(c, "1 + 2*dx1"));
    CHECK(pullback_form_via_fourier(id, w).body == w.body);

    // diffeo-induced action agrees with plain substitution on base forms
    auto d = CanonicalTransformation::make_diffeo(c, {P(c, "2*x1")}, {P(c, "1/2*x1")});
    CHECK(pullback_form_via_fourier(d, make_form(c, P(c, "dx1"))).body == P(c, "2*dx1"));

    Chart c2 = make_chart("c", 2, 0);
    for (uint64_t seed = 0; seed < 12; ++seed) {
        Rng rng(seed + 29);
        auto f = random_diffeo(rng, c2);
        auto base = make_form(
            c2, random_polynomial(rng, c2.gens, {.x_degree = 2, .use_xi = false, .use_dx = true}, 4));
        auto via_fourier = pullback_form_via_fourier(f, base).body;
        auto direct = f.pullback(base).body;
        CAPTURE(seed);
        CHECK(via_fourier == direct);
    }

    // fiber shifts act non-classically on forms
    auto shift = CanonicalTransformation::make_fiber_shift(c, P(c, "th1*x1"));
    auto acted = pullback_form_via_fourier(shift, make_form(c, P(c, "1")));
    CHECK(acted.body == P(c, "1 - i*th1*dx1"));
}

TEST_CASE("d equivariance under canonical transformations of forms") {
    Chart c = make_chart("c", 2, 2);
    for (uint64_t seed = 0; seed < 12; ++seed) {
        Rng rng(seed * 19 + 11);
        auto f = random_transformation(rng, c, 3);
        auto base = make_form(
            c, random_polynomial(rng, c.gens, {.x_degree = 2, .use_xi = false, .use_dx = true}, 4));
        auto lhs = pullback_form_via_fourier(f, de_rham(base)).body;
        auto rhs = de_rham(pullback_form_via_fourier(f, base)).body;
        CAPTURE(seed);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("operator reports keep input and output in one chart") {
    Chart c = make_chart("c", 1, 0);
    auto in = make_density(c, P(c, "x1*xi1"));
    auto rep = make_report("delta", in, odd_laplacian(in));
    CHECK(rep.operator_name == "delta");
    CHECK(rep.output.body == P(c, "1"));

    Chart other = make_chart("other", 1, 0);
    auto elsewhere = make_density(other, parse_polynomial("1", other.gens));
    CHECK_THROWS_AS(make_report("delta", in, elsewhere), PreconditionError);
}

TEST_CASE("Delta intertwines with the half-density pullback") {
    Chart c = make_chart("c", 2, 3);
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed * 29 + 13);
        auto f = random_transformation(rng, c, 3);
        auto sigma = make_density(c, random_field_body(rng, c, 3));
        auto lhs = odd_laplacian(f.pullback(sigma)).body;
        auto rhs = f.pullback(odd_laplacian(sigma)).body;
        CAPTURE(seed);
        CHECK(lhs == rhs);
    }
}
