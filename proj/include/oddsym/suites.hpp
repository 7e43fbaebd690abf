#pragma once

#include <chrono>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oddsym/bv.hpp"
#include "oddsym/spectral.hpp"
#include "oddsym/supermatrix.hpp"

namespace oddsym {

enum class Suite {
    berezinian,
    delta_invariance,
    homotopy,
    spectral,
    lie_algebra,
    fourier,
    conventions,
};

inline const char* suite_name(Suite s) {
    switch (s) {
    case Suite::berezinian: return "berezinian";
    case Suite::delta_invariance: return "delta-invariance";
    case Suite::homotopy: return "homotopy";
    case Suite::spectral: return "spectral";
    case Suite::lie_algebra: return "lie-algebra";
    case Suite::fourier: return "fourier";
    default: return "conventions";
    }
}

inline Suite suite_from_name(const std::string& name) {
    for (Suite s : {Suite::berezinian, Suite::delta_invariance, Suite::homotopy, Suite::spectral,
                    Suite::lie_algebra, Suite::fourier, Suite::conventions})
        if (name == suite_name(s))
            return s;
    throw Error(errc::usage, "unknown suite '" + name + "'");
}

struct CheckSuiteConfig {
    Suite suite = Suite::conventions;
    int trials = 100;
    uint64_t seed = 1;
    int n_max = 2;
    int degree_max = 3;
    int theta_budget = 4;

    void validate() const {
        if (trials < 1)
            throw Error(errc::usage, "trials must be >= 1");
        if (n_max < 1 || degree_max < 0 || theta_budget < 0)
            throw Error(errc::usage, "invalid bounds");
    }
};

struct TrialFailure {
    int offset = 0;
    std::string counterexample;
};

struct CheckReport {
    std::string suite;
    CheckSuiteConfig config;
    int trials_run = 0;
    std::vector<TrialFailure> failures;
    long elapsed_ms = 0;

    bool pass() const { return failures.empty(); }
};

namespace suites_detail {

// Each trial draws from a fresh generator seeded with seed + offset, so a
// failing offset replays standalone with --trials 1 --seed <seed+offset>.
using TrialFn = std::function<std::optional<std::string>(int offset, Rng& rng)>;

inline CheckReport run_trials(const CheckSuiteConfig& cfg, const TrialFn& trial) {
    CheckReport report;
    report.suite = suite_name(cfg.suite);
    report.config = cfg;
    auto start = std::chrono::steady_clock::now();
    for (int offset = 0; offset < cfg.trials; ++offset) {
        Rng rng(cfg.seed + static_cast<uint64_t>(offset));
        std::optional<std::string> failure;
        try {
            failure = trial(offset, rng);
        } catch (const std::exception& e) {
            failure = std::string("exception: ") + e.what();
        }
        ++report.trials_run;
        if (failure)
            report.failures.push_back({offset, *failure});
    }
    report.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return report;
}

inline Chart suite_chart(int n, int thetas) { return make_chart("c", n, thetas); }

inline SuperPolynomial random_density_body(Rng& rng, const Chart& c, int degree) {
    return random_polynomial(rng, c.gens,
                             {.x_degree = degree, .use_xi = true, .use_theta = c.thetas() > 0});
}

// -- individual suites -------------------------------------------------------

inline CheckReport run_berezinian(const CheckSuiteConfig& cfg) {
    return run_trials(cfg, [&](int offset, Rng& rng) -> std::optional<std::string> {
        int n = rng.range(1, std::min(cfg.n_max, 4));
        int tb = rng.range(0, cfg.theta_budget);
        GenSetPtr gens = GeneratorSet::make(n, std::max(tb, 1));
        SuperMatrix j = sample_symplectic(n, tb, rng.u64(), gens);
        auto rep = is_symplectic(j);
        if (!rep.all_hold()) {
            std::string what;
            for (const auto& f : rep.failed())
                what += f + " ";
            return "constraint failure [" + what + "] for\n" + to_text(j);
        }
        if (!check_berezinian_identity(j))
            return "Ber J != (det J00)^2 for\n" + to_text(j);
        if (offset % 4 == 0) {
            SuperMatrix k = sample_symplectic(n, tb, rng.u64(), gens);
            if (berezinian(j * k) != berezinian(j) * berezinian(k))
                return "Ber not multiplicative for\n" + to_text(j) + "and\n" + to_text(k);
        }
        return std::nullopt;
    });
}

inline CheckReport run_delta_invariance(const CheckSuiteConfig& cfg) {
    return run_trials(cfg, [&](int offset, Rng& rng) -> std::optional<std::string> {
        Chart c = suite_chart(rng.range(1, cfg.n_max), std::max(cfg.theta_budget, 2));
        if (offset == 0) {
            // the non-invariance witness: a shift-with-diffeo composite moves
            // the Darboux volume form while Delta still intertwines
            Chart c1 = suite_chart(1, 2);
            auto two_x = CanonicalTransformation::make_diffeo(
                c1, {parse_polynomial("2*x1", c1.gens)}, {parse_polynomial("1/2*x1", c1.gens)});
            auto witness = compose(
                CanonicalTransformation::make_fiber_shift(c1, parse_polynomial("th1*x1", c1.gens)),
                two_x);
            auto vol = witness.pullback(make_volume(c1, SuperPolynomial::constant(c1.gens, 1)));
            if (vol.body == SuperPolynomial::constant(c1.gens, 1))
                return std::string("volume form unexpectedly invariant under the witness");
            auto sig = make_density(c1, parse_polynomial("x1^2*xi1 + th1*x1", c1.gens));
            if (odd_laplacian(witness.pullback(sig)).body !=
                witness.pullback(odd_laplacian(sig)).body)
                return std::string("witness composite fails Delta-intertwining");
        }
        auto f = random_transformation(rng, c, 4);
        auto sigma = make_density(c, random_density_body(rng, c, cfg.degree_max));
        auto lhs = odd_laplacian(f.pullback(sigma)).body;
        auto rhs = f.pullback(odd_laplacian(sigma)).body;
        if (lhs != rhs)
            return "Delta(F* sigma) != F*(Delta sigma) for sigma = " + to_string(sigma.body) +
                   "\n" + to_text(f);
        return std::nullopt;
    });
}

inline CheckReport run_homotopy(const CheckSuiteConfig& cfg) {
    return run_trials(cfg, [&](int offset, Rng& rng) -> std::optional<std::string> {
        int n = rng.range(1, std::min(cfg.n_max, 3));
        Chart c = suite_chart(n, 1);
        if (offset == 0) {
            // exact rejection of the p = n, q = 0 case
            auto bad = make_form(c, top_dx_poly(c.gens));
            try {
                koszul_homotopy(bad);
                return std::string("inadmissible top-degree form was not rejected");
            } catch (const PreconditionError&) {
            }
        }
        auto sigma = make_form(c, random_admissible_form(
                                      rng, c.gens,
                                      {.x_degree = cfg.degree_max,
                                       .dxi_degree = std::min(cfg.degree_max, 2),
                                       .use_xi = true,
                                       .use_theta = true}));
        auto lhs = koszul_homotopy(omega_multiply(sigma)).body +
                   omega_multiply(koszul_homotopy(sigma)).body;
        if (lhs != sigma.body)
            return "(H d0 + d0 H) sigma != sigma for sigma = " + to_string(sigma.body);
        return std::nullopt;
    });
}

inline CheckReport run_spectral(const CheckSuiteConfig& cfg) {
    return run_trials(cfg, [&](int offset, Rng& rng) -> std::optional<std::string> {
        if (offset == 0) {
            for (int n = 1; n <= std::min(cfg.n_max, 2); ++n) {
                Chart c = suite_chart(n, 0);
                auto result = delta_cohomology(density_slice(c, std::min(cfg.degree_max, 3)));
                if (result.dimension != 1)
                    return "delta-cohomology dimension " + std::to_string(result.dimension) +
                           " != 1 at n=" + std::to_string(n);
            }
        }
        int n = rng.range(1, std::min(cfg.n_max, 3));
        Chart c = suite_chart(n, 1);
        E1Class cls{c, random_density_body(rng, c, cfg.degree_max)};
        if (!d1(cls).representative.is_zero())
            return "d1 != 0 on class " + to_string(cls.representative);
        if (d2(cls).representative != -delta_body(cls.representative))
            return "d2 != -Delta on class " + to_string(cls.representative);
        return std::nullopt;
    });
}

inline CheckReport run_lie_algebra(const CheckSuiteConfig& cfg) {
    return run_trials(cfg, [&](int offset, Rng& rng) -> std::optional<std::string> {
        Chart c = suite_chart(rng.range(1, cfg.n_max), std::max(cfg.theta_budget, 2));
        SampleBounds fb{.x_degree = 2, .use_xi = true, .use_theta = true};
        Parity ph = rng.chance(1, 2) ? Parity::odd : Parity::even;
        Parity pg = rng.chance(1, 2) ? Parity::odd : Parity::even;
        auto h = make_field(c, random_homogeneous(rng, c.gens, fb, ph));
        auto g = make_field(c, random_homogeneous(rng, c.gens, fb, pg));
        auto hg = schouten_bracket(h, g);
        int sign = ((static_cast<int>(ph) + 1) * (static_cast<int>(pg) + 1)) % 2 ? -1 : 1;

        auto sigma = make_density(c, random_density_body(rng, c, cfg.degree_max));
        auto lhs_d = lie_derivative_density(hg, sigma).body;
        auto rhs_d = lie_derivative_density(h, lie_derivative_density(g, sigma)).body;
        auto swap_d = lie_derivative_density(g, lie_derivative_density(h, sigma)).body;
        rhs_d = sign > 0 ? rhs_d - swap_d : rhs_d + swap_d;
        if (lhs_d != rhs_d)
            return "L_{[H,G]} != [L_H, L_G] on densities for H = " + to_string(h.body) +
                   ", G = " + to_string(g.body);

        auto w = make_form(c, random_polynomial(rng, c.gens,
                                                {.x_degree = 2,
                                                 .dxi_degree = 1,
                                                 .use_xi = true,
                                                 .use_dx = true,
                                                 .use_theta = true}));
        auto lhs_f = lie_derivative_form(hg, w).body;
        auto rhs_f = lie_derivative_form(h, lie_derivative_form(g, w)).body;
        auto swap_f = lie_derivative_form(g, lie_derivative_form(h, w)).body;
        rhs_f = sign > 0 ? rhs_f - swap_f : rhs_f + swap_f;
        if (lhs_f != rhs_f)
            return "L_{[H,G]} != [L_H, L_G] on forms for H = " + to_string(h.body) +
                   ", G = " + to_string(g.body);

        // graded commutator [delta, L_H] = 0
        auto dl = delta_body(lie_derivative_density(h, sigma).body);
        auto ld = lie_derivative_density(h, divergence(sigma)).body;
        if (dl != (ph == Parity::odd ? ld : -ld))
            return "[delta, L_H] != 0 for H = " + to_string(h.body);

        // classical agreement for a xi-degree-1 field
        if (offset % 5 == 0) {
            int n = c.n();
            std::vector<SuperPolynomial> comps;
            SuperPolynomial hx(c.gens);
            for (int a = 1; a <= n; ++a) {
                auto xa = random_polynomial(rng, c.gens, {.x_degree = 2, .use_xi = false}, 2);
                comps.push_back(xa);
                hx += xa * SuperPolynomial::generator(c.gens, GenKind::xi, a);
            }
            if (!hx.is_zero()) {
                auto field = make_field(c, hx);
                auto s = random_polynomial(rng, c.gens, {.x_degree = 3, .use_xi = false}, 3);
                SuperPolynomial classical(c.gens);
                for (int a = 1; a <= n; ++a)
                    classical += (comps[a - 1] * s).derive(GenKind::x, a);
                if (lie_derivative_density(field, make_density(c, s)).body != classical)
                    return "classical density Lie derivative mismatch for X = " + to_string(hx);
                auto base = random_polynomial(rng, c.gens,
                                              {.x_degree = 2, .use_xi = false, .use_dx = true}, 3);
                SuperPolynomial cartan(c.gens);
                for (int a = 1; a <= n; ++a) {
                    cartan += de_rham_body(comps[a - 1] * base.derive(GenKind::dx, a));
                    cartan += comps[a - 1] * de_rham_body(base).derive(GenKind::dx, a);
                }
                if (lie_derivative_form(field, make_form(c, base)).body != cartan)
                    return "classical Cartan formula mismatch for X = " + to_string(hx);
            }
        }
        return std::nullopt;
    });
}

inline CheckReport run_fourier(const CheckSuiteConfig& cfg) {
    return run_trials(cfg, [&](int offset, Rng& rng) -> std::optional<std::string> {
        int n = rng.range(1, std::min(cfg.n_max, 3));
        Chart c = suite_chart(n, 2);
        auto sigma = make_density(c, random_density_body(rng, c, cfg.degree_max));
        if (inverse_fourier(fourier_transform(sigma)).body != sigma.body)
            return "inverse_fourier . fourier != id on " + to_string(sigma.body);

        Coefficient u = fourier_unit(n);
        if (fourier_transform(divergence(sigma)).body !=
            u * de_rham(fourier_transform(sigma)).body)
            return "fourier . delta != u(n) d . fourier on " + to_string(sigma.body);

        auto h = make_field(c, random_density_body(rng, c, 2));
        if (fourier_transform(make_density(c, h.body * sigma.body)).body !=
            interior_product(h, fourier_transform(sigma)).body)
            return "fourier . (H .) != i_H . fourier for H = " + to_string(h.body);

        if (offset % 5 == 0) {
            auto f = random_diffeo(rng, c);
            auto base = make_form(
                c, random_polynomial(rng, c.gens, {.x_degree = 2, .use_xi = false, .use_dx = true},
                                     4));
            if (pullback_form_via_fourier(f, base).body != f.pullback(base).body)
                return "fourier path disagrees with substitution path for\n" + to_text(f);
            auto g = random_transformation(rng, c, 3);
            if (pullback_form_via_fourier(g, de_rham(base)).body !=
                de_rham(pullback_form_via_fourier(g, base)).body)
                return "pullback of forms does not commute with d for\n" + to_text(g);
        }
        return std::nullopt;
    });
}

// Named anchor identities pinning every frozen sign and constant; the suite
// fails if any anchor (or any randomized coherence check) breaks.
inline CheckReport run_conventions(const CheckSuiteConfig& cfg) {
    CheckReport report;
    report.suite = suite_name(cfg.suite);
    report.config = cfg;
    auto start = std::chrono::steady_clock::now();
    int index = 0;
    auto anchor = [&](const std::string& name, const std::function<bool()>& check) {
        ++report.trials_run;
        bool ok = false;
        std::string extra;
        try {
            ok = check();
        } catch (const std::exception& e) {
            extra = std::string(": ") + e.what();
        }
        if (!ok)
            report.failures.push_back({index, "anchor '" + name + "' failed" + extra});
        ++index;
    };

    Chart c1 = suite_chart(1, 2);
    Chart c2 = suite_chart(2, 2);
    auto p1 = [&](const std::string& s) { return parse_polynomial(s, c1.gens); };
    auto p2 = [&](const std::string& s) { return parse_polynomial(s, c2.gens); };

    anchor("odd-square", [&] { return p1("xi1^2").is_zero(); });
    anchor("berezin-order", [&] {
        return p2("xi2*xi1").berezin_integral({{GenKind::xi, 1}, {GenKind::xi, 2}}) == p2("-1");
    });
    anchor("bracket: {x1,xi1} = -1", [&] { return bracket_body(p1("x1"), p1("xi1")) == p1("-1"); });
    anchor("bracket restricts to the Lie bracket",
           [&] { return bracket_body(p1("xi1"), p1("x1*xi1")) == p1("xi1"); });
    anchor("delta anchor: Delta(x1 xi1) = 1",
           [&] { return delta_body(p1("x1*xi1")) == p1("1"); });
    anchor("delta_rho reduces to Delta for the Darboux volume (factor 1)", [&] {
        Rng rng(cfg.seed);
        auto rho = make_volume(c2, SuperPolynomial::constant(c2.gens, 1));
        for (int t = 0; t < std::max(cfg.trials / 4, 5); ++t) {
            auto f = random_density_body(rng, c2, 3);
            if (laplacian_with_volume(make_field(c2, f), rho).body != delta_body(f))
                return false;
        }
        return true;
    });
    anchor("BV defect: Delta(fg) - Delta(f)g -+ f Delta(g) = -(-1)^{|f|}{f,g}", [&] {
        Rng rng(cfg.seed + 1);
        for (int t = 0; t < std::max(cfg.trials / 4, 5); ++t) {
            Parity pf = t % 2 ? Parity::odd : Parity::even;
            auto f = random_homogeneous(rng, c2.gens, {.x_degree = 2, .use_xi = true,
                                                       .use_theta = true}, pf);
            auto g = random_density_body(rng, c2, 2);
            auto defect = delta_body(f * g) - delta_body(f) * g;
            defect = pf == Parity::odd ? defect + f * delta_body(g) : defect - f * delta_body(g);
            auto expected = pf == Parity::even ? -bracket_body(f, g) : bracket_body(f, g);
            if (defect != expected)
                return false;
        }
        return true;
    });
    anchor("homotopy anchor: H(dx1 dxi1) = 1 at n=1", [&] {
        return koszul_homotopy(make_form(c1, p1("dx1*dxi1"))).body == p1("1");
    });
    anchor("theta primitive: d Theta = omega", [&] {
        for (int n = 1; n <= 3; ++n) {
            GenSetPtr g = GeneratorSet::make(n, 0);
            if (de_rham_body(theta_one_form(g)) != omega_poly(g))
                return false;
        }
        return true;
    });
    anchor("theta conjugation: e^{-Theta} d e^{Theta} = d + omega", [&] {
        Rng rng(cfg.seed + 2);
        for (int t = 0; t < std::max(cfg.trials / 8, 4); ++t) {
            auto w = make_form(c2, random_polynomial(rng, c2.gens,
                                                     {.x_degree = 2,
                                                      .dxi_degree = 1,
                                                      .use_xi = true,
                                                      .use_dx = true,
                                                      .use_theta = true}));
            if (!theta_conjugation_holds(w))
                return false;
        }
        return true;
    });
    anchor("fourier anchor: fourier(1) = i dx1 and fourier(xi1) = 1 at n=1", [&] {
        return fourier_transform(make_density(c1, p1("1"))).body == p1("i*dx1") &&
               fourier_transform(make_density(c1, p1("xi1"))).body == p1("1");
    });
    anchor("fourier inversion constant", [&] {
        Rng rng(cfg.seed + 3);
        for (int n = 1; n <= 3; ++n) {
            Chart c = suite_chart(n, 1);
            for (int t = 0; t < std::max(cfg.trials / 8, 4); ++t) {
                auto sigma = make_density(c, random_density_body(rng, c, 2));
                if (inverse_fourier(fourier_transform(sigma)).body != sigma.body)
                    return false;
            }
        }
        return true;
    });
    anchor("fourier unit u(n) = i * (-1)^{n+1}", [&] {
        if (fourier_unit(1) != Coefficient::i() || fourier_unit(2) != -Coefficient::i() ||
            fourier_unit(3) != Coefficient::i())
            return false;
        Rng rng(cfg.seed + 4);
        for (int n = 1; n <= 3; ++n) {
            Chart c = suite_chart(n, 1);
            for (int t = 0; t < std::max(cfg.trials / 8, 4); ++t) {
                auto sigma = make_density(c, random_density_body(rng, c, 2));
                if (fourier_transform(divergence(sigma)).body !=
                    fourier_unit(n) * de_rham(fourier_transform(sigma)).body)
                    return false;
            }
        }
        return true;
    });
    anchor("interior product anchor: i_{xi1}(dx1) = -i at n=1", [&] {
        return interior_product(make_field(c1, p1("xi1")), make_form(c1, p1("dx1"))).body ==
               p1("-i");
    });
    anchor("supertranspose sign", [&] {
        SuperMatrix j = SuperMatrix::identity(1, c1.gens);
        j.j00[0][0] = p1("0");
        j.j11[0][0] = p1("0");
        j.j01[0][0] = p1("th1");
        return supertranspose(j).j10[0][0] == p1("-th1");
    });
    anchor("jacobians of constructed transformations are symplectic", [&] {
        Rng rng(cfg.seed + 5);
        for (int t = 0; t < std::max(cfg.trials / 8, 4); ++t) {
            auto f = random_transformation(rng, c2, 3);
            if (!is_symplectic(f.jacobian()).all_hold())
                return false;
        }
        return true;
    });
    anchor("half-density twist det J00 and volume twist Ber", [&] {
        auto two_x = CanonicalTransformation::make_diffeo(c1, {p1("2*x1")}, {p1("1/2*x1")});
        return two_x.pullback(make_density(c1, p1("1"))).body == p1("2") &&
               two_x.pullback(make_volume(c1, p1("1"))).body == p1("4");
    });
    anchor("flow anchor: H = th1 th2 xi1 moves x1 by th1 th2", [&] {
        auto f = CanonicalTransformation::make_hamiltonian_flow(c1, p1("th1*th2*xi1"));
        return *f.images().find({GenKind::x, 1}) == p1("x1 + th1*th2");
    });
    anchor("d2 anchor: d2[x1 xi1] = [-1] at n=1", [&] {
        return d2(E1Class{c1, p1("x1*xi1")}).representative == p1("-1");
    });
    anchor("nilpotency: Delta^2 = delta^2 = d^2 = D^2 = 0, omega^2 = 0", [&] {
        Rng rng(cfg.seed + 6);
        Chart c3 = suite_chart(3, 2);
        for (int t = 0; t < cfg.trials; ++t) {
            auto s = random_density_body(rng, c3, 4);
            if (!delta_body(delta_body(s)).is_zero())
                return false;
            auto w = make_form(c3, random_polynomial(rng, c3.gens,
                                                     {.x_degree = 4,
                                                      .dxi_degree = 2,
                                                      .use_xi = true,
                                                      .use_dx = true,
                                                      .use_theta = true}));
            if (!de_rham(de_rham(w)).body.is_zero())
                return false;
            if (!omega_multiply(omega_multiply(w)).body.is_zero())
                return false;
            if (!total_differential(total_differential(w)).body.is_zero())
                return false;
        }
        return true;
    });
    report.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return report;
}

} // namespace suites_detail

inline CheckReport run_suite(const CheckSuiteConfig& cfg) {
    cfg.validate();
    switch (cfg.suite) {
    case Suite::berezinian: return suites_detail::run_berezinian(cfg);
    case Suite::delta_invariance: return suites_detail::run_delta_invariance(cfg);
    case Suite::homotopy: return suites_detail::run_homotopy(cfg);
    case Suite::spectral: return suites_detail::run_spectral(cfg);
    case Suite::lie_algebra: return suites_detail::run_lie_algebra(cfg);
    case Suite::fourier: return suites_detail::run_fourier(cfg);
    default: return suites_detail::run_conventions(cfg);
    }
}

inline nlohmann::json report_to_json(const CheckReport& r) {
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : r.failures)
        failures.push_back({{"offset", f.offset}, {"counterexample", f.counterexample}});
    return nlohmann::json{{"schema_version", 1},
                          {"suite", r.suite},
                          {"seed", r.config.seed},
                          {"trials", r.config.trials},
                          {"n_max", r.config.n_max},
                          {"degree_max", r.config.degree_max},
                          {"theta_budget", r.config.theta_budget},
                          {"trials_run", r.trials_run},
                          {"status", r.pass() ? "pass" : "fail"},
                          {"failures", failures},
                          {"elapsed_ms", r.elapsed_ms}};
}

inline std::string render_report_text(const CheckReport& r) {
    std::ostringstream os;
    os << "suite: " << r.suite << "\n";
    os << "seed: " << r.config.seed << "  trials: " << r.config.trials
       << "  n-max: " << r.config.n_max << "  degree-max: " << r.config.degree_max
       << "  theta-budget: " << r.config.theta_budget << "\n";
    os << "checks run: " << r.trials_run << "\n";
    for (const auto& f : r.failures)
        os << "FAIL at offset " << f.offset << ":\n  " << f.counterexample << "\n";
    os << "status: " << (r.pass() ? "PASS" : "FAIL") << "\n";
    os << "elapsed: " << r.elapsed_ms << " ms\n";
    return os.str();
}

} // namespace oddsym
