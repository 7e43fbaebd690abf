#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "oddsym/calculus.hpp"
#include "oddsym/chart.hpp"
#include "oddsym/io.hpp"
#include "oddsym/supermatrix.hpp"

namespace oddsym {

// Generating step kinds for Can(Pi T*M); a transformation is a finite word
// in these, applied first-to-last as point maps.
struct DiffeoStep {
    std::vector<SuperPolynomial> forward; // images of x^1..x^n, polynomials in x
    std::vector<SuperPolynomial> inverse;
};
struct ShiftStep {
    SuperPolynomial phi; // odd, depends on x and theta only
};
struct FlowStep {
    SuperPolynomial hamiltonian; // odd, nilpotency-certified (see below)
};
using TransformStep = std::variant<DiffeoStep, ShiftStep, FlowStep>;

enum class TransformKind { identity, diffeo, fiber_shift, flow, composite };

inline const char* kind_name(TransformKind k) {
    switch (k) {
    case TransformKind::identity: return "identity";
    case TransformKind::diffeo: return "diffeo";
    case TransformKind::fiber_shift: return "shift";
    case TransformKind::flow: return "flow";
    default: return "composite";
    }
}

namespace detail {

// Substitution on the coordinate generators induced by one step.
inline Substitution step_substitution(const TransformStep& step, const GenSetPtr& gens);

inline void check_diffeo(const DiffeoStep& s, const GenSetPtr& gens) {
    int n = gens->n();
    if (static_cast<int>(s.forward.size()) != n || static_cast<int>(s.inverse.size()) != n)
        throw PreconditionError("diffeo: expected n forward and n inverse images");
    for (const auto& list : {s.forward, s.inverse})
        for (const auto& p : list) {
            if (!p.is_even())
                throw PreconditionError("diffeo: images of x must be even");
            if (p.depends_on(GenKind::xi) || p.depends_on(GenKind::dx) ||
                p.depends_on(GenKind::dxi) || p.depends_on(GenKind::th))
                throw PreconditionError("diffeo: images of x must depend on x only");
        }
    // forward and inverse must compose to the identity both ways
    Substitution fwd(gens), inv(gens);
    for (int i = 1; i <= n; ++i) {
        fwd.set({GenKind::x, i}, s.forward[i - 1]);
        inv.set({GenKind::x, i}, s.inverse[i - 1]);
    }
    for (int i = 1; i <= n; ++i) {
        auto xi = SuperPolynomial::generator(gens, GenKind::x, i);
        if (s.inverse[i - 1].substitute(fwd) != xi || s.forward[i - 1].substitute(inv) != xi)
            throw PreconditionError("diffeo: provided maps are not mutually inverse");
    }
}

inline void check_shift(const ShiftStep& s, const GenSetPtr& gens) {
    if (!s.phi.is_zero() && !s.phi.is_odd())
        throw PreconditionError("fiber shift: generating function must be odd");
    if (s.phi.depends_on(GenKind::xi) || s.phi.depends_on(GenKind::dx) ||
        s.phi.depends_on(GenKind::dxi))
        throw PreconditionError("fiber shift: generating function may depend on x and theta only");
    (void)gens;
}

// A flow Hamiltonian is accepted when every monomial carries at least two
// odd factors among {xi, theta}: each application of the Hamiltonian vector
// field then raises that count, so the exponential series terminates.
inline void check_flow(const FlowStep& s, const GenSetPtr& gens) {
    const auto& h = s.hamiltonian;
    if (!h.is_zero() && !h.is_odd())
        throw PreconditionError("flow: Hamiltonian must be odd");
    if (h.depends_on(GenKind::dx) || h.depends_on(GenKind::dxi))
        throw PreconditionError("flow: Hamiltonian must not involve differentials");
    uint64_t fiber = gens->xi_mask() | gens->theta_mask();
    for (const auto& [m, c] : h.terms())
        if (std::popcount(m.odd & fiber) < 2)
            throw PreconditionError("flow: no nilpotency certificate (term with fewer than two "
                                    "xi/theta factors)");
}

inline SuperPolynomial flow_exponential(const SuperPolynomial& h, const SuperPolynomial& start,
                                        const GenSetPtr& gens) {
    SuperPolynomial result = start;
    SuperPolynomial term = start;
    Rational factorial(1);
    int bound = gens->num_odd() + 2;
    for (int k = 1; k <= bound; ++k) {
        term = bracket_body(h, term);
        if (term.is_zero())
            return result;
        factorial *= k;
        result += term * Coefficient(Rational(1) / factorial);
    }
    throw PreconditionError("flow: exponential series did not terminate within the certified bound");
}

inline Substitution step_substitution(const TransformStep& step, const GenSetPtr& gens) {
    Substitution sub(gens);
    int n = gens->n();
    if (const auto* d = std::get_if<DiffeoStep>(&step)) {
        check_diffeo(*d, gens);
        Substitution to_forward(gens);
        for (int i = 1; i <= n; ++i)
            to_forward.set({GenKind::x, i}, d->forward[i - 1]);
        for (int a = 1; a <= n; ++a) {
            sub.set({GenKind::x, a}, d->forward[a - 1]);
            // xi_a -> sum_b (d inverse^b / d x^a)(forward(x)) xi_b
            SuperPolynomial img(gens);
            for (int b = 1; b <= n; ++b)
                img += d->inverse[b - 1].derive(GenKind::x, a).substitute(to_forward) *
                       SuperPolynomial::generator(gens, GenKind::xi, b);
            sub.set({GenKind::xi, a}, img);
        }
    } else if (const auto* s = std::get_if<ShiftStep>(&step)) {
        check_shift(*s, gens);
        for (int a = 1; a <= n; ++a) {
            auto xi_a = SuperPolynomial::generator(gens, GenKind::xi, a);
            sub.set({GenKind::xi, a}, xi_a + s->phi.derive(GenKind::x, a));
        }
    } else {
        const auto& f = std::get<FlowStep>(step);
        check_flow(f, gens);
        for (int a = 1; a <= n; ++a) {
            sub.set({GenKind::x, a},
                    flow_exponential(f.hamiltonian,
                                     SuperPolynomial::generator(gens, GenKind::x, a), gens));
            sub.set({GenKind::xi, a},
                    flow_exponential(f.hamiltonian,
                                     SuperPolynomial::generator(gens, GenKind::xi, a), gens));
        }
    }
    return sub;
}

} // namespace detail

class CanonicalTransformation {
  public:
    static CanonicalTransformation identity(Chart chart) {
        CanonicalTransformation f(chart, chart, {}, TransformKind::identity);
        return f;
    }

    // phi: x -> forward(x), with its polynomial inverse; xi transforms by the
    // inverse-Jacobian rule so that omega is preserved.
    static CanonicalTransformation make_diffeo(Chart chart, std::vector<SuperPolynomial> forward,
                                               std::vector<SuperPolynomial> inverse) {
        return CanonicalTransformation(chart, chart,
                                       {DiffeoStep{std::move(forward), std::move(inverse)}},
                                       TransformKind::diffeo);
    }

    // x -> x, xi_a -> xi_a + dPhi/dx^a for odd Phi(x, theta).
    static CanonicalTransformation make_fiber_shift(Chart chart, SuperPolynomial phi) {
        return CanonicalTransformation(chart, chart, {ShiftStep{std::move(phi)}},
                                       TransformKind::fiber_shift);
    }

    // Time-1 flow of the Hamiltonian vector field of an odd, nilpotency-
    // certified Hamiltonian.
    static CanonicalTransformation make_hamiltonian_flow(Chart chart, SuperPolynomial hamiltonian) {
        return CanonicalTransformation(chart, chart, {FlowStep{std::move(hamiltonian)}},
                                       TransformKind::flow);
    }

    const Chart& source() const { return source_; }
    const Chart& target() const { return target_; }
    TransformKind kind() const { return kind_; }
    const std::vector<TransformStep>& steps() const { return steps_; }
    const Substitution& images() const { return images_; }

    // F∘G: apply G first. Pullback composes the other way round.
    friend CanonicalTransformation compose(const CanonicalTransformation& f,
                                           const CanonicalTransformation& g) {
        if (!(f.source() == g.target()))
            throw PreconditionError("compose: chart mismatch");
        std::vector<TransformStep> steps = g.steps_;
        steps.insert(steps.end(), f.steps_.begin(), f.steps_.end());
        TransformKind kind = steps.empty() ? TransformKind::identity : TransformKind::composite;
        if (f.kind_ == TransformKind::identity)
            kind = g.kind_;
        else if (g.kind_ == TransformKind::identity)
            kind = f.kind_;
        return CanonicalTransformation(g.source_, f.target_, std::move(steps), kind);
    }

    CanonicalTransformation inverse() const {
        std::vector<TransformStep> steps;
        for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
            if (const auto* d = std::get_if<DiffeoStep>(&*it))
                steps.push_back(DiffeoStep{d->inverse, d->forward});
            else if (const auto* s = std::get_if<ShiftStep>(&*it))
                steps.push_back(ShiftStep{-s->phi});
            else
                steps.push_back(FlowStep{-std::get<FlowStep>(*it).hamiltonian});
        }
        return CanonicalTransformation(target_, source_, std::move(steps), invert_kind(kind_));
    }

    // Substitution extended to the differentials by the chain rule.
    Substitution extended_substitution() const {
        Substitution sub = images_;
        const GenSetPtr& gens = source_.gens;
        for (int a = 1; a <= gens->n(); ++a) {
            sub.set({GenKind::dx, a}, de_rham_body(image({GenKind::x, a})));
            sub.set({GenKind::dxi, a}, de_rham_body(image({GenKind::xi, a})));
        }
        return sub;
    }

    // Jacobian in the row = source variable, column = target image layout:
    //   J00[b][a] = d(x-image_a)/dx^b   J01[b][a] = d(xi-image_a)/dx^b
    //   J10[b][a] = d(x-image_a)/dxi_b  J11[b][a] = d(xi-image_a)/dxi_b
    // With this arrangement J B J^st = B is exactly omega-preservation.
    SuperMatrix jacobian() const {
        const GenSetPtr& gens = source_.gens;
        int n = gens->n();
        SuperMatrix j;
        j.n = n;
        j.gens = gens;
        j.j00 = poly_matrix(n, n, gens);
        j.j01 = poly_matrix(n, n, gens);
        j.j10 = poly_matrix(n, n, gens);
        j.j11 = poly_matrix(n, n, gens);
        for (int a = 1; a <= n; ++a) {
            SuperPolynomial xi_img = image({GenKind::x, a});
            SuperPolynomial eta_img = image({GenKind::xi, a});
            for (int b = 1; b <= n; ++b) {
                j.j00[b - 1][a - 1] = xi_img.derive(GenKind::x, b);
                j.j01[b - 1][a - 1] = eta_img.derive(GenKind::x, b);
                j.j10[b - 1][a - 1] = xi_img.derive(GenKind::xi, b);
                j.j11[b - 1][a - 1] = eta_img.derive(GenKind::xi, b);
            }
        }
        return j;
    }

    SuperPolynomial det_j00() const {
        const GenSetPtr& gens = source_.gens;
        int n = gens->n();
        PolyMatrix m = poly_matrix(n, n, gens);
        for (int a = 1; a <= n; ++a) {
            SuperPolynomial img = image({GenKind::x, a});
            for (int b = 1; b <= n; ++b)
                m[b - 1][a - 1] = img.derive(GenKind::x, b);
        }
        return det_even(m);
    }

    // Kind-dependent pullback of geometric objects living in the target chart.
    GeometricObject pullback(const GeometricObject& obj) const {
        if (!(obj.chart == target_))
            throw PreconditionError("pullback: object lives in chart '" + obj.chart.name +
                                    "', not in the transformation target '" + target_.name + "'");
        switch (obj.kind) {
        case ObjectKind::multivector_field:
            return make_field(source_, obj.body.substitute(images_));
        case ObjectKind::multivector_density:
            return make_density(source_, obj.body.substitute(images_) * det_j00());
        case ObjectKind::pseudodifferential_form:
            return make_form(source_, obj.body.substitute(extended_substitution()));
        case ObjectKind::volume_form:
        default:
            return make_volume(source_, obj.body.substitute(images_) * berezinian(jacobian()));
        }
    }

  private:
    CanonicalTransformation(Chart source, Chart target, std::vector<TransformStep> steps,
                            TransformKind kind)
        : source_(std::move(source)), target_(std::move(target)), steps_(std::move(steps)),
          kind_(kind), images_(source_.gens) {
        build_images();
        verify_symplectic();
    }

    static TransformKind invert_kind(TransformKind k) {
        return k == TransformKind::composite ? TransformKind::composite : k;
    }

    SuperPolynomial image(Generator g) const {
        if (const SuperPolynomial* p = images_.find(g))
            return *p;
        return SuperPolynomial::generator(source_.gens, g);
    }

    void build_images() {
        const GenSetPtr& gens = source_.gens;
        bool have = false;
        Substitution total(gens);
        for (const TransformStep& step : steps_) {
            Substitution s = detail::step_substitution(step, gens);
            if (!have) {
                total = s;
                have = true;
                continue;
            }
            // total so far pulls back through the earlier steps; apply it to
            // the images of the later step.
            Substitution next(gens);
            for (int id = 0; id < gens->num_ids(); ++id) {
                Generator g = gens->generator(id);
                if (const SuperPolynomial* img = s.find(g))
                    next.set(g, img->substitute(total));
                else if (const SuperPolynomial* keep = total.find(g))
                    next.set(g, *keep);
            }
            total = next;
        }
        if (have)
            images_ = total;
    }

    void verify_symplectic() {
        const GenSetPtr& gens = source_.gens;
        SuperPolynomial w = omega_poly(gens);
        if (w.substitute(extended_substitution()) != w)
            throw PreconditionError("transformation does not preserve the symplectic form");
    }

    Chart source_;
    Chart target_;
    std::vector<TransformStep> steps_;
    TransformKind kind_;
    Substitution images_;
};

// ---------------------------------------------------------------------------
// Text serialization: header "chart n=<k> thetas=<t>", then one record per
// line, applied top to bottom:
//   diffeo <p1>; ...; <pn> | <q1>; ...; <qn>
//   shift <phi>
//   flow <H>
// ---------------------------------------------------------------------------

inline std::string to_text(const CanonicalTransformation& f) {
    std::ostringstream os;
    os << "chart n=" << f.source().n() << " thetas=" << f.source().thetas() << "\n";
    for (const TransformStep& step : f.steps()) {
        if (const auto* d = std::get_if<DiffeoStep>(&step)) {
            os << "diffeo ";
            for (std::size_t i = 0; i < d->forward.size(); ++i)
                os << (i ? "; " : "") << to_string(d->forward[i]);
            os << " | ";
            for (std::size_t i = 0; i < d->inverse.size(); ++i)
                os << (i ? "; " : "") << to_string(d->inverse[i]);
            os << "\n";
        } else if (const auto* s = std::get_if<ShiftStep>(&step)) {
            os << "shift " << to_string(s->phi) << "\n";
        } else {
            os << "flow " << to_string(std::get<FlowStep>(step).hamiltonian) << "\n";
        }
    }
    return os.str();
}

inline CanonicalTransformation transformation_from_text(const std::string& text,
                                                        const std::string& chart_name = "c") {
    std::istringstream is(text);
    std::string line;
    int n = 0, thetas = 0;
    bool have_header = false;
    std::optional<Chart> chart;
    std::optional<CanonicalTransformation> result;
    auto split_list = [](const std::string& s) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            std::size_t semi = s.find(';', start);
            if (semi == std::string::npos) {
                parts.push_back(s.substr(start));
                break;
            }
            parts.push_back(s.substr(start, semi - start));
            start = semi + 1;
        }
        return parts;
    };
    while (std::getline(is, line)) {
        std::size_t h = line.find('#');
        if (h != std::string::npos)
            line = line.substr(0, h);
        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos)
            continue;
        line = line.substr(a);
        if (!have_header) {
            if (std::sscanf(line.c_str(), "chart n=%d thetas=%d", &n, &thetas) != 2)
                throw IoError("transformation header must be 'chart n=<k> thetas=<t>'");
            have_header = true;
            chart = make_chart(chart_name, n, thetas);
            result = CanonicalTransformation::identity(*chart);
            continue;
        }
        const GenSetPtr& gens = chart->gens;
        CanonicalTransformation step = CanonicalTransformation::identity(*chart);
        if (line.rfind("diffeo", 0) == 0) {
            std::string rest = line.substr(6);
            std::size_t bar = rest.find('|');
            if (bar == std::string::npos)
                throw IoError("diffeo record needs 'forward | inverse'");
            std::vector<SuperPolynomial> fwd, inv;
            for (const auto& part : split_list(rest.substr(0, bar)))
                fwd.push_back(parse_polynomial(part, gens));
            for (const auto& part : split_list(rest.substr(bar + 1)))
                inv.push_back(parse_polynomial(part, gens));
            step = CanonicalTransformation::make_diffeo(*chart, std::move(fwd), std::move(inv));
        } else if (line.rfind("shift", 0) == 0) {
            step = CanonicalTransformation::make_fiber_shift(
                *chart, parse_polynomial(line.substr(5), gens));
        } else if (line.rfind("flow", 0) == 0) {
            step = CanonicalTransformation::make_hamiltonian_flow(
                *chart, parse_polynomial(line.substr(4), gens));
        } else {
            throw IoError("unknown transformation record: " + line);
        }
        result = compose(step, *result); // earlier lines apply first
    }
    if (!result)
        throw IoError("transformation text is empty");
    return *result;
}

// ---------------------------------------------------------------------------
// Seeded samplers over the three generating subgroups.
// ---------------------------------------------------------------------------

inline CanonicalTransformation random_diffeo(Rng& rng, const Chart& chart) {
    const GenSetPtr& gens = chart.gens;
    int n = chart.n();
    auto var = [&](int i) { return SuperPolynomial::generator(gens, GenKind::x, i); };
    std::vector<SuperPolynomial> fwd, inv;
    for (int i = 1; i <= n; ++i) {
        fwd.push_back(var(i));
        inv.push_back(var(i));
    }
    auto apply_elementary = [&]() {
        if (n >= 2 && rng.chance(2, 3)) {
            // shear x_i += p(x_j), inverted by subtracting the same polynomial
            int i = rng.range(1, n);
            int j = rng.range(1, n - 1);
            if (j >= i)
                ++j;
            SuperPolynomial p(gens);
            int deg = rng.range(1, 2);
            p = Coefficient(rng.nonzero_rational(2, 2)) * var(j).pow(deg);
            std::vector<SuperPolynomial> f2, i2;
            for (int k = 1; k <= n; ++k) {
                f2.push_back(k == i ? var(k) + p : var(k));
                i2.push_back(k == i ? var(k) - p : var(k));
            }
            return std::make_pair(f2, i2);
        }
        // scaling x_i -> c x_i
        int i = rng.range(1, n);
        static const int nums[] = {2, -1, 3, -2};
        Rational c(nums[rng.range(0, 3)], rng.chance(1, 2) ? 2 : 1);
        std::vector<SuperPolynomial> f2, i2;
        for (int k = 1; k <= n; ++k) {
            f2.push_back(k == i ? Coefficient(c) * var(k) : var(k));
            i2.push_back(k == i ? Coefficient(Rational(1) / c) * var(k) : var(k));
        }
        return std::make_pair(f2, i2);
    };
    CanonicalTransformation total = CanonicalTransformation::identity(chart);
    int pieces = rng.range(1, 2);
    for (int p = 0; p < pieces; ++p) {
        auto [f2, i2] = apply_elementary();
        total = compose(CanonicalTransformation::make_diffeo(chart, f2, i2), total);
    }
    return total;
}

inline CanonicalTransformation random_fiber_shift(Rng& rng, const Chart& chart) {
    const GenSetPtr& gens = chart.gens;
    SuperPolynomial phi(gens);
    int terms = rng.range(1, 2);
    for (int t = 0; t < terms; ++t) {
        if (chart.thetas() == 0)
            break;
        Monomial m;
        m.even.assign(gens->num_even(), 0);
        int xd = rng.range(1, 2);
        for (int j = 0; j < xd; ++j)
            m.even[rng.range(0, chart.n() - 1)] += 1;
        // odd part: one theta (or three when available) keeps phi odd
        int nth = (chart.thetas() >= 3 && rng.chance(1, 4)) ? 3 : 1;
        while (std::popcount(m.odd) < nth)
            m.odd |= uint64_t(1) << rng.range(0, chart.thetas() - 1);
        phi.add_term(m, rng.coefficient(false));
    }
    return CanonicalTransformation::make_fiber_shift(chart, phi);
}

inline CanonicalTransformation random_flow(Rng& rng, const Chart& chart) {
    const GenSetPtr& gens = chart.gens;
    SuperPolynomial h(gens);
    int terms = rng.range(1, 2);
    for (int t = 0; t < terms; ++t) {
        Monomial m;
        m.even.assign(gens->num_even(), 0);
        int xd = rng.range(0, 2);
        for (int j = 0; j < xd; ++j)
            m.even[rng.range(0, chart.n() - 1)] += 1;
        // three distinct odd factors from {xi, theta}: odd parity and a
        // termination certificate at the same time
        int fiber_count = chart.n() + chart.thetas();
        if (fiber_count < 3)
            break;
        while (std::popcount(m.odd) < 3) {
            int pick = rng.range(0, fiber_count - 1);
            int bit = pick < chart.thetas() ? pick : chart.thetas() + (pick - chart.thetas());
            m.odd |= uint64_t(1) << bit;
        }
        h.add_term(m, rng.coefficient(false));
    }
    return CanonicalTransformation::make_hamiltonian_flow(chart, h);
}

// A pseudorandom word of 1..4 generators of all three kinds.
inline CanonicalTransformation random_transformation(Rng& rng, const Chart& chart,
                                                     int max_steps = 4) {
    CanonicalTransformation total = CanonicalTransformation::identity(chart);
    int steps = rng.range(1, max_steps);
    for (int s = 0; s < steps; ++s) {
        int type = rng.range(0, 2);
        CanonicalTransformation piece =
            type == 0 ? random_diffeo(rng, chart)
                      : (type == 1 ? random_fiber_shift(rng, chart) : random_flow(rng, chart));
        total = compose(piece, total);
    }
    return total;
}

} // namespace oddsym
