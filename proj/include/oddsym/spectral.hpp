#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "oddsym/bv.hpp"
#include "oddsym/linalg.hpp"

namespace oddsym {

// A d0-cohomology class, stored through its unique representative in the
// chart: sigma = s(x, xi) [dx^1 ... dx^n].
struct E1Class {
    Chart chart;
    SuperPolynomial representative;
};

inline SuperPolynomial top_dx_poly(const GenSetPtr& gens) {
    SuperPolynomial t = SuperPolynomial::constant(gens, 1);
    for (int i = 1; i <= gens->n(); ++i)
        t *= SuperPolynomial::generator(gens, GenKind::dx, i);
    return t;
}

struct E1Projection {
    E1Class cls;
    // For the zero class: tau with omega*tau = sigma (the exactness witness).
    std::optional<SuperPolynomial> exactness_witness;
};

// Extract the top-dx component at dxi = 0. Precondition: omega * sigma = 0.
inline E1Projection e1_project(const GeometricObject& sigma) {
    require_kind(sigma, ObjectKind::pseudodifferential_form, "e1 projection");
    const GenSetPtr& gens = sigma.body.gens();
    if (!(omega_poly(gens) * sigma.body).is_zero())
        throw PreconditionError("e1 projection: form is not omega-closed");
    int n = gens->n();
    SuperPolynomial rep(gens);
    for (const auto& [m, c] : sigma.body.terms()) {
        if ((m.odd & gens->dx_mask()) != gens->dx_mask())
            continue;
        bool has_dxi = false;
        for (int i = 0; i < n; ++i)
            if (m.even[n + i])
                has_dxi = true;
        if (has_dxi)
            continue;
        // the dx block is trailing in the canonical odd order, so the
        // coefficient transfers with sign +1
        Monomial stripped = m;
        stripped.odd &= ~gens->dx_mask();
        rep.add_term(stripped, c);
    }
    E1Projection result{E1Class{sigma.chart, rep}, std::nullopt};
    if (rep.is_zero())
        result.exactness_witness = koszul_homotopy(sigma).body;
    return result;
}

// d1 through the relation: project d(alpha) for the canonical representative.
// The theorem d1 = 0 is verified by callers, not assumed here.
inline E1Class d1(const E1Class& c) {
    SuperPolynomial alpha = c.representative * top_dx_poly(c.representative.gens());
    return e1_project(make_form(c.chart, de_rham_body(alpha))).cls;
}

// d2 through the explicit chain alpha_1 = -H d alpha, beta = d alpha_1.
inline E1Class d2(const E1Class& c) {
    const GenSetPtr& gens = c.representative.gens();
    SuperPolynomial alpha = c.representative * top_dx_poly(gens);
    SuperPolynomial d_alpha = de_rham_body(alpha);
    SuperPolynomial alpha1 = -koszul_homotopy(make_form(c.chart, d_alpha)).body;
    if (!(d_alpha + omega_poly(gens) * alpha1).is_zero())
        throw Error(errc::precondition, "d2: homotopy failed to solve d alpha + omega alpha1 = 0");
    SuperPolynomial beta = de_rham_body(alpha1);
    return e1_project(make_form(c.chart, beta)).cls;
}

// ---------------------------------------------------------------------------
// Degree-bounded slices and exact kernel/image linear algebra.
// ---------------------------------------------------------------------------

struct SliceBounds {
    int max_x_degree = 2;
    int max_dxi_degree = 0; // 0 together with !use_differentials: density-type slice
    bool use_differentials = false;
    bool include_theta = false;
};

// An enumerated monomial basis closed (up to the documented enlargements)
// under the operators the spectral computations need.
struct GradedSlice {
    Chart chart;
    SliceBounds bounds;
    std::vector<Monomial> basis;
    std::map<Monomial, int, TermOrder> index;

    explicit GradedSlice(Chart chart_, SliceBounds bounds_)
        : chart(std::move(chart_)), bounds(bounds_),
          index(TermOrder{chart.gens->n(), chart.gens->thetas()}) {
        enumerate();
    }

    int dimension() const { return static_cast<int>(basis.size()); }

    SuperPolynomial element(const linalg::Row& coords) const {
        SuperPolynomial p(chart.gens);
        for (std::size_t i = 0; i < coords.size(); ++i)
            if (!coords[i].is_zero())
                p.add_term(basis[i], coords[i]);
        return p;
    }

    std::optional<linalg::Row> coordinates(const SuperPolynomial& p) const {
        linalg::Row row(basis.size(), Coefficient(0));
        for (const auto& [m, c] : p.terms()) {
            auto it = index.find(m);
            if (it == index.end())
                return std::nullopt;
            row[it->second] = c;
        }
        return row;
    }

    // Matrix of a linear operator from this slice into `codomain`; throws
    // when the image leaves the codomain.
    linalg::Matrix operator_matrix(const GradedSlice& codomain,
                                   const std::function<SuperPolynomial(const SuperPolynomial&)>& op,
                                   const char* name) const {
        linalg::Matrix mat(codomain.basis.size(), linalg::Row(basis.size(), Coefficient(0)));
        for (std::size_t j = 0; j < basis.size(); ++j) {
            SuperPolynomial unit(chart.gens);
            unit.add_term(basis[j], Coefficient(1));
            SuperPolynomial img = op(unit);
            auto coords = codomain.coordinates(img);
            if (!coords)
                throw PreconditionError(std::string("slice not closed under ") + name);
            for (std::size_t i = 0; i < coords->size(); ++i)
                if (!(*coords)[i].is_zero())
                    mat[i][j] = (*coords)[i];
        }
        return mat;
    }

  private:
    void enumerate() {
        const GenSetPtr& gens = chart.gens;
        int n = gens->n();
        std::vector<Monomial> xs;
        Monomial base;
        base.even.assign(gens->num_even(), 0);
        grow_even(base, 0, n, bounds.max_x_degree, xs);
        std::vector<Monomial> with_dxi;
        if (bounds.use_differentials && bounds.max_dxi_degree > 0) {
            for (const Monomial& m : xs)
                grow_even(m, n, 2 * n, bounds.max_dxi_degree, with_dxi);
        } else {
            with_dxi = xs;
        }
        uint64_t odd_mask = gens->xi_mask();
        if (bounds.use_differentials)
            odd_mask |= gens->dx_mask();
        if (bounds.include_theta)
            odd_mask |= gens->theta_mask();
        for (const Monomial& m : with_dxi) {
            // iterate subsets of odd_mask
            uint64_t subset = 0;
            for (;;) {
                Monomial full = m;
                full.odd = subset;
                basis.push_back(full);
                if (subset == odd_mask)
                    break;
                subset = (subset - odd_mask) & odd_mask;
            }
        }
        TermOrder order{gens->n(), gens->thetas()};
        std::sort(basis.begin(), basis.end(), order);
        for (std::size_t i = 0; i < basis.size(); ++i)
            index.emplace(basis[i], static_cast<int>(i));
    }

    void grow_even(const Monomial& m, int slot_lo, int slot_hi, int budget,
                   std::vector<Monomial>& out) const {
        out.push_back(m);
        if (budget == 0)
            return;
        for (int s = slot_lo; s < slot_hi; ++s) {
            Monomial next = m;
            next.even[s] += 1;
            // avoid duplicates: only grow slots >= the last grown slot
            bool ok = true;
            for (int t = s + 1; t < slot_hi; ++t)
                if (next.even[t] != 0)
                    ok = false;
            if (ok)
                grow_even(next, s, slot_hi, budget - 1, out);
        }
    }
};

inline GradedSlice density_slice(const Chart& chart, int max_x_degree, bool include_theta = false) {
    return GradedSlice(chart, SliceBounds{max_x_degree, 0, false, include_theta});
}

inline GradedSlice form_slice(const Chart& chart, int max_x_degree, int max_dxi_degree,
                              bool include_theta = false) {
    return GradedSlice(chart, SliceBounds{max_x_degree, max_dxi_degree, true, include_theta});
}

// ---------------------------------------------------------------------------
// Delta-cohomology of a density slice: ker(Delta | slice) modulo the image of
// Delta from the slice enlarged by one in the x-degree (the enlargement keeps
// truncation artifacts out of the quotient; images still land in the slice).
// ---------------------------------------------------------------------------

struct CohomologyResult {
    int dimension = 0;
    std::vector<SuperPolynomial> representatives;
};

inline CohomologyResult delta_cohomology(const GradedSlice& slice) {
    if (slice.bounds.use_differentials)
        throw PreconditionError("delta cohomology expects a density-type slice");
    auto op = [](const SuperPolynomial& p) { return delta_body(p); };
    linalg::Matrix inner = slice.operator_matrix(slice, op, "delta");
    auto kernel = linalg::kernel_basis(inner);

    SliceBounds enlarged_bounds = slice.bounds;
    enlarged_bounds.max_x_degree += 1;
    GradedSlice enlarged(slice.chart, enlarged_bounds);
    linalg::Matrix from_enlarged = enlarged.operator_matrix(slice, op, "delta");

    // image basis in RREF form
    linalg::Matrix image_rows;
    for (std::size_t j = 0; j < enlarged.basis.size(); ++j) {
        linalg::Row col(slice.basis.size(), Coefficient(0));
        bool nonzero = false;
        for (std::size_t i = 0; i < slice.basis.size(); ++i) {
            col[i] = from_enlarged[i][j];
            nonzero = nonzero || !col[i].is_zero();
        }
        if (nonzero)
            image_rows.push_back(std::move(col));
    }
    auto image_pivots = linalg::rref(image_rows);
    image_rows.resize(image_pivots.size());

    CohomologyResult result;
    linalg::Matrix quotient_rows = image_rows;
    auto quotient_pivots = image_pivots;
    for (const auto& k : kernel) {
        linalg::Row residue = linalg::reduce_against(quotient_rows, quotient_pivots, k);
        bool nonzero = false;
        for (const auto& v : residue)
            if (!v.is_zero())
                nonzero = true;
        if (!nonzero)
            continue;
        result.representatives.push_back(slice.element(residue));
        // absorb into the running RREF so later kernel vectors reduce against it
        quotient_rows.push_back(std::move(residue));
        auto piv = linalg::rref(quotient_rows);
        quotient_rows.resize(piv.size());
        quotient_pivots = piv;
    }
    result.dimension = static_cast<int>(result.representatives.size());
    return result;
}

// ---------------------------------------------------------------------------
// Linear-relation membership with an explicit witness chain.
// ---------------------------------------------------------------------------

enum class Membership { member, not_member, undecided };

struct RelationResult {
    Membership status = Membership::undecided;
    std::vector<SuperPolynomial> chain; // alpha_1 .. alpha_r when member
    std::string note;
};

// Decides (alpha, beta) in d_r within the slice: searches for alpha_1..alpha_r
// in the slice satisfying omega alpha = 0, d alpha_{k-1} + omega alpha_k = 0,
// d alpha_{r-1} + omega alpha_r = beta. `not_member` certifies infeasibility
// within the bounds; inputs that do not fit the bounds give `undecided`.
inline RelationResult relation_membership(int r, const GeometricObject& alpha,
                                          const GeometricObject& beta, const GradedSlice& slice) {
    require_kind(alpha, ObjectKind::pseudodifferential_form, "relation membership");
    require_kind(beta, ObjectKind::pseudodifferential_form, "relation membership");
    if (r < 0)
        throw PreconditionError("relation membership: r must be >= 0");
    const GenSetPtr& gens = slice.chart.gens;

    if (r == 0) {
        // d_0 is the graph of multiplication by omega
        bool ok = omega_poly(gens) * alpha.body == beta.body;
        return {ok ? Membership::member : Membership::not_member, {}, ""};
    }

    auto alpha_coords = slice.coordinates(alpha.body);
    if (!alpha_coords)
        return {Membership::undecided, {}, "bounds too small: alpha not inside the slice"};

    if (!(omega_poly(gens) * alpha.body).is_zero())
        return {Membership::not_member, {}, "omega * alpha != 0"};

    // codomain: dxi degree grows by one under both d and omega
    SliceBounds cod_bounds = slice.bounds;
    cod_bounds.max_dxi_degree += 1;
    GradedSlice codomain(slice.chart, cod_bounds);

    auto omega_op = [&](const SuperPolynomial& p) { return omega_poly(gens) * p; };
    auto d_op = [&](const SuperPolynomial& p) { return de_rham_body(p); };
    linalg::Matrix w;
    linalg::Matrix d;
    try {
        w = slice.operator_matrix(codomain, omega_op, "omega");
        d = slice.operator_matrix(codomain, d_op, "d");
    } catch (const PreconditionError&) {
        return {Membership::undecided, {}, "bounds too small: slice is not closed under d/omega"};
    }

    std::size_t m = slice.basis.size();
    std::size_t rows = codomain.basis.size();
    std::size_t nr = static_cast<std::size_t>(r);
    linalg::Matrix big(nr * rows, linalg::Row(nr * m, Coefficient(0)));
    linalg::Row rhs(nr * rows, Coefficient(0));

    // block k (0-based): d alpha_k + omega alpha_{k+1} = (k == r-1 ? beta : 0)
    for (std::size_t k = 0; k < nr; ++k) {
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                big[k * rows + i][k * m + j] = w[i][j];                // omega alpha_{k+1}
                if (k > 0 && !d[i][j].is_zero())
                    big[k * rows + i][(k - 1) * m + j] = d[i][j];      // d alpha_k
            }
        }
    }
    // rhs of the first block: -d alpha
    auto d_alpha = codomain.coordinates(de_rham_body(alpha.body));
    auto beta_cod = codomain.coordinates(beta.body);
    if (!d_alpha || !beta_cod)
        return {Membership::undecided, {}, "bounds too small: derivatives leave the codomain"};
    for (std::size_t i = 0; i < rows; ++i)
        rhs[i] = -(*d_alpha)[i];
    for (std::size_t i = 0; i < rows; ++i)
        rhs[(nr - 1) * rows + i] += (*beta_cod)[i];

    linalg::Row solution;
    if (!linalg::solve(big, rhs, &solution))
        return {Membership::not_member, {}, "infeasible within the given bounds"};

    RelationResult result{Membership::member, {}, ""};
    for (std::size_t k = 0; k < nr; ++k) {
        linalg::Row coords(solution.begin() + k * m, solution.begin() + (k + 1) * m);
        result.chain.push_back(slice.element(coords));
    }
    return result;
}

} // namespace oddsym
