#pragma once

#include <string>
#include <utility>

#include "oddsym/polynomial.hpp"

namespace oddsym {

// A named Darboux chart on Pi T*R^n (the symplectic form is always
// omega = sum dx^i dxi_i by convention) plus auxiliary odd constants.
struct Chart {
    std::string name;
    GenSetPtr gens;

    int n() const { return gens->n(); }
    int thetas() const { return gens->thetas(); }

    friend bool operator==(const Chart& a, const Chart& b) {
        return a.name == b.name && a.gens->same_structure(*b.gens);
    }
};

inline Chart make_chart(std::string name, int n, int thetas) {
    return Chart{std::move(name), GeneratorSet::make(n, thetas)};
}

enum class ObjectKind {
    multivector_field,   // function of x, xi, th
    multivector_density, // coefficient of Dx == half-density on Pi T*M
    pseudodifferential_form,
    volume_form, // invertible even coefficient of D(x, xi)
};

inline const char* kind_name(ObjectKind k) {
    switch (k) {
    case ObjectKind::multivector_field: return "multivector-field";
    case ObjectKind::multivector_density: return "multivector-density";
    case ObjectKind::pseudodifferential_form: return "form";
    default: return "volume-form";
    }
}

struct GeometricObject {
    Chart chart;
    ObjectKind kind;
    SuperPolynomial body;
};

namespace detail {
inline void require_coordinate_body(const SuperPolynomial& body, const char* what) {
    if (body.depends_on(GenKind::dx) || body.depends_on(GenKind::dxi))
        throw PreconditionError(std::string(what) + ": body must not involve differentials");
}
} // namespace detail

inline GeometricObject make_field(Chart chart, SuperPolynomial body) {
    detail::require_coordinate_body(body, "multivector-field");
    return {std::move(chart), ObjectKind::multivector_field, std::move(body)};
}

inline GeometricObject make_density(Chart chart, SuperPolynomial body) {
    detail::require_coordinate_body(body, "multivector-density");
    return {std::move(chart), ObjectKind::multivector_density, std::move(body)};
}

inline GeometricObject make_form(Chart chart, SuperPolynomial body) {
    return {std::move(chart), ObjectKind::pseudodifferential_form, std::move(body)};
}

inline GeometricObject make_volume(Chart chart, SuperPolynomial body) {
    detail::require_coordinate_body(body, "volume-form");
    if (!body.is_even())
        throw PreconditionError("volume-form: body must be even");
    if (body.constant_term().is_zero() ||
        !(body - SuperPolynomial::constant(body.gens(), body.constant_term())).is_nilpotent())
        throw PreconditionError("volume-form: body is not invertible");
    return {std::move(chart), ObjectKind::volume_form, std::move(body)};
}

inline void require_kind(const GeometricObject& obj, ObjectKind k, const char* op) {
    if (obj.kind != k)
        throw PreconditionError(std::string(op) + ": expected a " + kind_name(k) + ", got " +
                                kind_name(obj.kind));
}

} // namespace oddsym
