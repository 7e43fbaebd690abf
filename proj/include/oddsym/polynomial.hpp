#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "oddsym/coefficient.hpp"
#include "oddsym/generators.hpp"

namespace oddsym {

// One supercommutative monomial: exponents of the even generators plus a bit
// mask of odd generators, always stored sorted in the global odd order.
struct Monomial {
    std::vector<uint8_t> even; // indexed by even slot, size 2n
    uint64_t odd = 0;

    int total_degree() const {
        int d = std::popcount(odd);
        for (uint8_t e : even)
            d += e;
        return d;
    }
    bool is_constant() const {
        if (odd)
            return false;
        for (uint8_t e : even)
            if (e)
                return false;
        return true;
    }
    Parity parity() const { return static_cast<Parity>(std::popcount(odd) & 1); }

    friend bool operator==(const Monomial&, const Monomial&) = default;
};

// Sign (+1/-1) accumulated when concatenating two sorted odd masks and
// re-sorting: one transposition per out-of-order pair.
inline int odd_merge_sign(uint64_t a, uint64_t b) {
    int inversions = 0;
    uint64_t rest = b;
    while (rest) {
        int bit = std::countr_zero(rest);
        rest &= rest - 1;
        inversions += std::popcount(a >> (bit + 1) << (bit + 1)); // elements of a above `bit`
    }
    return (inversions & 1) ? -1 : 1;
}

// Graded-lexicographic term order used both for canonical printing and as the
// map comparator. Higher total degree prints first; ties break on the
// exponent sequence x1..xn, xi1..xin, dx1..dxn, dxi1..dxin, th1..tht.
struct TermOrder {
    int n = 0;
    int thetas = 0;

    bool operator()(const Monomial& a, const Monomial& b) const {
        int da = a.total_degree(), db = b.total_degree();
        if (da != db)
            return da > db;
        auto bit = [](const Monomial& m, int pos) -> int { return (m.odd >> pos) & 1; };
        for (int i = 0; i < n; ++i)
            if (a.even[i] != b.even[i])
                return a.even[i] > b.even[i];
        for (int i = 0; i < n; ++i) { // xi bits
            int pa = bit(a, thetas + i), pb = bit(b, thetas + i);
            if (pa != pb)
                return pa > pb;
        }
        for (int i = 0; i < n; ++i) { // dx bits
            int pa = bit(a, thetas + n + i), pb = bit(b, thetas + n + i);
            if (pa != pb)
                return pa > pb;
        }
        for (int i = 0; i < n; ++i)
            if (a.even[n + i] != b.even[n + i])
                return a.even[n + i] > b.even[n + i];
        for (int k = 0; k < thetas; ++k) {
            int pa = bit(a, k), pb = bit(b, k);
            if (pa != pb)
                return pa > pb;
        }
        return false;
    }
};

class SuperPolynomial;
SuperPolynomial operator*(const SuperPolynomial& a, const SuperPolynomial& b);
struct Substitution;

class SuperPolynomial {
  public:
    using TermMap = std::map<Monomial, Coefficient, TermOrder>;

    explicit SuperPolynomial(GenSetPtr gens)
        : gens_(std::move(gens)), terms_(TermOrder{gens_->n(), gens_->thetas()}) {}

    static SuperPolynomial zero(GenSetPtr gens) { return SuperPolynomial(std::move(gens)); }

    static SuperPolynomial constant(GenSetPtr gens, Coefficient c) {
        SuperPolynomial p(std::move(gens));
        if (!c.is_zero())
            p.terms_.emplace(p.unit_monomial(), std::move(c));
        return p;
    }

    static SuperPolynomial generator(GenSetPtr gens, Generator g) {
        SuperPolynomial p(gens);
        Monomial m = p.unit_monomial();
        if (parity_of(g.kind) == Parity::odd)
            m.odd = uint64_t(1) << gens->odd_bit(g);
        else
            m.even[gens->even_slot(g)] = 1;
        p.terms_.emplace(std::move(m), Coefficient(1));
        return p;
    }
    static SuperPolynomial generator(GenSetPtr gens, GenKind k, int index) {
        return generator(std::move(gens), Generator{k, index});
    }

    const GenSetPtr& gens() const { return gens_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Monomial unit_monomial() const {
        Monomial m;
        m.even.assign(gens_->num_even(), 0);
        return m;
    }

    void add_term(const Monomial& m, const Coefficient& c) {
        if (c.is_zero())
            return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        }
    }

    // -- ring structure ------------------------------------------------------

    SuperPolynomial& operator+=(const SuperPolynomial& o) {
        require_same_set(o);
        for (const auto& [m, c] : o.terms_)
            add_term(m, c);
        return *this;
    }
    SuperPolynomial& operator-=(const SuperPolynomial& o) {
        require_same_set(o);
        for (const auto& [m, c] : o.terms_)
            add_term(m, -c);
        return *this;
    }
    friend SuperPolynomial operator+(SuperPolynomial a, const SuperPolynomial& b) { return a += b; }
    friend SuperPolynomial operator-(SuperPolynomial a, const SuperPolynomial& b) { return a -= b; }
    SuperPolynomial operator-() const {
        SuperPolynomial r(gens_);
        for (const auto& [m, c] : terms_)
            r.terms_.emplace(m, -c);
        return r;
    }
    SuperPolynomial& operator*=(const SuperPolynomial& o) { return *this = *this * o; }
    SuperPolynomial& operator*=(const Coefficient& c) {
        if (c.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, v] : terms_)
            v *= c;
        return *this;
    }
    friend SuperPolynomial operator*(SuperPolynomial p, const Coefficient& c) { return p *= c; }
    friend SuperPolynomial operator*(const Coefficient& c, SuperPolynomial p) { return p *= c; }

    friend bool operator==(const SuperPolynomial& a, const SuperPolynomial& b) {
        a.require_same_set(b);
        if (a.terms_.size() != b.terms_.size())
            return false;
        auto ia = a.terms_.begin();
        auto ib = b.terms_.begin();
        for (; ia != a.terms_.end(); ++ia, ++ib)
            if (!(ia->first == ib->first) || ia->second != ib->second)
                return false;
        return true;
    }
    friend bool operator!=(const SuperPolynomial& a, const SuperPolynomial& b) { return !(a == b); }

    SuperPolynomial pow(int k) const {
        if (k < 0)
            throw PreconditionError("negative exponent");
        SuperPolynomial r = constant(gens_, 1);
        for (int j = 0; j < k; ++j)
            r *= *this;
        return r;
    }

    // -- parity --------------------------------------------------------------

    // Parity when every term agrees; nullopt for inhomogeneous (zero is even).
    std::optional<Parity> parity() const {
        if (terms_.empty())
            return Parity::even;
        Parity p = terms_.begin()->first.parity();
        for (const auto& [m, c] : terms_)
            if (m.parity() != p)
                return std::nullopt;
        return p;
    }
    bool is_even() const { return parity() == Parity::even; }
    bool is_odd() const { return parity() == Parity::odd; }

    Parity parity_or_throw(const char* what) const {
        auto p = parity();
        if (!p)
            throw PreconditionError(std::string(what) + ": parity-inhomogeneous input");
        return *p;
    }

    // True when every monomial carries at least one odd generator (whence the
    // element is nilpotent in the finitely generated Grassmann algebra).
    bool is_nilpotent() const {
        for (const auto& [m, c] : terms_)
            if (m.odd == 0)
                return false;
        return true;
    }

    Coefficient constant_term() const {
        if (terms_.empty())
            return Coefficient(0);
        auto it = terms_.find(unit_monomial());
        return it == terms_.end() ? Coefficient(0) : it->second;
    }

    bool depends_on(GenKind kind) const {
        for (const auto& [m, c] : terms_) {
            switch (kind) {
            case GenKind::x:
                for (int i = 0; i < gens_->n(); ++i)
                    if (m.even[i])
                        return true;
                break;
            case GenKind::dxi:
                for (int i = 0; i < gens_->n(); ++i)
                    if (m.even[gens_->n() + i])
                        return true;
                break;
            case GenKind::th:
                if (m.odd & gens_->theta_mask())
                    return true;
                break;
            case GenKind::xi:
                if (m.odd & gens_->xi_mask())
                    return true;
                break;
            case GenKind::dx:
                if (m.odd & gens_->dx_mask())
                    return true;
                break;
            }
        }
        return false;
    }

    // -- calculus ------------------------------------------------------------

    // Left derivative with respect to g: for odd g the generator is moved to
    // the front of the monomial (one sign per transposition) and removed; for
    // even g the usual power rule applies.
    SuperPolynomial derive(Generator g) const {
        if (!gens_->contains(g))
            throw PreconditionError("derive: generator " + std::string(prefix_of(g.kind)) +
                                    std::to_string(g.index) + " not in set");
        SuperPolynomial r(gens_);
        if (parity_of(g.kind) == Parity::odd) {
            int bit = gens_->odd_bit(g);
            uint64_t gmask = uint64_t(1) << bit;
            for (const auto& [m, c] : terms_) {
                if (!(m.odd & gmask))
                    continue;
                Monomial d = m;
                d.odd &= ~gmask;
                int below = std::popcount(m.odd & (gmask - 1));
                r.add_term(d, (below & 1) ? -c : c);
            }
        } else {
            int slot = gens_->even_slot(g);
            for (const auto& [m, c] : terms_) {
                if (m.even[slot] == 0)
                    continue;
                Monomial d = m;
                d.even[slot] -= 1;
                r.add_term(d, c * Coefficient(int(m.even[slot])));
            }
        }
        return r;
    }
    SuperPolynomial derive(GenKind k, int index) const { return derive(Generator{k, index}); }

    // Substitution as a parity-preserving ring homomorphism.
    SuperPolynomial substitute(const Substitution& sub) const;

    // Berezin integral over the listed odd generators: the coefficient of the
    // ordered product g1...gk, normalised so that the integral of that product
    // is 1; terms missing any listed generator integrate to zero.
    SuperPolynomial berezin_integral(const std::vector<Generator>& listed) const {
        uint64_t lmask = 0;
        std::vector<int> lbits;
        lbits.reserve(listed.size());
        for (Generator g : listed) {
            if (gens_->parity(g) == Parity::even)
                throw PreconditionError("berezin_integral: even generator " + gens_->name(g));
            int bit = gens_->odd_bit(g);
            if (lmask & (uint64_t(1) << bit))
                throw PreconditionError("berezin_integral: repeated generator " + gens_->name(g));
            lmask |= uint64_t(1) << bit;
            lbits.push_back(bit);
        }
        SuperPolynomial r(gens_);
        for (const auto& [m, c] : terms_) {
            if ((m.odd & lmask) != lmask)
                continue;
            uint64_t rest = m.odd & ~lmask;
            // Parity of the permutation sorting (listed..., rest sorted).
            int inversions = 0;
            for (std::size_t p = 0; p < lbits.size(); ++p) {
                for (std::size_t q = p + 1; q < lbits.size(); ++q)
                    if (lbits[p] > lbits[q])
                        ++inversions;
                inversions += std::popcount(rest & ((uint64_t(1) << lbits[p]) - 1));
            }
            Monomial d = m;
            d.odd = rest;
            r.add_term(d, (inversions & 1) ? -c : c);
        }
        return r;
    }

    void require_same_set(const SuperPolynomial& o) const {
        if (gens_ != o.gens_ && !gens_->same_structure(*o.gens_))
            throw PreconditionError("mismatched generator sets");
    }

  private:
    GenSetPtr gens_;
    TermMap terms_;
};

// A substitution sending selected generators to polynomials (of the same
// parity); generators without an image are kept fixed.
struct Substitution {
    GenSetPtr gens;
    std::vector<std::optional<SuperPolynomial>> images; // by unified generator id

    explicit Substitution(GenSetPtr g) : gens(std::move(g)), images(gens->num_ids()) {}

    void set(Generator g, SuperPolynomial image) {
        if (!gens->contains(g))
            throw PreconditionError("substitution: unknown generator " +
                                    std::string(prefix_of(g.kind)) + std::to_string(g.index));
        auto p = image.parity();
        if (!image.is_zero() && (!p || *p != parity_of(g.kind)))
            throw PreconditionError("substitution: parity mismatch for " + gens->name(g));
        images[gens->id(g)] = std::move(image);
    }

    const SuperPolynomial* find(Generator g) const {
        const auto& slot = images[gens->id(g)];
        return slot ? &*slot : nullptr;
    }
};

inline SuperPolynomial SuperPolynomial::substitute(const Substitution& sub) const {
    if (!gens_->same_structure(*sub.gens))
        throw PreconditionError("substitute: generator set mismatch");
    SuperPolynomial result(sub.gens);
    std::map<std::pair<int, int>, SuperPolynomial> pow_cache;
    for (const auto& [m, c] : terms_) {
        SuperPolynomial term = SuperPolynomial::constant(sub.gens, c);
        for (int slot = 0; slot < gens_->num_even(); ++slot) {
            int e = m.even[slot];
            if (!e)
                continue;
            Generator g = gens_->even_slot_generator(slot);
            if (const SuperPolynomial* img = sub.find(g)) {
                auto key = std::make_pair(gens_->id(g), e);
                auto it = pow_cache.find(key);
                if (it == pow_cache.end())
                    it = pow_cache.emplace(key, img->pow(e)).first;
                term *= it->second;
            } else {
                term *= SuperPolynomial::generator(sub.gens, g);
                for (int j = 1; j < e; ++j)
                    term *= SuperPolynomial::generator(sub.gens, g);
            }
        }
        uint64_t rest = m.odd;
        while (rest) {
            int bit = std::countr_zero(rest);
            rest &= rest - 1;
            Generator g = gens_->odd_bit_generator(bit);
            if (const SuperPolynomial* img = sub.find(g)) {
                term *= *img;
            } else {
                term *= SuperPolynomial::generator(sub.gens, g);
            }
        }
        result += term;
    }
    return result;
}

inline SuperPolynomial operator*(const SuperPolynomial& a, const SuperPolynomial& b) {
    a.require_same_set(b);
    SuperPolynomial r(a.gens());
    const int ne = a.gens()->num_even();
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            if (ma.odd & mb.odd)
                continue; // repeated odd generator
            Monomial m;
            m.even.resize(ne);
            for (int s = 0; s < ne; ++s) {
                int e = int(ma.even[s]) + int(mb.even[s]);
                if (e > 255)
                    throw PreconditionError("polynomial degree exceeds the supported bound");
                m.even[s] = static_cast<uint8_t>(e);
            }
            m.odd = ma.odd | mb.odd;
            Coefficient c = ca * cb;
            if (odd_merge_sign(ma.odd, mb.odd) < 0)
                c = -c;
            r.add_term(m, c);
        }
    }
    return r;
}

// exp of a nilpotent element (constant term must vanish); the series is
// summed until a power vanishes exactly.
inline SuperPolynomial exp_nilpotent(const SuperPolynomial& p) {
    if (!p.constant_term().is_zero() || !p.is_nilpotent())
        throw PreconditionError("exp: argument is not nilpotent");
    SuperPolynomial result = SuperPolynomial::constant(p.gens(), 1);
    SuperPolynomial power = result;
    Rational factorial(1);
    int bound = p.gens()->num_odd() + 2;
    for (int k = 1; k <= bound; ++k) {
        power *= p;
        if (power.is_zero())
            return result;
        factorial *= k;
        result += power * Coefficient(Rational(1) / factorial);
    }
    throw PreconditionError("exp: series did not terminate");
}

// Inverse of an even element c*(1 + nilpotent) via the terminating Neumann
// series; rejects anything whose non-constant part is not nilpotent.
inline SuperPolynomial invert_even(const SuperPolynomial& p) {
    if (!p.is_even())
        throw PreconditionError("invert: element is not even");
    Coefficient c = p.constant_term();
    if (c.is_zero())
        throw PreconditionError("invert: singular body (zero constant term)");
    SuperPolynomial v = p - SuperPolynomial::constant(p.gens(), c);
    if (!v.is_nilpotent())
        throw PreconditionError("invert: non-nilpotent part is not invertible in the polynomial ring");
    Coefficient cinv = c.inverse();
    SuperPolynomial result = SuperPolynomial::constant(p.gens(), cinv);
    SuperPolynomial power = SuperPolynomial::constant(p.gens(), 1);
    SuperPolynomial step = v * (-cinv);
    int bound = p.gens()->num_odd() + 2;
    for (int k = 1; k <= bound; ++k) {
        power *= step;
        if (power.is_zero())
            return result;
        result += power * cinv;
    }
    throw PreconditionError("invert: series did not terminate");
}

} // namespace oddsym
