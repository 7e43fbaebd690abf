#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "oddsym/error.hpp"

namespace oddsym {

enum class Parity : int { even = 0, odd = 1 };

inline Parity operator+(Parity a, Parity b) {
    return static_cast<Parity>((static_cast<int>(a) + static_cast<int>(b)) & 1);
}

// The five variable kinds on (and over) Pi T*M with an ordinary base:
//   x    base coordinate        (even)
//   xi   fiber coordinate x*    (odd)
//   dx   differential of x      (odd)
//   dxi  differential of xi     (even)
//   th   auxiliary odd constant (odd)
enum class GenKind : int { x = 0, xi = 1, dx = 2, dxi = 3, th = 4 };

inline Parity parity_of(GenKind k) {
    switch (k) {
    case GenKind::x:
    case GenKind::dxi:
        return Parity::even;
    default:
        return Parity::odd;
    }
}

inline const char* prefix_of(GenKind k) {
    switch (k) {
    case GenKind::x:
        return "x";
    case GenKind::xi:
        return "xi";
    case GenKind::dx:
        return "dx";
    case GenKind::dxi:
        return "dxi";
    default:
        return "th";
    }
}

struct Generator {
    GenKind kind;
    int index; // 1-based

    friend bool operator==(const Generator&, const Generator&) = default;
};

// The generator universe for a Darboux chart on Pi T*R^n together with
// `thetas` auxiliary odd constants.
//
// Unified ids enumerate x1..xn, xi1..xin, dx1..dxn, dxi1..dxin, th1..tht.
// Odd generators additionally carry a bit position in the global odd order
// th < xi < dx (each ascending by index); monomials store their odd part as
// a bit mask sorted by that order.
class GeneratorSet {
  public:
    static std::shared_ptr<const GeneratorSet> make(int n, int thetas) {
        if (n < 1)
            throw PreconditionError("generator set needs n >= 1");
        if (thetas < 0 || thetas + 2 * n > 64)
            throw PreconditionError("unsupported generator count (need thetas + 2n <= 64)");
        return std::shared_ptr<const GeneratorSet>(new GeneratorSet(n, thetas));
    }

    int n() const { return n_; }
    int thetas() const { return thetas_; }
    int num_even() const { return 2 * n_; }   // x's then dxi's
    int num_odd() const { return thetas_ + 2 * n_; }
    int num_ids() const { return 4 * n_ + thetas_; }

    bool same_structure(const GeneratorSet& o) const {
        return n_ == o.n_ && thetas_ == o.thetas_;
    }

    bool contains(Generator g) const {
        int lim = (g.kind == GenKind::th) ? thetas_ : n_;
        return g.index >= 1 && g.index <= lim;
    }

    int id(Generator g) const {
        check(g);
        int base = 0;
        switch (g.kind) {
        case GenKind::x: base = 0; break;
        case GenKind::xi: base = n_; break;
        case GenKind::dx: base = 2 * n_; break;
        case GenKind::dxi: base = 3 * n_; break;
        case GenKind::th: base = 4 * n_; break;
        }
        return base + g.index - 1;
    }

    Generator generator(int id) const {
        if (id < 0 || id >= num_ids())
            throw PreconditionError("generator id out of range");
        if (id < n_) return {GenKind::x, id + 1};
        if (id < 2 * n_) return {GenKind::xi, id - n_ + 1};
        if (id < 3 * n_) return {GenKind::dx, id - 2 * n_ + 1};
        if (id < 4 * n_) return {GenKind::dxi, id - 3 * n_ + 1};
        return {GenKind::th, id - 4 * n_ + 1};
    }

    Parity parity(Generator g) const { return parity_of(g.kind); }

    // Slot of an even generator in a monomial's exponent vector: x_i -> i-1,
    // dxi_i -> n + i-1.
    int even_slot(Generator g) const {
        check(g);
        if (g.kind == GenKind::x) return g.index - 1;
        if (g.kind == GenKind::dxi) return n_ + g.index - 1;
        throw PreconditionError("not an even generator");
    }
    Generator even_slot_generator(int slot) const {
        if (slot < n_) return {GenKind::x, slot + 1};
        return {GenKind::dxi, slot - n_ + 1};
    }

    // Bit of an odd generator in the global odd order th < xi < dx.
    int odd_bit(Generator g) const {
        check(g);
        switch (g.kind) {
        case GenKind::th: return g.index - 1;
        case GenKind::xi: return thetas_ + g.index - 1;
        case GenKind::dx: return thetas_ + n_ + g.index - 1;
        default: throw PreconditionError("not an odd generator");
        }
    }
    Generator odd_bit_generator(int bit) const {
        if (bit < thetas_) return {GenKind::th, bit + 1};
        if (bit < thetas_ + n_) return {GenKind::xi, bit - thetas_ + 1};
        return {GenKind::dx, bit - thetas_ - n_ + 1};
    }

    uint64_t theta_mask() const { return thetas_ ? ((uint64_t(1) << thetas_) - 1) : 0; }
    uint64_t xi_mask() const { return ((uint64_t(1) << n_) - 1) << thetas_; }
    uint64_t dx_mask() const { return ((uint64_t(1) << n_) - 1) << (thetas_ + n_); }

    std::string name(Generator g) const {
        check(g);
        return std::string(prefix_of(g.kind)) + std::to_string(g.index);
    }

  private:
    GeneratorSet(int n, int thetas) : n_(n), thetas_(thetas) {}
    void check(Generator g) const {
        if (!contains(g))
            throw PreconditionError(std::string("generator ") + prefix_of(g.kind) +
                                    std::to_string(g.index) + " not in set");
    }

    int n_;
    int thetas_;
};

using GenSetPtr = std::shared_ptr<const GeneratorSet>;

} // namespace oddsym
