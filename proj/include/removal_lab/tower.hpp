// Symbolic values for the theoretical constants: iterated exponentials
// 2^(2^(...^r)) far beyond any numeric type, with exact comparisons against
// each other and against rationals.
#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "removal_lab/errors.hpp"
#include "removal_lab/rational.hpp"

namespace removal_lab {

class TowerExpr {
public:
    static TowerExpr rational(Rat r) { return TowerExpr(Node::rational(std::move(r))); }
    static TowerExpr exp2(TowerExpr x) { return TowerExpr(Node::exp2(x.node_)); }
    static TowerExpr negate(TowerExpr x) { return TowerExpr(Node::neg(x.node_)); }

    // 2^2^...^2 with `height` twos; height 0 is 1.
    static TowerExpr tower_of_twos(long long height) {
        if (height < 0) throw PreconditionError("tower: negative height");
        TowerExpr t = rational(Rat(1));
        for (long long i = 0; i < height; ++i) t = exp2(t);
        return t;
    }

    TowerExpr reciprocal() const {
        if (node_->kind == Kind::rational) {
            if (node_->value == 0) throw PreconditionError("tower: reciprocal of zero");
            return rational(Rat(1) / node_->value);
        }
        if (node_->kind == Kind::exp2) return TowerExpr(Node::exp2(Node::neg(node_->child)));
        throw PreconditionError("tower: reciprocal of a negated value");
    }

    // -1 / 0 / +1 comparing real values; exact for every pair whose decision
    // fits the materialization caps (far beyond anything desk scale emits).
    static int compare(const TowerExpr& a, const TowerExpr& b) {
        return cmp(a.node_, b.node_);
    }

    bool operator<(const TowerExpr& o) const { return compare(*this, o) < 0; }
    bool operator==(const TowerExpr& o) const { return compare(*this, o) == 0; }
    bool operator<=(const TowerExpr& o) const { return compare(*this, o) <= 0; }

    // Exact rational value when representable within the bit cap.
    std::optional<Rat> as_rational(long long bit_cap = 1 << 20) const {
        return materialize(node_, bit_cap);
    }

    // For 2^x forms, the exponent x (exact) when x is rational.
    std::optional<Rat> exp2_argument() const {
        if (node_->kind != Kind::exp2) return std::nullopt;
        return materialize(node_->child, 1 << 20);
    }

    // Number of 2^ layers above the innermost rational; nullopt when a
    // negation sits between layers (reciprocal forms report their magnitude).
    struct Shape {
        bool reciprocal = false;
        long long depth = 0;
        Rat top;
    };
    std::optional<Shape> shape() const {
        Shape s;
        NodePtr cur = node_;
        if (cur->kind == Kind::exp2 && cur->child->kind == Kind::neg) {
            s.reciprocal = true;
            cur = Node::exp2(cur->child->child);
        }
        while (cur->kind == Kind::exp2) {
            ++s.depth;
            cur = cur->child;
        }
        if (cur->kind != Kind::rational) return std::nullopt;
        s.top = cur->value;
        return s;
    }

    double log2_estimate() const { return log2_est(node_); }

private:
    enum class Kind { rational, exp2, neg };
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    struct Node {
        Kind kind;
        Rat value;      // rational only
        NodePtr child;  // exp2 / neg

        static NodePtr rational(Rat r) {
            auto n = std::make_shared<Node>();
            n->kind = Kind::rational;
            n->value = std::move(r);
            return n;
        }
        static NodePtr exp2(NodePtr c) {
            auto n = std::make_shared<Node>();
            n->kind = Kind::exp2;
            n->child = std::move(c);
            return n;
        }
        static NodePtr neg(NodePtr c) {
            if (c->kind == Kind::neg) return c->child;
            if (c->kind == Kind::rational) return rational(-c->value);
            auto n = std::make_shared<Node>();
            n->kind = Kind::neg;
            n->child = std::move(c);
            return n;
        }
    };

    explicit TowerExpr(NodePtr n) : node_(std::move(n)) {}

    static int sign(const NodePtr& n) {
        switch (n->kind) {
            case Kind::rational:
                return n->value == 0 ? 0 : (n->value > 0 ? 1 : -1);
            case Kind::exp2:
                return 1;
            case Kind::neg:
                return -sign(n->child);
        }
        return 0;
    }

    static std::optional<Rat> materialize(const NodePtr& n, long long bit_cap) {
        switch (n->kind) {
            case Kind::rational:
                return n->value;
            case Kind::neg: {
                auto r = materialize(n->child, bit_cap);
                if (!r) return std::nullopt;
                return -*r;
            }
            case Kind::exp2: {
                auto r = materialize(n->child, bit_cap);
                if (!r) return std::nullopt;
                if (rat_den(*r) != 1) return std::nullopt;  // irrational power
                BigInt p = rat_num(*r);
                if (p > bit_cap || p < -bit_cap) return std::nullopt;
                auto e = p.convert_to<long long>();
                if (e >= 0) return Rat(BigInt(1) << static_cast<unsigned>(e), 1);
                return Rat(1, BigInt(1) << static_cast<unsigned>(-e));
            }
        }
        return std::nullopt;
    }

    // Saturating integer bounds lo <= value <= hi; the flags mark +-infinity.
    struct Bounds {
        BigInt lo, hi;
        bool lo_inf = false, hi_inf = false;
    };

    static Bounds int_bounds(const NodePtr& n) {
        constexpr long long kShiftCap = 4096;
        switch (n->kind) {
            case Kind::rational: {
                BigInt num = rat_num(n->value), den = rat_den(n->value);
                BigInt q = num / den;
                BigInt lo = (q * den > num) ? q - 1 : q;
                BigInt hi = (lo * den == num) ? lo : lo + 1;
                return Bounds{lo, hi, false, false};
            }
            case Kind::neg: {
                Bounds b = int_bounds(n->child);
                return Bounds{-b.hi, -b.lo, b.hi_inf, b.lo_inf};
            }
            case Kind::exp2: {
                Bounds e = int_bounds(n->child);
                Bounds out;
                if (e.lo_inf || e.lo < 0) {
                    out.lo = 0;
                } else if (e.lo > kShiftCap) {
                    out.lo = BigInt(1) << kShiftCap;
                    out.lo_inf = false;  // a floor, still valid as a lower bound
                } else {
                    out.lo = BigInt(1) << e.lo.convert_to<unsigned>();
                }
                if (e.hi_inf || e.hi > kShiftCap) {
                    out.hi_inf = true;
                } else if (e.hi < 0) {
                    out.hi = 1;
                } else {
                    out.hi = BigInt(1) << e.hi.convert_to<unsigned>();
                }
                return out;
            }
        }
        return {};
    }

    // Compare rational r (> 0) against 2^x.
    static int cmp_rat_vs_exp2(const Rat& r, const NodePtr& x) {
        long long fl = floor_log2(r);
        bool exact_pow = (fl >= 0 ? r == Rat(BigInt(1) << static_cast<unsigned>(fl), 1)
                                  : r == Rat(1, BigInt(1) << static_cast<unsigned>(-fl)));
        // log2 r lies in [fl, fl+1), equal to fl only in the exact case.
        int lo_cmp = cmp(Node::rational(Rat(fl)), x);
        if (exact_pow) return lo_cmp;  // log2 r == fl exactly
        int hi_cmp = cmp(Node::rational(Rat(fl + 1)), x);
        if (hi_cmp <= 0) return -1;  // x >= fl+1 > log2 r
        if (lo_cmp >= 0) return 1;   // x <= fl < log2 r
        // fl < x < fl+1: x materializes to a small rational p/q.
        auto xv = materialize(x, 1 << 20);
        if (!xv) throw std::logic_error("tower: comparison beyond materialization cap");
        BigInt p = rat_num(*xv), q = rat_den(*xv);
        if (q > 65536) throw std::logic_error("tower: comparison beyond exponent cap");
        // r ? 2^{p/q}  <=>  r^q ? 2^p
        unsigned qe = q.convert_to<unsigned>();
        Rat rq = rat_pow(r, qe);
        Rat pow = p >= 0 ? Rat(BigInt(1) << p.convert_to<unsigned>(), 1)
                         : Rat(1, BigInt(1) << (-p).convert_to<unsigned>());
        if (rq == pow) return 0;
        return rq < pow ? -1 : 1;
    }

    static int cmp(const NodePtr& a, const NodePtr& b) {
        int sa = sign(a), sb = sign(b);
        if (sa != sb) return sa < sb ? -1 : 1;
        if (sa == 0) return 0;
        if (sa < 0) return cmp(Node::neg(b), Node::neg(a));

        // Both strictly positive; neg-kind nodes simplify away for positive
        // values, leaving rational and exp2 only.
        const NodePtr& x = a;
        const NodePtr& y = b;
        if (x->kind == Kind::neg || y->kind == Kind::neg)
            throw std::logic_error("tower: unsimplified negation");
        if (x->kind == Kind::rational && y->kind == Kind::rational)
            return x->value == y->value ? 0 : (x->value < y->value ? -1 : 1);
        if (x->kind == Kind::exp2 && y->kind == Kind::exp2) return cmp(x->child, y->child);
        if (x->kind == Kind::rational) return cmp_rat_vs_exp2(x->value, y->child);
        return -cmp_rat_vs_exp2(y->value, x->child);
    }

    static double log2_est(const NodePtr& n) {
        switch (n->kind) {
            case Kind::rational:
                return n->value > 0 ? std::log2(rat_to_double(n->value)) : -1e308;
            case Kind::neg:
                return -log2_est(n->child);  // only meaningful as an exponent
            case Kind::exp2: {
                auto inner = materialize(n->child, 60);
                if (inner) return rat_to_double(*inner);
                return 1e308;
            }
        }
        return 0;
    }

    NodePtr node_;
};

struct TheoreticalConstants {
    TowerExpr d_h = TowerExpr::rational(Rat(0));
    TowerExpr t = TowerExpr::rational(Rat(0));
    TowerExpr s = TowerExpr::rational(Rat(0));
    TowerExpr gamma_floor = TowerExpr::rational(Rat(0));
    long long tower_height = 0;
    TowerExpr delta = TowerExpr::rational(Rat(0));
};

// d_h = 2^{-(2/alpha)^{h^2}}, t = 2^{1/d_h}, s = 2^{2^{(50/eps)^{h^2}}}
// (with eps standing in for eps_0), gamma >= 2^{-(2/alpha)^{h^2-h+1}},
// delta^{-1} a tower of twos of height 5 h^4 log(1/eps) (natural log; the
// height is the nearest integer).
inline TheoreticalConstants theoretical_constants(int h, const Rat& eps, const Rat& alpha) {
    if (h < 2) throw PreconditionError("theoretical constants: h >= 2 required");
    if (alpha <= 0 || alpha >= Rat(1, 4))
        throw PreconditionError("theoretical constants: alpha must lie in (0, 1/4)");
    if (eps <= 0) throw PreconditionError("theoretical constants: eps must be positive");

    unsigned h2 = static_cast<unsigned>(h) * static_cast<unsigned>(h);
    Rat e_dh = rat_pow(Rat(2) / alpha, h2);
    Rat e_gamma = rat_pow(Rat(2) / alpha, h2 - static_cast<unsigned>(h) + 1);
    Rat e_s = rat_pow(Rat(50) / eps, h2);

    TheoreticalConstants out;
    out.d_h = TowerExpr::exp2(TowerExpr::rational(-e_dh));
    out.t = TowerExpr::exp2(TowerExpr::exp2(TowerExpr::rational(e_dh)));
    out.s = TowerExpr::exp2(TowerExpr::exp2(TowerExpr::rational(e_s)));
    out.gamma_floor = TowerExpr::exp2(TowerExpr::rational(-e_gamma));

    double height = 5.0 * std::pow(static_cast<double>(h), 4) *
                    std::log(1.0 / rat_to_double(eps));
    out.tower_height = std::max<long long>(0, std::llround(height));
    out.delta = TowerExpr::tower_of_twos(out.tower_height).reciprocal();
    return out;
}

// compare r against 2^{-e} exactly (helper for the band case below).
inline int cmp_rat_exp2_neg(const Rat& r, const Rat& e) {
    TowerExpr lhs = TowerExpr::rational(r);
    TowerExpr rhs = TowerExpr::exp2(TowerExpr::rational(-e));
    return TowerExpr::compare(lhs, rhs);
}

// Lemma-style admission check: delta <= 2^{-(40/eps0)^{h^2}} * T^{-h}, decided
// exactly through integer log bounds (T = current part count).
inline bool copy_bound_admits(const TowerExpr& delta, const Rat& eps0, int h, long long parts) {
    if (parts < 1) throw PreconditionError("copy bound: part count must be positive");
    Rat e = rat_pow(Rat(40) / eps0, static_cast<unsigned>(h) * static_cast<unsigned>(h));
    // Condition: delta * parts^h <= 2^{-e}. Bound log2(parts^h) between
    // h*floor and h*ceil of log2(parts).
    Rat parts_r(parts);
    long long fl = floor_log2(parts_r);
    bool exact_pow = parts_r == Rat(BigInt(1) << static_cast<unsigned>(fl), 1);
    Rat log_hi = Rat(h) * Rat(exact_pow ? fl : fl + 1);
    Rat log_lo = Rat(h) * Rat(fl);
    TowerExpr sufficient = TowerExpr::exp2(TowerExpr::rational(-e - log_hi));
    TowerExpr necessary = TowerExpr::exp2(TowerExpr::rational(-e - log_lo));
    if (TowerExpr::compare(delta, sufficient) <= 0) return true;
    if (TowerExpr::compare(delta, necessary) > 0) return false;
    // Narrow band: compare exactly via delta's rational value if available.
    auto dv = delta.as_rational();
    auto sv = sufficient.as_rational();
    if (dv && sv) {
        BigInt th = 1;
        for (int i = 0; i < h; ++i) th *= parts;
        // delta * parts^h <= 2^{-e}, with 2^{-e} compared via rat power.
        Rat lhs = *dv * Rat(th);
        return cmp_rat_exp2_neg(lhs, e) <= 0;
    }
    throw std::logic_error("copy bound: undecided at materialization cap");
}

}  // namespace removal_lab
