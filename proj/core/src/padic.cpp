#include "whittaker/padic.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace whittaker {

namespace {
const Rational kInfinite(std::int64_t{1} << 40);
}

// ---------------------------------------------------------------- descriptor

FieldDescriptor FieldDescriptor::parse(const std::string& text, int precision) {
    FieldDescriptor d;
    d.precision = precision;
    std::stringstream ss(text);
    std::string tok;
    int idx = 0;
    while (std::getline(ss, tok, ',')) {
        tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
        if (tok.empty()) continue;
        if (idx == 0) {
            d.p = std::stoll(tok);
        } else if (tok == "ram" || tok == "ramified") {
            d.ramified = true;
        } else {
            d.unramified = std::stoll(tok);
        }
        ++idx;
    }
    if (d.p == 2) throw DomainError("residue_characteristic_two", "p = 2 is not supported");
    if (d.p < 3) throw DomainError("bad_prime", "field descriptor needs an odd prime p");
    if (precision < 1) throw DomainError("bad_precision", "precision must be positive");
    return d;
}

std::string FieldDescriptor::str() const {
    std::string s = std::to_string(p);
    if (unramified) s += "," + std::to_string(*unramified);
    if (ramified) s += ",ram";
    return s;
}

// ---------------------------------------------------------------- residue field

ResidueField::ResidueField(std::int64_t p, std::optional<std::int64_t> u)
    : p_(p), quad_(u.has_value()) {
    if (u) u_ = md(*u);
}

Residue ResidueField::add(Residue x, Residue y) const { return {md(x.a + y.a), md(x.b + y.b)}; }
Residue ResidueField::sub(Residue x, Residue y) const { return {md(x.a - y.a), md(x.b - y.b)}; }
Residue ResidueField::neg(Residue x) const { return {md(-x.a), md(-x.b)}; }
Residue ResidueField::from_int(std::int64_t v) const { return {md(v), 0}; }

Residue ResidueField::mul(Residue x, Residue y) const {
    if (!quad_) return {md(x.a * y.a), 0};
    std::int64_t a = md(x.a * y.a + md(x.b * y.b) * u_);
    std::int64_t b = md(x.a * y.b + x.b * y.a);
    return {a, b};
}

Residue ResidueField::pow(Residue x, std::uint64_t e) const {
    Residue r{1, 0};
    while (e) {
        if (e & 1) r = mul(r, x);
        x = mul(x, x);
        e >>= 1;
    }
    return r;
}

Residue ResidueField::inv(Residue x) const {
    if (is_zero(x)) throw DomainError("division_by_zero", "inverse of zero residue");
    return pow(x, static_cast<std::uint64_t>(size() - 2));
}

bool ResidueField::is_square(Residue x) const {
    if (is_zero(x)) return true;
    return pow(x, static_cast<std::uint64_t>((size() - 1) / 2)) == Residue{1, 0};
}

Residue ResidueField::element(std::int64_t index) const {
    return {index % p_, quad_ ? index / p_ : 0};
}

std::optional<Residue> ResidueField::sqrt(Residue x) const {
    if (is_zero(x)) return x;
    if (!is_square(x)) return std::nullopt;
    // Tonelli-Shanks in the cyclic group of order size-1.
    std::uint64_t q = static_cast<std::uint64_t>(size() - 1);
    unsigned s = 0;
    while ((q & 1) == 0) { q >>= 1; ++s; }
    Residue z{};
    for (std::int64_t i = 1; i < size(); ++i) {
        z = element(i);
        if (!is_square(z)) break;
    }
    Residue c = pow(z, q);
    Residue r = pow(x, (q + 1) / 2);
    Residue t = pow(x, q);
    unsigned m = s;
    const Residue one{1, 0};
    while (!(t == one)) {
        unsigned i = 0;
        Residue tt = t;
        while (!(tt == one)) { tt = mul(tt, tt); ++i; }
        Residue b = c;
        for (unsigned j = 0; j + i + 1 < m; ++j) b = mul(b, b);
        r = mul(r, b);
        c = mul(b, b);
        t = mul(t, c);
        m = i;
    }
    return r;
}

std::string ResidueField::str(Residue x) const {
    if (!quad_ || x.b == 0) return std::to_string(x.a);
    std::string s;
    if (x.a != 0) s = std::to_string(x.a) + " + ";
    s += (x.b == 1 ? std::string() : std::to_string(x.b) + "*") + "s";
    return s;
}

// ---------------------------------------------------------------- context

namespace detail {

using IVec = std::array<mpz_class, 4>;

struct FieldContext {
    FieldDescriptor desc;
    int e = 1;
    std::int64_t cap = 0;  // relative precision cap in uniformizer units
    bool has_s = false;
    bool has_t = false;
    mpz_class p;
    mpz_class u;
    std::vector<mpz_class> powers;
    ResidueField rf;

    explicit FieldContext(const FieldDescriptor& d)
        : desc(d), rf(d.p, d.unramified) {
        e = d.ramification();
        cap = static_cast<std::int64_t>(e) * d.precision;
        has_s = d.unramified.has_value();
        has_t = d.ramified;
        p = d.p;
        u = d.unramified.value_or(0);
        std::int64_t limit = 4 * (cap / e) + 16;
        powers.resize(static_cast<std::size_t>(limit));
        powers[0] = 1;
        for (std::size_t i = 1; i < powers.size(); ++i) powers[i] = powers[i - 1] * p;
    }

    mpz_class pw(std::int64_t k) const {
        if (k < 0) k = 0;
        if (static_cast<std::size_t>(k) < powers.size()) return powers[static_cast<std::size_t>(k)];
        mpz_class r;
        mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(k));
        return r;
    }

    std::int64_t vp(const mpz_class& v) const {
        if (v == 0) return -1;
        if (mpz_divisible_p(v.get_mpz_t(), p.get_mpz_t()) == 0) return 0;
        mpz_class t;
        return static_cast<std::int64_t>(mpz_remove(t.get_mpz_t(), v.get_mpz_t(), p.get_mpz_t()));
    }

    // reduce modulo pi^r
    void reduce(IVec& x, std::int64_t r) const {
        if (e == 1) {
            const mpz_class m = pw(r);
            mpz_fdiv_r(x[0].get_mpz_t(), x[0].get_mpz_t(), m.get_mpz_t());
            if (has_s) mpz_fdiv_r(x[1].get_mpz_t(), x[1].get_mpz_t(), m.get_mpz_t());
            return;
        }
        const mpz_class m0 = pw((r + 1) / 2);
        const mpz_class m1 = pw(r / 2);
        mpz_fdiv_r(x[0].get_mpz_t(), x[0].get_mpz_t(), m0.get_mpz_t());
        mpz_fdiv_r(x[2].get_mpz_t(), x[2].get_mpz_t(), m1.get_mpz_t());
        if (has_s) {
            mpz_fdiv_r(x[1].get_mpz_t(), x[1].get_mpz_t(), m0.get_mpz_t());
            mpz_fdiv_r(x[3].get_mpz_t(), x[3].get_mpz_t(), m1.get_mpz_t());
        }
    }

    // valuation in uniformizer units, -1 for the zero vector
    std::int64_t val(const IVec& x) const {
        std::int64_t best = -1;
        auto upd = [&](std::int64_t v) {
            if (v >= 0 && (best < 0 || v < best)) best = v;
        };
        if (e == 1) {
            upd(vp(x[0]));
            if (has_s) upd(vp(x[1]));
            return best;
        }
        auto two = [&](const mpz_class& c, int off) {
            std::int64_t v = vp(c);
            if (v >= 0) upd(2 * v + off);
        };
        two(x[0], 0);
        two(x[2], 1);
        if (has_s) { two(x[1], 0); two(x[3], 1); }
        return best;
    }

    void mul_s(const mpz_class& a0, const mpz_class& a1, const mpz_class& c0, const mpz_class& c1,
               mpz_class& r0, mpz_class& r1) const {
        if (!has_s) {
            r0 = a0 * c0;
            r1 = 0;
            return;
        }
        mpz_class t0 = a0 * c0 + u * (a1 * c1);
        mpz_class t1 = a0 * c1 + a1 * c0;
        r0.swap(t0);
        r1.swap(t1);
    }

    IVec mul(const IVec& x, const IVec& y) const {
        IVec z;
        if (!has_t) {
            mul_s(x[0], x[1], y[0], y[1], z[0], z[1]);
            return z;
        }
        mpz_class ac0, ac1, bd0, bd1, ad0, ad1, bc0, bc1;
        mul_s(x[0], x[1], y[0], y[1], ac0, ac1);
        mul_s(x[2], x[3], y[2], y[3], bd0, bd1);
        mul_s(x[0], x[1], y[2], y[3], ad0, ad1);
        mul_s(x[2], x[3], y[0], y[1], bc0, bc1);
        z[0] = ac0 + p * bd0;
        z[1] = ac1 + p * bd1;
        z[2] = ad0 + bc0;
        z[3] = ad1 + bc1;
        return z;
    }

    void shift_up(IVec& x, std::int64_t k) const {
        if (k <= 0) return;
        if (e == 1) {
            const mpz_class m = pw(k);
            for (auto& c : x) c *= m;
            return;
        }
        const mpz_class m = pw(k / 2);
        if (k / 2 > 0)
            for (auto& c : x) c *= m;
        if (k % 2) {
            mpz_class n0 = p * x[2], n1 = p * x[3];
            x[2].swap(x[0]);
            x[3].swap(x[1]);
            x[0].swap(n0);
            x[1].swap(n1);
        }
    }

    void shift_down(IVec& x, std::int64_t k) const {
        if (k <= 0) return;
        if (e == 1) {
            const mpz_class m = pw(k);
            for (auto& c : x) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
            return;
        }
        if (k / 2 > 0) {
            const mpz_class m = pw(k / 2);
            for (auto& c : x) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
        }
        if (k % 2) {
            mpz_class n2, n3;
            mpz_divexact(n2.get_mpz_t(), x[0].get_mpz_t(), p.get_mpz_t());
            mpz_divexact(n3.get_mpz_t(), x[1].get_mpz_t(), p.get_mpz_t());
            x[0].swap(x[2]);
            x[1].swap(x[3]);
            x[2].swap(n2);
            x[3].swap(n3);
        }
    }

    mpz_class inv_mod(const mpz_class& a, const mpz_class& m) const {
        mpz_class r;
        if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
            throw DomainError("not_a_unit", "inverse of a non-unit");
        return r;
    }

    void inv_s(const mpz_class& n0, const mpz_class& n1, const mpz_class& m, mpz_class& r0,
               mpz_class& r1) const {
        if (!has_s) {
            r0 = inv_mod(n0, m);
            r1 = 0;
            return;
        }
        mpz_class den = n0 * n0 - u * (n1 * n1);
        mpz_fdiv_r(den.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
        mpz_class d = inv_mod(den, m);
        r0 = n0 * d;
        r1 = -n1 * d;
        mpz_fdiv_r(r0.get_mpz_t(), r0.get_mpz_t(), m.get_mpz_t());
        mpz_fdiv_r(r1.get_mpz_t(), r1.get_mpz_t(), m.get_mpz_t());
    }

    // inverse of a unit known modulo pi^r
    IVec unit_inverse(const IVec& x, std::int64_t r) const {
        const mpz_class m = pw((r + e - 1) / e + 1);
        IVec z;
        if (!has_t) {
            inv_s(x[0], x[1], m, z[0], z[1]);
        } else {
            mpz_class a0, a1, b0, b1;
            mul_s(x[0], x[1], x[0], x[1], a0, a1);
            mul_s(x[2], x[3], x[2], x[3], b0, b1);
            mpz_class n0 = a0 - p * b0, n1 = a1 - p * b1;
            mpz_fdiv_r(n0.get_mpz_t(), n0.get_mpz_t(), m.get_mpz_t());
            mpz_fdiv_r(n1.get_mpz_t(), n1.get_mpz_t(), m.get_mpz_t());
            mpz_class i0, i1;
            inv_s(n0, n1, m, i0, i1);
            mul_s(x[0], x[1], i0, i1, z[0], z[1]);
            mul_s(x[2], x[3], i0, i1, z[2], z[3]);
            z[2] = -z[2];
            z[3] = -z[3];
        }
        reduce(z, r);
        return z;
    }

    static FieldElement make(const Field& f, std::int64_t ord, std::int64_t rel, IVec x) {
        FieldElement r;
        r.field_ = f;
        r.exact_zero_ = false;
        r.ord_ = ord;
        r.rel_ = rel;
        r.c_ = std::move(x);
        return r;
    }
    static FieldElement inexact_zero(const Field& f, std::int64_t abs_units) {
        FieldElement r;
        r.field_ = f;
        r.exact_zero_ = false;
        r.ord_ = abs_units;
        r.rel_ = 0;
        return r;
    }
    // normalizes an integral vector known modulo pi^abs into an element at offset ord0
    static FieldElement normalize(const Field& f, std::int64_t ord0, std::int64_t abs, IVec x) {
        const FieldContext& c = *f;
        c.reduce(x, abs - ord0);
        std::int64_t v = c.val(x);
        if (v < 0) return inexact_zero(f, abs);
        c.shift_down(x, v);
        std::int64_t ord = ord0 + v;
        std::int64_t rel = std::min(abs - ord, c.cap);
        c.reduce(x, rel);
        return make(f, ord, rel, std::move(x));
    }
};

}  // namespace detail

Field make_field(const FieldDescriptor& d) {
    if (d.p == 2) throw DomainError("residue_characteristic_two", "p = 2 is not supported");
    if (d.p < 3 || mpz_probab_prime_p(mpz_class(d.p).get_mpz_t(), 30) == 0)
        throw DomainError("bad_prime", "field descriptor needs an odd prime p");
    if (d.precision < 1) throw DomainError("bad_precision", "precision must be positive");
    if (d.unramified) {
        ResidueField rf(d.p, std::nullopt);
        Residue r = rf.from_int(*d.unramified);
        if (rf.is_zero(r) || rf.is_square(r))
            throw DomainError("bad_unramified_generator",
                              "unramified generator square must be a residue non-square");
    }
    return std::make_shared<const detail::FieldContext>(d);
}

const FieldDescriptor& descriptor(const Field& f) { return f->desc; }

std::string NotSquare::describe() const {
    if (beyond_tower) return "beyond_tower";
    if (ramified && unramified) return "unramified+ramified";
    if (ramified) return "ramified";
    if (unramified) return "unramified";
    return "none";
}

std::int64_t valuation_of(const mpz_class& v, std::int64_t p) {
    if (v == 0) throw DomainError("zero_valuation", "valuation of zero");
    mpz_class t;
    mpz_class pp(p);
    return static_cast<std::int64_t>(mpz_remove(t.get_mpz_t(), v.get_mpz_t(), pp.get_mpz_t()));
}

std::vector<std::int64_t> base_p_digits(mpz_class v, std::int64_t p, std::size_t count) {
    std::vector<std::int64_t> out;
    mpz_class pp(p), r;
    for (std::size_t i = 0; i < count; ++i) {
        mpz_fdiv_qr(v.get_mpz_t(), r.get_mpz_t(), v.get_mpz_t(), pp.get_mpz_t());
        out.push_back(r.get_si());
    }
    return out;
}

// ---------------------------------------------------------------- element

using detail::FieldContext;
using detail::IVec;

namespace {

void check_same(const FieldElement& x, const FieldElement& y) {
    if (!x.valid() || !y.valid()) throw DomainError("uninitialized", "operation on an empty element");
    if (x.field() != y.field() && !(descriptor(x.field()) == descriptor(y.field())))
        throw DomainError("descriptor_mismatch", "elements belong to different fields");
}

}  // namespace

FieldElement FieldElement::zero(const Field& f) {
    FieldElement r;
    r.field_ = f;
    r.exact_zero_ = true;
    return r;
}

FieldElement FieldElement::from_int(std::int64_t v, const Field& f) {
    return from_rational(mpz_class(static_cast<long>(v)), 1, f);
}

FieldElement FieldElement::from_rational(const mpz_class& num, const mpz_class& den, const Field& f) {
    if (den == 0) throw DomainError("division_by_zero", "zero denominator");
    if (num == 0) return zero(f);
    const FieldContext& c = *f;
    mpz_class n = num, d = den, t;
    std::int64_t a = static_cast<std::int64_t>(mpz_remove(n.get_mpz_t(), n.get_mpz_t(), c.p.get_mpz_t()));
    std::int64_t b = static_cast<std::int64_t>(mpz_remove(d.get_mpz_t(), d.get_mpz_t(), c.p.get_mpz_t()));
    const mpz_class m = c.pw(c.cap / c.e + 1);
    mpz_fdiv_r(d.get_mpz_t(), d.get_mpz_t(), m.get_mpz_t());
    IVec x;
    x[0] = n * c.inv_mod(d, m);
    c.reduce(x, c.cap);
    return FieldContext::make(f, c.e * (a - b), c.cap, std::move(x));
}

FieldElement FieldElement::from_coordinates(const std::array<mpz_class, 4>& coords, const Field& f) {
    const FieldContext& c = *f;
    IVec x = coords;
    if (!c.has_s) x[1] = x[3] = 0;
    if (!c.has_t) x[2] = x[3] = 0;
    std::int64_t v = c.val(x);
    if (v < 0) return zero(f);
    c.shift_down(x, v);
    c.reduce(x, c.cap);
    return FieldContext::make(f, v, c.cap, std::move(x));
}

FieldElement FieldElement::from_residue(Residue r, const Field& f) {
    std::array<mpz_class, 4> x;
    x[0] = static_cast<long>(r.a);
    x[1] = static_cast<long>(r.b);
    return from_coordinates(x, f);
}

FieldElement FieldElement::gen_s(const Field& f) {
    if (!f->has_s) throw DomainError("no_unramified_generator", "field has no unramified generator");
    std::array<mpz_class, 4> x;
    x[1] = 1;
    return from_coordinates(x, f);
}

FieldElement FieldElement::gen_t(const Field& f) {
    if (!f->has_t) throw DomainError("no_ramified_generator", "field has no ramified generator");
    std::array<mpz_class, 4> x;
    x[2] = 1;
    return from_coordinates(x, f);
}

FieldElement FieldElement::uniformizer(const Field& f) {
    return f->has_t ? gen_t(f) : from_int(f->desc.p, f);
}

Rational FieldElement::valuation() const {
    if (exact_zero_) return kInfinite;
    return {ord_, field_->e};
}

Rational FieldElement::abs_precision() const {
    if (exact_zero_) return kInfinite;
    return {ord_ + rel_, field_->e};
}

Rational FieldElement::rel_precision() const {
    if (exact_zero_) return kInfinite;
    return {rel_, field_->e};
}

FieldElement FieldElement::operator-() const {
    if (is_zero()) return *this;
    IVec x = c_;
    for (auto& v : x) v = -v;
    field_->reduce(x, rel_);
    return FieldContext::make(field_, ord_, rel_, std::move(x));
}

FieldElement operator+(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    if (x.exact_zero_) return y;
    if (y.exact_zero_) return x;
    const FieldContext& c = *x.field_;
    std::int64_t ax = x.ord_ + x.rel_, ay = y.ord_ + y.rel_;
    std::int64_t abs = std::min(ax, ay);
    bool ux = x.rel_ > 0 && x.ord_ < abs;
    bool uy = y.rel_ > 0 && y.ord_ < abs;
    if (!ux && !uy) return FieldContext::inexact_zero(x.field_, abs);
    if (ux && !uy && abs == ax) return x;
    if (uy && !ux && abs == ay) return y;
    std::int64_t m = std::min(ux ? x.ord_ : abs, uy ? y.ord_ : abs);
    IVec s;
    if (ux) {
        s = x.c_;
        c.shift_up(s, x.ord_ - m);
    }
    if (uy) {
        IVec t = y.c_;
        c.shift_up(t, y.ord_ - m);
        for (int i = 0; i < 4; ++i) s[i] += t[i];
    }
    return FieldContext::normalize(x.field_, m, abs, std::move(s));
}

FieldElement operator-(const FieldElement& x, const FieldElement& y) { return x + (-y); }

FieldElement operator*(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    if (x.exact_zero_) return x;
    if (y.exact_zero_) return y;
    if (x.rel_ == 0 || y.rel_ == 0) return FieldContext::inexact_zero(x.field_, x.ord_ + y.ord_);
    const FieldContext& c = *x.field_;
    std::int64_t rel = std::min(x.rel_, y.rel_);
    IVec z = c.mul(x.c_, y.c_);
    c.reduce(z, rel);
    return FieldContext::make(x.field_, x.ord_ + y.ord_, rel, std::move(z));
}

FieldElement FieldElement::inverse() const {
    if (exact_zero_) throw DomainError("division_by_zero", "division by zero");
    if (rel_ == 0) throw PrecisionError("precision_exhausted", "division by an element indistinguishable from zero");
    IVec z = field_->unit_inverse(c_, rel_);
    return FieldContext::make(field_, -ord_, rel_, std::move(z));
}

FieldElement operator/(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    if (y.exact_zero_) throw DomainError("division_by_zero", "division by zero");
    if (y.rel_ == 0) throw PrecisionError("precision_exhausted", "division by an element indistinguishable from zero");
    if (x.exact_zero_) return x;
    if (x.rel_ == 0) return FieldContext::inexact_zero(x.field_, x.ord_ - y.ord_);
    const FieldContext& c = *x.field_;
    std::int64_t rel = std::min(x.rel_, y.rel_);
    IVec z = c.mul(x.c_, c.unit_inverse(y.c_, rel));
    c.reduce(z, rel);
    return FieldContext::make(x.field_, x.ord_ - y.ord_, rel, std::move(z));
}

FieldElement FieldElement::pow(std::int64_t e) const {
    if (e < 0) return inverse().pow(-e);
    FieldElement r = from_int(1, field_);
    FieldElement b = *this;
    while (e) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

FieldElement FieldElement::times_int(std::int64_t k) const { return *this * from_int(k, field_); }

Residue FieldElement::unit_residue() const {
    if (is_zero()) throw PrecisionError("precision_exhausted", "residue of an element indistinguishable from zero");
    const std::int64_t p = field_->desc.p;
    mpz_class pp(p), r0, r1;
    mpz_fdiv_r(r0.get_mpz_t(), c_[0].get_mpz_t(), pp.get_mpz_t());
    mpz_fdiv_r(r1.get_mpz_t(), c_[1].get_mpz_t(), pp.get_mpz_t());
    return {r0.get_si(), r1.get_si()};
}

Residue FieldElement::residue() const {
    if (exact_zero_) return {};
    if (ord_ > 0) return {};
    if (rel_ == 0) throw PrecisionError("precision_exhausted", "residue undetermined at this precision");
    if (ord_ < 0) throw DomainError("not_integral", "residue of a non-integral element");
    return unit_residue();
}

FieldElement FieldElement::unit_part() const {
    if (is_zero()) throw PrecisionError("precision_exhausted", "unit part of zero");
    return FieldContext::make(field_, 0, rel_, c_);
}

FieldElement FieldElement::truncate_below(Rational v) const {
    if (exact_zero_) return *this;
    const FieldContext& c = *field_;
    std::int64_t k = (v * Rational(c.e)).ceil() - ord_;
    if (rel_ == 0 || k <= 0) return zero(field_);
    k = std::min(k, rel_);
    IVec x = c_;
    c.reduce(x, k);
    return FieldContext::make(field_, ord_, c.cap, std::move(x));
}

FieldElement FieldElement::in_field(const Field& target, bool as_exact) const {
    if (target == field_) return *this;
    FieldDescriptor a = descriptor(field_), b = descriptor(target);
    a.precision = b.precision;
    if (!(a == b)) throw DomainError("descriptor_mismatch", "fields differ in more than precision");
    if (exact_zero_) return zero(target);
    if (rel_ == 0) return as_exact ? zero(target) : FieldContext::inexact_zero(target, ord_);
    IVec x = c_;
    target->reduce(x, std::min(rel_, target->cap));
    return FieldContext::make(target, ord_, as_exact ? target->cap : std::min(rel_, target->cap), std::move(x));
}

Field with_precision(const Field& f, int precision) {
    FieldDescriptor d = descriptor(f);
    d.precision = precision;
    return make_field(d);
}

FieldElement FieldElement::with_relprec(std::int64_t units) const {
    if (is_zero() || units >= rel_) return *this;
    if (units <= 0) return FieldContext::inexact_zero(field_, ord_);
    IVec x = c_;
    field_->reduce(x, units);
    return FieldContext::make(field_, ord_, units, std::move(x));
}

bool FieldElement::equal_at(const FieldElement& o, Rational M) const {
    FieldElement d = *this - o;
    if (d.exact_zero_) return true;
    if (d.rel_ == 0) return d.valuation() >= M;
    return d.valuation() >= M;
}

namespace {

std::string coordinate_string(const mpz_class& v, std::int64_t p, std::size_t ndigits) {
    auto digits = base_p_digits(v, p, ndigits);
    std::string out;
    for (std::size_t k = 0; k < digits.size(); ++k) {
        if (digits[k] == 0) continue;
        if (!out.empty()) out += " + ";
        out += std::to_string(digits[k]);
        if (k == 1) out += "*" + std::to_string(p);
        if (k > 1) out += "*" + std::to_string(p) + "^" + std::to_string(k);
    }
    return out;
}

}  // namespace

std::string FieldElement::str() const {
    if (!valid()) return "<empty>";
    const std::int64_t p = field_->desc.p;
    const std::string ps = std::to_string(p);
    if (exact_zero_) return "0";
    if (rel_ == 0) return "O(" + ps + "^(" + valuation().str() + "))";
    const int e = field_->e;
    std::size_t n0 = static_cast<std::size_t>((rel_ + e - 1) / e);
    std::size_t n1 = static_cast<std::size_t>(rel_ / e);
    static const char* basis[4] = {"", "s", "t", "s*t"};
    std::string unit;
    for (int i = 0; i < 4; ++i) {
        std::string cs = coordinate_string(c_[i], p, (i < 2) ? n0 : n1);
        if (cs.empty()) continue;
        if (!unit.empty()) unit += " + ";
        unit += (i == 0) ? cs : "(" + cs + ")*" + basis[i];
    }
    return ps + "^(" + valuation().str() + ") * (" + unit + ") + O(" + ps + "^(" +
           abs_precision().str() + "))";
}

std::string FieldElement::key(std::int64_t units) const {
    if (exact_zero_ || ord_ >= units || rel_ == 0) return "0";
    IVec x = c_;
    std::int64_t k = std::min(rel_, units - ord_);
    field_->reduce(x, k);
    std::string s = std::to_string(ord_) + ":";
    for (const auto& c : x) s += c.get_str(36) + ",";
    return s;
}

namespace {

// Recursive descent over sums, products, powers and parentheses; also reads
// the printed form "p^(v) * (...) + O(p^(k))".
class ElementParser {
public:
    ElementParser(const std::string& text, const Field& f) : text_(text), f_(f) {
        for (char ch : text)
            if (!std::isspace(static_cast<unsigned char>(ch))) s_ += ch;
    }

    FieldElement run() {
        if (s_.empty()) fail("empty element literal");
        FieldElement x = expr();
        if (i_ != s_.size()) fail("unexpected character");
        if (cap_) {
            const std::int64_t e = descriptor(f_).ramification();
            const std::int64_t units = (*cap_ * Rational(e)).ceil();
            if (x.is_zero() || x.ord() >= units)
                return FieldElement::uniformizer(f_).pow(units).with_relprec(0);
            x = x.with_relprec(units - x.ord());
        }
        return x;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw DomainError("parse_error", why + " in element literal: " + text_);
    }
    bool eat(char c) {
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    bool at_digit() const { return i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])); }
    mpz_class integer() {
        const std::size_t st = i_;
        while (at_digit()) ++i_;
        if (i_ == st) fail("expected a number");
        return mpz_class(s_.substr(st, i_ - st));
    }
    Rational exponent() {
        if (!eat('(')) return Rational(integer().get_si());
        const bool neg = eat('-');
        std::int64_t num = integer().get_si(), den = 1;
        if (eat('/')) den = integer().get_si();
        if (!eat(')')) fail("expected ')'");
        return Rational(neg ? -num : num, den);
    }

    FieldElement expr() {
        FieldElement total = FieldElement::zero(f_);
        bool first = true;
        while (true) {
            int sign = 1;
            if (eat('-')) sign = -1;
            else if (!eat('+') && !first) break;
            if (i_ + 1 < s_.size() && s_[i_] == 'O' && s_[i_ + 1] == '(') {
                order_term();
            } else {
                FieldElement t = term();
                total = sign < 0 ? total - t : total + t;
            }
            first = false;
            if (i_ >= s_.size() || (s_[i_] != '+' && s_[i_] != '-')) break;
        }
        return total;
    }

    void order_term() {
        i_ += 2;
        const mpz_class base = integer();
        if (base != descriptor(f_).p) fail("O() must be a power of p");
        Rational k(1);
        if (eat('^')) k = exponent();
        if (!eat(')')) fail("expected ')'");
        cap_ = cap_ ? std::min(*cap_, k) : k;
    }

    FieldElement term() {
        FieldElement x = factor();
        while (i_ < s_.size()) {
            if (!eat('*') && s_[i_] != 's' && s_[i_] != 't' && s_[i_] != '(') break;
            x = x * factor();
        }
        return x;
    }

    FieldElement factor() {
        if (eat('(')) {
            FieldElement x = expr();
            if (!eat(')')) fail("expected ')'");
            return power(x);
        }
        if (eat('s')) return power(FieldElement::gen_s(f_));
        if (eat('t')) return power(FieldElement::gen_t(f_));
        const mpz_class num = integer();
        if (eat('/')) return FieldElement::from_rational(num, integer(), f_);
        if (i_ < s_.size() && s_[i_] == '^') {
            ++i_;
            const Rational k = exponent();
            if (k.den() == 1) return FieldElement::from_mpz(num, f_).pow(k.num());
            if (k.den() != 2 || num != descriptor(f_).p) fail("fractional exponents apply to p only");
            return FieldElement::gen_t(f_).pow(k.num());
        }
        return FieldElement::from_mpz(num, f_);
    }

    FieldElement power(const FieldElement& x) {
        if (!eat('^')) return x;
        const Rational k = exponent();
        if (k.den() != 1) fail("fractional exponent");
        return x.pow(k.num());
    }

    const std::string& text_;
    const Field& f_;
    std::string s_;
    std::size_t i_ = 0;
    std::optional<Rational> cap_;
};

}  // namespace

FieldElement FieldElement::parse(const std::string& text, const Field& f) { return ElementParser(text, f).run(); }

// ---------------------------------------------------------------- square roots

SqrtResult sqrt(const FieldElement& x) {
    if (x.is_exact_zero()) return x;
    if (x.is_inexact_zero())
        throw PrecisionError("undecidable_square", "square-root of an element indistinguishable from zero");
    const Field& f = x.field();
    const FieldDescriptor& d = descriptor(f);
    const int e = d.ramification();
    NotSquare ns;
    if (x.ord() % 2 != 0) {
        if (e == 1) ns.ramified = true;
        else ns.beyond_tower = true;
    }
    ResidueField rf(d.p, d.unramified);
    Residue r = x.unit_residue();
    std::optional<Residue> root = rf.sqrt(r);
    if (!root) {
        if (rf.quadratic()) ns.beyond_tower = true;
        else ns.unramified = true;
    }
    if (ns.ramified || ns.unramified || ns.beyond_tower) return ns;
    Residue r0 = *root;
    std::int64_t half = (d.p - 1) / 2;
    std::int64_t lead = r0.a != 0 ? r0.a : r0.b;
    if (lead > half) r0 = rf.neg(r0);
    FieldElement u = x.unit_part();
    FieldElement y = FieldElement::from_residue(r0, f);
    FieldElement inv2 = FieldElement::from_int(2, f).inverse();
    Rational target = u.rel_precision();
    for (int it = 0; it < 128; ++it) {
        FieldElement ny = (y + u / y) * inv2;
        bool done = ny.equal_at(y, target);
        y = ny;
        if (done) break;
    }
    y = y.with_relprec(u.relprec_units());
    // reattach pi^(ord/2)
    FieldElement pi = FieldElement::uniformizer(f);
    return y * pi.pow(x.ord() / 2);
}

bool is_square(const FieldElement& x) {
    if (x.is_exact_zero()) throw DomainError("zero_square_class", "square class of zero");
    SqrtResult r = sqrt(x);
    return std::holds_alternative<FieldElement>(r);
}

FieldElement sqrt_or_throw(const FieldElement& x) {
    SqrtResult r = sqrt(x);
    if (auto* v = std::get_if<FieldElement>(&r)) return *v;
    throw DomainError("not_square:" + std::get<NotSquare>(r).describe(),
                      "not a square; required extension: " + std::get<NotSquare>(r).describe());
}

}  // namespace whittaker
