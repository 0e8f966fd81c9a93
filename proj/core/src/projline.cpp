#include "whittaker/projline.hpp"

namespace whittaker {

const FieldElement& ProjPoint::value() const {
    if (inf_) throw DomainError("point_at_infinity", "value of the point at infinity");
    return val_;
}

bool ProjPoint::equal_at(const ProjPoint& o, Rational M) const {
    if (inf_ && o.inf_) return true;
    if (inf_ || o.inf_) {
        const FieldElement& x = inf_ ? o.val_ : val_;
        if (x.is_exact_zero()) return false;
        return (-x.valuation()) >= M;
    }
    const Rational zero(0);
    if (val_.valuation() >= zero || o.val_.valuation() >= zero) {
        if (val_.valuation() < zero || o.val_.valuation() < zero) return false;
        return val_.equal_at(o.val_, M);
    }
    return val_.inverse().equal_at(o.val_.inverse(), M);
}

Mobius::Mobius(FieldElement a, FieldElement b, FieldElement c, FieldElement d)
    : m_{std::move(a), std::move(b), std::move(c), std::move(d)} {}

Mobius Mobius::identity(const Field& f) {
    return {FieldElement::from_int(1, f), FieldElement::zero(f), FieldElement::zero(f),
            FieldElement::from_int(1, f)};
}

Mobius Mobius::compose(const Mobius& o) const {
    return {m_[0] * o.m_[0] + m_[1] * o.m_[2], m_[0] * o.m_[1] + m_[1] * o.m_[3],
            m_[2] * o.m_[0] + m_[3] * o.m_[2], m_[2] * o.m_[1] + m_[3] * o.m_[3]};
}

Mobius Mobius::inverse() const { return {m_[3], -m_[1], -m_[2], m_[0]}; }

Mobius Mobius::canonical() const {
    int best = -1;
    for (int i = 0; i < 4; ++i) {
        if (m_[i].is_zero()) continue;
        if (best < 0 || m_[i].valuation() < m_[best].valuation()) best = i;
    }
    if (best < 0) throw PrecisionError("precision_exhausted", "Mobius map indistinguishable from zero");
    FieldElement s = m_[best].inverse();
    Mobius r{m_[0] * s, m_[1] * s, m_[2] * s, m_[3] * s};
    r.m_[best] = FieldElement::from_int(1, field());
    return r;
}

std::string Mobius::key(std::int64_t units) const {
    Mobius c = canonical();
    std::string k;
    for (const auto& e : c.m_) k += e.key(units) + "|";
    return k;
}

bool Mobius::equal_at(const Mobius& o, Rational M) const {
    Mobius x = canonical(), y = o.canonical();
    for (int i = 0; i < 4; ++i)
        if (!x.m_[i].equal_at(y.m_[i], M)) return false;
    return true;
}

std::string Mobius::str() const {
    return "[[" + m_[0].str() + ", " + m_[1].str() + "], [" + m_[2].str() + ", " + m_[3].str() + "]]";
}

namespace {

ProjPoint quotient(const FieldElement& num, const FieldElement& den) {
    if (den.is_zero()) {
        if (num.is_zero())
            throw PrecisionError("precision_exhausted", "Mobius image undetermined at this precision");
        return ProjPoint::infinity();
    }
    return ProjPoint(num / den);
}

}  // namespace

ProjPoint apply(const Mobius& m, const ProjPoint& z) {
    if (z.is_infinity()) return quotient(m.a(), m.c());
    const FieldElement& x = z.value();
    return quotient(m.a() * x + m.b(), m.c() * x + m.d());
}

Mobius involution_from_pair(const ProjPoint& a, const ProjPoint& b) {
    if (a.is_infinity() && b.is_infinity())
        throw DomainError("coincident_fixed_points", "involution with coincident fixed points");
    if (a.is_infinity()) return involution_from_pair(b, a);
    const Field& f = a.value().field();
    if (b.is_infinity()) {
        return {FieldElement::from_int(-1, f), a.value().times_int(2), FieldElement::zero(f),
                FieldElement::from_int(1, f)};
    }
    if ((a.value() - b.value()).is_zero())
        throw DomainError("coincident_fixed_points", "fixed points indistinguishable at working precision");
    FieldElement s = a.value() + b.value();
    return {s, -(a.value() * b.value()).times_int(2), FieldElement::from_int(2, f), -s};
}

FieldElement cross_ratio(const ProjPoint& p1, const ProjPoint& p2, const ProjPoint& p3,
                         const ProjPoint& p4) {
    const ProjPoint* pts[4] = {&p1, &p2, &p3, &p4};
    Field f;
    int infs = 0;
    for (auto* p : pts) {
        if (p->is_infinity()) ++infs;
        else f = p->value().field();
    }
    if (infs > 1) throw DomainError("coincident_points", "cross-ratio of coincident points");
    auto diff = [&](const ProjPoint& x, const ProjPoint& y) -> std::optional<FieldElement> {
        if (x.is_infinity() || y.is_infinity()) return std::nullopt;
        FieldElement d = x.value() - y.value();
        if (d.is_zero()) throw DomainError("coincident_points", "cross-ratio of coincident points");
        return d;
    };
    FieldElement num = FieldElement::from_int(1, f), den = FieldElement::from_int(1, f);
    if (auto d = diff(p4, p1)) num = num * *d;
    if (auto d = diff(p2, p3)) num = num * *d;
    if (auto d = diff(p4, p3)) den = den * *d;
    if (auto d = diff(p2, p1)) den = den * *d;
    return num / den;
}

Mobius mobius_to_01inf(const ProjPoint& x, const ProjPoint& y, const ProjPoint& z) {
    Field f;
    for (const ProjPoint* p : {&x, &y, &z})
        if (!p->is_infinity()) f = p->value().field();
    auto one = FieldElement::from_int(1, f);
    auto zero = FieldElement::zero(f);
    auto check = [](const FieldElement& d) {
        if (d.is_zero()) throw DomainError("degenerate_triple", "normalization anchors coincide");
    };
    if (x.is_infinity()) {
        FieldElement yz = y.value() - z.value();
        check(yz);
        return {zero, yz, one, -z.value()};
    }
    if (y.is_infinity()) {
        check(x.value() - z.value());
        return {one, -x.value(), one, -z.value()};
    }
    if (z.is_infinity()) {
        FieldElement yx = y.value() - x.value();
        check(yx);
        return {one, -x.value(), zero, yx};
    }
    FieldElement yz = y.value() - z.value(), yx = y.value() - x.value();
    check(yz);
    check(yx);
    check(x.value() - z.value());
    return {yz, -(x.value() * yz), yx, -(z.value() * yx)};
}

NormalizedTuple normalize_triple(const std::vector<ProjPoint>& points, std::size_t i, std::size_t j,
                                 std::size_t k) {
    if (i >= points.size() || j >= points.size() || k >= points.size() || i == j || j == k || i == k)
        throw DomainError("degenerate_triple", "normalization anchors must be three distinct indices");
    NormalizedTuple out{mobius_to_01inf(points[i], points[j], points[k]), {}};
    const Field& f = out.map.field();
    for (std::size_t n = 0; n < points.size(); ++n) {
        if (n == i) out.points.emplace_back(FieldElement::zero(f));
        else if (n == j) out.points.emplace_back(FieldElement::from_int(1, f));
        else if (n == k) out.points.push_back(ProjPoint::infinity());
        else out.points.push_back(apply(out.map, points[n]));
    }
    return out;
}

Involution::Involution(const ProjPoint& a, const ProjPoint& b) : a_(a), b_(b) {
    m_ = involution_from_pair(a, b);
    if (a.is_infinity() || b.is_infinity()) {
        affine_ = true;
        two_a_ = (a.is_infinity() ? b : a).value().times_int(2);
    } else {
        sum_ = a.value() + b.value();
        prod2_ = (a.value() * b.value()).times_int(2);
        half_sum_ = sum_ / FieldElement::from_int(2, sum_.field());
    }
}

ProjPoint Involution::operator()(const ProjPoint& z) const {
    if (affine_) {
        if (z.is_infinity()) return z;
        return ProjPoint(two_a_ - z.value());
    }
    if (z.is_infinity()) return ProjPoint(half_sum_);
    const FieldElement& x = z.value();
    return quotient(sum_ * x - prod2_, x.times_int(2) - sum_);
}

}  // namespace whittaker
