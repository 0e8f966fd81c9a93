#include "whittaker/poly.hpp"

#include <algorithm>
#include <sstream>

namespace whittaker {

Poly poly_from_integers(const std::vector<mpz_class>& coeffs, const Field& f) {
    Poly out;
    for (const auto& c : coeffs) out.push_back(FieldElement::from_mpz(c, f));
    return out;
}

FieldElement evaluate(const Poly& f, const FieldElement& x) {
    FieldElement acc = FieldElement::zero(x.field());
    for (std::size_t i = f.size(); i-- > 0;) acc = acc * x + f[i];
    return acc;
}

namespace {

Poly derivative(const Poly& f) {
    Poly d;
    for (std::size_t i = 1; i < f.size(); ++i) d.push_back(f[i].times_int(static_cast<std::int64_t>(i)));
    return d;
}

// f(c + h y) as a polynomial in y.
Poly recentre(const Poly& f, const FieldElement& c, const FieldElement& h) {
    Poly g = f;
    const std::size_t n = g.size();
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t j = n - 1; j > k; --j) g[j - 1] += c * g[j];
    FieldElement scale = FieldElement::from_int(1, h.field());
    for (auto& coef : g) {
        coef *= scale;
        scale *= h;
    }
    return g;
}

// Divides by the smallest power of the uniformizer so the coefficients are
// integral with one of valuation zero; returns false for the zero polynomial.
bool make_primitive(Poly& f) {
    std::optional<std::int64_t> m;
    for (const auto& c : f)
        if (!c.is_zero()) m = m ? std::min(*m, c.ord()) : c.ord();
    if (!m) return false;
    const FieldElement s = FieldElement::uniformizer(f.front().field()).pow(-*m);
    for (auto& c : f) c *= s;
    return true;
}

struct RootSearch {
    ResidueField k;
    std::vector<Residue> elements;
    std::int64_t depth_limit;

    FieldElement newton(const Poly& f, FieldElement x) const {
        const Poly d = derivative(f);
        for (std::int64_t i = 0; i < 2 * depth_limit + 8; ++i) {
            const FieldElement fx = evaluate(f, x);
            if (fx.is_zero()) break;
            const FieldElement step = fx / evaluate(d, x);
            if (step.is_zero()) break;
            x -= step;
        }
        return x;
    }

    // Roots y of f with v(y) >= 0 (or > 0 when zero_class_only).
    void integral(Poly f, bool zero_class_only, std::int64_t depth, std::vector<FieldElement>& out) const {
        if (!make_primitive(f)) throw PrecisionError("clustered_roots", "roots not separated at working precision");
        const Field& fld = f.front().field();
        std::vector<Residue> red;
        for (const auto& c : f) red.push_back(c.valuation() > Rational(0) || c.is_zero() ? Residue{} : c.residue());
        while (!red.empty() && k.is_zero(red.back())) red.pop_back();
        if (red.size() <= 1) return;
        auto eval = [&](const std::vector<Residue>& p, Residue r) {
            Residue acc{};
            for (std::size_t i = p.size(); i-- > 0;) acc = k.add(k.mul(acc, r), p[i]);
            return acc;
        };
        for (const auto& r : elements) {
            if (zero_class_only && !k.is_zero(r)) continue;
            if (!k.is_zero(eval(red, r))) continue;
            // multiplicity of r in the reduction
            std::vector<Residue> q = red;
            int mult = 0;
            while (q.size() > 1 && k.is_zero(eval(q, r))) {
                std::vector<Residue> quo(q.size() - 1);
                Residue carry{};
                for (std::size_t i = q.size(); i-- > 1;) {
                    carry = k.add(q[i], k.mul(carry, r));
                    quo[i - 1] = carry;
                }
                q = quo;
                ++mult;
            }
            const FieldElement c = FieldElement::from_residue(r, fld);
            if (mult == 1) {
                out.push_back(newton(f, c));
                continue;
            }
            if (depth >= depth_limit) throw PrecisionError("clustered_roots", "roots not separated at working precision");
            const FieldElement pi = FieldElement::uniformizer(fld);
            std::vector<FieldElement> sub;
            integral(recentre(f, c, pi), false, depth + 1, sub);
            for (const auto& y : sub) out.push_back(c + pi * y);
        }
    }
};

}  // namespace

std::vector<FieldElement> polynomial_roots(const Poly& f_in) {
    Poly f = f_in;
    while (!f.empty() && f.back().is_zero()) f.pop_back();
    if (f.size() <= 1) return {};
    const Field base = f.front().field();
    const auto& d = descriptor(base);
    const int guard = 8 * static_cast<int>(f.size()) + 16;
    const Field work = with_precision(base, d.precision + guard);
    for (auto& c : f) c = c.in_field(work, true);

    RootSearch rs{ResidueField(d.p, d.unramified), {}, static_cast<std::int64_t>(d.precision + guard) * d.ramification()};
    for (std::int64_t i = 0; i < rs.k.size(); ++i) rs.elements.push_back(rs.k.element(i));

    std::vector<FieldElement> found;
    rs.integral(f, false, 0, found);
    Poly rev(f.rbegin(), f.rend());
    std::vector<FieldElement> small;
    rs.integral(rev, true, 0, small);
    for (const auto& y : small)
        if (!y.is_zero()) found.push_back(y.inverse());

    std::vector<FieldElement> out;
    for (const auto& x : found) out.push_back(x.in_field(base));
    return out;
}

std::vector<ProjPoint> projective_roots(const Poly& f, std::size_t degree) {
    std::vector<ProjPoint> out;
    for (const auto& r : polynomial_roots(f)) out.emplace_back(r);
    std::size_t actual = f.size();
    while (actual > 0 && f[actual - 1].is_zero()) --actual;
    if (actual > 0 && actual - 1 < degree) out.push_back(ProjPoint::infinity());
    return out;
}

namespace {

using ModPoly = std::vector<std::int64_t>;

std::int64_t md(std::int64_t v, std::int64_t p) {
    v %= p;
    return v < 0 ? v + p : v;
}

void trim(ModPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

// Quotient by a monic divisor; returns nullopt when the remainder is nonzero.
std::optional<ModPoly> divide_exact(const ModPoly& f, const ModPoly& g, std::int64_t p) {
    ModPoly r = f, q(f.size() - g.size() + 1, 0);
    for (std::size_t i = f.size(); i-- >= g.size();) {
        const std::int64_t c = r[i];
        q[i - (g.size() - 1)] = c;
        for (std::size_t j = 0; j < g.size(); ++j) {
            auto& t = r[i - (g.size() - 1) + j];
            t = md(t - c * g[j], p);
        }
        if (i == 0) break;
    }
    for (std::size_t i = 0; i + 1 < g.size(); ++i)
        if (r[i] != 0) return std::nullopt;
    return q;
}

}  // namespace

std::string ResidueFactor::str() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
        std::int64_t c = coeffs[i] > p / 2 ? coeffs[i] - p : coeffs[i];
        if (c == 0) continue;
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        const std::int64_t a = c < 0 ? -c : c;
        if (i == 0 || a != 1) os << a;
        if (i >= 1) os << "x";
        if (i >= 2) os << "^" << i;
        first = false;
    }
    std::string body = os.str();
    if (first) body = "0";
    std::string out = "(" + body + ")";
    if (multiplicity > 1) out += "^" + std::to_string(multiplicity);
    return out;
}

std::vector<ResidueFactor> factor_mod_p(const std::vector<mpz_class>& f_in, std::int64_t p) {
    ModPoly f;
    for (const auto& c : f_in) {
        mpz_class r = c % p;
        if (r < 0) r += p;
        f.push_back(r.get_si());
    }
    trim(f);
    if (f.empty()) throw DomainError("zero_polynomial", "polynomial vanishes mod p");
    const ResidueField fp(p, std::nullopt);
    const std::int64_t lead_inv = fp.inv(Residue{f.back(), 0}).a;
    for (auto& c : f) c = md(c * lead_inv, p);

    std::vector<ResidueFactor> out;
    auto peel = [&](const ModPoly& g) {
        int m = 0;
        while (f.size() >= g.size()) {
            auto q = divide_exact(f, g, p);
            if (!q) break;
            f = *q;
            ++m;
        }
        if (m > 0) out.push_back({p, g, m});
    };
    for (std::int64_t r = 0; r < p && f.size() > 1; ++r) peel({md(-r, p), 1});
    if (f.size() > 3) {
        std::int64_t u = 2;
        while (fp.is_square(Residue{u, 0})) ++u;
        for (std::int64_t a = 0; a < p && f.size() > 3; ++a)
            for (std::int64_t b = 1; b <= p / 2 && f.size() > 3; ++b)
                peel({md(a * a - u * b * b, p), md(-2 * a, p), 1});
    }
    if (f.size() > 1) out.push_back({p, f, 1});
    return out;
}

}  // namespace whittaker
