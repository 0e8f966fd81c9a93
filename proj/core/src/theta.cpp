#include "whittaker/theta.hpp"

#include <algorithm>
#include <future>
#include <thread>

namespace whittaker {

namespace {

std::vector<LabeledPoint> label_pairs(const std::vector<FixedPair>& fixed) {
    std::vector<LabeledPoint> out;
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        out.push_back({"a" + std::to_string(i), fixed[i].first});
        out.push_back({"b" + std::to_string(i), fixed[i].second});
    }
    return out;
}

Field field_of(const std::vector<FixedPair>& fixed) {
    for (const auto& [a, b] : fixed) {
        if (!a.is_infinity()) return a.value().field();
        if (!b.is_infinity()) return b.value().field();
    }
    throw DomainError("no_finite_point", "all fixed points at infinity");
}

bool same_point(const ProjPoint& x, const ProjPoint& y) {
    if (x.is_infinity() || y.is_infinity()) return x.is_infinity() && y.is_infinity();
    return (x.value() - y.value()).is_zero();
}

const Rational kExact = Rational(1000000);  // stands in for an exact result

}  // namespace

Rational fixed_point_size_bound(const std::vector<FixedPair>& fixed) {
    ReductionTree t = build_tree(label_pairs(fixed));
    auto v = t.min_edge_valuation();
    if (!v) throw DomainError("no_double_points", "the fixed points reduce to a single line");
    return *v;
}

ThetaContext::ThetaContext(std::vector<FixedPair> fixed, int length, std::optional<Rational> pi_valuation)
    : fixed_(std::move(fixed)) {
    if (fixed_.size() < 2) throw DomainError("bad_genus", "need at least two fixed-point pairs");
    if (length < 0) throw DomainError("bad_length", "negative truncation length");
    field_ = field_of(fixed_);
    // each involution costs about |v(a - b)| digits, and large or small
    // coordinates cost their valuation once
    std::int64_t spread = 0, size = 0;
    for (const auto& [a, b] : fixed_) {
        if (same_point(a, b)) throw DomainError("degenerate_pair", "fixed points of a generator coincide");
        for (const auto* q : {&a, &b})
            if (!q->is_infinity() && !q->value().is_zero()) {
                const Rational v = q->value().valuation();
                size = std::max(size, (v < Rational(0) ? -v : v).ceil());
            }
        if (!a.is_infinity() && !b.is_infinity()) {
            const Rational v = (a.value() - b.value()).valuation();
            spread = std::max(spread, (v < Rational(0) ? -v : v).ceil());
        }
    }
    const std::int64_t guard = std::int64_t{length} * (1 + spread) + 2 * size + 4;
    work_ = with_precision(field_, descriptor(field_).precision + static_cast<int>(std::min<std::int64_t>(guard, 400)));
    for (const auto& [a, b] : fixed_) gens_.emplace_back(lift(a), lift(b));
    pi_ = pi_valuation ? *pi_valuation : fixed_point_size_bound(fixed_);
    table_ = make_word_table(genus(), length);
}

ProjPoint ThetaContext::lift(const ProjPoint& z) const {
    if (z.is_infinity()) return z;
    return ProjPoint(z.value().in_field(work_, z.value().field() != work_));
}

ProjPoint ThetaContext::lower(const ProjPoint& z) const {
    if (z.is_infinity()) return z;
    return ProjPoint(z.value().in_field(field_));
}

std::vector<ProjPoint> ThetaContext::orbit(const ProjPoint& a) const {
    std::vector<ProjPoint> out(table_.words.size());
    out[0] = lift(a);
    for (std::size_t i = 1; i < out.size(); ++i)
        out[i] = gens_[table_.words[i][0]](out[static_cast<std::size_t>(table_.suffix[i])]);
    return out;
}

ProjPoint ThetaContext::act_working(const ReducedWord& w, const ProjPoint& z) const {
    ProjPoint r = lift(z);
    for (std::size_t i = w.length(); i-- > 0;) {
        if (w[i] >= gens_.size()) throw DomainError("bad_letter", "letter exceeds generator count");
        r = gens_[w[i]](r);
    }
    return r;
}

ProjPoint ThetaContext::act(const ReducedWord& w, const ProjPoint& z) const { return lower(act_working(w, z)); }

ThetaProduct::ThetaProduct(const ThetaContext& ctx, const ProjPoint& a, const ProjPoint& b, bool even_only,
                           int shift)
    : field_(ctx.field()), work_(ctx.working_field()), error_(ctx.tail_error(shift)) {
    if (same_point(ctx.lift(a), ctx.lift(b))) {
        trivial_ = true;
        return;
    }
    const auto oa = ctx.orbit(a);
    const auto ob = ctx.orbit(b);
    const auto& words = ctx.words().words;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (even_only && words[i].length() % 2) continue;
        if (oa[i].is_infinity() && ob[i].is_infinity()) continue;
        terms_.emplace_back(oa[i], ob[i]);
    }
}

namespace {

struct Partial {
    FieldElement num, den;
    bool zero = false;
};

Partial multiply_range(const std::vector<std::pair<ProjPoint, ProjPoint>>& terms, std::size_t lo, std::size_t hi,
                       const ProjPoint& z, const Field& f) {
    Partial p{FieldElement::from_int(1, f), FieldElement::from_int(1, f)};
    for (std::size_t i = lo; i < hi; ++i) {
        const auto& [A, B] = terms[i];
        if (z.is_infinity()) {
            if (A.is_infinity() || B.is_infinity())
                throw DomainError("pole_hit", "orbit point at infinity while evaluating at infinity");
            continue;
        }
        if (A.is_infinity()) {
            FieldElement d = z.value() - B.value();
            if (d.is_zero()) throw DomainError("pole_hit", "argument lies on the orbit of the pole");
            p.den *= d;
            continue;
        }
        FieldElement n = z.value() - A.value();
        if (B.is_infinity()) {
            if (n.is_zero()) p.zero = true;
            else p.num *= n;
            continue;
        }
        FieldElement d = z.value() - B.value();
        if (d.is_zero()) {
            if (n.is_zero()) throw DomainError("orbit_collision", "argument meets both orbits");
            throw DomainError("pole_hit", "argument lies on the orbit of the pole");
        }
        if (n.is_zero()) p.zero = true;
        else p.num *= n;
        p.den *= d;
    }
    return p;
}

}  // namespace

ThetaValue ThetaProduct::operator()(const ProjPoint& z) const {
    if (trivial_) return {FieldElement::from_int(1, field_), kExact};
    return {evaluate(z).in_field(field_), error_};
}

FieldElement ThetaProduct::evaluate(const ProjPoint& z_in) const {
    if (trivial_) return FieldElement::from_int(1, work_);
    const ProjPoint z = z_in.is_infinity() ? z_in : ProjPoint(z_in.value().in_field(work_, z_in.value().field() != work_));
    constexpr std::size_t kChunk = 4096;
    Partial total{FieldElement::from_int(1, work_), FieldElement::from_int(1, work_)};
    if (terms_.size() < 2 * kChunk) {
        total = multiply_range(terms_, 0, terms_.size(), z, work_);
    } else {
        const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
        const std::size_t chunks = std::min(workers * 4, (terms_.size() + kChunk - 1) / kChunk);
        const std::size_t step = (terms_.size() + chunks - 1) / chunks;
        std::vector<std::future<Partial>> parts;
        for (std::size_t lo = 0; lo < terms_.size(); lo += step) {
            const std::size_t hi = std::min(terms_.size(), lo + step);
            parts.push_back(std::async(std::launch::async, multiply_range, std::cref(terms_), lo, hi, std::cref(z),
                                       std::cref(work_)));
        }
        // reduce in chunk order so the result does not depend on scheduling
        for (auto& f : parts) {
            Partial p = f.get();
            total.num *= p.num;
            total.den *= p.den;
            total.zero = total.zero || p.zero;
        }
    }
    if (total.zero) return FieldElement::zero(work_);
    return total.num / total.den;
}

ThetaValue theta_gamma(const ThetaContext& ctx, const ProjPoint& a, const ProjPoint& b, const ProjPoint& z) {
    return ThetaProduct(ctx, a, b, false)(z);
}

ThetaValue theta_W(const ThetaContext& ctx, const ProjPoint& a, const ProjPoint& b, const ProjPoint& z) {
    return ThetaProduct(ctx, a, b, true)(z);
}

ThetaValue u_alpha(const ThetaContext& ctx, const ReducedWord& alpha, const ProjPoint& omega, const ProjPoint& z) {
    if (alpha.length() % 2) throw DomainError("odd_word", "u_alpha needs a word of even length");
    return ThetaProduct(ctx, omega, ctx.act_working(alpha, omega), true, static_cast<int>(alpha.length()))(z);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Residue> residue_elements(const ResidueField& k) {
    std::vector<Residue> out;
    for (std::int64_t i = 0; i < k.size(); ++i) out.push_back(k.element(i));
    return out;
}

ResidueField residue_field_of(const Field& f) {
    const auto& d = descriptor(f);
    return ResidueField(d.p, d.unramified);
}

// Image of a direction under the residue involution fixing x and y.
DirCoord residue_involution(const ResidueField& k, const DirCoord& x, const DirCoord& y, const DirCoord& z) {
    if (x.inf && y.inf) return z;
    if (y.inf || x.inf) {
        const Residue a = x.inf ? y.r : x.r;
        if (z.inf) return z;
        return {false, k.sub(k.add(a, a), z.r)};
    }
    if (z.inf) return {false, k.mul(k.add(x.r, y.r), k.inv(k.from_int(2)))};
    const Residue s = k.add(x.r, y.r);
    const Residue num = k.sub(k.mul(s, z.r), k.mul(k.from_int(2), k.mul(x.r, y.r)));
    const Residue den = k.sub(k.mul(k.from_int(2), z.r), s);
    if (k.is_zero(den)) return {true, {}};
    return {false, k.mul(num, k.inv(den))};
}

}  // namespace

namespace {

// Generic points on vertex lines of the fixed-point tree, avoiding node and
// mark directions.
std::vector<ProjPoint> vertex_points(const std::vector<FixedPair>& fixed, std::size_t count, std::mt19937_64& rng) {
    const auto labeled = label_pairs(fixed);
    ReductionTree t = build_tree(labeled);
    const Field& f = t.field;
    const ResidueField k = residue_field_of(f);
    const auto all = residue_elements(k);
    const int e = descriptor(f).ramification();
    const FieldElement pi = FieldElement::uniformizer(f);

    std::vector<std::vector<Residue>> allowed(t.num_vertices());
    for (int v = 0; v < t.num_vertices(); ++v) {
        std::vector<DirCoord> special;
        std::vector<DirCoord> nodes;
        for (const auto& [key, dir] : t.edge_direction)
            if (key.first == v) nodes.push_back(dir);
        special = nodes;
        for (const auto& l : t.skeleton.marks[v]) special.push_back(t.mark_direction.at(l));
        for (std::size_t i = 0; i < fixed.size(); ++i) {
            const std::string la = "a" + std::to_string(i), lb = "b" + std::to_string(i);
            if (t.skeleton.vertex_of(la) == v && t.skeleton.vertex_of(lb) == v) {
                const DirCoord x = t.mark_direction.at(la), y = t.mark_direction.at(lb);
                for (const auto& n : nodes) special.push_back(residue_involution(k, x, y, n));
            }
        }
        for (const auto& r : all) {
            const DirCoord d{false, r};
            if (std::find(special.begin(), special.end(), d) == special.end()) allowed[v].push_back(r);
        }
    }
    std::vector<int> usable;
    for (int v = 0; v < t.num_vertices(); ++v)
        if (!allowed[v].empty()) usable.push_back(v);
    if (usable.empty()) throw UnsupportedError("residue_field_too_small", "no free residue on any vertex");

    std::vector<ProjPoint> out;
    while (out.size() < count) {
        const int v = usable[rng() % usable.size()];
        const Residue r = allowed[v][rng() % allowed[v].size()];
        FieldElement u = FieldElement::from_residue(r, f) +
                         pi * FieldElement::from_int(static_cast<std::int64_t>(rng() % (std::uint64_t{1} << 40)), f);
        const auto& tv = t.vertices[v];
        FieldElement z = tv.center + u * pi.pow((tv.radius * Rational(e)).floor());
        bool fresh = true;
        for (const auto& o : out) fresh = fresh && !same_point(o, ProjPoint(z));
        for (const auto& lp : labeled) fresh = fresh && !same_point(lp.point, ProjPoint(z));
        if (fresh) out.emplace_back(z);
    }
    return out;
}

bool all_finite(const std::vector<FixedPair>& fixed) {
    for (const auto& [a, b] : fixed)
        if (a.is_infinity() || b.is_infinity()) return false;
    return true;
}

}  // namespace

bool OrdinaryChart::contains(const ProjPoint& w) const {
    if (w.is_infinity()) return true;
    for (const auto& [a, b] : fixed) {
        const FieldElement d = b.value() - a.value();
        const FieldElement m = (a.value() + b.value()) / FieldElement::from_int(2, d.field());
        const FieldElement x = w.value() - m;
        if (x.is_zero() || !(x.valuation() < d.valuation())) return false;
    }
    return true;
}

std::vector<ProjPoint> OrdinaryChart::sample(std::size_t count, std::mt19937_64& rng) const {
    const Field f = field_of(fixed);
    const int e = descriptor(f).ramification();
    const std::int64_t p = descriptor(f).p;
    const FieldElement pi = FieldElement::uniformizer(f);
    // points beyond the smallest disk holding every fixed point
    Rational outer(0);
    for (const auto& [a, b] : fixed)
        for (const FieldElement& x : {a.value(), b.value(), b.value() - a.value()})
            if (!x.is_zero()) outer = std::min(outer, x.valuation());
    const std::int64_t top = (outer * Rational(e)).floor();
    auto candidates = [&] {
        std::vector<ProjPoint> c = vertex_points(fixed, 4 * count, rng);
        for (std::size_t i = 0; i < 2 * count; ++i) {
            FieldElement u = FieldElement::from_int(1 + static_cast<std::int64_t>(rng() % (p - 1)), f) +
                             pi * FieldElement::from_int(static_cast<std::int64_t>(rng() % (std::uint64_t{1} << 40)), f);
            c.emplace_back(u * pi.pow(top - 1 - static_cast<std::int64_t>(rng() % 2)));
        }
        std::shuffle(c.begin(), c.end(), rng);
        return c;
    };
    std::vector<ProjPoint> out;
    for (int round = 0; round < 64 && out.size() < count; ++round)
        for (const auto& w : candidates()) {
            if (out.size() == count) break;
            if (!contains(w)) continue;
            bool fresh = true;
            for (const auto& o : out) fresh = fresh && !same_point(o, w);
            if (fresh) out.push_back(w);
        }
    if (out.size() < count) throw UnsupportedError("residue_field_too_small", "no interior domain points found");
    return out;
}

OrdinaryChart ordinary_chart(const std::vector<FixedPair>& fixed, std::mt19937_64& rng) {
    const Field f = field_of(fixed);
    auto usable = [&](const OrdinaryChart& oc) {
        if (!all_finite(oc.fixed) || !van_steen_check(oc.fixed, ProjPoint::infinity()).all()) return false;
        try {
            std::mt19937_64 probe(rng());
            oc.sample(1, probe);
            return true;
        } catch (const UnsupportedError&) {
            return false;
        }
    };
    OrdinaryChart id{Mobius::identity(f), fixed};
    if (usable(id)) return id;
    for (int attempt = 0; attempt < 64; ++attempt) {
        const ProjPoint q = vertex_points(fixed, 1, rng)[0];
        // z -> 1/(z - q)
        const Mobius m(FieldElement::zero(f), FieldElement::from_int(1, f), FieldElement::from_int(1, f), -q.value());
        OrdinaryChart oc{m, {}};
        for (const auto& [a, b] : fixed) oc.fixed.emplace_back(apply(m, a), apply(m, b));
        if (usable(oc)) return oc;
    }
    throw UnsupportedError("no_ordinary_chart", "no base point with disjoint isometric disks");
}

std::vector<ProjPoint> sample_domain_points(const std::vector<FixedPair>& fixed, std::size_t count,
                                            std::mt19937_64& rng) {
    const OrdinaryChart oc = ordinary_chart(fixed, rng);
    const Mobius back = oc.to_chart.inverse();
    std::vector<ProjPoint> out;
    for (const auto& w : oc.sample(count, rng)) out.push_back(apply(back, w));
    return out;
}

// ---------------------------------------------------------------------------
// Charts.

namespace {

bool small(const FieldElement& x) { return !x.is_zero() && x.valuation() > Rational(0); }
bool unit(const FieldElement& x) { return !x.is_zero() && x.valuation() == Rational(0); }
bool large(const FieldElement& x) { return !x.is_zero() && x.valuation() < Rational(0); }

FieldElement num(std::int64_t v, const FieldElement& like) { return FieldElement::from_int(v, like.field()); }
FieldElement one(const FieldElement& like) { return num(1, like); }

ProjPoint P(const FieldElement& x) { return ProjPoint(x); }
ProjPoint zero_pt(const FieldElement& like) { return ProjPoint(FieldElement::zero(like.field())); }
ProjPoint one_pt(const FieldElement& like) { return ProjPoint(one(like)); }

const FieldElement& fin(const ProjPoint& p) {
    if (p.is_infinity()) throw DomainError("chart_mismatch", "unexpected point at infinity for this chart");
    return p.value();
}

bool all_small(const Coords& x, std::initializer_list<std::size_t> idx) {
    for (auto i : idx)
        if (!small(x[i])) return false;
    return true;
}

Coords scale(const Coords& y, std::initializer_list<std::pair<std::size_t, std::int64_t>> factors) {
    Coords out = y;
    for (auto [i, d] : factors) out[i] = y[i] / num(d, y[i]);
    return out;
}

std::vector<Chart> build_registry() {
    std::vector<Chart> reg;
    auto sig2 = [](const std::string& n) {
        for (const auto& c : genus2_catalog())
            if (c.name == n) return configuration_signature(c.config.skeleton);
        throw std::logic_error("catalog entry missing");
    };
    auto sig3 = [](const std::string& n) {
        for (const auto& c : genus3_catalog())
            if (c.name == n) return configuration_signature(c.config.skeleton);
        throw std::logic_error("catalog entry missing");
    };

    {
        Chart c;
        c.name = "g2a";
        c.description = "genus 2, three pairs on leaves of a star; a0=0, a1=1, a2=inf";
        c.signature = sig2("a");
        c.genus = 2;
        c.coord_names = {"B0", "B1", "B2"};
        c.to_zero = 0, c.to_one = 2, c.to_infinity = 4;
        c.coord_kinds = "sss";
        c.points = [](const Coords& x) {
            return std::vector<ProjPoint>{zero_pt(x[0]), P(x[0]), one_pt(x[0]), P(one(x[1]) + x[1]),
                                          ProjPoint(), P(x[2].inverse())};
        };
        c.coords = [](const std::vector<ProjPoint>& p) {
            return Coords{fin(p[1]), fin(p[3]) - one(fin(p[3])), fin(p[5]).inverse()};
        };
        c.fix_ok = [](const Coords& x) { return all_small(x, {0, 1, 2}); };
        c.branch_ok = c.fix_ok;
        c.lead = [](const Coords& x) { return Coords{x[0].times_int(2), x[1].times_int(2), x[2].times_int(2)}; };
        c.printed_lead = c.lead;
        c.lead_inverse = [](const Coords& y, const RootPicker&) { return scale(y, {{0, 2}, {1, 2}, {2, 2}}); };
        reg.push_back(std::move(c));
    }
    {
        Chart c;
        c.name = "g2b";
        c.description = "genus 2, chain of three lines carrying one pair each; a0=0, a1=1, a2=inf";
        c.signature = sig2("b");
        c.genus = 2;
        c.coord_names = {"b0", "b1", "b2"};
        c.to_zero = 0, c.to_one = 2, c.to_infinity = 4;
        c.root_coords = {1};
        c.coord_kinds = "sul";
        c.points = [](const Coords& x) {
            return std::vector<ProjPoint>{zero_pt(x[0]), P(x[0]), one_pt(x[0]), P(x[1]), ProjPoint(), P(x[2])};
        };
        c.coords = [](const std::vector<ProjPoint>& p) { return Coords{fin(p[1]), fin(p[3]), fin(p[5])}; };
        c.branch_ok = [](const Coords& x) {
            return small(x[0]) && unit(x[1]) && unit(x[1] - one(x[1])) && large(x[2]);
        };
        c.fix_ok = [b = c.branch_ok](const Coords& x) { return b(x) && unit(x[1] + one(x[1])); };
        c.lead = [](const Coords& x) {
            const FieldElement b1p = x[1] + one(x[1]);
            return Coords{x[1].times_int(4) / b1p * x[0], x[1] * x[1], b1p / num(4, x[1]) * x[2]};
        };
        c.printed_lead = c.lead;
        c.lead_inverse = [](const Coords& y, const RootPicker& pick) {
            const FieldElement b1 = pick(0, sqrt_or_throw(y[1]));
            const FieldElement b1p = b1 + one(b1);
            return Coords{b1p / b1.times_int(4) * y[0], b1, num(4, b1) / b1p * y[2]};
        };
        reg.push_back(std::move(c));
    }
    {
        Chart c;
        c.name = "g2c";
        c.description = "genus 2, chain 2-1-1-2 with the middle pair split; a0=0, a1=1, a2=inf";
        c.signature = sig2("c");
        c.genus = 2;
        c.coord_names = {"B0", "B1", "B2"};
        c.to_zero = 0, c.to_one = 2, c.to_infinity = 4;
        c.root_coords = {1};
        c.coord_kinds = "sss";
        c.points = [](const Coords& x) {
            return std::vector<ProjPoint>{zero_pt(x[0]), P(x[0] * x[1]), one_pt(x[0]), P(x[1]),
                                          ProjPoint(), P(x[2].inverse())};
        };
        c.coords = [](const std::vector<ProjPoint>& p) {
            return Coords{fin(p[1]) / fin(p[3]), fin(p[3]), fin(p[5]).inverse()};
        };
        c.fix_ok = [](const Coords& x) { return all_small(x, {0, 1, 2}); };
        c.branch_ok = c.fix_ok;
        c.lead = [](const Coords& x) { return Coords{x[0].times_int(4), x[1] * x[1], x[2].times_int(4)}; };
        c.printed_lead = c.lead;
        c.lead_inverse = [](const Coords& y, const RootPicker& pick) {
            return Coords{y[0] / num(4, y[0]), pick(0, sqrt_or_throw(y[1])), y[2] / num(4, y[2])};
        };
        reg.push_back(std::move(c));
    }
    {
        Chart c;
        c.name = "ros_a";
        c.description = "genus 2 configuration (a) in Rosenhain position; a0=0, a2=1, b2=inf";
        c.signature = sig2("a");
        c.genus = 2;
        c.coord_names = {"B0", "B1", "T"};
        c.to_zero = 0, c.to_one = 4, c.to_infinity = 5;
        c.coord_kinds = "sss";
        c.points = [](const Coords& x) {
            return std::vector<ProjPoint>{zero_pt(x[0]),        P(x[0] * x[1]), P(x[1] * (one(x[2]) + x[2])),
                                          P(x[1]),              one_pt(x[0]),   ProjPoint()};
        };
        c.coords = [](const std::vector<ProjPoint>& p) {
            const FieldElement& b1 = fin(p[3]);
            return Coords{fin(p[1]) / b1, b1, fin(p[2]) / b1 - one(b1)};
        };
        c.fix_ok = [](const Coords& x) { return all_small(x, {0, 1, 2}); };
        c.branch_ok = c.fix_ok;
        c.lead = [](const Coords& x) { return Coords{x[0].times_int(2), x[1].times_int(2), x[2].times_int(2)}; };
        c.printed_lead = [](const Coords& x) { return Coords{x[0].times_int(2), x[1].times_int(2), x[2]}; };
        c.lead_inverse = [](const Coords& y, const RootPicker&) { return scale(y, {{0, 2}, {1, 2}, {2, 2}}); };
        reg.push_back(std::move(c));
    }
    {
        Chart c;
        c.name = "ros_b";
        c.description = "genus 2 configuration (b) in Rosenhain position; a0=0, a2=1, b2=inf";
        c.signature = sig2("b");
        c.genus = 2;
        c.coord_names = {"B0", "B1", "T"};
        c.to_zero = 0, c.to_one = 4, c.to_infinity = 5;
        c.root_coords = {2};
        c.coord_kinds = "ssu";
        c.points = [](const Coords& x) {
            return std::vector<ProjPoint>{zero_pt(x[0]), P(x[0] * x[1]), P(x[1] * x[2]),
                                          P(x[1]),       one_pt(x[0]),   ProjPoint()};
        };
        c.coords = [](const std::vector<ProjPoint>& p) {
            const FieldElement& b1 = fin(p[3]);
            return Coords{fin(p[1]) / b1, b1, fin(p[2]) / b1};
        };
        c.branch_ok = [](const Coords& x) {
            return small(x[0]) && small(x[1]) && unit(x[2]) && unit(x[2] - one(x[2]));
        };
        c.fix_ok = [b = c.branch_ok](const Coords& x) { return b(x) && unit(x[2] + one(x[2])); };
        c.lead = [](const Coords& x) {
            const FieldElement tp = one(x[2]) + x[2];
            return Coords{x[2].times_int(4) / tp * x[0], num(4, x[1]) / tp * x[1], x[2] * x[2]};
        };
        c.printed_lead = [](const Coords& x) {
            const FieldElement tp = one(x[2]) + x[2];
            return Coords{x[2].times_int(16) / (tp * tp) * x[0], x[2].times_int(4) / tp * x[1], x[2] * x[2]};
        };
        c.lead_inverse = [](const Coords& y, const RootPicker& pick) {
            const FieldElement t = pick(0, sqrt_or_throw(y[2]));
            const FieldElement tp = one(t) + t;
            return Coords{tp / t.times_int(4) * y[0], tp / num(4, t) * y[1], t};
        };
        reg.push_back(std::move(c));
    }
    {
        Chart c;
        c.name = "ros_c";
        c.description = "genus 2 configuration (c) in Rosenhain position; a0=0, a2=1, b2=inf";
        c.signature = sig2("c");
        c.genus = 2;
        c.coord_names = {"B0", "T", "B1"};
        c.to_zero = 0, c.to_one = 4, c.to_infinity = 5;
        c.root_coords = {1};
        c.coord_kinds = "sss";
        c.points = [](const Coords& x) {
            return std::vector<ProjPoint>{zero_pt(x[0]), P(x[0] * x[1] * x[2]), P(x[1] * x[2]),
                                          P(x[2]),       one_pt(x[0]),          ProjPoint()};
        };
        c.coords = [](const std::vector<ProjPoint>& p) {
            return Coords{fin(p[1]) / fin(p[2]), fin(p[2]) / fin(p[3]), fin(p[3])};
        };
        c.fix_ok = [](const Coords& x) { return all_small(x, {0, 1, 2}); };
        c.branch_ok = c.fix_ok;
        c.lead = [](const Coords& x) { return Coords{x[0].times_int(4), x[1] * x[1], x[2].times_int(4)}; };
        c.printed_lead = c.lead;
        c.lead_inverse = [](const Coords& y, const RootPicker& pick) {
            return Coords{y[0] / num(4, y[0]), pick(0, sqrt_or_throw(y[1])), y[2] / num(4, y[2])};
        };
        reg.push_back(std::move(c));
    }
    {
        Chart c;
        c.name = "g3_1";
        c.description = "genus 3 configuration 1 (chain 2-1-1-1-1-2); a0=0, a3=1, b3=inf";
        c.signature = sig3("1");
        c.genus = 3;
        c.coord_names = {"B0", "A1", "B1", "A2", "B2"};
        c.to_zero = 0, c.to_one = 6, c.to_infinity = 7;
        c.root_coords = {1, 3};
        c.coord_kinds = "sssss";
        c.points = [](const Coords& x) {
            const FieldElement a2 = x[3] * x[4];
            const FieldElement b1 = x[2] * a2;
            const FieldElement a1 = x[1] * b1;
            return std::vector<ProjPoint>{zero_pt(x[0]), P(x[0] * a1), P(a1), P(b1), P(a2), P(x[4]),
                                          one_pt(x[0]),  ProjPoint()};
        };
        c.coords = [](const std::vector<ProjPoint>& p) {
            return Coords{fin(p[1]) / fin(p[2]), fin(p[2]) / fin(p[3]), fin(p[3]) / fin(p[4]),
                          fin(p[4]) / fin(p[5]), fin(p[5])};
        };
        c.fix_ok = [](const Coords& x) { return all_small(x, {0, 1, 2, 3, 4}); };
        c.branch_ok = c.fix_ok;
        c.lead = [](const Coords& x) {
            return Coords{x[0].times_int(4), x[1] * x[1], x[2].times_int(4), x[3] * x[3], x[4].times_int(4)};
        };
        c.printed_lead = c.lead;
        c.lead_inverse = [](const Coords& y, const RootPicker& pick) {
            return Coords{y[0] / num(4, y[0]), pick(0, sqrt_or_throw(y[1])), y[2] / num(4, y[2]),
                          pick(1, sqrt_or_throw(y[3])), y[4] / num(4, y[4])};
        };
        reg.push_back(std::move(c));
    }
    {
        Chart c;
        c.name = "g3_4";
        c.description = "genus 3 configuration 4; a0=0, a3=1, b3=inf";
        c.signature = sig3("4");
        c.genus = 3;
        c.coord_names = {"B0", "B1", "B2", "A", "T"};
        c.to_zero = 0, c.to_one = 6, c.to_infinity = 7;
        c.root_coords = {2, 3};
        c.coord_kinds = "sssss";
        c.points = [](const Coords& x) {
            const FieldElement b2 = x[1] * x[2];
            const FieldElement a1 = b2 * x[3];
            return std::vector<ProjPoint>{zero_pt(x[0]), P(x[0] * a1), P(a1),       P(x[1]),
                                          P(b2 * (one(x[4]) + x[4])), P(b2), one_pt(x[0]), ProjPoint()};
        };
        c.coords = [](const std::vector<ProjPoint>& p) {
            const FieldElement& b1 = fin(p[3]);
            const FieldElement& b2 = fin(p[5]);
            return Coords{fin(p[1]) / fin(p[2]), b1, b2 / b1, fin(p[2]) / b2, fin(p[4]) / b2 - one(b2)};
        };
        c.fix_ok = [](const Coords& x) { return all_small(x, {0, 1, 2, 3, 4}); };
        c.branch_ok = c.fix_ok;
        c.lead = [](const Coords& x) {
            return Coords{x[0].times_int(4), x[1].times_int(4), -(x[2] * x[2]), -(x[3] * x[3]), x[4].times_int(4)};
        };
        c.printed_lead = [](const Coords& x) {
            const FieldElement tp = one(x[4]) + x[4];
            return Coords{x[0].times_int(4), x[1].times_int(-4), num(-2, x[4]) / (tp + one(tp)) * x[2] * x[2],
                          tp.times_int(-2) * x[3] * x[3], tp * tp * tp - one(tp) - x[4]};
        };
        c.lead_inverse = [](const Coords& y, const RootPicker& pick) {
            return Coords{y[0] / num(4, y[0]), y[1] / num(4, y[1]), pick(0, sqrt_or_throw(-y[2])),
                          pick(1, sqrt_or_throw(-y[3])), y[4] / num(4, y[4])};
        };
        reg.push_back(std::move(c));
    }
    {
        Chart c;
        c.name = "g3_8";
        c.description = "genus 3 configuration 8, star with the pair a0,b0 on the centre; a0=0, b0=inf, a1=1";
        c.signature = sig3("8");
        c.genus = 3;
        c.coord_names = {"B1", "B2", "B3", "T2", "T3"};
        c.to_zero = 0, c.to_one = 2, c.to_infinity = 1;
        c.root_coords = {3, 4};
        c.coord_kinds = "sssuu";
        c.points = [](const Coords& x) {
            return std::vector<ProjPoint>{zero_pt(x[0]), ProjPoint(),       one_pt(x[0]), P(one(x[0]) + x[0]),
                                          P(x[3]),       P(x[3] + x[1]),    P(x[4]),      P(x[4] + x[2])};
        };
        c.coords = [](const std::vector<ProjPoint>& p) {
            const FieldElement& t2 = fin(p[4]);
            const FieldElement& t3 = fin(p[6]);
            return Coords{fin(p[3]) - one(t2), fin(p[5]) - t2, fin(p[7]) - t3, t2, t3};
        };
        c.branch_ok = [](const Coords& x) {
            const FieldElement o = one(x[3]);
            return all_small(x, {0, 1, 2}) && unit(x[3]) && unit(x[4]) && unit(x[3] - o) && unit(x[4] - o) &&
                   unit(x[3] - x[4]);
        };
        c.fix_ok = [](const Coords& x) {
            const FieldElement o = one(x[3]);
            const FieldElement s2 = x[3] * x[3], s3 = x[4] * x[4];
            return all_small(x, {0, 1, 2}) && unit(x[3]) && unit(x[4]) && unit(s2 - o) && unit(s3 - o) &&
                   unit(s2 - s3);
        };
        c.lead = [](const Coords& x) {
            return Coords{x[0].times_int(4), x[3].times_int(4) * x[1], x[4].times_int(4) * x[2], x[3] * x[3],
                          x[4] * x[4]};
        };
        c.printed_lead = c.lead;
        c.lead_inverse = [](const Coords& y, const RootPicker& pick) {
            const FieldElement t2 = pick(0, sqrt_or_throw(y[3]));
            const FieldElement t3 = pick(1, sqrt_or_throw(y[4]));
            return Coords{y[0] / num(4, y[0]), y[1] / t2.times_int(4), y[2] / t3.times_int(4), t2, t3};
        };
        reg.push_back(std::move(c));
    }
    {
        Chart c;
        c.name = "g3_10";
        c.description = "genus 3 configuration 10, star with four leaf pairs; a0=0, a1=1, a3=inf";
        c.signature = sig3("10");
        c.genus = 3;
        c.coord_names = {"B0", "T1", "T2", "A", "B3"};
        c.to_zero = 0, c.to_one = 2, c.to_infinity = 6;
        c.coord_kinds = "sssus";
        c.points = [](const Coords& x) {
            return std::vector<ProjPoint>{zero_pt(x[0]), P(x[0]),        one_pt(x[0]), P(one(x[1]) + x[1]),
                                          P(x[3]),       P(x[3] + x[2]), ProjPoint(),  P(x[4].inverse())};
        };
        c.coords = [](const std::vector<ProjPoint>& p) {
            const FieldElement& a = fin(p[4]);
            return Coords{fin(p[1]), fin(p[3]) - one(a), fin(p[5]) - a, a, fin(p[7]).inverse()};
        };
        c.fix_ok = [](const Coords& x) {
            return all_small(x, {0, 1, 2, 4}) && unit(x[3]) && unit(x[3] - one(x[3]));
        };
        c.branch_ok = c.fix_ok;
        c.lead = [](const Coords& x) {
            return Coords{x[0].times_int(2), x[1].times_int(2), x[2].times_int(2), x[3], x[4].times_int(2)};
        };
        c.printed_lead = [](const Coords& x) {
            return Coords{x[0].times_int(2), x[1], x[2], x[3], x[4].times_int(2)};
        };
        c.lead_inverse = [](const Coords& y, const RootPicker&) {
            return scale(y, {{0, 2}, {1, 2}, {2, 2}, {4, 2}});
        };
        reg.push_back(std::move(c));
    }
    return reg;
}

}  // namespace

const std::vector<Chart>& chart_registry() {
    static const std::vector<Chart> reg = build_registry();
    return reg;
}

const Chart& chart(const std::string& name) {
    for (const auto& c : chart_registry())
        if (c.name == name) return c;
    throw UnsupportedError("unknown_chart", "no coordinate chart named '" + name + "'");
}

std::vector<std::string> chart_labels(int genus) {
    std::vector<std::string> out;
    for (int i = 0; i <= genus; ++i) {
        out.push_back("a" + std::to_string(i));
        out.push_back("b" + std::to_string(i));
    }
    return out;
}

Coords sample_fix_coords(const Chart& ch, const Field& f, std::mt19937_64& rng) {
    const std::int64_t p = descriptor(f).p;
    const ResidueField k = residue_field_of(f);
    const FieldElement pi = FieldElement::uniformizer(f);
    auto rand_unit = [&] {
        Residue r;
        do r = k.element(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(k.size())));
        while (k.is_zero(r));
        return FieldElement::from_residue(r, f) +
               pi * FieldElement::from_int(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p * p)), f);
    };
    for (int attempt = 0; attempt < 2000; ++attempt) {
        Coords x;
        for (char kind : ch.coord_kinds) {
            FieldElement u = rand_unit();
            const std::int64_t e = 1 + static_cast<std::int64_t>(rng() % 2);
            if (kind == 's') u = u * pi.pow(e);
            else if (kind == 'l') u = u * pi.pow(-e);
            x.push_back(u);
        }
        if (ch.fix_ok(x)) return x;
    }
    throw UnsupportedError("residue_field_too_small",
                           "cannot sample restricted coordinates for chart " + ch.name + " over " +
                               descriptor(f).str());
}

std::vector<ProjPoint> ChartTuple::points() const { return whittaker::chart(chart).points(coords); }

std::vector<LabeledPoint> ChartTuple::labeled_points() const {
    const Chart& ch = whittaker::chart(chart);
    const auto pts = ch.points(coords);
    const auto labels = chart_labels(ch.genus);
    std::vector<LabeledPoint> out;
    for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({labels[i], pts[i]});
    return out;
}

std::vector<FixedPair> ChartTuple::pairs() const {
    const auto pts = points();
    std::vector<FixedPair> out;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) out.emplace_back(pts[i], pts[i + 1]);
    return out;
}

// ---------------------------------------------------------------------------
// FB and its inverse.

FbResult fb_map(const FixTuple& fix, const FbOptions& opt) {
    const Chart& ch = chart(fix.chart);
    if (fix.coords.size() != ch.coord_names.size())
        throw DomainError("bad_tuple", "wrong number of coordinates for chart " + ch.name);
    if (!ch.fix_ok(fix.coords))
        throw DomainError("chart_inequalities", "fixed-point tuple violates the inequalities of chart " + ch.name);
    const auto pts = ch.points(fix.coords);
    const auto pairs = fix.pairs();
    ThetaContext ctx(pairs, opt.length);
    const Field& f = ctx.field();

    std::vector<ProjPoint> out(pts.size());
    Rational err = ctx.tail_error();
    if (!opt.aux) {
        ThetaProduct F(ctx, pts[ch.to_zero], pts[ch.to_one], false);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == ch.to_zero) out[i] = ProjPoint(FieldElement::zero(f));
            else if (i == ch.to_one) out[i] = ProjPoint(FieldElement::from_int(1, f));
            else if (i == ch.to_infinity) out[i] = ProjPoint();
            else {
                const ThetaValue v = F(pts[i]);
                const FieldElement d = v.value - FieldElement::from_int(1, f);
                if (d.is_zero()) throw PrecisionError("fb_precision", "F value indistinguishable from 1");
                out[i] = ProjPoint(v.value / d);
                if (d.valuation() > Rational(0)) err = std::min(err, v.error - d.valuation());
            }
        }
    } else {
        ThetaProduct F(ctx, opt.aux->first, opt.aux->second, false);
        std::vector<ProjPoint> img(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const ThetaValue v = F(pts[i]);
            img[i] = ProjPoint(v.value);
        }
        const Mobius m = mobius_to_01inf(img[ch.to_zero], img[ch.to_one], img[ch.to_infinity]);
        for (std::size_t i = 0; i < pts.size(); ++i) out[i] = apply(m, img[i]);
        out[ch.to_zero] = ProjPoint(FieldElement::zero(f));
        out[ch.to_one] = ProjPoint(FieldElement::from_int(1, f));
        out[ch.to_infinity] = ProjPoint();
    }
    FbResult r{{fix.chart, ch.coords(out)}, err};
    if (opt.check_configuration) {
        const auto labels = chart_labels(ch.genus);
        std::vector<LabeledPoint> lp;
        for (std::size_t i = 0; i < out.size(); ++i) lp.push_back({labels[i], out[i]});
        const std::string sig = configuration_signature(build_tree(lp).skeleton);
        if (sig != ch.signature)
            throw DomainError("configuration_drift",
                              "branch points have configuration " + sig + ", expected " + ch.signature);
    }
    return r;
}

int length_for_target(const Rational& pi_valuation, int target) {
    if (pi_valuation <= Rational(0)) throw DomainError("bad_size_bound", "size bound must be positive");
    int L = 2;
    while (Rational(L) * pi_valuation < Rational(target)) ++L;
    return L;
}

namespace {

Rational residual_of(const Coords& got, const Coords& want) {
    Rational r = kExact;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const FieldElement d = got[i] - want[i];
        if (d.is_exact_zero()) continue;
        r = std::min(r, d.valuation() - want[i].valuation());
    }
    return r;
}

}  // namespace

std::vector<FbSheet> fb_inverse(const BranchTuple& branch, const FbInverseOptions& opt) {
    const Chart& ch = chart(branch.chart);
    const Coords& y = branch.coords;
    if (y.size() != ch.coord_names.size())
        throw DomainError("bad_tuple", "wrong number of coordinates for chart " + ch.name);
    if (!ch.branch_ok(y))
        throw DomainError("chart_inequalities", "branch tuple violates the inequalities of chart " + ch.name);

    std::vector<FbSheet> sheets;
    for (std::size_t sheet = 0; sheet < ch.sheet_count(); ++sheet) {
        RootPicker by_sign = [sheet](std::size_t i, const FieldElement& r) { return (sheet >> i) & 1 ? -r : r; };
        Coords x = ch.lead_inverse(y, by_sign);
        if (!ch.fix_ok(x))
            throw UnsupportedError("initializer_not_restricted",
                                   "leading-order initial solution leaves the Fix chart " + ch.name);
        const Rational pi = fixed_point_size_bound(FixTuple{ch.name, x}.pairs());
        const int final_len = opt.length ? *opt.length : std::min(opt.max_length, length_for_target(pi, opt.target));

        FbSheet s;
        Rational best = -kExact;
        int stalls = 0;
        for (int it = 0;; ++it) {
            const int L = opt.length ? *opt.length : std::min(final_len, 2 + it);
            FbOptions fo;
            fo.length = L;
            fo.check_configuration = false;
            const Coords fb = fb_map(FixTuple{ch.name, x}, fo).branch.coords;
            const Rational res = residual_of(fb, y);
            s.iterations = it;
            s.residual = res;
            if (L == final_len) {
                if (res >= Rational(opt.target)) break;
                if (res > best) {
                    best = res;
                    stalls = 0;
                } else if (++stalls >= 3) {
                    throw PrecisionError("non_contraction", "fb_inverse iteration stopped improving at residual " +
                                                                res.str() + " in chart " + ch.name);
                }
            }
            if (it >= opt.max_iterations)
                throw PrecisionError("non_contraction", "fb_inverse exceeded the iteration limit");
            const Coords lx = ch.lead(x);
            Coords t(y.size());
            for (std::size_t k = 0; k < y.size(); ++k) t[k] = lx[k] * y[k] / fb[k];
            const Coords prev = x;
            RootPicker nearest = [&](std::size_t i, const FieldElement& r) {
                const FieldElement& old = prev[ch.root_coords[i]];
                const FieldElement dp = r - old, dm = r + old;
                if (dp.is_zero()) return r;
                if (dm.is_zero()) return FieldElement(-r);
                return dp.valuation() >= dm.valuation() ? r : -r;
            };
            x = ch.lead_inverse(t, nearest);
            if (!ch.fix_ok(x))
                throw PrecisionError("non_contraction", "iterate left the Fix chart " + ch.name);
        }
        s.fix = FixTuple{ch.name, x};
        s.length = final_len;
        s.certified = Rational(final_len) * pi;
        std::vector<LabelPair> lp;
        for (int i = 0; i <= ch.genus; ++i) lp.emplace_back("a" + std::to_string(i), "b" + std::to_string(i));
        s.restricted = restricted_check(build_tree(s.fix.labeled_points()), lp);
        sheets.push_back(std::move(s));
    }
    return sheets;
}

// ---------------------------------------------------------------------------
// Equations.

namespace {

ReducedWord gamma_word(int g) {
    std::vector<std::uint8_t> letters;
    for (int j = 1; j <= g; ++j) {
        letters.push_back(static_cast<std::uint8_t>(j));
        letters.push_back(0);
    }
    return ReducedWord(letters);
}

std::vector<FixedPair> moved(const Mobius& m, const std::vector<FixedPair>& fixed) {
    std::vector<FixedPair> out;
    for (const auto& [a, b] : fixed) out.emplace_back(apply(m, a), apply(m, b));
    return out;
}

}  // namespace

struct Uniformization::Setup {
    Mobius move;
    OrdinaryChart domain;
    Mobius back;
};

namespace {

Uniformization::Setup make_setup(const std::vector<FixedPair>& fixed, const EquationOptions& opt) {
    for (const auto& [a, b] : fixed)
        if (same_point(a, b)) throw DomainError("degenerate_pair", "fixed points of a generator coincide");
    std::mt19937_64 rng(opt.seed);
    if (opt.chart == EquationChart::InfinityBranch) {
        const Mobius m = mobius_to_01inf(fixed[0].first, fixed[1].first, fixed[0].second);
        OrdinaryChart oc = ordinary_chart(moved(m, fixed), rng);
        const Mobius back = oc.to_chart.inverse();
        return {m, std::move(oc), back};
    }
    OrdinaryChart oc = ordinary_chart(fixed, rng);
    const Mobius m = oc.to_chart;
    return {m, std::move(oc), Mobius::identity(field_of(fixed))};
}

}  // namespace

Uniformization::Uniformization(const std::vector<FixedPair>& fixed, const EquationOptions& opt)
    : Uniformization(fixed, opt, make_setup(fixed, opt)) {}

Uniformization::Uniformization(const std::vector<FixedPair>& fixed, const EquationOptions& opt, Setup setup)
    : chart_(opt.chart),
      move_(setup.move),
      domain_(std::move(setup.domain)),
      domain_back_(setup.back),
      ctx_(moved(move_, fixed), opt.length) {
    const auto& fx = ctx_.fixed_points();
    const int g = ctx_.genus();
    const Field& w = ctx_.working_field();
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<ProjPoint> aux;
    for (const auto& p : domain_points(3, rng)) aux.push_back(ctx_.lift(p));
    const ReducedWord gamma = gamma_word(g);
    omega_ = aux[2];
    h_parts_.emplace_back(ctx_, omega_, ctx_.act_working(gamma, omega_), true, static_cast<int>(gamma.length()));
    const FieldElement one = FieldElement::from_int(1, w);

    if (chart_ == EquationChart::InfinityOrdinary) {
        const ProjPoint& a = aux[0];
        const ProjPoint& b = aux[1];
        f_.emplace(ctx_, a, b, false);
        const ProjPoint s0b = ctx_.act_working(ReducedWord({0}), b);
        for (const auto& [ai, bi] : fx) {
            h_parts_.emplace_back(ctx_, ai, b, true, 0);
            h_parts_.emplace_back(ctx_, bi, s0b, true, 1);
        }
        FieldElement cinv = one;
        error_ = f_->error();
        for (const auto& [ai, bi] : fx) {
            for (const auto& pt : {ai, bi}) {
                const FieldElement r = f_->evaluate(pt);
                roots_.push_back(r);
                const FieldElement d = one - r;
                cinv *= d;
                error_ = std::min(error_, difference_error(r, f_->error(), one, kExact, d));
            }
        }
        c_ = cinv.inverse();
    } else {
        const ProjPoint& a0 = fx[0].first;
        const ProjPoint& b0 = fx[0].second;
        f_.emplace(ctx_, a0, b0, false);
        h_parts_.emplace_back(ctx_, a0, b0, true, 0);
        for (int j = 1; j <= g; ++j) {
            h_parts_.emplace_back(ctx_, fx[j].first, b0, true, 0);
            h_parts_.emplace_back(ctx_, fx[j].second, b0, true, 0);
        }
        roots_.push_back(FieldElement::zero(w));
        for (int j = 1; j <= g; ++j) {
            roots_.push_back(f_->evaluate(fx[j].first));
            roots_.push_back(f_->evaluate(fx[j].second));
        }
        const ProjPoint& z = aux[0];
        const FieldElement h = h_working(z);
        const FieldElement fz = f_->evaluate(z);
        FieldElement prod = one;
        Rational err = std::min(h_error(), f_->error());
        for (const auto& r : roots_) {
            const FieldElement d = fz - r;
            prod *= d;
            err = std::min(err, difference_error(fz, f_->error(), r, f_->error(), d));
        }
        c_ = h * h / prod;
        error_ = err;
    }
}

Rational Uniformization::difference_error(const FieldElement& x, const Rational& ex, const FieldElement& y,
                                          const Rational& ey, const FieldElement& d) {
    if (d.is_zero()) throw DomainError("root_collision", "value coincides with a branch value");
    Rational e = kExact;
    if (!x.is_zero()) e = std::min(e, ex + x.valuation() - d.valuation());
    if (!y.is_zero()) e = std::min(e, ey + y.valuation() - d.valuation());
    return e;
}

FieldElement Uniformization::h_working(const ProjPoint& z) const {
    FieldElement out = FieldElement::from_int(1, ctx_.working_field());
    for (const auto& part : h_parts_) out *= part.evaluate(z);
    return out;
}

Rational Uniformization::h_error() const {
    Rational e = kExact;
    for (const auto& part : h_parts_) e = std::min(e, part.error());
    return e;
}

std::vector<FieldElement> Uniformization::roots() const {
    std::vector<FieldElement> out;
    for (const auto& r : roots_) out.push_back(r.in_field(ctx_.field()));
    return out;
}

ThetaValue Uniformization::F(const ProjPoint& z) const { return (*f_)(z); }

ThetaValue Uniformization::H(const ProjPoint& z) const { return {h_working(z).in_field(ctx_.field()), h_error()}; }

Uniformization::RelationCheck Uniformization::check_relation(const ProjPoint& z) const {
    const FieldElement h = h_working(z);
    const FieldElement fz = f_->evaluate(z);
    FieldElement rhs = c_;
    Rational cert = std::min(h_error(), error_);
    for (const auto& r : roots_) {
        const FieldElement d = fz - r;
        rhs *= d;
        cert = std::min(cert, difference_error(fz, f_->error(), r, f_->error(), d));
    }
    const FieldElement q = h * h / rhs - FieldElement::from_int(1, ctx_.working_field());
    return {q.is_exact_zero() ? kExact : q.valuation(), cert};
}

std::vector<ProjPoint> Uniformization::domain_points(std::size_t count, std::mt19937_64& rng) const {
    std::vector<ProjPoint> out;
    for (const auto& w : domain_.sample(count, rng)) out.push_back(apply(domain_back_, w));
    return out;
}

Equation hyperelliptic_equation(const std::vector<FixedPair>& fixed, const EquationOptions& opt) {
    Uniformization u(fixed, opt);
    Equation e;
    e.roots = u.roots();
    e.c = u.c();
    e.c_is_square = is_square(u.c());
    e.error = u.error();
    return e;
}

ThetaValue h_function(const std::vector<FixedPair>& fixed, const ProjPoint& z, const EquationOptions& opt) {
    Uniformization u(fixed, opt);
    return u.H(u.to_working(z));
}

}  // namespace whittaker
