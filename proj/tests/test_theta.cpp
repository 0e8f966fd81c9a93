#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "whittaker/theta.hpp"

using namespace whittaker;
using testing::field;
using testing::num;
using testing::pt;
using testing::v1;

namespace {

// g3_8 needs unit residues outside {1, 4}, which Q5 lacks
Field chart_field(const Chart& ch, int precision = 20) {
    return field(ch.name == "g3_8" ? "5,2" : "5", precision);
}

std::vector<FixedPair> pairs_of(const std::vector<std::pair<const char*, const char*>>& items, const Field& f) {
    std::vector<FixedPair> out;
    for (const auto& [a, b] : items) out.emplace_back(pt(a, f), pt(b, f));
    return out;
}

Rational rel(const FieldElement& x, const FieldElement& y) { return v1(x / y); }

int fundamental_d(const Chart& ch, const Field& f) {
    std::mt19937_64 rng(0);
    const FixTuple fix{ch.name, sample_fix_coords(ch, f, rng)};
    const auto t = build_tree(fix.labeled_points());
    std::vector<LabelPair> pairs;
    for (int i = 0; i <= ch.genus; ++i) pairs.emplace_back("a" + std::to_string(i), "b" + std::to_string(i));
    return enumerate_fundamental_domains(double_graph(classify(t, pairs))).d;
}

}  // namespace

TEST_CASE("theta_gamma trivial cases") {
    const Field f = field("5", 20);
    const auto fixed = pairs_of({{"0", "25"}, {"1", "2"}, {"inf", "1/5"}}, f);
    const ThetaContext ctx(fixed, 3);
    const ProjPoint z = pt("3/7", f);
    CHECK(theta_gamma(ctx, pt("2/3", f), pt("2/3", f), z).value.equal_at(num("1", f), Rational(20)));
    CHECK(theta_W(ctx, pt("2/3", f), pt("2/3", f), z).value.equal_at(num("1", f), Rational(20)));
    const ThetaContext ctx0(fixed, 0);
    const auto a = num("7/3", f), b = num("-4", f);
    const auto t = theta_gamma(ctx0, ProjPoint(a), ProjPoint(b), z);
    CHECK(t.value.equal_at((z.value() - a) / (z.value() - b), Rational(18)));
    CHECK(u_alpha(ctx, ReducedWord(), pt("3", f), z).value.equal_at(num("1", f), Rational(20)));
}

TEST_CASE("length_for_target") {
    for (const Rational& v : {Rational(1), Rational(1, 2), Rational(2), Rational(3, 2), Rational(1, 3)}) {
        for (int target = 1; target <= 12; ++target) {
            int oracle = 2;  // the term bound starts at words of length 2
            while (Rational(oracle) * v < Rational(target)) ++oracle;
            CHECK(length_for_target(v, target) == oracle);
        }
    }
}

TEST_CASE("theta_W telescopes") {
    std::mt19937_64 rng(61);
    const Field f = field("5", 20);
    const Chart& ch = chart("g2b");
    const FixTuple fix{ch.name, sample_fix_coords(ch, f, rng)};
    const auto oc = ordinary_chart(fix.pairs(), rng);
    const ThetaContext ctx(oc.fixed, 5);
    for (int i = 0; i < 10; ++i) {
        const auto s = oc.sample(4, rng);
        const auto ab = theta_W(ctx, s[0], s[1], s[3]), bc = theta_W(ctx, s[1], s[2], s[3]),
                   ac = theta_W(ctx, s[0], s[2], s[3]);
        CHECK(rel(ab.value * bc.value, ac.value) >= std::min({ab.error, bc.error, ac.error}));
    }
}

TEST_CASE("property: theta invariants in every chart") {
    std::mt19937_64 rng(62);
    for (const auto& ch : chart_registry()) {
        CAPTURE(ch.name);
        const Field f = chart_field(ch);
        const int L = ch.genus == 2 ? 6 : 5;
        const FixTuple fix{ch.name, sample_fix_coords(ch, f, rng)};
        const auto oc = ordinary_chart(fix.pairs(), rng);
        const ThetaContext ctx(oc.fixed, L), ctx1(oc.fixed, L + 1);
        const auto zs = oc.sample(5, rng);
        const ThetaProduct F(ctx, zs[0], zs[1], false), F1(ctx1, zs[0], zs[1], false);
        const auto orbit_a = ctx.orbit(zs[0]), orbit_b = ctx.orbit(zs[1]);
        for (std::size_t k = 2; k < zs.size(); ++k) {
            const ProjPoint z = ctx.lift(zs[k]);
            // each term of length n >= 2 is within pi^(n-1) of 1
            for (std::size_t w = 1; w < orbit_a.size(); ++w) {
                const auto n = static_cast<int>(ctx.words().words[w].length());
                if (n < 2) continue;
                const auto term = (z.value() - orbit_a[w].value()) / (z.value() - orbit_b[w].value());
                CHECK(v1(term) >= Rational(n - 1) * ctx.pi_valuation());
            }
            const auto Fz = F(zs[k]), F1z = F1(zs[k]);
            CHECK(rel(F1z.value, Fz.value) >= Fz.error);
            for (int i = 0; i <= ch.genus; ++i) {
                const auto sz = ctx.act_working(ReducedWord({static_cast<std::uint8_t>(i)}), zs[k]);
                CHECK(rel(F(sz).value, Fz.value) >= ctx.tail_error(1));
            }
            const ReducedWord al({1, 0}), be({2, 0});
            const auto ua = u_alpha(ctx, al, zs[0], zs[k]), ub = u_alpha(ctx, be, zs[0], zs[k]),
                       uab = u_alpha(ctx, al * be, zs[0], zs[k]);
            CHECK(rel(ua.value * ub.value, uab.value) >= std::min({ua.error, ub.error, uab.error}));
            const auto ua2 = u_alpha(ctx, al, zs[1], zs[k]);
            CHECK(rel(ua.value, ua2.value) >= std::min(ua.error, ua2.error));
        }
    }
}

TEST_CASE("property: fb_map agrees with the leading formulas") {
    std::mt19937_64 rng(63);
    for (const auto& ch : chart_registry()) {
        CAPTURE(ch.name);
        const Field f = chart_field(ch);
        for (int i = 0; i < 5; ++i) {
            const FixTuple fix{ch.name, sample_fix_coords(ch, f, rng)};
            FbOptions o;
            o.length = 4;
            const auto r = fb_map(fix, o);
            const auto lead = ch.lead(fix.coords);
            for (std::size_t k = 0; k < lead.size(); ++k) CHECK(rel(r.branch.coords[k], lead[k]) >= Rational(1));
        }
    }
}

TEST_CASE("published leading formulas") {
    std::mt19937_64 rng(64);
    const Field f = field("5", 20);
    for (const char* name : {"g2a", "g2b", "g2c", "ros_c", "g3_1"}) {
        const Chart& ch = chart(name);
        const auto x = sample_fix_coords(ch, f, rng);
        const auto a = ch.lead(x), b = ch.printed_lead(x);
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(rel(a[k], b[k]) >= Rational(1));
    }
    const Chart& c = chart("g2c");
    const auto x = sample_fix_coords(c, f, rng);
    const auto y = c.lead(x);
    CHECK(rel(y[0], x[0].times_int(4)) >= Rational(1));
    CHECK(rel(y[1], x[1] * x[1]) >= Rational(1));
    CHECK(rel(y[2], x[2].times_int(4)) >= Rational(1));
}

TEST_CASE("sample_fix_coords needs room in the residue field") {
    std::mt19937_64 rng(65);
    CHECK_THROWS_AS(sample_fix_coords(chart("g3_8"), field("5", 20), rng), UnsupportedError);
    CHECK_NOTHROW(sample_fix_coords(chart("g3_8"), field("5,2", 20), rng));
}

TEST_CASE("fb_inverse on the Kadziela branch points") {
    const Field f = field("5", 20);
    const BranchTuple branch{"g2b", {num("25", f), num("39", f), num("1/5", f)}};
    FbInverseOptions o;
    o.target = 6;
    const auto sheets = fb_inverse(branch, o);
    REQUIRE(sheets.size() == 2);
    std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> got;
    for (const auto& s : sheets) {
        const auto& x = s.fix.coords;
        CHECK(x[0].valuation() == Rational(2));
        CHECK(x[1].valuation() == Rational(0));
        CHECK(x[2].valuation() == Rational(-1));
        CHECK(s.residual >= Rational(6));
        CHECK(s.restricted);
        got.emplace_back(x[0].unit_residue().a, x[1].unit_residue().a, x[2].unit_residue().a);
    }
    std::sort(got.begin(), got.end());
    CHECK(got[0] == std::tuple<std::int64_t, std::int64_t, std::int64_t>{1, 2, 3});
    CHECK(got[1] == std::tuple<std::int64_t, std::int64_t, std::int64_t>{2, 3, 1});
}

TEST_CASE("fb_inverse for the Rosenhain (c) branch (3, 3, 3)") {
    FbInverseOptions o;
    o.target = 5;
    const Field q3 = field("3", 20);
    CHECK_THROWS_AS(fb_inverse(BranchTuple{"ros_c", {num("3", q3), num("3", q3), num("3", q3)}}, o), DomainError);
    const Field f = field("3,ram", 20);
    const auto sheets = fb_inverse(BranchTuple{"ros_c", {num("3", f), num("3", f), num("3", f)}}, o);
    REQUIRE(sheets.size() == 2);
    const auto approx = num("3/4", f);
    for (const auto& s : sheets) {
        const auto& x = s.fix.coords;
        CHECK(rel(x[0], approx) >= Rational(1, 2));
        CHECK(rel(x[2], approx) >= Rational(1, 2));
        CHECK(rel(x[1] * x[1], num("3", f)) >= Rational(1, 2));
    }
    CHECK(rel(sheets[0].fix.coords[1], -sheets[1].fix.coords[1]) >= Rational(1, 2));
}

TEST_CASE("fb_inverse for configuration (a) has one sheet") {
    const Field f = field("5", 20);
    FbInverseOptions o;
    o.target = 6;
    const auto sheets = fb_inverse(BranchTuple{"g2a", {num("5", f), num("10", f), num("25", f)}}, o);
    REQUIRE(sheets.size() == 1);
    CHECK(rel(sheets[0].fix.coords[0], num("5/2", f)) >= Rational(1));
    CHECK(rel(sheets[0].fix.coords[1], num("5", f)) >= Rational(1));
    CHECK(rel(sheets[0].fix.coords[2], num("25/2", f)) >= Rational(1));
}

TEST_CASE("property: fb_inverse inverts fb_map in every chart") {
    std::mt19937_64 rng(66);
    for (const auto& ch : chart_registry()) {
        CAPTURE(ch.name);
        const Field f = chart_field(ch);
        const int d = fundamental_d(ch, f);
        CHECK(ch.sheet_count() == (std::size_t{1} << std::max(0, d - 1)));
        const FixTuple fix{ch.name, sample_fix_coords(ch, f, rng)};
        FbOptions fo;
        fo.length = 4;
        const auto y = fb_map(fix, fo).branch;
        FbInverseOptions o;
        o.target = 4;
        o.length = 4;
        const auto sheets = fb_inverse(y, o);
        CHECK(sheets.size() == ch.sheet_count());
        bool found = false;
        for (const auto& s : sheets) {
            const auto back = fb_map(s.fix, fo).branch;
            for (std::size_t k = 0; k < y.coords.size(); ++k) CHECK(rel(back.coords[k], y.coords[k]) >= Rational(4));
            bool same = true;
            for (std::size_t k = 0; k < fix.coords.size(); ++k) same = same && rel(s.fix.coords[k], fix.coords[k]) >= Rational(3);
            found = found || same;
        }
        CHECK(found);
        for (std::size_t i = 0; i < sheets.size(); ++i)
            for (std::size_t j = i + 1; j < sheets.size(); ++j) {
                bool differ = false;
                for (std::size_t k = 0; k < fix.coords.size(); ++k)
                    differ = differ || rel(sheets[i].fix.coords[k], sheets[j].fix.coords[k]) < Rational(1);
                CHECK(differ);
            }
    }
}

TEST_CASE("hyperelliptic equations") {
    std::mt19937_64 rng(67);
    const Field f = field("5", 20);
    for (const char* name : {"g2a", "g2b", "g2c"}) {
        CAPTURE(name);
        const FixTuple fix{name, sample_fix_coords(chart(name), f, rng)};
        EquationOptions eo;
        eo.length = 8;
        const auto eq = hyperelliptic_equation(fix, eo);
        CHECK(eq.roots.size() == 6);
        CHECK(eq.c_is_square);
        eo.seed = 7;
        CHECK(hyperelliptic_equation(fix, eo).c_is_square == eq.c_is_square);

        const Uniformization U(fix.pairs(), eo);
        for (const auto& z : U.domain_points(5, rng)) CHECK(U.check_relation(z).ok());
    }
    const auto degenerate = pairs_of({{"0", "0"}, {"1", "2"}, {"inf", "1/5"}}, f);
    CHECK_THROWS_AS(hyperelliptic_equation(degenerate), Error);
}

TEST_CASE("H is W-invariant and changes sign under s0") {
    std::mt19937_64 rng(68);
    const Field f = field("5", 20);
    for (const char* name : {"g2a", "g2b", "g2c"}) {
        CAPTURE(name);
        const FixTuple fix{name, sample_fix_coords(chart(name), f, rng)};
        EquationOptions eo;
        eo.length = 8;
        const Uniformization U(fix.pairs(), eo);
        const ThetaContext& ctx = U.context();
        for (const auto& z : U.domain_points(4, rng)) {
            const auto h = U.H(z);
            const auto hw = U.H(ctx.act_working(ReducedWord({1, 0}), z));
            const auto hs = U.H(ctx.act_working(ReducedWord({0}), z));
            // the bound holds on the domain; an image under a word of length n gives up n * v(pi)
            const Rational e = std::min({h.error, hw.error, hs.error});
            CHECK(rel(hw.value, h.value) >= e - Rational(2) * ctx.pi_valuation());
            CHECK(rel(-hs.value, h.value) >= e - ctx.pi_valuation());
        }
    }
}

TEST_CASE("property: c stays a square across charts") {
    std::mt19937_64 rng(69);
    for (const auto& ch : chart_registry()) {
        CAPTURE(ch.name);
        const Field f = chart_field(ch);
        const FixTuple fix{ch.name, sample_fix_coords(ch, f, rng)};
        EquationOptions eo;
        eo.length = ch.genus == 2 ? 8 : 6;
        const Uniformization U(fix.pairs(), eo);
        CHECK(is_square(U.c()));
        for (const auto& z : U.domain_points(2, rng)) CHECK(U.check_relation(z).ok());
    }
}
