#include <doctest.h>

#include "support.hpp"
#include "whittaker/freegroup.hpp"

using namespace whittaker;
using testing::field;
using testing::num;
using testing::pt;

TEST_CASE("involution_from_pair") {
    const Field f = field("5", 20);
    const Rational M(20);
    SUBCASE("(1, -1) is z -> 1/z") {
        const Mobius s = involution_from_pair(pt("1", f), pt("-1", f));
        const Mobius inv(num("0", f), num("1", f), num("1", f), num("0", f));
        CHECK(s.equal_at(inv, M));
    }
    SUBCASE("(a, inf) is z -> 2a - z") {
        const auto a = num("7/5", f);
        const Mobius s = involution_from_pair(ProjPoint(a), ProjPoint::infinity());
        const Mobius refl(num("-1", f), a.times_int(2), num("0", f), num("1", f));
        CHECK(s.equal_at(refl, M));
    }
    SUBCASE("(0, b0) solves s(z) = z with trace zero") {
        // trace-zero [[x, y], [z, -x]] fixing 0 forces y = 0; fixing b0 gives z b0 = 2x
        const auto b0 = num("5", f);
        const Mobius s = involution_from_pair(pt("0", f), ProjPoint(b0));
        const Mobius expect(b0, num("0", f), num("2", f), -b0);
        CHECK(s.equal_at(expect, M));
    }
    CHECK_THROWS_AS(involution_from_pair(pt("3", f), pt("3", f)), Error);
}

TEST_CASE("apply") {
    const Field f = field("5", 20);
    const Mobius id = Mobius::identity(f);
    const ProjPoint z = pt("17/3", f);
    CHECK(apply(id, z).equal_at(z, Rational(20)));
    const Mobius inv(num("0", f), num("1", f), num("1", f), num("0", f));
    CHECK(apply(inv, pt("0", f)).is_infinity());
    const Mobius m(num("2", f), num("1", f), num("3", f), num("1", f));
    CHECK(apply(m, ProjPoint::infinity()).equal_at(pt("2/3", f), Rational(20)));
}

TEST_CASE("bad-position chain s1 s2 s1 = s0") {
    const Field f = field("5", 20);
    const std::vector<Mobius> gens = {involution_from_pair(pt("0", f), pt("5", f)),
                                      involution_from_pair(pt("1", f), pt("-1", f)),
                                      involution_from_pair(pt("1/5", f), ProjPoint::infinity())};
    const Mobius chain = gens[1].compose(gens[2]).compose(gens[1]);
    CHECK(chain.equal_at(gens[0], Rational(18)));
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        const ProjPoint z = testing::random_point(f, rng);
        CHECK(apply(gens[1], apply(gens[2], apply(gens[1], z))).equal_at(apply(gens[0], z), Rational(15)));
    }
}

TEST_CASE("cross_ratio") {
    const Field f = field("5", 20);
    const auto z = num("3/7", f);
    CHECK(cross_ratio(pt("0", f), pt("1", f), ProjPoint::infinity(), ProjPoint(z)).equal_at(z, Rational(20)));
    // (inf, 0; 25, 1) reduces to (0 - 25)/(1 - 25)
    const auto c = cross_ratio(ProjPoint::infinity(), pt("0", f), pt("25", f), pt("1", f));
    CHECK(c.valuation() == Rational(2));
    CHECK(c.equal_at(FieldElement::from_rational(25, 24, f), Rational(20)));
    CHECK_THROWS_AS(cross_ratio(pt("0", f), pt("0", f), pt("1", f), pt("2", f)), Error);
}

TEST_CASE("normalize_triple") {
    const Field f = field("5", 20);
    const std::vector<ProjPoint> std01 = {pt("0", f), pt("1", f), ProjPoint::infinity(), pt("7", f)};
    const auto n = normalize_triple(std01, 0, 1, 2);
    CHECK(n.map.equal_at(Mobius::identity(f), Rational(20)));
    const std::vector<ProjPoint> kad = {pt("0", f), pt("25", f), pt("1", f), pt("39", f), pt("1/5", f),
                                        ProjPoint::infinity()};
    const auto k = normalize_triple(kad, 0, 2, 5);
    for (std::size_t i = 0; i < kad.size(); ++i) CHECK(k.points[i].equal_at(kad[i], Rational(18)));
    const std::vector<ProjPoint> ros = {pt("3", f), pt("8", f), pt("11", f), pt("2/5", f), pt("6", f), pt("-4", f)};
    const auto r = normalize_triple(ros, 0, 4, 5);
    CHECK(r.points[0].equal_at(pt("0", f), Rational(18)));
    CHECK(r.points[4].equal_at(pt("1", f), Rational(18)));
    CHECK(r.points[5].is_infinity());
    CHECK_THROWS_AS(normalize_triple(ros, 0, 0, 5), Error);
}

TEST_CASE("point equality is precision-qualified") {
    const Field f = field("5", 20);
    CHECK(pt("1", f).equal_at(pt("1 + 5^3", f), Rational(3)));
    CHECK_FALSE(pt("1", f).equal_at(pt("1 + 5^3", f), Rational(4)));
    CHECK(pt("5^(-6)", f).equal_at(ProjPoint::infinity(), Rational(6)));
    CHECK_FALSE(pt("5^(-6)", f).equal_at(ProjPoint::infinity(), Rational(7)));
}

TEST_CASE("property: involutions square to the identity and fix only their pair") {
    std::mt19937_64 rng(21);
    for (const char* d : {"5", "3,2,ram"}) {
        const Field f = field(d, 20);
        for (int i = 0; i < 1000; ++i) {
            const ProjPoint a = testing::random_point(f, rng);
            ProjPoint b = (i % 10 == 0) ? ProjPoint::infinity() : testing::random_point(f, rng);
            if (!b.is_infinity() && (b.value() - a.value()).is_zero()) continue;
            const Mobius s = involution_from_pair(a, b);
            const Mobius ss = s.compose(s);
            CHECK(ss.equal_at(Mobius::identity(f), Rational(12)));
            CHECK(apply(s, a).equal_at(a, Rational(10)));
            CHECK(apply(s, b).equal_at(b, Rational(10)));
            const ProjPoint z = testing::random_point(f, rng);
            if (z.equal_at(a, Rational(4)) || z.equal_at(b, Rational(4))) continue;
            CHECK_FALSE(apply(s, z).equal_at(z, Rational(12)));
        }
    }
}

TEST_CASE("property: cross-ratio is Mobius invariant") {
    std::mt19937_64 rng(22);
    const Field f = field("5", 24);
    for (int i = 0; i < 1000; ++i) {
        std::vector<ProjPoint> p;
        for (int k = 0; k < 4; ++k) p.push_back(testing::random_point(f, rng));
        bool distinct = true;
        for (int x = 0; x < 4; ++x)
            for (int y = x + 1; y < 4; ++y) distinct = distinct && !p[static_cast<std::size_t>(x)].equal_at(p[static_cast<std::size_t>(y)], Rational(6));
        if (!distinct) continue;
        const Mobius m = testing::random_mobius(f, rng);
        const auto before = cross_ratio(p[0], p[1], p[2], p[3]);
        const auto after = cross_ratio(apply(m, p[0]), apply(m, p[1]), apply(m, p[2]), apply(m, p[3]));
        CHECK(testing::v1(after / before) >= Rational(8));
    }
}

TEST_CASE("property: normalization sends the anchors to 0, 1, inf") {
    std::mt19937_64 rng(23);
    const Field f = field("7", 20);
    for (int i = 0; i < 200; ++i) {
        std::vector<ProjPoint> p;
        for (int k = 0; k < 5; ++k) p.push_back(testing::random_point(f, rng));
        if (p[0].equal_at(p[1], Rational(4)) || p[0].equal_at(p[2], Rational(4)) || p[1].equal_at(p[2], Rational(4)))
            continue;
        const auto n = normalize_triple(p, 0, 1, 2);
        CHECK(n.points[0].equal_at(pt("0", f), Rational(10)));
        CHECK(n.points[1].equal_at(pt("1", f), Rational(10)));
        CHECK(n.points[2].is_infinity());
        for (std::size_t k = 0; k < p.size(); ++k) CHECK(apply(n.map, p[k]).equal_at(n.points[k], Rational(10)));
    }
}
