#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "whittaker/poly.hpp"

using namespace whittaker;
using testing::field;
using testing::num;

namespace {

const std::vector<mpz_class> x37 = {1, 14, 35, 48, 35, 14, 1};
const std::vector<mpz_class> x39 = {1, -6, 3, 12, -23, 12, 3, -6, 1};
const std::vector<mpz_class> kadziela = {0, 121875, -147850, 26300, -326, 1};

std::vector<std::int64_t> reduce(const std::vector<mpz_class>& f, std::int64_t p) {
    std::vector<std::int64_t> out;
    for (const auto& c : f) {
        mpz_class r = c % p;
        if (r < 0) r += p;
        out.push_back(r.get_si());
    }
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
}

std::vector<std::int64_t> mul_mod(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b, std::int64_t p) {
    std::vector<std::int64_t> c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    return c;
}

bool has_root_mod(const std::vector<std::int64_t>& f, std::int64_t p) {
    for (std::int64_t x = 0; x < p; ++x) {
        std::int64_t v = 0;
        for (std::size_t i = f.size(); i-- > 0;) v = (v * x + f[i]) % p;
        if (v == 0) return true;
    }
    return false;
}

// the factors multiply back to f mod p, up to the leading coefficient, and
// each quadratic factor is irreducible
void check_factorization(const std::vector<mpz_class>& f, std::int64_t p) {
    const auto fac = factor_mod_p(f, p);
    std::vector<std::int64_t> prod{1};
    for (const auto& r : fac) {
        CHECK(r.p == p);
        CHECK(r.coeffs.back() == 1);
        if (r.coeffs.size() == 3) CHECK_FALSE(has_root_mod(r.coeffs, p));
        for (int k = 0; k < r.multiplicity; ++k) prod = mul_mod(prod, r.coeffs, p);
    }
    auto target = reduce(f, p);
    const std::int64_t lead = target.back();
    for (auto& c : prod) c = c * lead % p;
    CHECK(prod == target);
}

Rational val(const FieldElement& x) { return x.is_exact_zero() ? Rational(1000000) : x.valuation(); }

}  // namespace

TEST_CASE("factorizations mod p") {
    check_factorization(x37, 37);
    check_factorization(x39, 3);
    check_factorization(kadziela, 5);
    const auto f37 = factor_mod_p(x37, 37);
    // x - 1 twice and a repeated irreducible quadratic
    int linear = 0, quadratic = 0;
    for (const auto& r : f37) (r.coeffs.size() == 2 ? linear : quadratic) += r.multiplicity;
    CHECK(linear == 2);
    CHECK(quadratic == 2);
    CHECK(factor_mod_p({1, 0, 1}, 3).size() == 1);
    CHECK(factor_mod_p({1, 0, 1}, 5).size() == 2);
}

TEST_CASE("Kadziela polynomial has its six rational branch points") {
    const Field f = field("5", 20);
    const auto roots = projective_roots(poly_from_integers(kadziela, f), 6);
    REQUIRE(roots.size() == 6);
    CHECK(std::count_if(roots.begin(), roots.end(), [](const ProjPoint& z) { return z.is_infinity(); }) == 1);
    for (const char* r : {"0", "125", "5", "195", "1"}) {
        CAPTURE(r);
        CHECK(std::any_of(roots.begin(), roots.end(), [&](const ProjPoint& z) {
            return z.equal_at(testing::pt(r, f), Rational(15));
        }));
    }
}

TEST_CASE("X0(37) at 37 needs the ramified extension") {
    CHECK(polynomial_roots(poly_from_integers(x37, field("37,15", 20))).empty());
    const Field f = field("37,15,ram", 20);
    const Poly poly = poly_from_integers(x37, f);
    const auto roots = polynomial_roots(poly);
    REQUIRE(roots.size() == 6);
    int near_one = 0;
    for (const auto& r : roots) {
        CHECK(val(evaluate(poly, r)) >= Rational(8));
        const auto d = r - FieldElement::from_int(1, f);
        if (d.valuation() > Rational(0)) {
            CHECK(d.valuation() == Rational(1, 2));
            ++near_one;
        }
    }
    CHECK(near_one == 2);
}

TEST_CASE("X0(39) at 3") {
    CHECK(polynomial_roots(poly_from_integers(x39, field("3,2", 20))).size() == 4);
    const Field f = field("3,2,ram", 20);
    const Poly poly = poly_from_integers(x39, f);
    const auto roots = polynomial_roots(poly);
    REQUIRE(roots.size() == 8);
    for (const auto& r : roots) CHECK(val(evaluate(poly, r)) >= Rational(6));
}

TEST_CASE("property: roots of products of linear factors are recovered") {
    std::mt19937_64 rng(51);
    const Field f = field("7", 30);
    for (int i = 0; i < 100; ++i) {
        std::vector<FieldElement> want;
        Poly poly{FieldElement::from_int(1, f)};
        const int deg = 2 + static_cast<int>(rng() % 4);
        while (static_cast<int>(want.size()) < deg) {
            const auto r = testing::random_element(f, rng);
            if (std::any_of(want.begin(), want.end(),
                            [&](const FieldElement& w) { return (w - r).is_zero() || (w - r).valuation() > Rational(3); }))
                continue;
            want.push_back(r);
            Poly next(poly.size() + 1, FieldElement::zero(f));
            for (std::size_t k = 0; k < poly.size(); ++k) {
                next[k + 1] += poly[k];
                next[k] -= poly[k] * r;
            }
            poly = next;
        }
        const auto got = polynomial_roots(poly);
        REQUIRE(got.size() == want.size());
        for (const auto& w : want)
            CHECK(std::any_of(got.begin(), got.end(), [&](const FieldElement& g) { return g.equal_at(w, Rational(10)); }));
    }
}
