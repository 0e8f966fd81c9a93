#pragma once

#include <gmpxx.h>

#include <random>
#include <string>

#include "whittaker/padic.hpp"
#include "whittaker/projline.hpp"

namespace testing {

using namespace whittaker;

inline Field field(const std::string& d, int precision = 20) {
    return make_field(FieldDescriptor::parse(d, precision));
}

inline FieldElement num(const std::string& s, const Field& f) { return FieldElement::parse(s, f); }

inline ProjPoint pt(const std::string& s, const Field& f) {
    return s == "inf" ? ProjPoint::infinity() : ProjPoint(FieldElement::parse(s, f));
}

// v(q - 1), large when q is exactly 1
inline Rational v1(const FieldElement& q) {
    const FieldElement d = q - FieldElement::from_int(1, q.field());
    return d.is_exact_zero() ? Rational(1000000) : d.valuation();
}

inline FieldElement random_unit(const Field& f, std::mt19937_64& rng) {
    FieldElement x;
    do {
        x = FieldElement::from_int(static_cast<std::int64_t>(rng() % 1000003), f);
        if (descriptor(f).unramified) x += FieldElement::from_int(static_cast<std::int64_t>(rng() % 999), f) *
                                           FieldElement::gen_s(f);
    } while (x.is_zero() || x.valuation() != Rational(0));
    return x;
}

inline FieldElement random_element(const Field& f, std::mt19937_64& rng, int spread = 3) {
    const FieldElement pi = FieldElement::uniformizer(f);
    const int k = static_cast<int>(rng() % static_cast<std::uint64_t>(2 * spread + 1)) - spread;
    return random_unit(f, rng) * pi.pow(k);
}

inline ProjPoint random_point(const Field& f, std::mt19937_64& rng) { return ProjPoint(random_element(f, rng)); }

inline Mobius random_mobius(const Field& f, std::mt19937_64& rng) {
    while (true) {
        Mobius m(random_element(f, rng, 1), random_element(f, rng, 1), random_element(f, rng, 1),
                 random_element(f, rng, 1));
        const FieldElement d = m.det();
        if (!d.is_zero() && d.valuation() <= Rational(2)) return m;
    }
}

}  // namespace testing
