#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "whittaker/padic.hpp"
#include "whittaker/projline.hpp"

namespace whittaker {

// Coefficients from the constant term up.
using Poly = std::vector<FieldElement>;

Poly poly_from_integers(const std::vector<mpz_class>& coeffs, const Field& f);
FieldElement evaluate(const Poly& f, const FieldElement& x);

// Roots lying in the coefficient field, found by residue enumeration and
// recentring, then refined by Newton's method.  Fewer than deg f roots means
// the others need an extension.  Throws PrecisionError for roots that stay
// clustered down to the working precision.
std::vector<FieldElement> polynomial_roots(const Poly& f);

// Roots on the projective line of a polynomial of formal degree `degree`;
// a drop in degree contributes infinity.
std::vector<ProjPoint> projective_roots(const Poly& f, std::size_t degree);

// Factorization over F_p into irreducible factors of degree one and two; a
// remaining factor of higher degree is returned whole.
struct ResidueFactor {
    std::int64_t p = 0;
    std::vector<std::int64_t> coeffs;  // monic, constant term first
    int multiplicity = 1;
    std::string str() const;
};

std::vector<ResidueFactor> factor_mod_p(const std::vector<mpz_class>& f, std::int64_t p);

}  // namespace whittaker
