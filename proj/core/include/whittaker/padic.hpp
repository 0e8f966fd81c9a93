#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "whittaker/errors.hpp"
#include "whittaker/rational.hpp"

namespace whittaker {

// Q_p, optionally extended by s (s^2 = u, u a non-square unit) and/or
// t (t^2 = p).  Precision counts relative p-adic digits.
struct FieldDescriptor {
    std::int64_t p = 0;
    std::optional<std::int64_t> unramified;  // u
    bool ramified = false;
    int precision = 20;

    int degree() const { return (unramified ? 2 : 1) * (ramified ? 2 : 1); }
    int ramification() const { return ramified ? 2 : 1; }

    // "p[,u][,ram]"
    static FieldDescriptor parse(const std::string& text, int precision);
    std::string str() const;

    friend bool operator==(const FieldDescriptor&, const FieldDescriptor&) = default;
};

// Element of the residue field F_p or F_{p^2} = F_p[s]/(s^2 - u).
struct Residue {
    std::int64_t a = 0;
    std::int64_t b = 0;
    friend bool operator==(const Residue&, const Residue&) = default;
    friend auto operator<=>(const Residue&, const Residue&) = default;
};

class ResidueField {
public:
    ResidueField(std::int64_t p, std::optional<std::int64_t> u);
    std::int64_t p() const { return p_; }
    bool quadratic() const { return quad_; }
    std::int64_t size() const { return quad_ ? p_ * p_ : p_; }

    Residue add(Residue x, Residue y) const;
    Residue sub(Residue x, Residue y) const;
    Residue mul(Residue x, Residue y) const;
    Residue neg(Residue x) const;
    Residue inv(Residue x) const;
    Residue pow(Residue x, std::uint64_t e) const;
    Residue from_int(std::int64_t v) const;
    bool is_zero(Residue x) const { return x.a == 0 && x.b == 0; }
    bool is_square(Residue x) const;
    std::optional<Residue> sqrt(Residue x) const;
    Residue element(std::int64_t index) const;  // enumeration 0..size-1
    std::string str(Residue x) const;

private:
    std::int64_t md(std::int64_t v) const { v %= p_; return v < 0 ? v + p_ : v; }
    std::int64_t p_;
    std::int64_t u_ = 0;
    bool quad_;
};

namespace detail {
struct FieldContext;
}
using Field = std::shared_ptr<const detail::FieldContext>;

Field make_field(const FieldDescriptor& d);
Field with_precision(const Field& f, int precision);
const FieldDescriptor& descriptor(const Field& f);

struct NotSquare {
    bool ramified = false;    // odd valuation
    bool unramified = false;  // residue is a non-square
    bool beyond_tower = false;
    std::string describe() const;
};

class FieldElement {
public:
    FieldElement() = default;

    static FieldElement zero(const Field& f);
    static FieldElement from_int(std::int64_t v, const Field& f);
    static FieldElement from_rational(const mpz_class& num, const mpz_class& den, const Field& f);
    static FieldElement from_mpz(const mpz_class& v, const Field& f) { return from_rational(v, 1, f); }
    static FieldElement from_residue(Residue r, const Field& f);
    static FieldElement gen_s(const Field& f);
    static FieldElement gen_t(const Field& f);
    static FieldElement uniformizer(const Field& f);
    // Parses "a/b", "a", and sums like "1/2 + 3*s - t + 2*s*t".
    static FieldElement parse(const std::string& text, const Field& f);
    // Element with given coordinates (over 1, s, t, st) scaled by p^shift.
    static FieldElement from_coordinates(const std::array<mpz_class, 4>& c, const Field& f);

    const Field& field() const { return field_; }
    bool valid() const { return static_cast<bool>(field_); }

    bool is_exact_zero() const { return exact_zero_; }
    bool is_inexact_zero() const { return !exact_zero_ && rel_ == 0; }
    bool is_zero() const { return exact_zero_ || rel_ == 0; }

    // In units of the uniformizer (p, or t when ramified).
    std::int64_t ord() const { return ord_; }
    std::int64_t relprec_units() const { return rel_; }

    // Valuation normalized by v(p) = 1; for an inexact zero this is the
    // lower bound; for the exact zero a large sentinel.
    Rational valuation() const;
    Rational abs_precision() const;
    Rational rel_precision() const;

    FieldElement operator-() const;
    friend FieldElement operator+(const FieldElement& x, const FieldElement& y);
    friend FieldElement operator-(const FieldElement& x, const FieldElement& y);
    friend FieldElement operator*(const FieldElement& x, const FieldElement& y);
    friend FieldElement operator/(const FieldElement& x, const FieldElement& y);
    FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }
    FieldElement& operator/=(const FieldElement& o) { return *this = *this / o; }
    FieldElement inverse() const;
    FieldElement pow(std::int64_t e) const;
    FieldElement times_int(std::int64_t k) const;

    // Residue of the unit part (the leading digit).
    Residue unit_residue() const;
    // Residue of the element itself; requires valuation >= 0.
    Residue residue() const;
    // Unit part as an element of valuation 0.
    FieldElement unit_part() const;
    // Drops every term of valuation >= v (exact result).
    FieldElement truncate_below(Rational v) const;
    // Caps relative precision (in uniformizer units).
    FieldElement with_relprec(std::int64_t units) const;
    // The same element over a field differing only in precision; with
    // as_exact the known digits are taken as exact.
    FieldElement in_field(const Field& target, bool as_exact = false) const;

    // x == y at absolute precision M: v(x - y) >= M.
    bool equal_at(const FieldElement& o, Rational M) const;

    // Unit coordinates over the basis 1, s, t, st.
    const std::array<mpz_class, 4>& unit_coordinates() const { return c_; }

    std::string str() const;
    // Canonical string for hashing: valuation + unit digits below `units`.
    std::string key(std::int64_t units) const;

private:
    friend struct detail::FieldContext;
    Field field_;
    bool exact_zero_ = true;
    std::int64_t ord_ = 0;
    std::int64_t rel_ = 0;
    std::array<mpz_class, 4> c_;
};

using SqrtResult = std::variant<FieldElement, NotSquare>;

SqrtResult sqrt(const FieldElement& x);
bool is_square(const FieldElement& x);
// sqrt or throw DomainError carrying the NotSquare diagnosis.
FieldElement sqrt_or_throw(const FieldElement& x);

// Schoolbook base-p digits of an integer (least significant first).
std::vector<std::int64_t> base_p_digits(mpz_class v, std::int64_t p, std::size_t count);

std::int64_t valuation_of(const mpz_class& v, std::int64_t p);

}  // namespace whittaker
