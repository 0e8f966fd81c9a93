#pragma once

#include <array>
#include <string>
#include <vector>

#include "whittaker/padic.hpp"

namespace whittaker {

class ProjPoint {
public:
    ProjPoint() = default;  // infinity
    explicit ProjPoint(FieldElement v) : inf_(false), val_(std::move(v)) {}
    static ProjPoint infinity() { return {}; }

    bool is_infinity() const { return inf_; }
    const FieldElement& value() const;

    // Equality at absolute precision M in the chart containing both points
    // (z -> 1/z when one of them is outside the unit disk).
    bool equal_at(const ProjPoint& o, Rational M) const;

    std::string str() const { return inf_ ? "inf" : val_.str(); }

private:
    bool inf_ = true;
    FieldElement val_;
};

class Mobius {
public:
    Mobius() = default;
    Mobius(FieldElement a, FieldElement b, FieldElement c, FieldElement d);
    static Mobius identity(const Field& f);

    const FieldElement& a() const { return m_[0]; }
    const FieldElement& b() const { return m_[1]; }
    const FieldElement& c() const { return m_[2]; }
    const FieldElement& d() const { return m_[3]; }
    const std::array<FieldElement, 4>& entries() const { return m_; }
    const Field& field() const { return m_[0].field(); }

    FieldElement det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
    Mobius compose(const Mobius& o) const;  // this ∘ o
    Mobius inverse() const;
    // Scaled so the first entry of minimal valuation equals 1.
    Mobius canonical() const;
    // Canonical entries reduced to absolute precision `units` (uniformizer units).
    std::string key(std::int64_t units) const;
    bool equal_at(const Mobius& o, Rational M) const;

    std::string str() const;

private:
    std::array<FieldElement, 4> m_;
};

ProjPoint apply(const Mobius& m, const ProjPoint& z);

// Order-two map fixing a and b.
Mobius involution_from_pair(const ProjPoint& a, const ProjPoint& b);

// (p1,p2;p3,p4) with (0,1;inf,z) = z.
FieldElement cross_ratio(const ProjPoint& p1, const ProjPoint& p2, const ProjPoint& p3,
                         const ProjPoint& p4);

struct NormalizedTuple {
    Mobius map;
    std::vector<ProjPoint> points;
};

// Mobius sending points[i], points[j], points[k] to 0, 1, inf.
NormalizedTuple normalize_triple(const std::vector<ProjPoint>& points, std::size_t i, std::size_t j,
                                 std::size_t k);

// Mobius sending x to 0, y to 1, z to inf.
Mobius mobius_to_01inf(const ProjPoint& x, const ProjPoint& y, const ProjPoint& z);

// Fast action of an involution with given fixed points, avoiding a full
// matrix: finite pair uses ((a+b)z - 2ab)/(2z - (a+b)), infinite b uses 2a - z.
class Involution {
public:
    Involution(const ProjPoint& a, const ProjPoint& b);
    ProjPoint operator()(const ProjPoint& z) const;
    const Mobius& matrix() const { return m_; }
    const ProjPoint& first() const { return a_; }
    const ProjPoint& second() const { return b_; }

private:
    ProjPoint a_, b_;
    bool affine_ = false;  // one fixed point at infinity
    FieldElement sum_, prod2_, two_a_, half_sum_;
    Mobius m_;
};

}  // namespace whittaker
