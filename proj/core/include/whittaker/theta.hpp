#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "whittaker/freegroup.hpp"
#include "whittaker/projline.hpp"
#include "whittaker/redtree.hpp"

namespace whittaker {

using FixedPair = std::pair<ProjPoint, ProjPoint>;

// Truncated value together with a certified bound: the exact product P
// satisfies v(P / value - 1) >= error.
struct ThetaValue {
    FieldElement value;
    Rational error;
};

// Generators, truncation length and the size bound used by every product.
class ThetaContext {
public:
    // pi_valuation defaults to the smallest edge valuation of the tree of
    // the fixed points.
    ThetaContext(std::vector<FixedPair> fixed, int length, std::optional<Rational> pi_valuation = std::nullopt);

    int genus() const { return static_cast<int>(fixed_.size()) - 1; }
    int length() const { return table_.max_len; }
    const Rational& pi_valuation() const { return pi_; }
    const std::vector<FixedPair>& fixed_points() const { return fixed_; }
    const std::vector<Involution>& generators() const { return gens_; }
    const WordTable& words() const { return table_; }
    const Field& field() const { return field_; }
    // Products run over a copy of the field with guard digits; inputs are
    // taken as exact to their stated digits.
    const Field& working_field() const { return work_; }
    ProjPoint lift(const ProjPoint& z) const;
    ProjPoint lower(const ProjPoint& z) const;

    // Images w(a) over the working field, indexed as words().words.
    std::vector<ProjPoint> orbit(const ProjPoint& a) const;
    ProjPoint act(const ReducedWord& w, const ProjPoint& z) const;
    ProjPoint act_working(const ReducedWord& w, const ProjPoint& z) const;
    ProjPoint generator_image(std::size_t i, const ProjPoint& z) const { return act(ReducedWord({static_cast<std::uint8_t>(i)}), z); }
    // (L - shift) * v(pi)
    Rational tail_error(int shift = 0) const { return Rational(length() - shift) * pi_; }

private:
    std::vector<FixedPair> fixed_;
    std::vector<Involution> gens_;
    WordTable table_;
    Rational pi_;
    Field field_;
    Field work_;
};

Rational fixed_point_size_bound(const std::vector<FixedPair>& fixed);

// prod over words of length <= L (all words, or even words only) of
// (z - w a)/(z - w b), with the usual conventions at infinity.  Orbits are
// computed once, so repeated evaluation at many z is cheap.
class ThetaProduct {
public:
    ThetaProduct(const ThetaContext& ctx, const ProjPoint& a, const ProjPoint& b, bool even_only, int shift = 0);
    ThetaValue operator()(const ProjPoint& z) const;
    // value over the working field
    FieldElement evaluate(const ProjPoint& z) const;

    Rational error() const { return error_; }
    std::size_t size() const { return terms_.size(); }

private:
    bool trivial_ = false;
    Field field_, work_;
    std::vector<std::pair<ProjPoint, ProjPoint>> terms_;
    Rational error_;
};

ThetaValue theta_gamma(const ThetaContext& ctx, const ProjPoint& a, const ProjPoint& b, const ProjPoint& z);
ThetaValue theta_W(const ThetaContext& ctx, const ProjPoint& a, const ProjPoint& b, const ProjPoint& z);
// Theta_W(omega, alpha(omega); z) for alpha of even length.
ThetaValue u_alpha(const ThetaContext& ctx, const ReducedWord& alpha, const ProjPoint& omega, const ProjPoint& z);

// Fundamental domain centred at a base point q.  In the coordinate
// w = 1/(z - q) it is the region outside the isometric disks
// |w - (a_i + b_i)/2| < |a_i - b_i| of the generators.  When infinity is
// already a suitable centre the chart is the identity.
struct OrdinaryChart {
    Mobius to_chart;
    std::vector<FixedPair> fixed;  // in the chart coordinate

    // strict interior, chart coordinate
    bool contains(const ProjPoint& w) const;
    std::vector<ProjPoint> sample(std::size_t count, std::mt19937_64& rng) const;
};

OrdinaryChart ordinary_chart(const std::vector<FixedPair>& fixed, std::mt19937_64& rng);

// Interior points of a fundamental domain, in the original coordinate.
std::vector<ProjPoint> sample_domain_points(const std::vector<FixedPair>& fixed, std::size_t count,
                                            std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Coordinate charts for Fix and Branch tuples.

using Coords = std::vector<FieldElement>;
// Chooses one of the two square roots (given r, the candidates are r and -r).
using RootPicker = std::function<FieldElement(std::size_t index, const FieldElement& root)>;

struct Chart {
    std::string name;
    std::string description;
    std::string signature;  // configuration signature of the tree
    int genus = 0;
    std::vector<std::string> coord_names;
    // indices (in the order a0,b0,a1,b1,...) of the points sent to 0, 1, inf
    std::size_t to_zero = 0, to_one = 0, to_infinity = 0;
    // coordinates fixed by a square-root choice in the leading inverse, in
    // the order the RootPicker indices refer to them
    std::vector<std::size_t> root_coords;
    // 's' small (v > 0), 'u' unit, 'l' large (v < 0); used for sampling
    std::string coord_kinds;

    std::function<std::vector<ProjPoint>(const Coords&)> points;
    std::function<Coords(const std::vector<ProjPoint>&)> coords;
    std::function<bool(const Coords&)> fix_ok;
    std::function<bool(const Coords&)> branch_ok;
    std::function<Coords(const Coords&)> lead;          // leading-order FB
    std::function<Coords(const Coords&)> printed_lead;  // formula as published, when it differs
    std::function<Coords(const Coords&, const RootPicker&)> lead_inverse;
    std::size_t sheet_count() const { return std::size_t{1} << root_coords.size(); }
};

// Random coordinates satisfying the Fix inequalities of the chart; throws
// UnsupportedError when the residue field is too small to host them.
Coords sample_fix_coords(const Chart& ch, const Field& f, std::mt19937_64& rng);

const std::vector<Chart>& chart_registry();
const Chart& chart(const std::string& name);  // throws UnsupportedError
std::vector<std::string> chart_labels(int genus);  // a0,b0,a1,b1,...

struct ChartTuple {
    std::string chart;
    Coords coords;

    std::vector<ProjPoint> points() const;
    std::vector<LabeledPoint> labeled_points() const;
    std::vector<FixedPair> pairs() const;
};
using FixTuple = ChartTuple;
using BranchTuple = ChartTuple;

struct FbOptions {
    int length = 4;
    // Override the auxiliary points (a, b) of F; results are renormalized.
    std::optional<std::pair<ProjPoint, ProjPoint>> aux;
    bool check_configuration = true;
};

struct FbResult {
    BranchTuple branch;
    Rational error;  // certified valuation of the truncation error
};

FbResult fb_map(const FixTuple& fix, const FbOptions& opt = {});

struct FbInverseOptions {
    int target = 10;             // residual valuation to reach
    int max_length = 16;         // cap for the truncation length
    std::optional<int> length;   // fixed truncation length (skips the schedule)
    int max_iterations = 200;
};

struct FbSheet {
    FixTuple fix;
    Rational residual;      // min over coordinates of v(FB_k(x) - y_k) - v(y_k)
    int iterations = 0;
    int length = 0;
    Rational certified;     // L * v(pi)
    bool restricted = false;
};

// Truncation length needed for a certified error of `target`.
int length_for_target(const Rational& pi_valuation, int target);

std::vector<FbSheet> fb_inverse(const BranchTuple& branch, const FbInverseOptions& opt = {});

// ---------------------------------------------------------------------------
// Hyperelliptic equations.

enum class EquationChart { InfinityOrdinary, InfinityBranch };

struct EquationOptions {
    int length = 6;
    EquationChart chart = EquationChart::InfinityOrdinary;
    std::uint64_t seed = 1;  // auxiliary points
};

// All data needed to evaluate F and H in the chart used by the equation.
class Uniformization {
public:
    Uniformization(const std::vector<FixedPair>& fixed, const EquationOptions& opt);
    Uniformization(const Uniformization&) = delete;
    Uniformization& operator=(const Uniformization&) = delete;

    EquationChart chart() const { return chart_; }
    const ThetaContext& context() const { return ctx_; }
    // Fixed points after the change of coordinates.
    const std::vector<FixedPair>& fixed_points() const { return ctx_.fixed_points(); }
    // Converts a point of the original coordinate into the working one.
    ProjPoint to_working(const ProjPoint& z) const { return apply(move_, z); }

    ThetaValue F(const ProjPoint& z) const;  // working coordinate
    ThetaValue H(const ProjPoint& z) const;
    std::vector<FieldElement> roots() const;
    FieldElement c() const { return c_.in_field(ctx_.field()); }
    Rational error() const { return error_; }  // of c

    // v(H(z)^2 / (c prod (F(z) - r)) - 1) against the certified bound.
    struct RelationCheck {
        Rational defect;
        Rational certified;
        bool ok() const { return defect >= certified; }
    };
    RelationCheck check_relation(const ProjPoint& z) const;
    std::vector<ProjPoint> domain_points(std::size_t count, std::mt19937_64& rng) const;

    struct Setup;

private:
    Uniformization(const std::vector<FixedPair>& fixed, const EquationOptions& opt, Setup setup);
    FieldElement h_working(const ProjPoint& z) const;
    Rational h_error() const;
    static Rational difference_error(const FieldElement& x, const Rational& ex, const FieldElement& y,
                                     const Rational& ey, const FieldElement& d);

    EquationChart chart_;
    Mobius move_;
    OrdinaryChart domain_;  // maps into the working coordinate by domain_back_
    Mobius domain_back_;
    ThetaContext ctx_;
    std::optional<ThetaProduct> f_;
    std::vector<ThetaProduct> h_parts_;
    ProjPoint omega_;
    std::vector<FieldElement> roots_;
    FieldElement c_;  // over the working field, like roots_
    Rational error_;
};

struct Equation {
    std::vector<FieldElement> roots;
    FieldElement c;
    bool c_is_square = false;
    Rational error;
};

Equation hyperelliptic_equation(const std::vector<FixedPair>& fixed, const EquationOptions& opt = {});
inline Equation hyperelliptic_equation(const FixTuple& fix, const EquationOptions& opt = {}) {
    return hyperelliptic_equation(fix.pairs(), opt);
}
// H at a point of the original coordinate.
ThetaValue h_function(const std::vector<FixedPair>& fixed, const ProjPoint& z, const EquationOptions& opt = {});

}  // namespace whittaker
