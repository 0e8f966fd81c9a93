// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Failing criteria are reported, not hidden; the exit status is nonzero only
// when a criterion cannot be evaluated at all.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "whittaker/poly.hpp"
#include "whittaker/theta.hpp"
#include "whittaker_cli/examples.hpp"

using namespace whittaker;

namespace {

// tolerances
constexpr int kPrecision = 20;
constexpr int kLeadSamples = 20;
constexpr int kLeadLength = 6;
constexpr double kLeadSeconds = 30.0;
const Rational kLeadAgreement(1);  // unit quotient is 1 mod p
constexpr double kKadzielaSeconds = 10.0;
const Rational kX37Residual(15);
constexpr int kRelationLength = 6;
constexpr std::int64_t kRelationPrecision = 10;
constexpr int kThetaCases = 50;
constexpr int kEquationPoints = 5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Field field(const std::string& d, int prec = kPrecision) { return make_field(FieldDescriptor::parse(d, prec)); }

Rational v1(const FieldElement& q) {
    const FieldElement d = q - FieldElement::from_int(1, q.field());
    return d.is_exact_zero() ? Rational(1000000) : d.valuation();
}

Rational rel(const FieldElement& x, const FieldElement& y) { return v1(x / y); }

std::vector<LabelPair> std_pairs(int g) {
    std::vector<LabelPair> p;
    for (int i = 0; i <= g; ++i) p.emplace_back("a" + std::to_string(i), "b" + std::to_string(i));
    return p;
}

int domains_d(const Chart& ch, const Field& f) {
    std::mt19937_64 rng(0);
    const FixTuple fix{ch.name, sample_fix_coords(ch, f, rng)};
    return enumerate_fundamental_domains(double_graph(classify(build_tree(fix.labeled_points()), std_pairs(ch.genus)))).d;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int components(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        auto& p = parent[static_cast<std::size_t>(x)];
        return p == x ? x : p = find(p);
    };
    int c = n;
    for (const auto& [a, b] : edges) {
        const int x = find(a), y = find(b);
        if (x != y) {
            parent[static_cast<std::size_t>(x)] = y;
            --c;
        }
    }
    return c;
}

// vertex and edge subsets of the doubled graph that form a tree mapping
// bijectively onto the configuration tree
std::size_t brute_force_domains(const DoubledGraph& dg) {
    auto subsets = [](int n, const std::vector<int>& origin, int base) {
        std::vector<std::vector<int>> out;
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
            std::vector<int> c;
            std::set<int> seen;
            for (int i = 0; i < n; ++i)
                if ((m >> i) & 1) {
                    c.push_back(i);
                    seen.insert(origin[static_cast<std::size_t>(i)]);
                }
            if (static_cast<int>(c.size()) == base && static_cast<int>(seen.size()) == base) out.push_back(c);
        }
        return out;
    };
    const auto vsets = subsets(dg.num_vertices, dg.vertex_origin, dg.base_vertices);
    const auto esets = subsets(static_cast<int>(dg.edges.size()), dg.edge_origin, dg.base_edges);
    std::size_t count = 0;
    for (const auto& vs : vsets) {
        std::map<int, int> index;
        for (int v : vs) index[v] = static_cast<int>(index.size());
        for (const auto& es : esets) {
            std::vector<std::pair<int, int>> sub;
            bool inside = true;
            for (int e : es) {
                const auto [a, b] = dg.edges[static_cast<std::size_t>(e)];
                inside = inside && index.count(a) && index.count(b);
                if (inside) sub.emplace_back(index[a], index[b]);
            }
            if (inside && components(static_cast<int>(vs.size()), sub) == 1) ++count;
        }
    }
    return count;
}

Outcome leading_formulas() {
    std::mt19937_64 rng(101);
    const auto t0 = Clock::now();
    std::ostringstream bad;
    bool pass = true;
    int derived_total = 0;
    for (const char* name : {"g2a", "g2b", "g2c", "g3_1", "g3_4", "g3_8", "g3_10"}) {
        const Chart& ch = chart(name);
        Field f = field("5");
        std::string used = "5";
        try {
            std::mt19937_64 probe(0);
            sample_fix_coords(ch, f, probe);
        } catch (const UnsupportedError&) {
            pass = false;
            used = "5,2";
            f = field(used);
            bad << " " << name << ":no-Q5-samples";
        }
        int agree = 0, derived = 0;
        for (int i = 0; i < kLeadSamples; ++i) {
            const FixTuple fix{name, sample_fix_coords(ch, f, rng)};
            FbOptions o;
            o.length = kLeadLength;
            const auto y = fb_map(fix, o).branch;
            const auto printed = ch.printed_lead(fix.coords);
            bool ok = true;
            for (std::size_t k = 0; k < printed.size(); ++k) ok = ok && rel(y.coords[k], printed[k]) >= kLeadAgreement;
            agree += ok;
            const auto lead = ch.lead(fix.coords);
            bool dok = true;
            for (std::size_t k = 0; k < lead.size(); ++k) dok = dok && rel(y.coords[k], lead[k]) >= kLeadAgreement;
            derived += dok;
        }
        derived_total += derived;
        if (agree != kLeadSamples) {
            pass = false;
            bad << " " << name << ":" << agree << "/" << kLeadSamples;
        }
    }
    const double secs = seconds_since(t0);
    if (secs > kLeadSeconds) pass = false;
    std::ostringstream d;
    d << "printed formulas over Q5, L=" << kLeadLength << ", " << secs << " s";
    if (!pass) d << "; mismatches:" << bad.str();
    d << "; rederived formulas agree on " << derived_total << "/" << 7 * kLeadSamples << " samples";
    return {pass, d.str()};
}

Outcome fibre_cardinality() {
    const std::map<std::string, std::size_t> expected = {{"g2a", 1},  {"g2b", 2},  {"g2c", 2},  {"g3_1", 4},
                                                         {"g3_4", 4}, {"g3_8", 4}, {"g3_10", 1}};
    std::mt19937_64 rng(102);
    bool pass = true;
    std::ostringstream d;
    for (const auto& [name, want] : expected) {
        const Chart& ch = chart(name);
        const Field f = field(name == "g3_8" ? "5,2" : "5");
        const int dd = domains_d(ch, f);
        const FixTuple fix{name, sample_fix_coords(ch, f, rng)};
        FbOptions fo;
        fo.length = 4;
        FbInverseOptions io;
        io.target = 4;
        io.length = 4;
        const auto sheets = fb_inverse(fb_map(fix, fo).branch, io);
        const std::size_t theory = std::size_t{1} << std::max(0, dd - 1);
        const bool ok = sheets.size() == want && theory == want;
        pass = pass && ok;
        d << " " << name << "=" << sheets.size() << (ok ? "" : "(!)");
    }
    return {pass, "sheets:" + d.str()};
}

Outcome kadziela() {
    const auto t0 = Clock::now();
    const Field f = field("5");
    FbInverseOptions io;
    io.target = 10;
    const auto sheets = fb_inverse(BranchTuple{"g2b", {FieldElement::parse("25", f), FieldElement::parse("39", f),
                                                         FieldElement::parse("1/5", f)}},
                                   io);
    std::set<std::vector<std::int64_t>> got;
    for (const auto& s : sheets) {
        const auto& x = s.fix.coords;
        if (x[0].valuation() != Rational(2) || x[1].valuation() != Rational(0) || x[2].valuation() != Rational(-1))
            return {false, "unexpected valuations"};
        got.insert({x[0].unit_residue().a, x[1].unit_residue().a, x[2].unit_residue().a});
    }
    const std::set<std::vector<std::int64_t>> want = {{1, 2, 3}, {2, 3, 1}};
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << sheets.size() << " sheets, residues " << (got == want ? "match" : "differ") << ", " << secs << " s";
    return {got == want && secs < kKadzielaSeconds, d.str()};
}

Outcome x0_37() {
    const auto& fx = cli::example("x0_37");
    // (x - 1)^2 (x^2 + 8x + 1)^2 expanded mod 37
    std::vector<std::int64_t> prod{1};
    auto mul = [&prod](const std::vector<std::int64_t>& g) {
        std::vector<std::int64_t> c(prod.size() + g.size() - 1, 0);
        for (std::size_t i = 0; i < prod.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j) c[i + j] = ((c[i + j] + prod[i] * g[j]) % 37 + 37) % 37;
        prod = c;
    };
    for (const auto& g : {std::vector<std::int64_t>{-1, 1}, {-1, 1}, {1, 8, 1}, {1, 8, 1}}) mul(g);
    bool identity = prod.size() == fx.polynomial.size();
    for (std::size_t i = 0; identity && i < prod.size(); ++i) {
        mpz_class r = fx.polynomial[i] % 37;
        if (r < 0) r += 37;
        identity = r.get_si() == prod[i];
    }
    int linear = 0, quadratic = 0;
    for (const auto& r : factor_mod_p(fx.polynomial, 37)) {
        if (r.coeffs == std::vector<std::int64_t>{36, 1}) linear += r.multiplicity;
        if (r.coeffs == std::vector<std::int64_t>{1, 8, 1}) quadratic += r.multiplicity;
    }
    const bool factors = identity && linear == 2 && quadratic == 2;

    const Field unram = field("37,15");
    const auto roots = polynomial_roots(poly_from_integers(fx.polynomial, unram));

    const Field ram = field(fx.field);
    const auto t = build_tree(cli::fixture_branch_points(fx, ram));
    const bool config_a = configuration_signature(t.skeleton) == chart("g2a").signature;

    std::ostringstream d;
    d << "mod-37 factorization " << (factors ? "ok" : "wrong") << ", configuration "
      << (config_a ? "(a)" : configuration_signature(t.skeleton)) << ", roots in Q37(sqrt15): " << roots.size()
      << "/6";
    bool residual_ok = false;
    if (roots.size() == 6) {
        FbInverseOptions io;
        io.target = 15;
        try {
            const auto sheets = fb_inverse(cli::fixture_branch_tuple(fx, unram), io);
            residual_ok = !sheets.empty() && sheets.front().residual >= kX37Residual;
        } catch (const Error& e) {
            d << ", fb_inverse: " << e.what();
        }
    } else {
        // the branch points need the ramified extension; report what it reaches
        FbInverseOptions io;
        io.target = fx.target;
        const auto sheets = fb_inverse(cli::fixture_branch_tuple(fx, ram), io);
        if (!sheets.empty()) {
            const auto& s0 = sheets.front();
            const Rational pi = s0.certified / Rational(s0.length);
            d << "; over " << fx.field << " target " << fx.target << " reached with residual " << s0.residual.str()
              << ", residual " << kX37Residual.str() << " would need L = " << length_for_target(pi, 15)
              << " at v(pi) = " << pi.str();
        }
    }
    return {factors && config_a && residual_ok, d.str()};
}

Outcome q3_ramified() {
    const auto& fx = cli::example("q3_rosenhain_c");
    FbInverseOptions io;
    io.target = fx.target;
    bool diagnosed = false;
    try {
        const Field f = field("3");
        fb_inverse(BranchTuple{"ros_c", {FieldElement::parse("3", f), FieldElement::parse("3", f),
                                          FieldElement::parse("3", f)}},
                   io);
    } catch (const DomainError& e) {
        diagnosed = std::string(e.what()).find("ramified") != std::string::npos;
    }
    const Field f = field("3,ram");
    const auto three = FieldElement::parse("3", f);
    const auto sheets = fb_inverse(BranchTuple{"ros_c", {three, three, three}}, io);
    const auto approx = FieldElement::parse("3/4", f);
    const Rational pi = Rational(1, 2);  // residue class modulo the uniformizer
    bool values = sheets.size() == 2;
    for (const auto& s : sheets) {
        const auto& x = s.fix.coords;
        values = values && rel(x[0], approx) >= pi && rel(x[2], approx) >= pi && rel(x[1] * x[1], three) >= pi;
    }
    if (sheets.size() == 2) values = values && rel(sheets[0].fix.coords[1], -sheets[1].fix.coords[1]) >= pi;
    std::ostringstream d;
    d << "ramified diagnosis " << (diagnosed ? "yes" : "no") << ", " << sheets.size()
      << " sheets near (3/4, +-sqrt3, 3/4): " << (values ? "yes" : "no");
    return {diagnosed && values, d.str()};
}

Outcome x0_39() {
    const auto& fx = cli::example("x0_39");
    const cli::Json rep = cli::run_example(fx, {});
    std::set<std::string> lambdas;
    for (const auto& r : rep.at("root_line_residues")) lambdas.insert(r.at("lambda").get<std::string>());
    const std::set<std::string> want = {"1", "2", "lambda + 1", "2lambda + 2"};
    const auto& a = rep.at("analysis");
    const bool star = a.at("signature") == chart("g3_10").signature;
    const bool closed = a.at("closed_disk").get<bool>();
    const std::size_t sheets = rep.at("fb_inverse").at("sheets").size();
    const int found = rep.at("requested_field").at("roots_found").get<int>();
    std::ostringstream d;
    d << "leaf residues " << (lambdas == want ? "{1, 2, lambda+1, 2lambda+2}" : "differ") << ", star "
      << (star ? "yes" : "no") << ", closed_disk " << (closed ? "true" : "false") << ", sheets " << sheets
      << "; branch points over Q3(lambda): " << found << "/8, tree built over " << rep.at("field").get<std::string>();
    return {found == 8 && lambdas == want && star && closed && sheets == 1, d.str()};
}

Outcome relations() {
    const Field f = field("5");
    auto p = [&f](const char* s) { return std::string(s) == "inf" ? ProjPoint::infinity() : ProjPoint(FieldElement::parse(s, f)); };
    const std::vector<Mobius> bad = {involution_from_pair(p("0"), p("5")), involution_from_pair(p("1"), p("-1")),
                                     involution_from_pair(p("1/5"), p("inf"))};
    bool found = false;
    for (const auto& [l, r] : find_relations(bad, 3, kRelationPrecision)) {
        const auto a = l.str(), b = r.str();
        found = found || (a == "121" && b == "0") || (a == "0" && b == "121");
    }
    std::mt19937_64 rng(107);
    const Field wide = field("5", 80);  // long chains lose about 10 digits per product
    int restricted = 0, clean = 0;
    for (const auto& cat : {genus2_catalog(), genus3_catalog()}) {
        for (const auto& nc : cat) {
            const auto pts = realize_configuration(nc.config.skeleton, wide, rng);
            if (!restricted_check(build_tree(pts), nc.config.pairs)) continue;
            ++restricted;
            std::map<std::string, ProjPoint> by;
            for (const auto& lp : pts) by[lp.label] = lp.point;
            std::vector<Mobius> gens;
            for (const auto& [a, b] : nc.config.pairs) gens.push_back(involution_from_pair(by[a], by[b]));
            clean += find_relations(gens, kRelationLength, kRelationPrecision).empty();
        }
    }
    std::ostringstream d;
    d << "s1s2s1 = s0 " << (found ? "found" : "missing") << "; restricted catalog samples without relations to length "
      << kRelationLength << ": " << clean << "/" << restricted;
    return {found && restricted > 0 && clean == restricted, d.str()};
}

Outcome theta_suite() {
    std::mt19937_64 rng(108);
    int cases = 0, inv = 0, mult = 0, omega = 0, stab = 0;
    const auto& reg = chart_registry();
    for (std::size_t i = 0; cases < kThetaCases; ++i) {
        const Chart& ch = reg[i % reg.size()];
        const Field f = field(ch.name == "g3_8" ? "5,2" : "5");
        const int L = ch.genus == 2 ? 6 : 5;
        const FixTuple fix{ch.name, sample_fix_coords(ch, f, rng)};
        const auto oc = ordinary_chart(fix.pairs(), rng);
        const ThetaContext ctx(oc.fixed, L), ctx1(oc.fixed, L + 1);
        const auto zs = oc.sample(7, rng);
        const ThetaProduct F(ctx, zs[0], zs[1], false), F1(ctx1, zs[0], zs[1], false);
        for (std::size_t k = 2; k < zs.size() && cases < kThetaCases; ++k, ++cases) {
            const auto Fz = F(zs[k]);
            bool ok = true;
            for (int g = 0; g <= ch.genus; ++g) {
                const auto sz = ctx.act_working(ReducedWord({static_cast<std::uint8_t>(g)}), zs[k]);
                ok = ok && rel(F(sz).value, Fz.value) >= ctx.tail_error(1);
            }
            inv += ok;
            stab += rel(F1(zs[k]).value, Fz.value) >= Fz.error;
            const ReducedWord al({1, 0}), be({2, 0});
            const auto ua = u_alpha(ctx, al, zs[0], zs[k]), ub = u_alpha(ctx, be, zs[0], zs[k]),
                       uab = u_alpha(ctx, al * be, zs[0], zs[k]);
            mult += rel(ua.value * ub.value, uab.value) >= std::min({ua.error, ub.error, uab.error});
            const auto ua2 = u_alpha(ctx, al, zs[1], zs[k]);
            omega += rel(ua.value, ua2.value) >= std::min(ua.error, ua2.error);
        }
    }
    std::ostringstream d;
    d << "invariance " << inv << "/" << cases << ", multiplicativity " << mult << "/" << cases << ", omega "
      << omega << "/" << cases << ", stability " << stab << "/" << cases;
    const bool pass = cases == kThetaCases && inv == cases && mult == cases && omega == cases && stab == cases;
    return {pass, d.str()};
}

Outcome equations() {
    std::mt19937_64 rng(109);
    const Field f = field("5");
    int samples = 0, squares = 0, points = 0, ok = 0;
    for (const char* name : {"g2a", "g2b", "g2c", "ros_a", "ros_b", "ros_c"}) {
        for (int s = 0; s < 2; ++s, ++samples) {
            const FixTuple fix{name, sample_fix_coords(chart(name), f, rng)};
            EquationOptions eo;
            eo.length = 8;
            eo.seed = static_cast<std::uint64_t>(s + 1);
            const Uniformization U(fix.pairs(), eo);
            squares += is_square(U.c());
            for (const auto& z : U.domain_points(kEquationPoints, rng)) {
                ++points;
                ok += U.check_relation(z).ok();
            }
        }
    }
    std::ostringstream d;
    d << "H^2 relation " << ok << "/" << points << ", c square " << squares << "/" << samples;
    return {ok == points && squares == samples, d.str()};
}

Outcome combinatorics() {
    int good = 0, total = 0;
    std::ostringstream bad;
    for (const auto& nc : genus3_catalog()) {
        ++total;
        const auto dg = double_graph(nc.config);
        const auto fd = enumerate_fundamental_domains(dg);
        const std::size_t brute = brute_force_domains(dg);
        if (dg.betti() == 3 && fd.domains.size() == brute) ++good;
        else bad << " " << nc.name;
    }
    std::ostringstream d;
    d << good << "/" << total << " configurations" << bad.str();
    return {good == total, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"leading-order FB formulas", leading_formulas},
        {"fibre cardinality", fibre_cardinality},
        {"Kadziela reproduction", kadziela},
        {"X0(37)", x0_37},
        {"Q3 ramified case", q3_ramified},
        {"X0(39)", x0_39},
        {"relation detection", relations},
        {"theta invariants", theta_suite},
        {"equation synthesis", equations},
        {"combinatorial oracles", combinatorics},
    };
    int passed = 0, errors = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
            ++errors;
        }
        passed += o.pass;
        std::cout << "criterion " << (i + 1) << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
                  << ": " << o.detail << " [" << seconds_since(t0) << " s]" << std::endl;
    }
    std::cout << passed << "/" << criteria.size() << " criteria pass" << std::endl;
    return errors == 0 ? 0 : 1;
}
