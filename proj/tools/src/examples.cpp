#include "whittaker_cli/examples.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "whittaker/poly.hpp"

namespace whittaker::cli {

namespace {

std::vector<Fixture> build_examples() {
    std::vector<Fixture> out;

    Fixture x37;
    x37.name = "x0_37";
    x37.description = "modular curve X0(37), y^2 = x^6 + 14x^5 + 35x^4 + 48x^3 + 35x^2 + 14x + 1 at p = 37";
    x37.field = "37,15,ram";
    x37.requested_field = "37,15";
    x37.precision = 20;
    x37.chart = "g2a";
    x37.polynomial = {1, 14, 35, 48, 35, 14, 1};
    x37.degree = 6;
    x37.factor_prime = 37;
    x37.hints = {{"a0", "1"}, {"b0", "1"}, {"a1", "-4 + s"}, {"b1", "-4 + s"}, {"a2", "-4 - s"}, {"b2", "-4 - s"}};
    x37.target = 6;
    out.push_back(x37);

    Fixture x39;
    x39.name = "x0_39";
    x39.description = "modular curve X0(39), y^2 = (x^4 - 7x^3 + 11x^2 - 7x + 1)(x^4 + x^3 - x^2 + x + 1) at p = 3";
    x39.field = "3,2,ram";
    x39.requested_field = "3,2";
    x39.precision = 20;
    x39.chart = "g3_10";
    x39.polynomial = {1, -6, 3, 12, -23, 12, 3, -6, 1};
    x39.degree = 8;
    x39.factor_prime = 3;
    x39.hints = {{"a0", "1"}, {"b0", "1"}, {"a1", "-1"}, {"b1", "-1"},
                 {"a2", "s"}, {"b2", "s"}, {"a3", "-s"}, {"b3", "-s"}};
    x39.target = 4;
    out.push_back(x39);

    Fixture kad;
    kad.name = "kadziela";
    kad.description = "genus 2 Mumford curve y^2 = x(x-1)(x-5)(x-195)(x-125) over Q5";
    kad.field = "5";
    kad.precision = 20;
    kad.chart = "g2b";
    kad.polynomial = {0, 121875, -147850, 26300, -326, 1};
    kad.degree = 6;
    kad.hints = {{"a0", "0"}, {"b0", "125"}, {"a1", "5"}, {"b1", "195"}, {"a2", "inf"}, {"b2", "1"}};
    kad.target = 10;
    out.push_back(kad);

    Fixture q3;
    q3.name = "q3_rosenhain_c";
    q3.description = "configuration (c) in Rosenhain position over Q3, branch tuple (3, 3, 3)";
    q3.field = "3";
    q3.fallback_field = "3,ram";
    q3.precision = 20;
    q3.chart = "ros_c";
    q3.branch_coords = {"3", "3", "3"};
    q3.target = 5;
    out.push_back(q3);

    for (int i = 1; i <= 10; ++i) {
        Fixture s;
        s.name = "g3_config_" + std::to_string(i);
        s.description = "synthetic branch points realizing genus 3 configuration " + std::to_string(i);
        s.field = "5";
        s.precision = 20;
        s.catalog_config = i;
        s.seed = static_cast<std::uint64_t>(i);
        out.push_back(s);
    }
    return out;
}

std::string lambda_form(const Residue& r, std::int64_t p) {
    // s = lambda + 1, so a + b s = (a + b) + b lambda
    const std::int64_t c0 = (r.a + r.b) % p, c1 = r.b % p;
    std::string s;
    if (c1 != 0) s = (c1 == 1 ? std::string() : std::to_string(c1)) + "lambda";
    if (c0 != 0) s += (s.empty() ? "" : " + ") + std::to_string(c0);
    return s.empty() ? "0" : s;
}

Json roots_check(const Fixture& fx) {
    const Field req = make_field(FieldDescriptor::parse(*fx.requested_field, fx.precision));
    const Poly f = poly_from_integers(fx.polynomial, req);
    const auto roots = projective_roots(f, static_cast<std::size_t>(fx.degree));
    return {{"field", *fx.requested_field},
            {"roots_found", roots.size()},
            {"degree", fx.degree},
            {"all_roots", roots.size() == static_cast<std::size_t>(fx.degree)}};
}

std::vector<LabelPair> label_pairs(std::size_t n) {
    std::vector<LabelPair> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back("a" + std::to_string(i), "b" + std::to_string(i));
    return out;
}

Json fb_inverse_json(const BranchTuple& b, int target) {
    FbInverseOptions io;
    io.target = target;
    const auto sheets = fb_inverse(b, io);
    Json arr = Json::array();
    for (const auto& s : sheets) arr.push_back(to_json(s));
    return arr;
}

}  // namespace

const std::vector<Fixture>& example_registry() {
    static const std::vector<Fixture> reg = build_examples();
    return reg;
}

const Fixture& example(const std::string& name) {
    for (const auto& fx : example_registry())
        if (fx.name == name) return fx;
    throw DomainError("unknown_example", "no example named " + name);
}

std::vector<LabeledPoint> fixture_branch_points(const Fixture& fx, const Field& f) {
    if (fx.polynomial.empty()) throw DomainError("no_polynomial", fx.name + " is not given by a polynomial");
    const auto roots = projective_roots(poly_from_integers(fx.polynomial, f), static_cast<std::size_t>(fx.degree));
    if (roots.size() != static_cast<std::size_t>(fx.degree))
        throw UnsupportedError("roots_outside_field", "only " + std::to_string(roots.size()) + " of " +
                                                          std::to_string(fx.degree) + " branch points lie in " +
                                                          descriptor(f).str());
    std::vector<bool> used(roots.size(), false);
    std::vector<LabeledPoint> out;
    for (const auto& [label, hint_text] : fx.hints) {
        const ProjPoint hint = hint_text == "inf" ? ProjPoint::infinity() : ProjPoint(FieldElement::parse(hint_text, f));
        std::optional<std::size_t> best;
        Rational best_v(-1000000);
        for (std::size_t i = 0; i < roots.size(); ++i) {
            if (used[i]) continue;
            Rational v;
            if (hint.is_infinity() || roots[i].is_infinity()) {
                if (hint.is_infinity() != roots[i].is_infinity()) {
                    const FieldElement& x = hint.is_infinity() ? roots[i].value() : hint.value();
                    v = x.is_zero() ? Rational(-1000000) : x.valuation();
                } else {
                    v = Rational(1000000);
                }
            } else {
                const FieldElement d = roots[i].value() - hint.value();
                v = d.is_zero() ? Rational(1000000) : d.valuation();
            }
            if (!best || v > best_v) {
                best = i;
                best_v = v;
            }
        }
        used[*best] = true;
        out.push_back({label, roots[*best]});
    }
    return out;
}

BranchTuple fixture_branch_tuple(const Fixture& fx, const Field& f) {
    const Chart& ch = chart(fx.chart);
    if (!fx.branch_coords.empty()) {
        Coords c;
        for (const auto& s : fx.branch_coords) c.push_back(FieldElement::parse(s, f));
        return {fx.chart, c};
    }
    const auto pts = fixture_branch_points(fx, f);
    std::vector<ProjPoint> p;
    for (const auto& lp : pts) p.push_back(lp.point);
    const Mobius m = mobius_to_01inf(p[ch.to_zero], p[ch.to_one], p[ch.to_infinity]);
    for (auto& q : p) q = apply(m, q);
    return {fx.chart, ch.coords(p)};
}

Json run_example(const Fixture& fx, const JobOptions& opt, std::string* text) {
    const int precision = opt.precision.value_or(fx.precision);
    const std::string field_text = opt.field.value_or(fx.field);
    Field f = make_field(FieldDescriptor::parse(field_text, precision));
    Json rep;
    rep["name"] = fx.name;
    rep["description"] = fx.description;
    rep["field"] = descriptor(f).str();
    rep["precision"] = precision;
    std::ostringstream pretty;

    if (fx.catalog_config) {
        const auto catalog = genus3_catalog();
        const Configuration& target = catalog.at(static_cast<std::size_t>(*fx.catalog_config - 1)).config;
        std::mt19937_64 rng(fx.seed);
        const auto pts = realize_configuration(target.skeleton, f, rng);
        const ReductionTree t = build_tree(pts);
        const Configuration c = classify(t, canonical_pairing(t));
        Json p = Json::object();
        for (const auto& lp : pts) p[lp.label] = to_json(lp.point);
        rep["points"] = p;
        rep["catalog_number"] = *fx.catalog_config;
        rep["analysis"] = configuration_json(t, c);
        Json charts = Json::array();
        for (const auto& ch : chart_registry())
            if (ch.signature == c.signature()) charts.push_back(ch.name);
        rep["charts"] = charts;
        pretty << render_tree(t, c);
        if (text) *text = pretty.str();
        return rep;
    }

    if (!fx.polynomial.empty()) {
        Json coeffs = Json::array();
        for (const auto& c : fx.polynomial) coeffs.push_back(c.get_str());
        rep["polynomial"] = coeffs;
        if (fx.factor_prime) {
            std::string s;
            for (const auto& fac : factor_mod_p(fx.polynomial, *fx.factor_prime)) s += fac.str();
            rep["factorization_mod_p"] = {{"p", *fx.factor_prime}, {"factors", s}};
            pretty << "mod " << *fx.factor_prime << ": " << s << "\n";
        }
        if (fx.requested_field) rep["requested_field"] = roots_check(fx);

        const auto pts = fixture_branch_points(fx, f);
        Json p = Json::object();
        for (const auto& lp : pts) p[lp.label] = to_json(lp.point);
        rep["branch_points"] = p;
        const ReductionTree t = build_tree(pts);
        const Configuration c = classify(t, label_pairs(pts.size() / 2));
        rep["analysis"] = configuration_json(t, c);
        pretty << render_tree(t, c);

        // residues of the branch points on the line through the root vertex
        const ResidueField k(descriptor(f).p, descriptor(f).unramified);
        std::vector<Residue> res;
        int root = 0;
        for (int v = 0; v < t.num_vertices(); ++v)
            if (t.vertices[static_cast<std::size_t>(v)].outer) root = v;
        for (const auto& lp : pts) {
            const DirCoord d = t.direction_of(root, lp.point);
            if (!d.inf && std::find(res.begin(), res.end(), d.r) == res.end()) res.push_back(d.r);
        }
        std::sort(res.begin(), res.end(), [](const Residue& x, const Residue& y) {
            return std::pair(x.b, x.a) < std::pair(y.b, y.a);
        });
        Json rj = Json::array();
        for (const auto& r : res) {
            Json item = {{"residue", k.str(r)}};
            if (k.quadratic() && descriptor(f).p == 3 && *descriptor(f).unramified == 2)
                item["lambda"] = lambda_form(r, 3);
            rj.push_back(item);
        }
        rep["root_line_residues"] = rj;
    }

    if (!fx.chart.empty()) {
        BranchTuple b;
        Json attempts = Json::array();
        Json sheets;
        for (int attempt = 0;; ++attempt) {
            b = fixture_branch_tuple(fx, f);
            try {
                sheets = fb_inverse_json(b, fx.target);
                attempts.push_back({{"field", descriptor(f).str()}, {"ok", true}});
                break;
            } catch (const DomainError& e) {
                attempts.push_back({{"field", descriptor(f).str()}, {"ok", false}, {"code", e.code()}});
                if (attempt > 0 || !fx.fallback_field || opt.field) throw;
                f = make_field(FieldDescriptor::parse(*fx.fallback_field, precision));
            }
        }
        rep["branch"] = to_json(b);
        rep["fb_inverse"] = {{"attempts", attempts}, {"target", fx.target}, {"sheets", sheets}};
        pretty << "fb-inverse over " << descriptor(f).str() << ": " << sheets.size() << " sheet(s)\n";
        for (const auto& s : sheets) {
            pretty << " ";
            for (const auto& [k, v] : s["fix"]["coords"].items()) pretty << " " << k << " = " << v.get<std::string>();
            pretty << "  (residual " << s["residual"].get<std::string>() << ")\n";
        }
    }
    if (text) *text = pretty.str();
    return rep;
}

}  // namespace whittaker::cli
