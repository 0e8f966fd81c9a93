#include "whittaker_cli/jobs.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "whittaker/freegroup.hpp"
#include "whittaker_cli/examples.hpp"

namespace whittaker::cli {

namespace {

const Json& require(const Json& input, const char* key) {
    if (!input.is_object() || !input.contains(key))
        throw DomainError("missing_field", std::string("job input needs \"") + key + "\"");
    return input.at(key);
}

int job_precision(const Json& input, const JobOptions& opt) {
    if (opt.precision) return *opt.precision;
    if (input.is_object() && input.contains("precision")) return input.at("precision").get<int>();
    return 20;
}

int job_length(const Json& input, const JobOptions& opt, int fallback) {
    if (opt.length) return *opt.length;
    if (input.is_object() && input.contains("length")) return input.at("length").get<int>();
    return fallback;
}

std::string word_name(const ReducedWord& w) {
    if (w.empty()) return "e";
    std::string s;
    for (auto c : w.letters()) s += "s" + std::to_string(c);
    return s;
}

std::vector<LabelPair> parse_label_pairs(const Json& v) {
    std::vector<LabelPair> out;
    for (const auto& p : v) out.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    return out;
}

const char* type_name(VertexType t) {
    switch (t) {
        case VertexType::A: return "a";
        case VertexType::B: return "b";
        case VertexType::C: return "c";
    }
    return "?";
}

ChartTuple parse_tuple(const Json& input, const Field& f) {
    const std::string name = require(input, "chart").get<std::string>();
    const Chart& ch = chart(name);
    const Json& raw = require(input, "coords");
    Coords c;
    if (raw.is_object()) {
        for (const auto& cn : ch.coord_names) {
            if (!raw.contains(cn)) throw DomainError("missing_field", "coordinate " + cn + " missing");
            c.push_back(parse_point(raw.at(cn), f).value());
        }
    } else {
        c = parse_coords(raw, f);
    }
    if (c.size() != ch.coord_names.size())
        throw DomainError("bad_coordinates", "chart " + name + " takes " + std::to_string(ch.coord_names.size()) +
                                                 " coordinates");
    return {name, c};
}

// Fixed points named either as a chart tuple or as explicit pairs.
std::vector<FixedPair> fixed_points_of(const Json& input, const Field& f) {
    if (input.contains("pairs")) return parse_pairs(input.at("pairs"), f);
    return parse_tuple(input, f).pairs();
}

std::vector<LabeledPoint> labeled_from_pairs(const std::vector<FixedPair>& fixed) {
    std::vector<LabeledPoint> out;
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        out.push_back({"a" + std::to_string(i), fixed[i].first});
        out.push_back({"b" + std::to_string(i), fixed[i].second});
    }
    return out;
}

std::vector<LabelPair> default_pairs(std::size_t n) {
    std::vector<LabelPair> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back("a" + std::to_string(i), "b" + std::to_string(i));
    return out;
}

// ---------------------------------------------------------------------------

JobResult cmd_cluster(const Json& input, const JobOptions& opt) {
    const Field f = job_field(input, opt);
    const ReductionTree t = build_tree(parse_points(require(input, "points"), f));
    JobResult r;
    r.report = tree_json(t);
    r.text = render_tree(t);
    return r;
}

JobResult cmd_config_check(const Json& input, const JobOptions& opt) {
    const Field f = job_field(input, opt);
    const ReductionTree t = build_tree(parse_points(require(input, "points"), f));
    const auto pairs = input.contains("pairs") ? parse_label_pairs(input.at("pairs")) : canonical_pairing(t);
    const Configuration c = classify(t, pairs);
    JobResult r;
    r.report = configuration_json(t, c);
    r.text = render_tree(t, c);
    return r;
}

JobResult cmd_good_position(const Json& input, const JobOptions& opt) {
    const Field f = job_field(input, opt);
    const auto fixed = parse_pairs(require(input, "pairs"), f);
    const int max_len = job_length(input, opt, 6);
    Json rep;
    rep["field"] = descriptor(f).str();

    const ReductionTree t = build_tree(labeled_from_pairs(fixed));
    rep["tree"] = tree_json(t);
    const auto pairs = default_pairs(fixed.size());
    try {
        const Configuration c = classify(t, pairs);
        rep["configuration"] = c.signature();
        rep["restricted"] = restricted_check(t, pairs);
    } catch (const DomainError& e) {
        rep["configuration"] = nullptr;
        rep["configuration_error"] = e.code();
    }

    std::optional<ProjPoint> inf_choice;
    if (input.contains("infinity")) {
        inf_choice = parse_point(input.at("infinity"), f);
    } else {
        bool any_inf = false;
        for (const auto& [a, b] : fixed) any_inf = any_inf || a.is_infinity() || b.is_infinity();
        if (!any_inf) inf_choice = ProjPoint::infinity();
    }
    if (inf_choice) {
        const VanSteenReport vs = van_steen_check(fixed, *inf_choice);
        rep["van_steen"] = {{"infinity", to_json(*inf_choice)}, {"g1", vs.g1}, {"g2", vs.g2}, {"g3", vs.g3},
                            {"g4", vs.g4}, {"all", vs.all()}};
    }
    try {
        std::mt19937_64 rng(1);
        const OrdinaryChart oc = ordinary_chart(fixed, rng);
        rep["ordinary_base"] = true;
        (void)oc;
    } catch (const UnsupportedError&) {
        rep["ordinary_base"] = false;
    }

    std::vector<Mobius> gens;
    for (const auto& [a, b] : fixed) gens.push_back(Involution(a, b).matrix());
    const std::int64_t prec = input.contains("relation_precision")
                                  ? input.at("relation_precision").get<std::int64_t>()
                                  : static_cast<std::int64_t>(descriptor(f).precision) * descriptor(f).ramification() / 2;
    Json rels = Json::array();
    for (const auto& [u, w] : find_relations(gens, max_len, prec))
        rels.push_back({{"lhs", word_name(u)}, {"rhs", word_name(w)}, {"length", std::max(u.length(), w.length())}});
    rep["relation_search"] = {{"max_length", max_len}, {"precision", prec}, {"candidates", rels}};
    JobResult r;
    r.report = rep;
    r.text = render_tree(t);
    return r;
}

JobResult cmd_theta(const Json& input, const JobOptions& opt) {
    const Field f = job_field(input, opt);
    const auto fixed = fixed_points_of(input, f);
    const int len = job_length(input, opt, 4);
    const ThetaContext ctx(fixed, len);
    const ProjPoint z = parse_point(require(input, "z"), f);
    const std::string group = input.value("group", std::string("gamma"));

    Json rep;
    rep["field"] = descriptor(f).str();
    rep["length"] = len;
    rep["pi_valuation"] = to_json(ctx.pi_valuation());
    std::vector<ProjPoint> args{z};
    ThetaValue v;
    if (input.contains("alpha")) {
        const ReducedWord alpha = ReducedWord::parse(input.at("alpha").get<std::string>());
        const ProjPoint omega = parse_point(require(input, "omega"), f);
        v = u_alpha(ctx, alpha, omega, z);
        rep["function"] = "u_alpha";
        rep["alpha"] = word_name(alpha);
        args.push_back(omega);
    } else {
        const ProjPoint a = parse_point(require(input, "a"), f);
        const ProjPoint b = parse_point(require(input, "b"), f);
        if (group == "gamma") v = theta_gamma(ctx, a, b, z);
        else if (group == "W") v = theta_W(ctx, a, b, z);
        else throw DomainError("bad_group", "group must be \"gamma\" or \"W\"");
        rep["function"] = group == "gamma" ? "theta_gamma" : "theta_W";
        args.push_back(a);
        args.push_back(b);
    }
    // the bound is proved for arguments inside a fundamental domain that
    // also contains infinity
    bool certified = true;
    for (const auto& [a, b] : fixed) certified = certified && !a.is_infinity() && !b.is_infinity();
    if (certified) {
        const OrdinaryChart id{Mobius::identity(f), fixed};
        certified = van_steen_check(fixed, ProjPoint::infinity()).all();
        for (const auto& p : args) certified = certified && id.contains(p);
    }
    rep["value"] = to_json(v.value);
    rep["error"] = to_json(v.error);
    rep["certified"] = certified;
    return {rep, {}};
}

JobResult cmd_fb(const Json& input, const JobOptions& opt) {
    const Field f = job_field(input, opt);
    const ChartTuple fix = parse_tuple(input, f);
    FbOptions fo;
    fo.length = job_length(input, opt, fo.length);
    if (input.contains("aux"))
        fo.aux = std::make_pair(parse_point(input.at("aux").at(0), f), parse_point(input.at("aux").at(1), f));
    const FbResult res = fb_map(fix, fo);
    Json rep;
    rep["field"] = descriptor(f).str();
    rep["length"] = fo.length;
    rep["fix"] = to_json(fix);
    rep["branch"] = to_json(res.branch);
    rep["error"] = to_json(res.error);
    return {rep, {}};
}

JobResult cmd_fb_inverse(const Json& input, const JobOptions& opt) {
    const Field f = job_field(input, opt);
    const ChartTuple branch = parse_tuple(input, f);
    FbInverseOptions io;
    io.target = input.value("target", io.target);
    io.max_length = input.value("max_length", io.max_length);
    if (opt.length) io.length = *opt.length;
    else if (input.contains("length")) io.length = input.at("length").get<int>();
    const auto sheets = fb_inverse(branch, io);
    Json rep;
    rep["field"] = descriptor(f).str();
    rep["branch"] = to_json(branch);
    rep["target"] = io.target;
    Json arr = Json::array();
    for (const auto& s : sheets) arr.push_back(to_json(s));
    rep["sheets"] = arr;
    return {rep, {}};
}

JobResult cmd_equation(const Json& input, const JobOptions& opt) {
    const Field f = job_field(input, opt);
    const auto fixed = fixed_points_of(input, f);
    EquationOptions eo;
    eo.length = job_length(input, opt, eo.length);
    eo.seed = input.value("seed", eo.seed);
    const std::string which = input.value("equation_chart", std::string("infinity-ordinary"));
    if (which == "infinity-branch") eo.chart = EquationChart::InfinityBranch;
    else if (which != "infinity-ordinary")
        throw DomainError("bad_chart", "equation_chart must be infinity-ordinary or infinity-branch");
    const Equation e = hyperelliptic_equation(fixed, eo);
    Json rep;
    Json roots = Json::array();
    for (const auto& r : e.roots) roots.push_back(to_json(r));
    rep["roots"] = roots;
    rep["c"] = to_json(e.c);
    rep["c_is_square"] = e.c_is_square;
    rep["error"] = to_json(e.error);
    rep["equation_chart"] = which;
    rep["length"] = eo.length;
    return {rep, {}};
}

JobResult cmd_example(const Json& input, const JobOptions& opt) {
    const std::string name = input.is_string() ? input.get<std::string>() : require(input, "name").get<std::string>();
    JobResult r;
    if (name == "list") {
        Json arr = Json::array();
        for (const auto& fx : example_registry())
            arr.push_back({{"name", fx.name}, {"field", fx.field}, {"description", fx.description}});
        r.report = {{"examples", arr}};
        return r;
    }
    r.report = run_example(example(name), opt, &r.text);
    return r;
}

using Handler = std::function<JobResult(const Json&, const JobOptions&)>;

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h = {
        {"cluster", cmd_cluster},   {"config-check", cmd_config_check}, {"good-position", cmd_good_position},
        {"theta", cmd_theta},       {"fb", cmd_fb},                     {"fb-inverse", cmd_fb_inverse},
        {"equation", cmd_equation}, {"example", cmd_example},
    };
    return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"cluster", "config-check", "good-position", "theta",
                                                   "fb",      "fb-inverse",   "equation",      "example"};
    return names;
}

JobResult run_job(const std::string& command, const Json& input, const JobOptions& opt) {
    const auto& h = handlers();
    auto it = h.find(command);
    if (it == h.end()) throw DomainError("unknown_command", "unknown command " + command);
    try {
        return it->second(input, opt);
    } catch (const Json::exception& e) {
        throw DomainError("bad_input", e.what());
    }
}

Field job_field(const Json& input, const JobOptions& opt) {
    std::string text;
    if (opt.field) text = *opt.field;
    else if (input.is_object() && input.contains("field")) text = input.at("field").get<std::string>();
    else throw DomainError("missing_field", "every job must name its field, e.g. --field 5 or \"field\": \"5\"");
    return make_field(FieldDescriptor::parse(text, job_precision(input, opt)));
}

ProjPoint parse_point(const Json& v, const Field& f) {
    if (v.is_number_integer()) return ProjPoint(FieldElement::from_int(v.get<std::int64_t>(), f));
    if (v.is_object()) {
        if (v.value("inf", false)) return ProjPoint::infinity();
        return ProjPoint(FieldElement::parse(v.at("val").get<std::string>(), f));
    }
    if (!v.is_string()) throw DomainError("bad_point", "points are strings such as \"1/5\", \"3 + s\" or \"inf\"");
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return ProjPoint::infinity();
    return ProjPoint(FieldElement::parse(s, f));
}

std::vector<LabeledPoint> parse_points(const Json& v, const Field& f) {
    std::vector<LabeledPoint> out;
    if (v.is_object()) {
        for (const auto& [k, val] : v.items()) out.push_back({k, parse_point(val, f)});
    } else {
        for (const auto& item : v) {
            if (item.is_array()) out.push_back({item.at(0).get<std::string>(), parse_point(item.at(1), f)});
            else if (item.is_object() && item.contains("label"))
                out.push_back({item.at("label").get<std::string>(), parse_point(item.at("value"), f)});
            else out.push_back({"x" + std::to_string(out.size()), parse_point(item, f)});
        }
    }
    return out;
}

std::vector<FixedPair> parse_pairs(const Json& v, const Field& f) {
    std::vector<FixedPair> out;
    for (const auto& p : v) out.emplace_back(parse_point(p.at(0), f), parse_point(p.at(1), f));
    return out;
}

Coords parse_coords(const Json& v, const Field& f) {
    Coords out;
    for (const auto& c : v) {
        const ProjPoint p = parse_point(c, f);
        if (p.is_infinity()) throw DomainError("bad_coordinates", "chart coordinates are finite");
        out.push_back(p.value());
    }
    return out;
}

Json to_json(const ProjPoint& p) {
    if (p.is_infinity()) return {{"inf", true}};
    return {{"val", p.value().str()}};
}
Json to_json(const FieldElement& x) { return x.str(); }
Json to_json(const Rational& r) { return r.str(); }

Json to_json(const ChartTuple& t) {
    const Chart& ch = chart(t.chart);
    Json coords = Json::object();
    for (std::size_t i = 0; i < t.coords.size(); ++i) coords[ch.coord_names[i]] = to_json(t.coords[i]);
    Json pts = Json::object();
    for (const auto& lp : t.labeled_points()) pts[lp.label] = to_json(lp.point);
    return {{"chart", t.chart}, {"signature", ch.signature}, {"coords", coords}, {"points", pts}};
}

Json to_json(const FbSheet& s) {
    return {{"fix", to_json(s.fix)},           {"residual", to_json(s.residual)}, {"iterations", s.iterations},
            {"length", s.length},              {"certified", to_json(s.certified)},
            {"restricted", s.restricted}};
}

Json tree_json(const ReductionTree& t) {
    const ResidueField k(descriptor(t.field).p, descriptor(t.field).unramified);
    Json verts = Json::array();
    for (int v = 0; v < t.num_vertices(); ++v) {
        const auto& tv = t.vertices[static_cast<std::size_t>(v)];
        verts.push_back({{"id", v},
                         {"center", to_json(tv.center)},
                         {"radius", to_json(tv.radius)},
                         {"outer", tv.outer},
                         {"marks", t.skeleton.marks[static_cast<std::size_t>(v)]}});
    }
    Json edges = Json::array();
    for (std::size_t e = 0; e < t.skeleton.edges.size(); ++e)
        edges.push_back({{"from", t.skeleton.edges[e].first},
                         {"to", t.skeleton.edges[e].second},
                         {"size", to_json(t.edge_sizes[e])},
                         {"even", t.skeleton.edge_even(static_cast<int>(e))}});
    Json dirs = Json::object();
    for (const auto& l : t.labels) {
        const DirCoord d = t.mark_direction.at(l);
        dirs[l] = d.inf ? std::string("inf") : k.str(d.r);
    }
    return {{"field", descriptor(t.field).str()},
            {"signature", configuration_signature(t.skeleton)},
            {"vertices", verts},
            {"edges", edges},
            {"directions", dirs}};
}

Json configuration_json(const ReductionTree& t, const Configuration& c) {
    Json rep = tree_json(t);
    rep["configuration"] = c.signature();
    Json pairs = Json::array();
    for (const auto& [x, y] : c.pairs) pairs.push_back({x, y});
    rep["pairs"] = pairs;
    Json types = Json::array();
    for (std::size_t v = 0; v < c.vertex_type.size(); ++v)
        types.push_back({{"vertex", v}, {"type", type_name(c.vertex_type[v])}, {"even", bool(c.vertex_even[v])}});
    rep["vertex_types"] = types;
    rep["potential_mumford"] = is_potential_mumford(t);
    rep["restricted"] = restricted_check(t, c.pairs);
    rep["closed_disk"] = closed_disk_check(t, c.pairs);
    rep["lemma41_necessary"] = lemma41_check(t, c.pairs);
    const DoubledGraph dg = double_graph(c);
    const FundamentalDomains fd = enumerate_fundamental_domains(dg);
    rep["double_graph"] = {{"vertices", dg.num_vertices}, {"edges", dg.edges.size()}, {"betti", dg.betti()}};
    rep["fundamental_domains"] = {{"count", fd.domains.size()}, {"d", fd.d}, {"sheets", 1 << std::max(0, fd.d - 1)}};
    return rep;
}

std::string render_tree(const ReductionTree& t, const std::optional<Configuration>& c) {
    const ResidueField k(descriptor(t.field).p, descriptor(t.field).unramified);
    const auto adj = t.skeleton.adjacency();
    int root = 0;
    for (int v = 0; v < t.num_vertices(); ++v)
        if (t.vertices[static_cast<std::size_t>(v)].outer) root = v;

    std::ostringstream os;
    auto vertex_line = [&](int v) {
        std::ostringstream s;
        s << "v" << v;
        if (c) s << " [" << type_name(c->vertex_type[static_cast<std::size_t>(v)])
                 << (c->vertex_even[static_cast<std::size_t>(v)] ? ", even" : ", odd") << "]";
        const auto& marks = t.skeleton.marks[static_cast<std::size_t>(v)];
        if (!marks.empty()) {
            s << " {";
            for (std::size_t i = 0; i < marks.size(); ++i) {
                const DirCoord d = t.mark_direction.at(marks[i]);
                s << (i ? " " : "") << marks[i] << "@" << (d.inf ? std::string("inf") : k.str(d.r));
            }
            s << "}";
        }
        return s.str();
    };
    std::function<void(int, int, const std::string&)> walk = [&](int v, int parent, const std::string& indent) {
        std::vector<std::pair<int, int>> kids;
        for (const auto& [w, e] : adj[static_cast<std::size_t>(v)])
            if (w != parent) kids.emplace_back(w, e);
        for (std::size_t i = 0; i < kids.size(); ++i) {
            const auto [w, e] = kids[i];
            const bool last = i + 1 == kids.size();
            const DirCoord d = t.edge_direction.at({v, e});
            os << indent << (last ? "`-- " : "|-- ") << "@" << (d.inf ? std::string("inf") : k.str(d.r)) << " ("
               << (t.skeleton.edge_even(e) ? "even" : "odd") << ", v=" << t.edge_sizes[static_cast<std::size_t>(e)].str()
               << ") " << vertex_line(w) << "\n";
            walk(w, v, indent + (last ? "    " : "|   "));
        }
    };
    os << vertex_line(root) << "\n";
    walk(root, -1, "");
    return os.str();
}

Json error_json(const Error& e) {
    const char* cls = e.error_class() == ErrorClass::Domain      ? "domain"
                      : e.error_class() == ErrorClass::Precision ? "precision"
                                                                 : "unsupported";
    return {{"error", {{"class", cls}, {"code", e.code()}, {"message", e.what()}}}};
}

Json parse_error_json(const std::string& text, std::size_t byte, const std::string& message) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {{"error", {{"class", "domain"}, {"code", "parse_error"}, {"line", line}, {"column", col},
                       {"message", message}}}};
}

}  // namespace whittaker::cli
