#include "whittaker/redtree.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace whittaker {

std::vector<std::vector<std::pair<int, int>>> TreeSkeleton::adjacency() const {
    std::vector<std::vector<std::pair<int, int>>> adj(num_vertices);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        adj[edges[e].first].emplace_back(edges[e].second, static_cast<int>(e));
        adj[edges[e].second].emplace_back(edges[e].first, static_cast<int>(e));
    }
    return adj;
}

int TreeSkeleton::degree(int v) const {
    int d = 0;
    for (const auto& [a, b] : edges) d += (a == v) + (b == v);
    return d;
}

std::size_t TreeSkeleton::label_count() const {
    std::size_t n = 0;
    for (const auto& m : marks) n += m.size();
    return n;
}

std::vector<std::string> TreeSkeleton::labels_beyond(int v, int e) const {
    auto adj = adjacency();
    int start = edges[e].first == v ? edges[e].second : edges[e].first;
    std::vector<std::string> out;
    std::vector<bool> seen(num_vertices, false);
    seen[v] = true;
    std::vector<int> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        out.insert(out.end(), marks[x].begin(), marks[x].end());
        for (auto [y, _] : adj[x])
            if (!seen[y]) {
                seen[y] = true;
                stack.push_back(y);
            }
    }
    return out;
}

bool TreeSkeleton::edge_even(int e) const { return labels_beyond(edges[e].first, e).size() % 2 == 0; }

int TreeSkeleton::odd_edges_at(int v) const {
    int n = 0;
    for (std::size_t e = 0; e < edges.size(); ++e)
        if ((edges[e].first == v || edges[e].second == v) && !edge_even(static_cast<int>(e))) ++n;
    return n;
}

bool TreeSkeleton::is_tree() const {
    if (num_vertices == 0) return false;
    if (static_cast<int>(edges.size()) != num_vertices - 1) return false;
    std::vector<int> parent(num_vertices);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (auto [a, b] : edges) {
        int ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[ra] = rb;
    }
    return true;
}

std::optional<int> TreeSkeleton::vertex_of(const std::string& label) const {
    for (int v = 0; v < num_vertices; ++v)
        if (std::find(marks[v].begin(), marks[v].end(), label) != marks[v].end()) return v;
    return std::nullopt;
}

namespace {

// Each label's direction at vertex L: "m:<label>" when marked there,
// otherwise "e:<edge>" for the edge leading towards it.
std::map<std::string, std::string> project_labels(const TreeSkeleton& t, int L) {
    std::map<std::string, std::string> out;
    for (const auto& l : t.marks[L]) out[l] = "m:" + l;
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        if (t.edges[e].first != L && t.edges[e].second != L) continue;
        for (const auto& l : t.labels_beyond(L, static_cast<int>(e))) out[l] = "e:" + std::to_string(e);
    }
    return out;
}

std::optional<VertexType> vertex_type_of(const TreeSkeleton& t, int v) {
    const auto k = t.marks[v].size();
    const int deg = t.degree(v), odd = t.odd_edges_at(v);
    if (k == 0 && deg >= 3 && odd <= 2) return VertexType::A;
    if (k == 1 && deg >= 2 && odd == 1) return VertexType::B;
    if (k == 2 && deg >= 1 && odd == 0) return VertexType::C;
    return std::nullopt;
}

LabelPair ordered(const std::string& x, const std::string& y) { return x < y ? LabelPair{x, y} : LabelPair{y, x}; }

std::set<LabelPair> pair_set(const std::vector<LabelPair>& pairs) {
    std::set<LabelPair> s;
    for (const auto& [x, y] : pairs) s.insert(ordered(x, y));
    return s;
}

void check_pairs_cover(const TreeSkeleton& t, const std::vector<LabelPair>& pairs) {
    std::multiset<std::string> got, want;
    for (const auto& [x, y] : pairs) {
        got.insert(x);
        got.insert(y);
    }
    for (const auto& m : t.marks) want.insert(m.begin(), m.end());
    if (got != want)
        throw DomainError("bad_pairing", "pairs must cover every marked label exactly once");
}

// AHU-style encoding rooted at the tree center; vertex labels supplied by caller.
std::string encode_tree(const TreeSkeleton& t, const std::vector<std::string>& vlabel,
                        const std::vector<std::string>& elabel) {
    auto adj = t.adjacency();
    const int n = t.num_vertices;
    if (n == 0) return "()";
    std::vector<int> deg(n);
    for (int v = 0; v < n; ++v) deg[v] = static_cast<int>(adj[v].size());
    std::vector<int> layer;
    for (int v = 0; v < n; ++v)
        if (deg[v] <= 1) layer.push_back(v);
    int remaining = n;
    std::vector<bool> removed(n, false);
    while (remaining > 2) {
        std::vector<int> next;
        for (int v : layer) {
            removed[v] = true;
            --remaining;
            for (auto [w, _] : adj[v])
                if (!removed[w] && --deg[w] == 1) next.push_back(w);
        }
        layer = std::move(next);
    }
    std::vector<int> centers;
    for (int v = 0; v < n; ++v)
        if (!removed[v]) centers.push_back(v);
    std::function<std::string(int, int)> enc = [&](int v, int parent) {
        std::vector<std::string> kids;
        for (auto [w, e] : adj[v])
            if (w != parent) kids.push_back(elabel[e] + enc(w, v));
        std::sort(kids.begin(), kids.end());
        std::string s = "(" + vlabel[v];
        for (auto& k : kids) s += k;
        return s + ")";
    };
    if (centers.size() == 1) return enc(centers[0], -1);
    int c1 = centers[0], c2 = centers[1];
    int bridge = -1;
    for (auto [w, e] : adj[c1])
        if (w == c2) bridge = e;
    std::string x = enc(c1, c2), y = enc(c2, c1);
    if (y < x) std::swap(x, y);
    return "[" + x + elabel[bridge] + y + "]";
}

std::string mark_count_label(const TreeSkeleton& t, int v) { return std::to_string(t.marks[v].size()); }

std::vector<int> tree_distances_from(const TreeSkeleton& t, int src) {
    auto adj = t.adjacency();
    std::vector<int> d(t.num_vertices, -1);
    d[src] = 0;
    std::vector<int> q{src};
    for (std::size_t i = 0; i < q.size(); ++i)
        for (auto [w, _] : adj[q[i]])
            if (d[w] < 0) {
                d[w] = d[q[i]] + 1;
                q.push_back(w);
            }
    return d;
}

}  // namespace

std::string configuration_signature(const TreeSkeleton& t) {
    std::vector<std::string> vl(t.num_vertices), el(t.edges.size(), "-");
    for (int v = 0; v < t.num_vertices; ++v) vl[v] = mark_count_label(t, v);
    int g = static_cast<int>(t.label_count() / 2) - 1;
    return "g" + std::to_string(g) + ":" + encode_tree(t, vl, el);
}

std::string Configuration::signature() const {
    std::string s = configuration_signature(skeleton);
    if (pair_set(pairs) == pair_set(canonical_pairing(skeleton))) return s;
    // a non-canonical pairing gets its own signature, tagged by pair distances
    std::vector<int> dist;
    for (const auto& [x, y] : pairs) {
        auto d = tree_distances_from(skeleton, *skeleton.vertex_of(x));
        dist.push_back(d[*skeleton.vertex_of(y)]);
    }
    std::sort(dist.begin(), dist.end());
    s += "/split";
    for (int d : dist) s += ":" + std::to_string(d);
    return s;
}

// ---------------------------------------------------------------------------
// tree construction

DirCoord ReductionTree::direction_of(int v, const ProjPoint& z) const {
    if (z.is_infinity()) return {true, {}};
    const TreeVertex& tv = vertices[v];
    FieldElement d = z.value() - tv.center;
    if (!d.is_exact_zero() && d.valuation() < tv.radius) return {true, {}};
    if (d.is_zero()) return {false, {}};
    const int e = descriptor(field).ramification();
    FieldElement scaled = d / FieldElement::uniformizer(field).pow((tv.radius * Rational(e)).floor());
    return {false, scaled.residue()};
}

bool ReductionTree::in_disk(int v, const ProjPoint& z) const {
    if (z.is_infinity()) return false;
    FieldElement d = z.value() - vertices[v].center;
    return d.is_zero() || d.valuation() >= vertices[v].radius;
}

std::optional<Rational> ReductionTree::min_edge_valuation() const {
    if (edge_sizes.empty()) return std::nullopt;
    return *std::min_element(edge_sizes.begin(), edge_sizes.end());
}

ReductionTree build_tree(const std::vector<LabeledPoint>& points) {
    if (points.size() < 3) throw DomainError("too_few_points", "a reduction tree needs at least three points");
    std::vector<int> finite;
    std::optional<int> inf_idx;
    Field f;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].point.is_infinity()) {
            if (inf_idx) throw DomainError("coincident_points", "two labels at infinity");
            inf_idx = static_cast<int>(i);
        } else {
            finite.push_back(static_cast<int>(i));
            f = points[i].point.value().field();
        }
    }
    {
        std::set<std::string> seen;
        for (const auto& p : points)
            if (!seen.insert(p.label).second) throw DomainError("duplicate_label", "label used twice: " + p.label);
    }
    const std::size_t n = finite.size();
    std::vector<std::vector<Rational>> dist(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            FieldElement d = points[finite[i]].point.value() - points[finite[j]].point.value();
            if (d.is_zero())
                throw PrecisionError("coincident_points", "points " + points[finite[i]].label + " and " +
                                                              points[finite[j]].label +
                                                              " indistinguishable at working precision");
            dist[i][j] = dist[j][i] = d.valuation();
        }

    // clusters: sets {j : v(x_i - x_j) >= r} for r among the pairwise distances
    std::map<std::vector<int>, Rational> clusters;  // member indices -> radius
    if (n >= 2) {
        for (std::size_t i = 0; i < n; ++i) {
            std::set<Rational> radii;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) radii.insert(dist[i][j]);
            for (Rational r : radii) {
                std::vector<int> mem;
                for (std::size_t j = 0; j < n; ++j)
                    if (j == i || dist[i][j] >= r) mem.push_back(static_cast<int>(j));
                clusters.emplace(mem, r);
            }
        }
    }
    if (clusters.empty()) throw DomainError("too_few_points", "need at least two finite points");

    struct Node {
        std::vector<int> mem;
        Rational r;
        int parent = -1;
        std::vector<int> kids;
        std::vector<int> singles;  // indices into finite
    };
    std::vector<Node> nodes;
    for (auto& [m, r] : clusters) nodes.push_back({m, r, -1, {}, {}});
    // order: larger clusters first, then by smallest member
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
        if (a.mem.size() != b.mem.size()) return a.mem.size() > b.mem.size();
        return a.mem < b.mem;
    });
    auto contains = [](const std::vector<int>& big, const std::vector<int>& small) {
        return std::includes(big.begin(), big.end(), small.begin(), small.end());
    };
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        for (std::size_t j = i; j-- > 0;) {
            if (nodes[j].mem.size() > nodes[i].mem.size() && contains(nodes[j].mem, nodes[i].mem)) {
                if (nodes[i].parent < 0 || nodes[j].mem.size() < nodes[nodes[i].parent].mem.size())
                    nodes[i].parent = static_cast<int>(j);
            }
        }
        nodes[nodes[i].parent].kids.push_back(static_cast<int>(i));
    }
    for (std::size_t j = 0; j < n; ++j) {
        int best = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (std::binary_search(nodes[i].mem.begin(), nodes[i].mem.end(), static_cast<int>(j)) &&
                nodes[i].mem.size() < nodes[best].mem.size())
                best = static_cast<int>(i);
        nodes[best].singles.push_back(static_cast<int>(j));
    }

    ReductionTree t;
    t.field = f;
    for (const auto& p : points) t.labels.push_back(p.label);

    // preorder numbering; children sorted by smallest member
    std::vector<int> order;
    std::function<void(int)> visit = [&](int i) {
        order.push_back(i);
        auto kids = nodes[i].kids;
        std::sort(kids.begin(), kids.end(), [&](int a, int b) { return nodes[a].mem < nodes[b].mem; });
        for (int k : kids) visit(k);
    };
    visit(0);

    const Node& root = nodes[0];
    const int root_dirs = static_cast<int>(root.kids.size() + root.singles.size()) + (inf_idx ? 1 : 0);
    const bool contract = root_dirs < 3;
    std::map<int, int> vid;
    for (int i : order) {
        if (contract && i == 0) continue;
        int id = static_cast<int>(vid.size());
        vid[i] = id;
    }
    t.skeleton.num_vertices = static_cast<int>(vid.size());
    t.skeleton.marks.assign(t.skeleton.num_vertices, {});
    t.vertices.resize(t.skeleton.num_vertices);
    auto point_of = [&](int fi) { return points[finite[fi]].point; };
    for (auto [i, id] : vid) {
        const FieldElement rep = point_of(nodes[i].mem[0]).value();
        t.vertices[id] = {rep.truncate_below(nodes[i].r), nodes[i].r, i == 0};
    }
    for (int i : order) {
        if (contract && i == 0) continue;
        for (int fi : nodes[i].singles) t.skeleton.marks[vid[i]].push_back(points[finite[fi]].label);
        if (i != 0 && !(contract && nodes[i].parent == 0)) {
            int pid = vid[nodes[i].parent];
            int e = static_cast<int>(t.skeleton.edges.size());
            t.skeleton.edges.emplace_back(pid, vid[i]);
            t.edge_sizes.push_back(nodes[i].r - nodes[nodes[i].parent].r);
            t.edge_direction[{pid, e}] = t.direction_of(pid, point_of(nodes[i].mem[0]));
            t.edge_direction[{vid[i], e}] = {true, {}};
        }
    }
    if (inf_idx) {
        int top = contract ? vid[root.kids.at(0)] : 0;
        t.skeleton.marks[top].push_back(points[*inf_idx].label);
    }
    if (contract) {
        if (root.kids.size() == 2) {
            int a = root.kids[0], b = root.kids[1];
            int e = static_cast<int>(t.skeleton.edges.size());
            t.skeleton.edges.emplace_back(vid[a], vid[b]);
            t.edge_sizes.push_back((nodes[a].r - root.r) + (nodes[b].r - root.r));
            t.edge_direction[{vid[a], e}] = {true, {}};
            t.edge_direction[{vid[b], e}] = {true, {}};
            t.vertices[vid[b]].outer = true;
        } else if (root.kids.size() == 1 && root.singles.size() == 1) {
            t.skeleton.marks[vid[root.kids[0]]].push_back(points[finite[root.singles[0]]].label);
        } else if (root.kids.size() == 1 && inf_idx) {
            // only the point at infinity remains outside; already marked
        } else {
            throw DomainError("too_few_points", "point set too small for a stable tree");
        }
        t.vertices[vid[root.kids.at(0)]].outer = true;
    }
    // label directions
    for (int v = 0; v < t.skeleton.num_vertices; ++v)
        for (const auto& l : t.skeleton.marks[v]) {
            auto it = std::find_if(points.begin(), points.end(), [&](const LabeledPoint& p) { return p.label == l; });
            t.mark_direction[l] = t.direction_of(v, it->point);
        }
    // sort marks by input order for determinism
    for (auto& m : t.skeleton.marks)
        std::sort(m.begin(), m.end(), [&](const std::string& x, const std::string& y) {
            return std::find(t.labels.begin(), t.labels.end(), x) < std::find(t.labels.begin(), t.labels.end(), y);
        });
    return t;
}

// ---------------------------------------------------------------------------
// classification and pairing

Configuration classify(const TreeSkeleton& t, const std::vector<LabelPair>& pairs) {
    if (!t.is_tree()) throw DomainError("not_a_tree", "configuration graph is not a tree");
    check_pairs_cover(t, pairs);
    Configuration c;
    c.skeleton = t;
    c.pairs = pairs;
    for (std::size_t e = 0; e < t.edges.size(); ++e) c.edge_even.push_back(t.edge_even(static_cast<int>(e)));
    for (int v = 0; v < t.num_vertices; ++v) {
        auto ty = vertex_type_of(t, v);
        if (!ty)
            throw DomainError("not_whittaker_configuration",
                              "vertex " + std::to_string(v) + " satisfies none of the types (a), (b), (c)");
        c.vertex_type.push_back(*ty);
        c.vertex_even.push_back(t.marks[v].empty() && t.odd_edges_at(v) == 0);
    }
    return c;
}

std::vector<LabelPair> canonical_pairing(const TreeSkeleton& t) {
    if (!t.is_tree()) throw DomainError("not_a_tree", "configuration graph is not a tree");
    std::vector<VertexType> ty;
    for (int v = 0; v < t.num_vertices; ++v) {
        auto x = vertex_type_of(t, v);
        if (!x) throw DomainError("no_valid_pairing", "vertex " + std::to_string(v) + " has no admissible type");
        ty.push_back(*x);
    }
    auto adj = t.adjacency();
    std::vector<bool> even(t.edges.size());
    for (std::size_t e = 0; e < t.edges.size(); ++e) even[e] = t.edge_even(static_cast<int>(e));
    std::vector<LabelPair> out;
    std::vector<int> partner(t.num_vertices, -1);
    for (int v = 0; v < t.num_vertices; ++v) {
        if (ty[v] == VertexType::C) out.emplace_back(t.marks[v][0], t.marks[v][1]);
        if (ty[v] != VertexType::B) continue;
        // follow odd edges through type (a) vertices
        int prev = -1, cur = v;
        while (true) {
            int next = -1;
            for (auto [w, e] : adj[cur])
                if (!even[e] && w != prev) {
                    next = w;
                    break;
                }
            if (next < 0) throw DomainError("no_valid_pairing", "odd path ends without a partner");
            prev = cur;
            cur = next;
            if (ty[cur] == VertexType::B) break;
            if (ty[cur] == VertexType::C) throw DomainError("no_valid_pairing", "odd path meets a type (c) vertex");
        }
        partner[v] = cur;
    }
    for (int v = 0; v < t.num_vertices; ++v) {
        if (partner[v] < 0) continue;
        if (partner[partner[v]] != v) throw DomainError("no_valid_pairing", "type (b) partners are not mutual");
        if (v < partner[v]) out.emplace_back(t.marks[v][0], t.marks[partner[v]][0]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool is_potential_mumford(const TreeSkeleton& t) {
    for (int v = 0; v < t.num_vertices; ++v)
        if (static_cast<int>(t.marks[v].size()) + t.odd_edges_at(v) > 2) return false;
    return true;
}

bool lemma41_check(const TreeSkeleton& t, const std::vector<LabelPair>& pairs) {
    check_pairs_cover(t, pairs);
    for (int L = 0; L < t.num_vertices; ++L) {
        auto proj = project_labels(t, L);
        std::map<std::string, int> mult;
        for (const auto& [_, dir] : proj) ++mult[dir];
        auto all_even = [](const std::map<std::string, int>& m) {
            return std::all_of(m.begin(), m.end(), [](const auto& kv) { return kv.second % 2 == 0; });
        };
        if (all_even(mult)) continue;
        bool ok = false;
        for (const auto& [x, y] : pairs) {
            const auto& dx = proj.at(x);
            const auto& dy = proj.at(y);
            if (dx == dy) continue;
            auto m = mult;
            --m[dx];
            --m[dy];
            if (all_even(m)) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

bool closed_disk_check(const TreeSkeleton& t, const std::vector<LabelPair>& pairs) {
    check_pairs_cover(t, pairs);
    for (const auto& [x, y] : pairs) {
        auto vx = t.vertex_of(x), vy = t.vertex_of(y);
        if (!vx || vx != vy) return false;
        if (t.marks[*vx].size() != 2 || t.degree(*vx) != 1) return false;
    }
    return true;
}

namespace {

DirCoord residue_involution(const ResidueField& k, const DirCoord& p1, const DirCoord& p2, const DirCoord& z) {
    if (p1.inf || p2.inf) {
        const Residue a = p1.inf ? p2.r : p1.r;
        if (z.inf) return z;
        return {false, k.sub(k.add(a, a), z.r)};
    }
    const Residue s = k.add(p1.r, p2.r);
    const Residue two = k.from_int(2);
    if (z.inf) return {false, k.mul(s, k.inv(two))};
    Residue num = k.sub(k.mul(s, z.r), k.mul(two, k.mul(p1.r, p2.r)));
    Residue den = k.sub(k.mul(two, z.r), s);
    if (k.is_zero(den)) return {true, {}};
    return {false, k.mul(num, k.inv(den))};
}

}  // namespace

bool restricted_check(const ReductionTree& t, const std::vector<LabelPair>& pairs) {
    check_pairs_cover(t.skeleton, pairs);
    const auto& d = descriptor(t.field);
    ResidueField k(d.p, d.unramified);
    for (int L = 0; L < t.num_vertices(); ++L) {
        auto proj = project_labels(t.skeleton, L);
        std::map<std::string, int> mult;
        for (const auto& [_, dir] : proj) ++mult[dir];
        std::vector<std::string> odd;
        for (const auto& [dir, m] : mult)
            if (m % 2) odd.push_back(dir);
        if (odd.empty()) continue;
        if (odd.size() != 2) return false;
        auto coord = [&](const std::string& dir) -> DirCoord {
            if (dir[0] == 'm') return t.mark_direction.at(dir.substr(2));
            return t.edge_direction.at({L, std::stoi(dir.substr(2))});
        };
        DirCoord p1 = coord(odd[0]), p2 = coord(odd[1]);
        std::vector<DirCoord> node_coords;
        const auto adj = t.skeleton.adjacency();
        for (auto [w, e] : adj[L]) {
            std::string key = "e:" + std::to_string(e);
            if (key == odd[0] || key == odd[1]) continue;
            node_coords.push_back(t.edge_direction.at({L, e}));
        }
        for (const auto& c : node_coords) {
            DirCoord img = residue_involution(k, p1, p2, c);
            for (const auto& c2 : node_coords)
                if (img == c2) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// disks for the Van Steen conditions

namespace {

struct Disk {
    FieldElement c;
    Rational r;
    bool open = false;
    bool contains(const FieldElement& z) const {
        FieldElement d = z - c;
        if (d.is_zero()) return true;
        return open ? d.valuation() > r : d.valuation() >= r;
    }
};

bool intersect(const Disk& x, const Disk& y) { return x.contains(y.c) || y.contains(x.c); }

// closed disk x contained in the boundary B^+ \ B of the open disk y
bool inside_boundary(const Disk& x, const Disk& y) {
    if (x.r <= y.r) return false;
    FieldElement d = x.c - y.c;
    return !d.is_zero() && d.valuation() == y.r;
}

Disk mobius_image(const Mobius& m, const Disk& d) {
    FieldElement den = m.c() * d.c + m.d();
    if (den.is_zero()) throw DomainError("pole_in_disk", "Mobius pole inside a disk");
    if (!m.c().is_zero()) {
        FieldElement pole_offset = d.c + m.d() / m.c();
        if (pole_offset.is_zero() || pole_offset.valuation() >= d.r)
            throw DomainError("pole_in_disk", "Mobius pole inside a disk");
    }
    Rational r = d.r + m.det().valuation() - den.valuation() * Rational(2);
    return {(m.a() * d.c + m.b()) / den, r, d.open};
}

Rational distance_val(const ProjPoint& x, const ProjPoint& y) {
    const Rational minus_inf(-(std::int64_t(1) << 40));
    if (x.is_infinity() || y.is_infinity()) return minus_inf;
    return (x.value() - y.value()).valuation();
}

}  // namespace

VanSteenReport van_steen_check(const std::vector<std::pair<ProjPoint, ProjPoint>>& pairs,
                               const ProjPoint& infinity_choice) {
    VanSteenReport rep;
    if (pairs.size() <= 1) return rep;
    Field f;
    for (const auto& [a, b] : pairs)
        for (const ProjPoint* p : {&a, &b})
            if (!p->is_infinity()) f = p->value().field();
    Mobius move = Mobius::identity(f);
    if (!infinity_choice.is_infinity())
        move = Mobius(FieldElement::zero(f), FieldElement::from_int(1, f), FieldElement::from_int(1, f),
                      -infinity_choice.value());
    std::vector<Involution> s;
    std::vector<Disk> open, closed;
    std::vector<FieldElement> mid;
    for (const auto& [a0, b0] : pairs) {
        ProjPoint a = apply(move, a0), b = apply(move, b0);
        if (a.is_infinity() || b.is_infinity())
            throw DomainError("infinity_fixed", "the chosen infinity is a fixed point");
        s.emplace_back(a, b);
        FieldElement m = (a.value() + b.value()) / FieldElement::from_int(2, f);
        Rational r = (b.value() - a.value()).valuation();
        mid.push_back(m);
        open.push_back({m, r, true});
        closed.push_back({m, r, false});
    }
    const std::size_t n = pairs.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (intersect(open[i], open[j])) rep.g1 = false;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || !inside_boundary(closed[i], open[k])) continue;
            Disk img = mobius_image(s[k].matrix(), closed[i]);
            if (intersect(img, closed[i])) rep.g4 = false;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == k || !inside_boundary(closed[j], open[k])) continue;
                if (intersect(img, closed[j])) rep.g2 = false;
                ProjPoint si(mid[i]);
                ProjPoint ksj = s[k](ProjPoint(mid[j]));
                ProjPoint ksi = s[k](ProjPoint(mid[i]));
                if (distance_val(si, ksj) > distance_val(si, ksi)) rep.g3 = false;
            }
        }
    return rep;
}

// ---------------------------------------------------------------------------
// doubled dual graph and fundamental domains

int DoubledGraph::betti() const {
    std::vector<int> parent(num_vertices);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    int comps = num_vertices;
    for (auto [a, b] : edges) {
        int ra = find(a), rb = find(b);
        if (ra != rb) {
            parent[ra] = rb;
            --comps;
        }
    }
    return static_cast<int>(edges.size()) - num_vertices + comps;
}

DoubledGraph double_graph(const Configuration& c) {
    DoubledGraph g;
    const auto& t = c.skeleton;
    g.base_vertices = t.num_vertices;
    g.base_edges = static_cast<int>(t.edges.size());
    std::vector<std::array<int, 2>> vcopy(t.num_vertices);
    for (int v = 0; v < t.num_vertices; ++v) {
        vcopy[v][0] = g.num_vertices++;
        g.vertex_origin.push_back(v);
        if (c.vertex_even[v]) {
            vcopy[v][1] = g.num_vertices++;
            g.vertex_origin.push_back(v);
            g.vertex_pairs.emplace_back(vcopy[v][0], vcopy[v][1]);
        } else {
            vcopy[v][1] = vcopy[v][0];
        }
    }
    g.vertex_sigma.resize(g.num_vertices);
    for (int v = 0; v < t.num_vertices; ++v) {
        g.vertex_sigma[vcopy[v][0]] = vcopy[v][1];
        g.vertex_sigma[vcopy[v][1]] = vcopy[v][0];
    }
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        auto [u, w] = t.edges[e];
        if (c.edge_even[e]) {
            int e0 = static_cast<int>(g.edges.size());
            for (int k = 0; k < 2; ++k) {
                g.edges.emplace_back(vcopy[u][k], vcopy[w][k]);
                g.edge_origin.push_back(static_cast<int>(e));
            }
            g.edge_pairs.emplace_back(e0, e0 + 1);
            g.edge_sigma.push_back(e0 + 1);
            g.edge_sigma.push_back(e0);
        } else {
            int e0 = static_cast<int>(g.edges.size());
            g.edges.emplace_back(vcopy[u][0], vcopy[w][0]);
            g.edge_origin.push_back(static_cast<int>(e));
            g.edge_sigma.push_back(e0);
        }
    }
    return g;
}

namespace {

bool is_lifted_tree(const DoubledGraph& g, const Subtree& s) {
    std::vector<char> in_v(g.num_vertices, 0);
    for (int v : s.vertices) in_v[v] = 1;
    std::map<int, int> idx;
    for (std::size_t i = 0; i < s.vertices.size(); ++i) idx[s.vertices[i]] = static_cast<int>(i);
    std::vector<int> parent(s.vertices.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (int e : s.edges) {
        auto [a, b] = g.edges[e];
        if (!in_v[a] || !in_v[b]) return false;
        int ra = find(idx[a]), rb = find(idx[b]);
        if (ra == rb) return false;
        parent[ra] = rb;
    }
    return s.edges.size() + 1 == s.vertices.size();
}

}  // namespace

FundamentalDomains enumerate_fundamental_domains(const DoubledGraph& g) {
    std::vector<int> fixed_v, fixed_e;
    for (int v = 0; v < g.num_vertices; ++v)
        if (g.vertex_sigma[v] == v) fixed_v.push_back(v);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (g.edge_sigma[e] == static_cast<int>(e)) fixed_e.push_back(static_cast<int>(e));
    const std::size_t nv = g.vertex_pairs.size(), ne = g.edge_pairs.size(), np = nv + ne;
    if (np >= 30) throw UnsupportedError("too_many_pairs", "fundamental-domain enumeration limited to 29 pairs");
    FundamentalDomains out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << np); ++mask) {
        Subtree s{fixed_v, fixed_e};
        for (std::size_t i = 0; i < nv; ++i)
            s.vertices.push_back((mask >> i) & 1 ? g.vertex_pairs[i].second : g.vertex_pairs[i].first);
        for (std::size_t i = 0; i < ne; ++i)
            s.edges.push_back((mask >> (nv + i)) & 1 ? g.edge_pairs[i].second : g.edge_pairs[i].first);
        std::sort(s.vertices.begin(), s.vertices.end());
        std::sort(s.edges.begin(), s.edges.end());
        if (is_lifted_tree(g, s)) out.domains.push_back(std::move(s));
    }
    const std::size_t count = out.domains.size();
    if (count == 0 || (count & (count - 1)) != 0)
        throw DomainError("not_power_of_two", "fundamental-domain count is not a power of two");
    while ((std::size_t(1) << out.d) < count) ++out.d;
    std::set<Subtree> seen;
    for (const auto& s : out.domains) {
        if (seen.count(s)) continue;
        ++out.orbit_count;
        Subtree img;
        for (int v : s.vertices) img.vertices.push_back(g.vertex_sigma[v]);
        for (int e : s.edges) img.edges.push_back(g.edge_sigma[e]);
        std::sort(img.vertices.begin(), img.vertices.end());
        std::sort(img.edges.begin(), img.edges.end());
        seen.insert(s);
        seen.insert(img);
    }
    return out;
}

// ---------------------------------------------------------------------------
// catalogs

Configuration make_configuration(int num_vertices, const std::vector<std::pair<int, int>>& edges,
                                 const std::vector<std::vector<std::string>>& marks,
                                 const std::vector<LabelPair>& pairs) {
    TreeSkeleton t;
    t.num_vertices = num_vertices;
    t.edges = edges;
    t.marks = marks;
    return classify(t, pairs);
}

namespace {

using Marks = std::vector<std::vector<std::string>>;

std::vector<LabelPair> standard_pairs(int g) {
    std::vector<LabelPair> p;
    for (int i = 0; i <= g; ++i) p.emplace_back("a" + std::to_string(i), "b" + std::to_string(i));
    return p;
}

}  // namespace

std::vector<LabeledPoint> realize_configuration(const TreeSkeleton& t, const Field& f, std::mt19937_64& rng,
                                                int max_edge) {
    const auto& d = descriptor(f);
    ResidueField k(d.p, d.unramified);
    auto adj = t.adjacency();
    std::vector<LabeledPoint> out;
    std::uniform_int_distribution<std::int64_t> digit(0, d.p - 1);
    std::uniform_int_distribution<int> size(1, std::max(1, max_edge));
    const FieldElement pi = FieldElement::uniformizer(f);
    auto lift = [&](Residue r) {
        FieldElement x = FieldElement::from_int(r.a, f);
        if (r.b) x += FieldElement::gen_s(f).times_int(r.b);
        return x;
    };
    std::function<void(int, int, const FieldElement&, std::int64_t)> place = [&](int v, int parent,
                                                                                const FieldElement& c,
                                                                                std::int64_t r) {
        std::vector<Residue> pool;
        for (std::int64_t i = 0; i < k.size(); ++i) pool.push_back(k.element(i));
        std::shuffle(pool.begin(), pool.end(), rng);
        std::size_t next = 0;
        const FieldElement scale = pi.pow(r);
        auto take = [&]() {
            if (next >= pool.size()) throw DomainError("residue_field_too_small", "too many directions at a vertex");
            return pool[next++];
        };
        for (const auto& l : t.marks[v]) {
            FieldElement tail = pi * FieldElement::from_int(digit(rng), f) + pi * pi * FieldElement::from_int(digit(rng), f);
            out.push_back({l, ProjPoint(c + scale * (lift(take()) + tail))});
        }
        for (auto [w, _] : adj[v]) {
            if (w == parent) continue;
            place(w, v, c + scale * lift(take()), r + size(rng));
        }
    };
    place(0, -1, FieldElement::zero(f), 0);
    return out;
}

std::vector<NamedConfiguration> genus2_catalog() {
    auto P = standard_pairs(2);
    return {
        {"a", make_configuration(4, {{0, 1}, {0, 2}, {0, 3}}, Marks{{}, {"a0", "b0"}, {"a1", "b1"}, {"a2", "b2"}}, P)},
        {"b", make_configuration(3, {{0, 1}, {1, 2}}, Marks{{"a0", "b0"}, {"a1", "b1"}, {"a2", "b2"}}, P)},
        {"c", make_configuration(4, {{0, 1}, {1, 2}, {2, 3}}, Marks{{"a0", "b0"}, {"a1"}, {"b1"}, {"a2", "b2"}}, P)},
    };
}

std::vector<NamedConfiguration> genus3_catalog() {
    auto P = standard_pairs(3);
    std::vector<NamedConfiguration> c;
    c.push_back({"1", make_configuration(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}},
                                         Marks{{"a0", "b0"}, {"a1"}, {"b1"}, {"a2"}, {"b2"}, {"a3", "b3"}}, P)});
    c.push_back({"2", make_configuration(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}},
                                         Marks{{"a0", "b0"}, {"a1", "b1"}, {"a2"}, {"b2"}, {"a3", "b3"}}, P)});
    c.push_back({"3", make_configuration(4, {{0, 1}, {1, 2}, {2, 3}},
                                         Marks{{"a0", "b0"}, {"a1", "b1"}, {"a2", "b2"}, {"a3", "b3"}}, P)});
    c.push_back({"4", make_configuration(6, {{0, 1}, {1, 2}, {0, 3}, {3, 4}, {0, 5}},
                                         Marks{{}, {"a1"}, {"a0", "b0"}, {"b1"}, {"a3", "b3"}, {"a2", "b2"}}, P)});
    c.push_back({"5", make_configuration(6, {{0, 1}, {1, 2}, {2, 3}, {0, 4}, {0, 5}},
                                         Marks{{}, {"a1"}, {"b1"}, {"a0", "b0"}, {"a2", "b2"}, {"a3", "b3"}}, P)});
    c.push_back({"6", make_configuration(5, {{0, 1}, {1, 2}, {0, 3}, {0, 4}},
                                         Marks{{}, {"a0", "b0"}, {"a1", "b1"}, {"a2", "b2"}, {"a3", "b3"}}, P)});
    c.push_back({"7", make_configuration(5, {{0, 1}, {1, 2}, {0, 3}, {0, 4}},
                                         Marks{{"a1"}, {"b1"}, {"a0", "b0"}, {"a2", "b2"}, {"a3", "b3"}}, P)});
    c.push_back({"8", make_configuration(4, {{0, 1}, {0, 2}, {0, 3}},
                                         Marks{{"a0", "b0"}, {"a1", "b1"}, {"a2", "b2"}, {"a3", "b3"}}, P)});
    c.push_back({"9", make_configuration(6, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {1, 5}},
                                         Marks{{}, {}, {"a0", "b0"}, {"a1", "b1"}, {"a2", "b2"}, {"a3", "b3"}}, P)});
    c.push_back({"10", make_configuration(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}},
                                          Marks{{}, {"a0", "b0"}, {"a1", "b1"}, {"a2", "b2"}, {"a3", "b3"}}, P)});
    return c;
}

}  // namespace whittaker
