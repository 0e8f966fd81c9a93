#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "whittaker/projline.hpp"

namespace whittaker {

struct LabeledPoint {
    std::string label;
    ProjPoint point;
};

using LabelPair = std::pair<std::string, std::string>;

// Position on the residue line P^1(k) of a vertex.
struct DirCoord {
    bool inf = false;
    Residue r;
    friend bool operator==(const DirCoord&, const DirCoord&) = default;
    friend auto operator<=>(const DirCoord&, const DirCoord&) = default;
};

// Combinatorial part of a tree: vertices, edges and labels marked on vertices.
struct TreeSkeleton {
    int num_vertices = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<std::string>> marks;  // per vertex

    // (neighbor, edge index) per vertex
    std::vector<std::vector<std::pair<int, int>>> adjacency() const;
    int degree(int v) const;
    std::size_t label_count() const;
    // labels lying beyond edge e as seen from vertex v
    std::vector<std::string> labels_beyond(int v, int e) const;
    bool edge_even(int e) const;
    int odd_edges_at(int v) const;
    bool is_tree() const;
    std::optional<int> vertex_of(const std::string& label) const;
};

struct TreeVertex {
    FieldElement center;  // canonical: digits below the radius
    Rational radius;      // disk {z : v(z - center) >= radius}
    bool outer = false;   // the vertex seeing the point at infinity
};

class ReductionTree {
public:
    Field field;
    TreeSkeleton skeleton;
    std::vector<TreeVertex> vertices;
    std::vector<Rational> edge_sizes;
    std::map<std::string, DirCoord> mark_direction;
    std::map<std::pair<int, int>, DirCoord> edge_direction;  // (vertex, edge)
    std::vector<std::string> labels;                         // input order

    int num_vertices() const { return skeleton.num_vertices; }
    // Residue direction of z at vertex v; infinity when z lies outside the disk.
    DirCoord direction_of(int v, const ProjPoint& z) const;
    bool in_disk(int v, const ProjPoint& z) const;
    // Smallest edge valuation (largest node size); nullopt for a single vertex.
    std::optional<Rational> min_edge_valuation() const;
};

// Minimal tree separating the points (cluster nesting, then contraction of
// vertices with fewer than three special directions).
ReductionTree build_tree(const std::vector<LabeledPoint>& points);

enum class VertexType { A, B, C };

struct Configuration {
    TreeSkeleton skeleton;
    std::vector<LabelPair> pairs;
    std::vector<bool> edge_even;
    std::vector<VertexType> vertex_type;
    std::vector<bool> vertex_even;

    int genus() const { return static_cast<int>(pairs.size()) - 1; }
    std::string signature() const;
};

// Parities and vertex types; throws DomainError("not_whittaker_configuration").
Configuration classify(const TreeSkeleton& t, const std::vector<LabelPair>& pairs);
inline Configuration classify(const ReductionTree& t, const std::vector<LabelPair>& pairs) {
    return classify(t.skeleton, pairs);
}

// Canonical signature from mark counts alone (no pairing needed).
std::string configuration_signature(const TreeSkeleton& t);

// Pairs labels at type (c) vertices, and type (b) vertices joined through
// type (a) vertices; throws DomainError("no_valid_pairing").
std::vector<LabelPair> canonical_pairing(const TreeSkeleton& t);
inline std::vector<LabelPair> canonical_pairing(const ReductionTree& t) {
    return canonical_pairing(t.skeleton);
}

bool is_potential_mumford(const TreeSkeleton& t);
inline bool is_potential_mumford(const ReductionTree& t) { return is_potential_mumford(t.skeleton); }

bool restricted_check(const ReductionTree& t, const std::vector<LabelPair>& pairs);
bool closed_disk_check(const TreeSkeleton& t, const std::vector<LabelPair>& pairs);
inline bool closed_disk_check(const ReductionTree& t, const std::vector<LabelPair>& pairs) {
    return closed_disk_check(t.skeleton, pairs);
}
bool lemma41_check(const TreeSkeleton& t, const std::vector<LabelPair>& pairs);
inline bool lemma41_check(const ReductionTree& t, const std::vector<LabelPair>& pairs) {
    return lemma41_check(t.skeleton, pairs);
}

struct VanSteenReport {
    bool g1 = true, g2 = true, g3 = true, g4 = true;
    bool all() const { return g1 && g2 && g3 && g4; }
};

VanSteenReport van_steen_check(const std::vector<std::pair<ProjPoint, ProjPoint>>& pairs,
                               const ProjPoint& infinity_choice);

struct DoubledGraph {
    int num_vertices = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> vertex_origin, edge_origin;  // index in the configuration
    std::vector<int> vertex_sigma, edge_sigma;
    std::vector<std::pair<int, int>> vertex_pairs, edge_pairs;  // sigma-conjugate pairs
    int base_vertices = 0, base_edges = 0;

    int betti() const;  // counted with union-find
};

DoubledGraph double_graph(const Configuration& c);

struct Subtree {
    std::vector<int> vertices;
    std::vector<int> edges;
    friend bool operator==(const Subtree&, const Subtree&) = default;
    friend auto operator<=>(const Subtree&, const Subtree&) = default;
};

struct FundamentalDomains {
    std::vector<Subtree> domains;
    int d = 0;
    int orbit_count = 0;  // sigma-orbits of domains
};

FundamentalDomains enumerate_fundamental_domains(const DoubledGraph& dg);

// Abstract configurations used by the registries.
struct NamedConfiguration {
    std::string name;
    Configuration config;
};
Configuration make_configuration(int num_vertices, const std::vector<std::pair<int, int>>& edges,
                                 const std::vector<std::vector<std::string>>& marks,
                                 const std::vector<LabelPair>& pairs);
std::vector<NamedConfiguration> genus2_catalog();
std::vector<NamedConfiguration> genus3_catalog();  // numbered 1..10

// Random points whose reduction tree has the given shape and marking.
// Edge sizes are drawn from 1..max_edge; all points are finite.
std::vector<LabeledPoint> realize_configuration(const TreeSkeleton& t, const Field& f, std::mt19937_64& rng,
                                                int max_edge = 2);

}  // namespace whittaker
