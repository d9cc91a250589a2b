#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mellglue/util.hpp"

namespace mellglue {

// Graph with half-edges: a finite set of flags glued in pairs by an
// involution, every flag attached to a vertex. Fixed points of the
// involution are tails; a pair {f, j(f)} with j(f) != f is an edge.
struct Graph {
  std::vector<int> endpoint;    // flag -> vertex (-1 encodes "missing" for validation)
  std::vector<int> involution;  // flag -> flag
  int vertices = 0;

  int flags() const { return static_cast<int>(endpoint.size()); }
  bool is_tail(int f) const { return involution[f] == f; }

  int add_vertex() { return vertices++; }
  int add_flag(int vertex) {
    endpoint.push_back(vertex);
    involution.push_back(flags() - 1);
    return flags() - 1;
  }
  void glue(int f, int g) {
    involution[f] = g;
    involution[g] = f;
  }
};

enum class Orient : unsigned char { In, Out };

// Optional structure on top of a plain graph, one vector per flavor.
// Labels and colors are opaque ints here; richer data lives in net.hpp.
// `order` is a strict partial order given by its pairs a < b.
struct Overlay {
  std::optional<std::vector<Orient>> orient;                 // per flag
  std::optional<std::vector<int>> label;                     // per vertex
  std::optional<std::vector<int>> color;                     // per flag
  std::optional<std::vector<std::pair<int, int>>> order;     // flag pairs a < b
};

struct GraphMorphism {
  std::vector<int> flag_map;    // flag of source -> flag of target
  std::vector<int> vertex_map;  // vertex of source -> vertex of target
};

GraphMorphism identity_morphism(const Graph& g);
GraphMorphism compose(const GraphMorphism& first, const GraphMorphism& then);

// ok (nullopt) or a report naming the first violated invariant.
std::optional<std::string> validate_graph(const Graph& g);

// A morphism is valid when it commutes with endpoints and involutions;
// when orientations are supplied it must preserve them too.
std::optional<std::string> validate_morphism(
    const Graph& src, const Graph& tgt, const GraphMorphism& m,
    const std::vector<Orient>* src_orient = nullptr,
    const std::vector<Orient>* tgt_orient = nullptr);

// Tagged disjoint copies; `right_flag_offset`/`right_vertex_offset` report
// where the second argument landed.
Graph disjoint_union(const Graph& a, const Graph& b, int* right_flag_offset = nullptr,
                     int* right_vertex_offset = nullptr);

// vertex -> component id (0-based, numbered by least member vertex order).
// Paths never cross tails.
std::vector<int> connected_components(const Graph& g);

// Reflexive-transitive closure of a directed forest: same vertices and
// tails, one edge per directed path (the empty path gives a loop at every
// vertex). Flags of the input are not reused; lookup goes through the
// path tables below.
struct Closure {
  Graph graph;
  std::vector<Orient> orient;
  std::vector<int> tails;  // images of the input's tails, in input flag order

  // Flag ids of the edge representing the unique path from v to w
  // (v == w is the empty path). -1 when there is no such path.
  int out_half(int v, int w) const { return half(v, w, 0); }
  int in_half(int v, int w) const { return half(v, w, 1); }

  std::vector<int> table;  // vertices*vertices*2, -1 filled
  int n = 0;

 private:
  int half(int v, int w, int k) const { return table[(static_cast<size_t>(v) * n + w) * 2 + k]; }
};

// Rejects cyclic or non-forest-shaped input (every vertex needs at most one
// outgoing edge).
Closure transitive_closure(const Graph& g, const std::vector<Orient>& orient);

struct PullbackResult {
  Graph graph;
  GraphMorphism to_left;   // projection onto the source of g
  GraphMorphism to_right;  // projection onto the source of h
};

// Pullback of g : sigma -> tau and h : rho -> tau, the explicit pairs
// construction. Carrier identifiers are the positions in the projections.
PullbackResult pullback(const Graph& sigma, const Graph& rho, const Graph& tau,
                        const GraphMorphism& g, const GraphMorphism& h);

// Unique mediating morphism u : q -> pb with to_left . u = p, to_right . u = k.
// nullopt when (p, k) does not commute through (g, h).
std::optional<GraphMorphism> factorize(const Graph& q, const GraphMorphism& p,
                                       const GraphMorphism& k, const Graph& sigma,
                                       const Graph& rho, const Graph& tau,
                                       const GraphMorphism& g, const GraphMorphism& h,
                                       const PullbackResult& pb);

bool is_isomorphism(const Graph& src, const Graph& tgt, const GraphMorphism& m);

// Backtracking search for an isomorphism respecting whatever overlays both
// graphs carry.
std::optional<GraphMorphism> find_iso(const Graph& a, const Overlay& oa, const Graph& b,
                                      const Overlay& ob);

// Iso-invariant certificate (refined-partition signature). Equal graphs get
// equal certificates; collisions are possible and must be resolved by
// find_iso.
std::string graph_certificate(const Graph& g, const Overlay& o);

}  // namespace mellglue
