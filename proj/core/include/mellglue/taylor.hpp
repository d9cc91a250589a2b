#pragma once

#include <optional>
#include <vector>

#include "mellglue/net.hpp"

namespace mellglue {

// A thick subtree of a box-tree: a rooted tree plus a directed morphism
// into the target, root to root. One per component for a subforest.
struct ThickSubtree {
  Tree tree;
  std::vector<int> to_target;  // vertex -> target vertex
};

struct ThickSubforest {
  std::vector<ThickSubtree> trees;
};

// All thick subtrees of `target` whose fibers over non-root vertices have
// at most `bound` elements, one per isomorphism class. Order is canonical
// (children enumerated by ascending class index).
std::vector<ThickSubtree> enumerate_thick_subtrees(const Tree& target, int bound);

// Cartesian product over the components of r's box-forest.
std::vector<ThickSubforest> enumerate_thick_subforests(const QuasiProofStructure& r, int bound);

// Per-box copy counts of a subtree: fiber sizes over the target vertices.
std::vector<int> fiber_sizes(const ThickSubtree& t, int target_size);

// The t-expansion of r: pullback of the box-function against the closure of
// the subforest, with labels, types and order inherited through the left
// projection. The projections are retained per component.
struct TaylorProjection {
  std::vector<int> cell_to_src;   // result cell -> cell of r's component
  std::vector<int> cell_to_tree;  // result cell -> vertex of the subtree
  std::vector<int> flag_to_src;   // result flag -> flag of r's component
};
struct TaylorElement {
  QuasiProofStructure net;
  std::vector<TaylorProjection> projections;
};

TaylorElement expand(const QuasiProofStructure& r, const ThickSubforest& t);

// All expansions with per-box copy count at most `bound`, deduplicated up
// to isomorphism.
NetSet taylor_set(const QuasiProofStructure& r, int bound);
// ... plus all emptyings of each element over root subsets with at least
// one conclusion.
NetSet filled_taylor_set(const QuasiProofStructure& r, int bound);

// Membership of rho in the (filled) Taylor expansion of r. The per-box
// copy bound is derived from rho's cell count: every box contributes at
// least one cell per copy. Returns a witness subforest (plus the emptied
// components in the filled case).
struct MemberWitness {
  ThickSubforest subforest;
  std::vector<int> emptied;  // component indices
};
std::optional<MemberWitness> member(const QuasiProofStructure& rho, const QuasiProofStructure& r,
                                    bool filled);

}  // namespace mellglue
