#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mellglue/formula.hpp"
#include "mellglue/graph.hpp"

namespace mellglue {

enum class CellKind : unsigned char {
  Ax, Cut, One, Bot, Tensor, Par, Quest, Bang, Daimon, BangAx
};

const char* cell_kind_name(CellKind k);                 // "ax", "cut", ...
std::optional<CellKind> cell_kind_by_name(std::string_view s);

// A module: directed, labeled, colored, ordered half-edge graph without
// loops. Cells own ordered input/output flag lists; `flag_cell`, `orient`
// and the lists are kept consistent by the builder and checked by validate.
struct Module {
  std::vector<int> flag_cell;
  std::vector<int> involution;
  std::vector<Orient> orient;
  std::vector<FormulaPtr> type;
  std::vector<CellKind> kind;
  std::vector<std::vector<int>> inputs;
  std::vector<std::vector<int>> outputs;

  int cells() const { return static_cast<int>(kind.size()); }
  int flags() const { return static_cast<int>(flag_cell.size()); }
  int partner(int f) const { return involution[f]; }
  bool is_tail(int f) const { return involution[f] == f; }

  int add_cell(CellKind k) {
    kind.push_back(k);
    inputs.emplace_back();
    outputs.emplace_back();
    return cells() - 1;
  }
  int add_flag(int cell, Orient o, FormulaPtr t) {
    flag_cell.push_back(cell);
    involution.push_back(flags() - 1);
    orient.push_back(o);
    type.push_back(std::move(t));
    (o == Orient::In ? inputs[cell] : outputs[cell]).push_back(flags() - 1);
    return flags() - 1;
  }
  void glue(int f, int g) {
    involution[f] = g;
    involution[g] = f;
  }
};

// Rooted tree in parent-pointer form; vertex ids are 0-based, root has
// parent -1.
struct Tree {
  std::vector<int> parent;

  int size() const { return static_cast<int>(parent.size()); }
  int root() const;
  int depth(int v) const;
  bool is_ancestor_or_self(int anc, int v) const;
  std::vector<std::vector<int>> children() const;
};

Tree bare_root();

// Conversion for the graph-level machinery: one vertex per tree vertex,
// an edge child -> parent per link, one output tail at the root.
struct TreeGraph {
  Graph graph;
  std::vector<Orient> orient;
  int root_tail;
  std::vector<int> edge_out;  // non-root v -> out-half of its parent link
  std::vector<int> edge_in;   // non-root v -> in-half at the parent
};
TreeGraph tree_to_graph(const Tree& t);

// A proof-structure: module (no input tails) + box-tree + box assignment of
// cells to tree vertices. The flag component of the box-function is forced
// by the vertex assignment and is derived on demand (box_morphism below).
struct ProofStructure {
  Module m;
  Tree tree;
  std::vector<int> box_v;       // cell -> tree vertex
  std::vector<int> conclusions; // ordered output tails
};

struct QuasiProofStructure {
  std::vector<ProofStructure> comps;
};

ProofStructure empty_ps();
ProofStructure daimon_ps(const std::vector<FormulaPtr>& outputs);
QuasiProofStructure empty_qps(int n);
// The all-daimon structure of a type: a daimon per nonempty component, an
// empty structure per empty one.
QuasiProofStructure full_daimon(const TypeList& type);

std::optional<std::string> validate(const QuasiProofStructure& q);
std::optional<std::string> validate_ps(const ProofStructure& ps);

struct Classification {
  bool is_mell = false, is_dill0 = false, is_cut_free = false, is_empty = false;
};
Classification classify(const QuasiProofStructure& q);

std::vector<FormulaPtr> ps_type(const ProofStructure& ps);
TypeList type_of(const QuasiProofStructure& q);

struct ConclusionRef {
  int comp;
  int flag;
};
int conclusion_count(const QuasiProofStructure& q);
// 1-based global position per the component-then-local order.
ConclusionRef conclusion_at(const QuasiProofStructure& q, int i);
int conclusion_position(const QuasiProofStructure& q, int comp, int flag);

// Boxes recovered from the box assignment: one per non-root tree vertex.
struct Box {
  int tree_vertex;
  int principal_flag;       // the !-input crossing the edge tree_vertex -> parent
  std::vector<int> cells;   // content: cells mapped into the subtree
};
std::vector<Box> boxes(const ProofStructure& ps);
int cell_depth(const ProofStructure& ps, int cell);
int depth(const ProofStructure& ps);
int depth(const QuasiProofStructure& q);

// Replace the named components (0-based) by daimons of the same type.
// Emptying a component without conclusions is an error.
QuasiProofStructure emptying(const QuasiProofStructure& q, const std::vector<int>& comps);

// Derived flag-level box-function into the closure of the box-tree.
GraphMorphism box_morphism(const ProofStructure& ps, const TreeGraph& tg, const Closure& cl);

// Graph view of a module for the generic machinery. Formula colors are
// interned through the shared table so two views can be compared.
struct FormulaInterner {
  std::map<std::string, int> ids;
  int intern(const FormulaPtr& f);
};
struct ModuleView {
  Graph graph;
  Overlay overlay;
};
// `with_order` controls whether conclusion order and tensor/par input order
// are part of the overlay.
ModuleView module_view(const ProofStructure& ps, FormulaInterner& interner, bool with_order);
// Module + box-tree folded into a single graph, so that one iso search
// decides proof-structure isomorphism (the commuting square is encoded by
// assignment edges).
ModuleView combined_view(const ProofStructure& ps, FormulaInterner& interner, bool with_order);

std::optional<std::vector<GraphMorphism>> iso(const QuasiProofStructure& a,
                                              const QuasiProofStructure& b);
bool iso_eq(const QuasiProofStructure& a, const QuasiProofStructure& b);

// Iso-invariant certificate; collisions resolved by iso(). `with_order`
// false gives the conclusion-order-insensitive variant used by the
// decision procedure's memo table.
std::string certificate(const QuasiProofStructure& q, bool with_order = true);

// Connected pieces of a component's cell graph: cell -> piece id.
std::vector<int> cell_pieces(const ProofStructure& ps);

int cell_count(const QuasiProofStructure& q);

// Normalization measure on MELL quasi-proof-structures: (multiset of
// ?-cell arities, number of cells, multiset of per-component conclusion
// counts), lexicographic.
struct MellSize {
  Multiset quest_arities;
  long cells = 0;
  Multiset comp_conclusions;
  int compare(const MellSize& o) const;
};
MellSize mell_size(const QuasiProofStructure& q);

// Surgery: drop the cells marked in `kill` (and their flags); flags whose
// partner died become tails. `flag_map`/`cell_map` report survivor indices
// (-1 for removed).
struct RemovalResult {
  ProofStructure ps;
  std::vector<int> flag_map;
  std::vector<int> cell_map;
};
RemovalResult remove_cells(const ProofStructure& ps, const std::vector<char>& kill);

// Finite set of quasi-proof-structures with identical conclusions, kept
// iso-deduplicated and sorted by certificate. `type` survives emptiness.
struct NetSet {
  std::vector<QuasiProofStructure> elems;
  TypeList type;
};
NetSet make_net_set(std::vector<QuasiProofStructure> elems,
                    std::optional<TypeList> type = std::nullopt);
bool net_set_contains(const NetSet& s, const QuasiProofStructure& q);
bool net_set_eq(const NetSet& a, const NetSet& b);
// True iff the set is exactly {daimon_Gamma} for its type.
bool is_daimon_full(const NetSet& s);

}  // namespace mellglue
