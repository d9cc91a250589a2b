#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mellglue/net.hpp"

namespace mellglue {

// Elementary rewrite steps on lists of lists of formulas. The index i names
// a position in the flattening of the source (for cut: of the target).
enum class StepKind : unsigned char {
  Exc, Mix, Ax, BangAx, Cut, One, Bot, Tensor, Par, Contr, Der, Weak, Box
};

struct Step {
  StepKind kind;
  int index = 0;
  // Cut only: the formula at position i of the target (its partner at i+1
  // is the dual). Parsed witnesses carry it; bare cut tokens leave it null.
  FormulaPtr cut_formula;
};

using Scheduling = std::vector<Step>;

std::string to_string(const Step& s);
std::string to_string(const Scheduling& nu);
// Whitespace-separated `kind_i` tokens; cut steps may carry their formula
// as `cut_2:?~X`.
Scheduling parse_scheduling(std::string_view text);

// Fig. 4 typing. nullopt when the side condition fails; cut without a
// formula payload is an error (the target is not determined).
std::optional<TypeList> try_step_type(const TypeList& g, const Step& s);
TypeList step_type(const TypeList& g, const Step& s);  // throws on failure
// Type-checks a whole scheduling, returning every object along the way
// (size = length + 1).
std::vector<TypeList> type_check(const TypeList& source, const Scheduling& nu);

// Nondeterminism witness attached to each structure-level successor.
struct Choice {
  int comp = -1;                 // component acted on (0-based)
  bool daimoned = false;         // the daimon variant fired
  bool empty_box = false;        // box: the co-weakening variant fired
  std::vector<int> left_inputs;  // contr: inputs kept at conclusion i
  bool nullary = false;          // contr: one side of the split is empty
  int cut_cell = -1;             // cut: chosen cell (local id)
  bool cut_swap = false;         // cut: order of the two new conclusions
  std::vector<int> float_assign; // dill box: group index per floating piece
};

// Forward action on MELL quasi-proof-structures (Fig. 5). Empty result
// means the step does not apply.
std::vector<std::pair<Choice, QuasiProofStructure>> mell_successors(
    const QuasiProofStructure& r, const Step& s);

// Reverse reading of Fig. 5: the unique r with r ~s~> target. The source
// type disambiguates the component the step acted on. Throws when the
// target does not match the arrow.
QuasiProofStructure mell_unapply(const QuasiProofStructure& target, const Step& s,
                                 const TypeList& source_type);

// Forward action on DiLL0 quasi-proof-structures (Fig. 5 minus box, plus
// the daimoned and box variants of Fig. 6). Each choice yields a finite
// set of structures.
std::vector<std::pair<Choice, std::vector<QuasiProofStructure>>> dill_successors(
    const QuasiProofStructure& rho, const Step& s);

// Lifted action on sets: one choice per element, results unioned and
// deduplicated. All distinct outcomes, deduplicated as sets.
std::vector<NetSet> set_successors(const NetSet& pi, const Step& s);

// Variant keeping the per-element choices of each combination (needed by
// the decision procedures to classify transitions).
struct SetTransition {
  NetSet result;
  std::vector<Choice> choices;  // one per element of the source set
};
std::vector<SetTransition> set_successors_detailed(const NetSet& pi, const Step& s);

// Replay helpers: search over the nondeterministic branches; true iff some
// branch of the composed action reaches the goal.
bool mell_replays_to_empty(const QuasiProofStructure& r, const Scheduling& nu);
bool set_replays_to(const NetSet& pi, const Scheduling& nu, const NetSet& goal);

// A scheduling unwinding r to the empty quasi-proof-structure, without
// nullary contraction splittings. Deterministic.
Scheduling normalize(const QuasiProofStructure& r);

// R(nu): folds mell_unapply right-to-left from the empty structure. The
// scheduling must type-check from `source` to some vector of empty lists.
QuasiProofStructure build(const Scheduling& nu, const TypeList& source);

}  // namespace mellglue
