#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mellglue/util.hpp"

namespace mellglue {

// MELL formulas, kept in "negation on atoms only" normal form: duals of
// compounds are computed via De Morgan, never stored.
enum class FKind : unsigned char { Atom, NegAtom, One, Bot, Tensor, Par, Bang, Quest };

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
 public:
  FKind kind;
  std::string atom;        // Atom / NegAtom
  FormulaPtr left, right;  // Tensor/Par both, Bang/Quest left only
  int size;                // atoms + connectives + units
  uint64_t hash;

  Formula(FKind k, std::string a, FormulaPtr l, FormulaPtr r);
};

FormulaPtr mk_atom(std::string name);
FormulaPtr mk_natom(std::string name);
FormulaPtr mk_one();
FormulaPtr mk_bot();
FormulaPtr mk_tensor(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_par(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_bang(FormulaPtr a);
FormulaPtr mk_quest(FormulaPtr a);

bool formula_eq(const FormulaPtr& a, const FormulaPtr& b);
// total order for canonical printing and sorting
int formula_cmp(const FormulaPtr& a, const FormulaPtr& b);

FormulaPtr dual(const FormulaPtr& a);
inline int formula_size(const FormulaPtr& a) { return a->size; }
bool is_atomic(const FormulaPtr& a);
bool is_exponential(const FormulaPtr& a);  // !A or ?A

std::string to_string(const FormulaPtr& a);
// Grammar: atoms are uppercase identifiers, `~X` negated atom, `one`, `bot`,
// infix `*` and `|` with mandatory parentheses, prefix `!` and `?`.
FormulaPtr parse_formula(std::string_view text);

// Lists of lists of formulas; components may be empty.
using TypeList = std::vector<std::vector<FormulaPtr>>;

std::vector<FormulaPtr> flatten(const TypeList& g);
// 1-based flattening index -> (component index, offset), both 1-based.
std::pair<int, int> position_component(const TypeList& g, int i);

std::string to_string(const TypeList& g);
// Components separated by `;`, formulas by `,`; an empty segment is an
// empty component; the empty string is the single empty component.
TypeList parse_type_list(std::string_view text);

bool type_list_eq(const TypeList& a, const TypeList& b);

// Termination measure for procedure P2: (flattened size, multiset of
// component lengths), ordered lexicographically.
struct P2Size {
  long flat = 0;
  Multiset lengths;
  int compare(const P2Size& o) const {
    if (flat != o.flat) return flat < o.flat ? -1 : 1;
    return lengths.compare(o.lengths);
  }
};
P2Size p2_size(const TypeList& g);

}  // namespace mellglue
