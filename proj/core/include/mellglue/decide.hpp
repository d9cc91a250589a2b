#pragma once

#include <optional>

#include "mellglue/sched.hpp"
#include "mellglue/taylor.hpp"

namespace mellglue {

// Size of a finite set of DiLL0 quasi-proof-structures; strictly decreases
// along safe rewrites, which bounds the gluability search.
struct DillSize {
  Multiset quest_arities;    // arities >= 1, over all elements
  long cells = 0;            // cells other than 0-ary ?-cells and daimons
  Multiset quest_columns;    // per conclusion: #elements with a >=1-ary ?-cell there
  Multiset comp_conclusions; // per (element, component): conclusion count
  int compare(const DillSize& o) const;
};
DillSize dill_size(const NetSet& pi);

// Memo key invariant under per-component conclusion reorderings and
// component permutations (the exchange-reachable quotient).
std::string state_key(const NetSet& pi);

// The scheduling nu_Gamma eliminating the all-daimon structure of a type:
// every cut step is with conclusion, and {daimon_Gamma} ~nu~> {empty}.
Scheduling daimon_scheduling(const TypeList& type);

struct GlueStats {
  long states_explored = 0;
  long transitions = 0;
};

struct GlueResult {
  Scheduling witness;
  std::optional<QuasiProofStructure> built;  // R(witness); absent for empty input
  GlueStats stats;
};

struct GlueOptions {
  bool cut_free = false;
  // budget for the cut-free daimon-elimination suffix (an inhabitation
  // search, which is only a semi-decision); counts non-exchange steps
  int suffix_budget = 64;
  GlueStats* stats_out = nullptr;  // filled even when the verdict is negative
};

// Decides gluability of a finite set of DiLL0 quasi-proof-structures.
// The plain variant always terminates; the cut-free variant is complete
// only up to the suffix budget.
std::optional<GlueResult> glueable(const NetSet& pi, const GlueOptions& opt = {});

// Inverse Taylor expansion: a MELL (quasi-)proof-structure R with
// pi included in T(R), built from a gluability witness and post-verified
// by membership. Elements must be daimon-free proof-structures.
std::optional<GlueResult> invert_taylor(const NetSet& pi, const GlueOptions& opt = {});

struct InhabitResult {
  Scheduling witness;
  QuasiProofStructure structure;  // cut-free, single component
  long states_explored = 0;
};

// Procedure P1: iterative deepening over cut-free schedulings; none means
// "not found within budget". The budget counts non-exchange steps.
std::optional<InhabitResult> inhabit_p1(const std::vector<FormulaPtr>& gamma, int budget,
                                        long* explored = nullptr);

// Procedure P2: complete search over contraction-free cut-free
// schedulings; always terminates.
std::optional<InhabitResult> inhabit_p2(const std::vector<FormulaPtr>& gamma,
                                        long* explored = nullptr);

// Shared engine: a cut-free scheduling from an arbitrary list of lists,
// with or without contractions. budget < 0 means unbounded (only sound
// when contractions are excluded).
std::optional<Scheduling> find_cut_free_scheduling(const TypeList& source, bool allow_contr,
                                                   int budget, long* explored = nullptr);

}  // namespace mellglue
