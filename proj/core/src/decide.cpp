#include "mellglue/decide.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace mellglue {

int DillSize::compare(const DillSize& o) const {
  if (int c = quest_arities.compare(o.quest_arities)) return c;
  if (cells != o.cells) return cells < o.cells ? -1 : 1;
  if (int c = quest_columns.compare(o.quest_columns)) return c;
  return comp_conclusions.compare(o.comp_conclusions);
}

DillSize dill_size(const NetSet& pi) {
  DillSize out;
  std::vector<long> p, r, s;
  int ncols = pi.elems.empty() ? 0 : conclusion_count(pi.elems.front());
  std::vector<long> col(ncols, 0);
  for (const auto& e : pi.elems) {
    for (const auto& ps : e.comps) {
      s.push_back(static_cast<long>(ps.conclusions.size()));
      for (int c = 0; c < ps.m.cells(); ++c) {
        CellKind k = ps.m.kind[c];
        bool weakening = k == CellKind::Quest && ps.m.inputs[c].empty();
        if (k != CellKind::Daimon && !weakening) ++out.cells;
        if (k == CellKind::Quest && !ps.m.inputs[c].empty())
          p.push_back(static_cast<long>(ps.m.inputs[c].size()));
      }
    }
    for (int i = 1; i <= ncols; ++i) {
      auto ref = conclusion_at(e, i);
      const ProofStructure& ps = e.comps[ref.comp];
      int c = ps.m.flag_cell[ref.flag];
      if (ps.m.kind[c] == CellKind::Quest && !ps.m.inputs[c].empty()) ++col[i - 1];
    }
  }
  out.quest_arities = Multiset(std::move(p));
  out.quest_columns = Multiset(std::move(col));
  out.comp_conclusions = Multiset(std::move(s));
  return out;
}

// ---- canonical state key ----------------------------------------------------

namespace {

// exact structural serialization, used to cache certificate computations
std::string serialize_qps(const QuasiProofStructure& q) {
  std::ostringstream os;
  for (const auto& ps : q.comps) {
    os << 'C';
    for (int c = 0; c < ps.m.cells(); ++c) {
      os << cell_kind_name(ps.m.kind[c]) << '@' << ps.box_v[c] << '(';
      for (int f : ps.m.inputs[c]) os << f << ':' << ps.m.partner(f) << ',';
      os << '/';
      for (int f : ps.m.outputs[c]) os << f << ':' << ps.m.partner(f) << ',';
      os << ')';
    }
    os << 'T';
    for (int p : ps.tree.parent) os << p << ',';
    os << 'K';
    for (int f : ps.conclusions) os << f << ':' << to_string(ps.m.type[f]) << ',';
  }
  return os.str();
}

std::string cached_cert(const QuasiProofStructure& q) {
  static thread_local std::map<std::string, std::string> cache;
  std::string key = serialize_qps(q);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() > 200000) cache.clear();
  std::string cert = certificate(q, true);
  cache.emplace(std::move(key), cert);
  return cert;
}

std::string cheap_set_key(const NetSet& s) {
  std::vector<std::string> certs;
  for (const auto& e : s.elems) certs.push_back(cached_cert(e));
  std::sort(certs.begin(), certs.end());
  std::string out = to_string(s.type) + "||";
  for (auto& c : certs) out += c + ";";
  return out;
}

std::string comp_signature(const NetSet& s, int k) {
  std::vector<std::string> parts;
  for (const auto& e : s.elems) {
    QuasiProofStructure single;
    single.comps.push_back(e.comps[k]);
    parts.push_back(certificate(single, false));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (auto& p : parts) out += p + "&";
  std::vector<std::string> tys;
  for (const auto& f : s.type[k]) tys.push_back(to_string(f));
  std::sort(tys.begin(), tys.end());
  for (auto& t : tys) out += t + ",";
  return out;
}

std::string column_signature(const NetSet& s, int k, int local) {
  std::vector<std::string> parts;
  for (const auto& e : s.elems) {
    const ProofStructure& ps = e.comps[k];
    int f = ps.conclusions[local];
    int c = ps.m.flag_cell[f];
    std::ostringstream os;
    os << cell_kind_name(ps.m.kind[c]) << ':' << ps.m.inputs[c].size() << ':'
       << ps.m.outputs[c].size();
    parts.push_back(os.str());
  }
  std::sort(parts.begin(), parts.end());
  std::string out = to_string(s.type[k][local]);
  for (auto& p : parts) out += "#" + p;
  return out;
}

std::string ordered_key(const NetSet& s) { return cheap_set_key(s); }

NetSet permuted(const NetSet& s, const std::vector<int>& comp_perm,
                const std::vector<std::vector<int>>& local_perms) {
  NetSet out;
  out.type.resize(s.type.size());
  for (auto e : s.elems) {
    QuasiProofStructure q;
    for (size_t k = 0; k < comp_perm.size(); ++k) {
      ProofStructure ps = e.comps[comp_perm[k]];
      std::vector<int> reordered;
      for (int j : local_perms[comp_perm[k]]) reordered.push_back(ps.conclusions[j]);
      ps.conclusions = std::move(reordered);
      q.comps.push_back(std::move(ps));
    }
    out.elems.push_back(std::move(q));
  }
  for (size_t k = 0; k < comp_perm.size(); ++k) {
    std::vector<FormulaPtr> comp;
    for (int j : local_perms[comp_perm[k]]) comp.push_back(s.type[comp_perm[k]][j]);
    out.type[k] = std::move(comp);
  }
  return out;
}

constexpr long kMaxKeyCandidates = 512;

struct CanonicalState {
  std::string key;
  NetSet canon;
  // permutations realizing canon from the input state: component j of the
  // canon is comp_perm[j] of the input, conclusion i of canon component j
  // is local_perms[comp_perm[j]][i] of that input component
  std::vector<int> comp_perm;
  std::vector<std::vector<int>> local_perms;
};

CanonicalState canonical_state(const NetSet& s);

CanonicalState identity_canonical(const NetSet& s, std::string key) {
  CanonicalState cs;
  cs.key = std::move(key);
  cs.canon = s;
  cs.comp_perm.resize(s.type.size());
  std::iota(cs.comp_perm.begin(), cs.comp_perm.end(), 0);
  for (const auto& comp : s.type) {
    std::vector<int> id(comp.size());
    std::iota(id.begin(), id.end(), 0);
    cs.local_perms.push_back(std::move(id));
  }
  return cs;
}

}  // namespace

std::string state_key(const NetSet& s) { return canonical_state(s).key; }

namespace {

CanonicalState canonical_state(const NetSet& s) {
  if (s.elems.empty()) return identity_canonical(s, "E||" + to_string(s.type));
  int ncomp = static_cast<int>(s.type.size());

  // component permutations within equal signatures
  std::vector<std::string> csig(ncomp);
  for (int k = 0; k < ncomp; ++k) csig[k] = comp_signature(s, k);
  std::vector<int> comp_order(ncomp);
  for (int k = 0; k < ncomp; ++k) comp_order[k] = k;
  std::sort(comp_order.begin(), comp_order.end(),
            [&](int a, int b) { return csig[a] < csig[b]; });

  // per-component local permutations within equal column signatures
  std::vector<std::vector<int>> local_base(ncomp);
  long candidates = 1;
  std::vector<std::vector<std::pair<int, int>>> comp_groups;  // group runs in comp_order
  for (int k = 0; k < ncomp; ++k) {
    int m = static_cast<int>(s.type[k].size());
    std::vector<std::string> sig(m);
    for (int j = 0; j < m; ++j) sig[j] = column_signature(s, k, j);
    std::vector<int>& ord = local_base[k];
    ord.resize(m);
    for (int j = 0; j < m; ++j) ord[j] = j;
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return sig[a] < sig[b]; });
    long fact = 1;
    for (int j = 0; j < m;) {
      int e = j;
      while (e < m && sig[ord[e]] == sig[ord[j]]) ++e;
      for (int c = 2; c <= e - j; ++c) fact *= c;
      j = e;
    }
    candidates *= fact;
    if (candidates > kMaxKeyCandidates) break;
  }
  {
    long fact = 1;
    for (int k = 0; k < ncomp;) {
      int e = k;
      while (e < ncomp && csig[comp_order[e]] == csig[comp_order[k]]) ++e;
      for (int c = 2; c <= e - k; ++c) fact *= c;
      k = e;
    }
    candidates *= fact;
  }
  if (candidates > kMaxKeyCandidates) {
    // give up on the quotient; order-sensitive key is still sound
    return identity_canonical(s, "X||" + ordered_key(s));
  }

  // enumerate: permute components within signature groups, conclusions
  // within column-signature groups; take the lexicographic minimum
  std::string best;
  NetSet best_canon;
  std::vector<int> best_cperm;
  std::vector<std::vector<int>> best_lperm;
  std::vector<int> cperm = comp_order;
  auto local_groups = [&](int k) {
    std::vector<std::pair<int, int>> runs;
    int m = static_cast<int>(s.type[k].size());
    std::vector<std::string> sig(m);
    for (int j = 0; j < m; ++j) sig[j] = column_signature(s, k, j);
    for (int j = 0; j < m;) {
      int e = j;
      while (e < m && sig[local_base[k][e]] == sig[local_base[k][j]]) ++e;
      runs.push_back({j, e});
      j = e;
    }
    return runs;
  };
  std::vector<std::vector<int>> lperm = local_base;
  std::function<void(int)> try_all_local = [&](int k) {
    if (k == ncomp) {
      NetSet p = permuted(s, cperm, lperm);
      std::string key = ordered_key(p);
      if (best.empty() || key < best) {
        best = key;
        best_canon = std::move(p);
        best_cperm = cperm;
        best_lperm = lperm;
      }
      return;
    }
    auto runs = local_groups(k);
    std::function<void(size_t)> perm_run = [&](size_t ri) {
      if (ri == runs.size()) {
        try_all_local(k + 1);
        return;
      }
      auto [b, e] = runs[ri];
      std::sort(lperm[k].begin() + b, lperm[k].begin() + e);
      do {
        perm_run(ri + 1);
      } while (std::next_permutation(lperm[k].begin() + b, lperm[k].begin() + e));
    };
    perm_run(0);
  };
  std::function<void(int)> try_comp = [&](int gstart) {
    if (gstart == ncomp) {
      try_all_local(0);
      return;
    }
    int e = gstart;
    while (e < ncomp && csig[cperm[e]] == csig[cperm[gstart]]) ++e;
    std::sort(cperm.begin() + gstart, cperm.begin() + e);
    do {
      try_comp(e);
    } while (std::next_permutation(cperm.begin() + gstart, cperm.begin() + e));
  };
  try_comp(0);
  return {best, best_canon, best_cperm, best_lperm};
}

}  // namespace

// ---- daimon elimination -----------------------------------------------------

Scheduling daimon_scheduling(const TypeList& type) {
  Scheduling nu;
  TypeList g = type;
  auto emit = [&](StepKind k, int i, FormulaPtr cut = nullptr) {
    Step s{k, i, std::move(cut)};
    g = step_type(g, s);
    nu.push_back(std::move(s));
  };
  auto mu = [&](int i, const FormulaPtr& a) {
    emit(StepKind::Cut, i + 1, mk_quest(dual(a)));
    emit(StepKind::Contr, i + 1);
    emit(StepKind::Mix, i + 1);
    emit(StepKind::Box, i + 3);
    emit(StepKind::Der, i + 1);
    emit(StepKind::Der, i + 2);
  };
  int guard = 0;
  for (;;) {
    if (++guard > 100000) throw Error("daimon_scheduling: runaway recursion");
    int k = -1, i = 1;
    for (size_t j = 0; j < g.size(); ++j) {
      if (!g[j].empty()) {
        k = static_cast<int>(j);
        break;
      }
      i += 0;
    }
    if (k < 0) break;
    i = 1;
    for (int j = 0; j < k; ++j) i += static_cast<int>(g[j].size());
    if (g[k].size() >= 2) {
      emit(StepKind::Mix, i);
      continue;
    }
    FormulaPtr a = g[k][0];
    switch (a->kind) {
      case FKind::One: emit(StepKind::One, i); break;
      case FKind::Bot: emit(StepKind::Bot, i); break;
      case FKind::Atom:
      case FKind::NegAtom:
        mu(i, a);
        emit(StepKind::Ax, i + 3);
        emit(StepKind::Ax, i + 1);
        break;
      case FKind::Tensor:
        mu(i, a);
        emit(StepKind::Tensor, i);
        emit(StepKind::Par, i + 2);
        emit(StepKind::Par, i + 4);
        emit(StepKind::Tensor, i + 6);
        break;
      case FKind::Par:
        mu(i, a);
        emit(StepKind::Par, i);
        emit(StepKind::Tensor, i + 2);
        emit(StepKind::Tensor, i + 4);
        emit(StepKind::Par, i + 6);
        break;
      case FKind::Bang:
        mu(i, a);
        emit(StepKind::Box, i + 3);
        emit(StepKind::Der, i + 2);
        emit(StepKind::Exc, i);
        emit(StepKind::Box, i + 1);
        emit(StepKind::Der, i);
        break;
      case FKind::Quest:
        mu(i, a);
        emit(StepKind::Box, i + 1);
        emit(StepKind::Der, i);
        emit(StepKind::Exc, i + 2);
        emit(StepKind::Box, i + 3);
        emit(StepKind::Der, i + 2);
        break;
    }
  }
  return nu;
}

// ---- gluability search ------------------------------------------------------

namespace {

struct Move {
  Scheduling pre;  // exchanges
  Step main;
};

int comp_start(const NetSet& s, int k) {
  int pos = 1;
  for (int j = 0; j < k; ++j) pos += static_cast<int>(s.type[j].size());
  return pos;
}

// exchanges are bijections on structures, so they cannot merge distinct
// elements; apply them directly without re-deduplication
NetSet apply_exc(const NetSet& s, int i) {
  NetSet out = s;
  auto [k1, off] = position_component(s.type, i);
  int k = k1 - 1;
  std::swap(out.type[k][off - 1], out.type[k][off]);
  for (auto& e : out.elems)
    std::swap(e.comps[k].conclusions[off - 1], e.comps[k].conclusions[off]);
  return out;
}

std::vector<Move> enumerate_moves(const NetSet& s, bool cut_free) {
  std::vector<Move> moves;
  int ncomp = static_cast<int>(s.type.size());
  for (int k = 0; k < ncomp; ++k) {
    const auto& comp = s.type[k];
    int m = static_cast<int>(comp.size());
    int start = comp_start(s, k);
    int end = start + m - 1;
    if (m == 2) {
      if (!is_exponential(comp[0]) && formula_eq(comp[0], dual(comp[1])))
        moves.push_back({{}, Step{StepKind::Ax, start + 1, nullptr}});
      if (comp[0]->kind == FKind::Quest && formula_eq(comp[0], dual(comp[1])))
        moves.push_back({{}, Step{StepKind::BangAx, start, nullptr}});
      if (comp[1]->kind == FKind::Quest && formula_eq(comp[1], dual(comp[0])))
        moves.push_back({{Step{StepKind::Exc, start, nullptr}},
                         Step{StepKind::BangAx, start, nullptr}});
    }
    if (m == 1) {
      if (comp[0]->kind == FKind::One) moves.push_back({{}, Step{StepKind::One, start, nullptr}});
      if (comp[0]->kind == FKind::Bot) moves.push_back({{}, Step{StepKind::Bot, start, nullptr}});
      if (comp[0]->kind == FKind::Quest)
        moves.push_back({{}, Step{StepKind::Weak, start, nullptr}});
    }
    for (int j = 0; j < m; ++j) {
      int i = start + j;
      switch (comp[j]->kind) {
        case FKind::Tensor: moves.push_back({{}, Step{StepKind::Tensor, i, nullptr}}); break;
        case FKind::Par: moves.push_back({{}, Step{StepKind::Par, i, nullptr}}); break;
        case FKind::Quest:
          moves.push_back({{}, Step{StepKind::Der, i, nullptr}});
          moves.push_back({{}, Step{StepKind::Contr, i, nullptr}});
          break;
        default: break;
      }
    }
    // box: a unique !-conclusion among ?-conclusions, bubbled to the end
    {
      int bang = -1;
      bool ok = m > 0;
      for (int j = 0; j < m && ok; ++j) {
        if (comp[j]->kind == FKind::Bang)
          ok = bang < 0, bang = j;
        else if (comp[j]->kind != FKind::Quest)
          ok = false;
      }
      if (ok && bang >= 0) {
        Move mv;
        for (int t = bang; t + 1 < m; ++t) mv.pre.push_back(Step{StepKind::Exc, start + t, nullptr});
        mv.main = Step{StepKind::Box, end, nullptr};
        moves.push_back(std::move(mv));
      }
    }
    // mix: bipartitions of the component's conclusions, first one left
    if (m >= 2 && m <= 16) {
      for (unsigned mask = 1; mask < (1u << m); mask += 2) {  // bit 0 set: local 0 goes left
        int lcount = __builtin_popcount(mask);
        if (lcount == m) continue;
        Move mv;
        // bubble the chosen conclusions to the front, preserving order
        std::vector<char> take(m, 0);
        for (int j = 0; j < m; ++j) take[j] = (mask >> j) & 1u;
        std::vector<char> cur = take;
        int front = 0;
        for (int j = 0; j < m; ++j) {
          if (!take[j]) continue;
          int at = j;
          // account for earlier moves: count positions
          at = 0;
          {
            // recompute position of this conclusion in the current layout
            int seen = 0;
            for (int t = 0; t < m; ++t) {
              if (cur[t]) {
                if (seen == front) {
                  at = t;
                  break;
                }
                ++seen;
              }
            }
          }
          for (int t = at; t > front; --t) {
            mv.pre.push_back(Step{StepKind::Exc, start + t - 1, nullptr});
            std::swap(cur[t], cur[t - 1]);
          }
          ++front;
        }
        mv.main = Step{StepKind::Mix, start + lcount - 1, nullptr};
        moves.push_back(std::move(mv));
      }
    }
    // cut: formulas harvested from root-level cut cells in this component
    if (!cut_free) {
      std::set<std::string> seen;
      for (const auto& e : s.elems) {
        const ProofStructure& ps = e.comps[k];
        for (int c = 0; c < ps.m.cells(); ++c) {
          if (ps.m.kind[c] != CellKind::Cut) continue;
          for (int o = 0; o < 2; ++o) {
            FormulaPtr f = ps.m.type[ps.m.inputs[c][o]];
            if (seen.insert(to_string(f)).second)
              moves.push_back({{}, Step{StepKind::Cut, end + 1, f}});
          }
        }
      }
    }
  }
  return moves;
}

// verdicts are state properties, so they are kept across calls; hits are
// confirmed by an exact comparison of canonical representatives
// (certificates alone are not a proof of equivalence)
struct VerdictTable {
  std::map<std::string, std::vector<NetSet>> failed;
  std::map<std::string, std::vector<std::pair<NetSet, Scheduling>>> succeeded;
};

VerdictTable& verdict_table(bool cut_free) {
  static thread_local VerdictTable plain, cf;
  return cut_free ? cf : plain;
}

struct SearchCtx {
  bool cut_free;
  int suffix_budget;
  GlueStats stats;
};

bool known_failed(SearchCtx& ctx, const CanonicalState& cs) {
  auto& table = verdict_table(ctx.cut_free).failed;
  auto it = table.find(cs.key);
  if (it == table.end()) return false;
  for (const auto& rep : it->second)
    if (type_list_eq(rep.type, cs.canon.type) && net_set_eq(rep, cs.canon)) return true;
  return false;
}

// exchanges taking the single-component state into its canonical
// conclusion order
Scheduling realign_exc(const CanonicalState& cs) {
  Scheduling out;
  const std::vector<int>& target = cs.local_perms[0];  // canon pos -> state pos
  int m = static_cast<int>(target.size());
  std::vector<int> cur(m);
  std::iota(cur.begin(), cur.end(), 0);
  for (int j = 0; j < m; ++j) {
    int p = j;
    while (cur[p] != target[j]) ++p;
    for (int t = p; t > j; --t) {
      out.push_back(Step{StepKind::Exc, t, nullptr});
      std::swap(cur[t], cur[t - 1]);
    }
  }
  return out;
}

std::optional<Scheduling> known_succeeded(SearchCtx& ctx, const CanonicalState& cs) {
  auto& table = verdict_table(ctx.cut_free).succeeded;
  auto it = table.find(cs.key);
  if (it == table.end()) return std::nullopt;
  for (const auto& [rep, witness] : it->second)
    if (type_list_eq(rep.type, cs.canon.type) && net_set_eq(rep, cs.canon)) {
      Scheduling out = realign_exc(cs);
      out.insert(out.end(), witness.begin(), witness.end());
      return out;
    }
  return std::nullopt;
}

// invert the realignment: a witness for the state becomes one for the
// canonical representative
Scheduling witness_for_canon(const CanonicalState& cs, const Scheduling& witness) {
  const std::vector<int>& target = cs.local_perms[0];
  int m = static_cast<int>(target.size());
  // inverse permutation: state pos -> canon pos
  std::vector<int> inv(m);
  for (int j = 0; j < m; ++j) inv[target[j]] = j;
  Scheduling out;
  std::vector<int> cur(m);
  std::iota(cur.begin(), cur.end(), 0);
  for (int j = 0; j < m; ++j) {
    int p = j;
    while (cur[p] != inv[j]) ++p;
    for (int t = p; t > j; --t) {
      out.push_back(Step{StepKind::Exc, t, nullptr});
      std::swap(cur[t], cur[t - 1]);
    }
  }
  out.insert(out.end(), witness.begin(), witness.end());
  return out;
}

std::optional<Scheduling> glue_dfs(SearchCtx& ctx, const NetSet& state) {
  // components never interact: every rule is local to one component, and
  // expansions of tuples are tuples of expansions. Solve per component and
  // concatenate (emptied components occupy no positions, so the local
  // indices of later sub-witnesses replay unchanged).
  if (state.type.size() > 1) {
    Scheduling out;
    for (size_t k = 0; k < state.type.size(); ++k) {
      std::vector<QuasiProofStructure> parts;
      for (const auto& e : state.elems) {
        QuasiProofStructure q;
        q.comps.push_back(e.comps[k]);
        parts.push_back(std::move(q));
      }
      NetSet sub = make_net_set(std::move(parts), TypeList{state.type[k]});
      auto w = glue_dfs(ctx, sub);
      if (!w) return std::nullopt;
      out.insert(out.end(), w->begin(), w->end());
    }
    return out;
  }

  CanonicalState cs = canonical_state(state);
  if (known_failed(ctx, cs)) return std::nullopt;
  if (auto hit = known_succeeded(ctx, cs)) return hit;
  ++ctx.stats.states_explored;
  if (const char* dbg = std::getenv("MELLGLUE_DEBUG_PROGRESS");
      dbg && ctx.stats.states_explored % 1000 == 0)
    std::cerr << "[glue] states=" << ctx.stats.states_explored
              << " transitions=" << ctx.stats.transitions << "\n";

  if (is_daimon_full(state)) {
    if (!ctx.cut_free) return daimon_scheduling(state.type);
    auto nu = find_cut_free_scheduling(state.type, true, ctx.suffix_budget, nullptr);
    if (nu) return nu;
    verdict_table(ctx.cut_free).failed[cs.key].push_back(std::move(cs.canon));
    return std::nullopt;
  }

  struct Cand {
    Scheduling steps;
    NetSet result;
    DillSize size;
    std::string key;  // cheap order-sensitive key, for determinism and dedup
  };
  std::vector<Cand> cands;
  for (const auto& mv : enumerate_moves(state, ctx.cut_free)) {
    NetSet cur = state;
    Scheduling steps;
    for (const auto& e : mv.pre) {
      cur = apply_exc(cur, e.index);
      steps.push_back(e);
    }
    for (auto& tr : set_successors_detailed(cur, mv.main)) {
      ++ctx.stats.transitions;
      bool non_daimon = false, proper_contr = false;
      for (const auto& ch : tr.choices) {
        if (!ch.daimoned) non_daimon = true;
        if (!ch.daimoned && !ch.nullary) proper_contr = true;
      }
      if (!non_daimon) continue;  // daimon-action: belongs to the suffix
      if (mv.main.kind == StepKind::Contr && !proper_contr) continue;  // nullary splitting
      Cand c;
      c.steps = steps;
      c.steps.push_back(mv.main);
      c.size = dill_size(tr.result);
      for (const auto& e : tr.result.elems) c.key += serialize_qps(e) + ";";
      c.result = std::move(tr.result);
      cands.push_back(std::move(c));
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (int c = a.size.compare(b.size)) return c < 0;
    return a.key < b.key;
  });
  std::set<std::string> tried;
  for (auto& c : cands) {
    if (!tried.insert(c.key).second) continue;
    if (auto rest = glue_dfs(ctx, c.result)) {
      Scheduling out = std::move(c.steps);
      out.insert(out.end(), rest->begin(), rest->end());
      verdict_table(ctx.cut_free)
          .succeeded[cs.key]
          .push_back({std::move(cs.canon), witness_for_canon(cs, out)});
      return out;
    }
  }
  verdict_table(ctx.cut_free).failed[cs.key].push_back(std::move(cs.canon));
  return std::nullopt;
}

}  // namespace

std::optional<GlueResult> glueable(const NetSet& pi, const GlueOptions& opt) {
  for (const auto& e : pi.elems) {
    if (auto err = validate(e)) throw Error("glueable: invalid element: " + *err);
    if (!classify(e).is_dill0) throw Error("glueable: element is not DiLL0");
  }
  if (opt.cut_free)
    for (const auto& e : pi.elems)
      if (!classify(e).is_cut_free) return std::nullopt;

  if (pi.elems.empty()) {
    GlueResult res;  // empty witness: the empty set is gluable by definition
    return res;
  }

  SearchCtx ctx{opt.cut_free, opt.suffix_budget, {}};
  auto nu = glue_dfs(ctx, pi);
  if (opt.stats_out) *opt.stats_out = ctx.stats;
  if (!nu) return std::nullopt;
  GlueResult res;
  res.witness = std::move(*nu);
  res.built = build(res.witness, pi.type);
  res.stats = ctx.stats;
  return res;
}

std::optional<GlueResult> invert_taylor(const NetSet& pi, const GlueOptions& opt) {
  for (const auto& e : pi.elems) {
    if (e.comps.size() != 1) throw Error("invert_taylor: elements must be proof-structures");
    for (const auto& ps : e.comps)
      for (CellKind k : ps.m.kind)
        if (k == CellKind::Daimon) throw Error("invert_taylor: elements must be daimon-free");
  }
  auto res = glueable(pi, opt);
  if (!res) return std::nullopt;
  if (!res->built) {
    // empty input: any structure of the type answers the question
    if (pi.type.empty()) return res;
    if (!opt.cut_free) {
      res->witness = daimon_scheduling(pi.type);
      res->built = build(res->witness, pi.type);
    } else if (auto nu = find_cut_free_scheduling(pi.type, true, opt.suffix_budget, nullptr)) {
      res->witness = std::move(*nu);
      res->built = build(res->witness, pi.type);
    }
    return res;
  }
  for (const auto& e : pi.elems)
    if (!member(e, *res->built, false))
      throw Error("invert_taylor: witness failed membership post-verification");
  return res;
}

// ---- inhabitation -----------------------------------------------------------

namespace {

// canonical multiset view of a TypeList: formulas sorted inside components,
// components sorted
struct CanonState {
  TypeList comps;  // sorted

  std::string key() const {
    std::string out;
    for (const auto& c : comps) {
      for (const auto& f : c) out += to_string(f) + ",";
      out += ";";
    }
    return out;
  }
};

CanonState canonize(const TypeList& g) {
  CanonState st;
  st.comps = g;
  for (auto& c : st.comps)
    std::sort(c.begin(), c.end(),
              [](const FormulaPtr& a, const FormulaPtr& b) { return formula_cmp(a, b) < 0; });
  std::sort(st.comps.begin(), st.comps.end(), [](const auto& a, const auto& b) {
    std::string ka, kb;
    for (const auto& f : a) ka += to_string(f) + ",";
    for (const auto& f : b) kb += to_string(f) + ",";
    return ka < kb;
  });
  return st;
}

struct AMove {
  StepKind kind;
  int comp;
  int pos = -1;            // primary formula position in the sorted component
  std::vector<int> left;   // mix: sorted positions going to the left part
};

CanonState apply_amove(const CanonState& st, const AMove& mv) {
  TypeList g = st.comps;
  auto& comp = g[mv.comp];
  switch (mv.kind) {
    case StepKind::Ax:
    case StepKind::BangAx:
    case StepKind::One:
    case StepKind::Bot:
    case StepKind::Weak:
      comp.clear();
      break;
    case StepKind::Tensor:
    case StepKind::Par: {
      FormulaPtr f = comp[mv.pos];
      comp[mv.pos] = f->left;
      comp.push_back(f->right);
      break;
    }
    case StepKind::Der:
      comp[mv.pos] = comp[mv.pos]->left;
      break;
    case StepKind::Contr:
      comp.push_back(comp[mv.pos]);
      break;
    case StepKind::Box:
      comp[mv.pos] = comp[mv.pos]->left;
      break;
    case StepKind::Mix: {
      std::vector<FormulaPtr> l, r;
      std::set<int> left(mv.left.begin(), mv.left.end());
      for (int j = 0; j < static_cast<int>(comp.size()); ++j)
        (left.count(j) ? l : r).push_back(comp[j]);
      g[mv.comp] = l;
      g.insert(g.begin() + mv.comp + 1, r);
      break;
    }
    default: throw Error("bad abstract move");
  }
  return canonize(g);
}

std::vector<AMove> amoves(const CanonState& st, bool allow_contr) {
  std::vector<AMove> out;
  std::set<std::string> seen_comp;
  for (int k = 0; k < static_cast<int>(st.comps.size()); ++k) {
    const auto& comp = st.comps[k];
    {
      std::string ck;
      for (const auto& f : comp) ck += to_string(f) + ",";
      if (!seen_comp.insert(ck).second) continue;  // identical component, same moves
    }
    int m = static_cast<int>(comp.size());
    if (m == 1) {
      if (comp[0]->kind == FKind::One) out.push_back({StepKind::One, k});
      if (comp[0]->kind == FKind::Bot) out.push_back({StepKind::Bot, k});
      if (comp[0]->kind == FKind::Quest) out.push_back({StepKind::Weak, k});
    }
    if (m == 2) {
      if (!is_exponential(comp[0]) && formula_eq(comp[0], dual(comp[1])))
        out.push_back({StepKind::Ax, k});
      for (int j = 0; j < 2; ++j)
        if (comp[j]->kind == FKind::Quest && formula_eq(comp[j], dual(comp[1 - j]))) {
          out.push_back({StepKind::BangAx, k});
          break;
        }
    }
    std::set<std::string> seen_formula;
    int bang = -1, bangs = 0, quests = 0;
    for (int j = 0; j < m; ++j) {
      if (comp[j]->kind == FKind::Bang) {
        bang = j;
        ++bangs;
      }
      if (comp[j]->kind == FKind::Quest) ++quests;
      if (!seen_formula.insert(to_string(comp[j])).second) continue;
      switch (comp[j]->kind) {
        case FKind::Tensor: out.push_back({StepKind::Tensor, k, j}); break;
        case FKind::Par: out.push_back({StepKind::Par, k, j}); break;
        case FKind::Quest:
          out.push_back({StepKind::Der, k, j});
          if (allow_contr) out.push_back({StepKind::Contr, k, j});
          break;
        default: break;
      }
    }
    if (bangs == 1 && quests == m - 1) out.push_back({StepKind::Box, k, bang});
    // mix: bipartitions deduplicated by the unordered pair of multisets
    if (m >= 2 && m <= 16) {
      std::set<std::string> seen_split;
      for (unsigned mask = 1; mask + 1 < (1u << m); ++mask) {
        std::string kl, kr;
        std::vector<int> left;
        for (int j = 0; j < m; ++j) {
          if ((mask >> j) & 1u) {
            kl += to_string(comp[j]) + ",";
            left.push_back(j);
          } else {
            kr += to_string(comp[j]) + ",";
          }
        }
        std::string key = kl < kr ? kl + "|" + kr : kr + "|" + kl;
        if (!seen_split.insert(key).second) continue;
        out.push_back({StepKind::Mix, k, -1, std::move(left)});
      }
    }
  }
  return out;
}

bool all_empty(const CanonState& st) {
  for (const auto& c : st.comps)
    if (!c.empty()) return false;
  return true;
}

struct InhabitCtx {
  bool allow_contr;
  long explored = 0;
  std::map<std::string, int> seen;  // key -> best remaining budget tried
};

bool inhabit_dfs(InhabitCtx& ctx, const CanonState& st, int remaining,
                 std::vector<AMove>& path) {
  if (all_empty(st)) return true;
  if (remaining == 0) return false;
  std::string key = st.key();
  auto it = ctx.seen.find(key);
  if (it != ctx.seen.end() && it->second >= remaining) return false;
  ctx.seen[key] = remaining;
  ++ctx.explored;
  for (const auto& mv : amoves(st, ctx.allow_contr)) {
    CanonState next = apply_amove(st, mv);
    path.push_back(mv);
    if (inhabit_dfs(ctx, next, remaining < 0 ? -1 : remaining - 1, path)) return true;
    path.pop_back();
  }
  return false;
}

// turn the abstract move chain into a concrete scheduling with exchanges
Scheduling concretize(const TypeList& source, const std::vector<AMove>& path) {
  Scheduling nu;
  TypeList g = source;
  auto emit = [&](StepKind k, int i, FormulaPtr cut = nullptr) {
    Step s{k, i, std::move(cut)};
    g = step_type(g, s);
    nu.push_back(std::move(s));
  };
  for (const auto& mv : path) {
    // map canonical components/positions back to the concrete list
    std::vector<int> comp_order(g.size());
    for (size_t j = 0; j < g.size(); ++j) comp_order[j] = static_cast<int>(j);
    auto comp_key = [&](int j) {
      std::vector<std::string> fs;
      for (const auto& f : g[j]) fs.push_back(to_string(f));
      std::sort(fs.begin(), fs.end());
      std::string out;
      for (auto& f : fs) out += f + ",";
      return out;
    };
    std::stable_sort(comp_order.begin(), comp_order.end(),
                     [&](int a, int b) { return comp_key(a) < comp_key(b); });
    int j = comp_order[mv.comp];
    std::vector<int> pos_order(g[j].size());
    for (size_t t = 0; t < g[j].size(); ++t) pos_order[t] = static_cast<int>(t);
    std::stable_sort(pos_order.begin(), pos_order.end(), [&](int a, int b) {
      return formula_cmp(g[j][a], g[j][b]) < 0;
    });
    int start = 1;
    for (int t = 0; t < j; ++t) start += static_cast<int>(g[t].size());
    int m = static_cast<int>(g[j].size());
    switch (mv.kind) {
      case StepKind::Ax: emit(StepKind::Ax, start + 1); break;
      case StepKind::BangAx: {
        if (g[j][0]->kind != FKind::Quest) emit(StepKind::Exc, start);
        emit(StepKind::BangAx, start);
        break;
      }
      case StepKind::One: emit(StepKind::One, start); break;
      case StepKind::Bot: emit(StepKind::Bot, start); break;
      case StepKind::Weak: emit(StepKind::Weak, start); break;
      case StepKind::Tensor:
      case StepKind::Par:
      case StepKind::Der:
      case StepKind::Contr:
        emit(mv.kind, start + pos_order[mv.pos]);
        break;
      case StepKind::Box: {
        int at = pos_order[mv.pos];
        for (int t = at; t + 1 < m; ++t) emit(StepKind::Exc, start + t);
        emit(StepKind::Box, start + m - 1);
        break;
      }
      case StepKind::Mix: {
        std::vector<char> take(m, 0);
        for (int x : mv.left) take[pos_order[x]] = 1;
        int lcount = static_cast<int>(mv.left.size());
        int front = 0;
        for (int c = 0; c < lcount; ++c) {
          int at = -1;
          for (int t = front; t < m; ++t)
            if (take[t]) {
              at = t;
              break;
            }
          for (int t = at; t > front; --t) {
            emit(StepKind::Exc, start + t - 1);
            std::swap(take[t], take[t - 1]);
          }
          ++front;
        }
        emit(StepKind::Mix, start + lcount - 1);
        break;
      }
      default: throw Error("bad abstract move in concretize");
    }
  }
  for (const auto& comp : g)
    if (!comp.empty()) throw Error("concretize: scheduling did not empty the list");
  return nu;
}

}  // namespace

std::optional<Scheduling> find_cut_free_scheduling(const TypeList& source, bool allow_contr,
                                                   int budget, long* explored) {
  CanonState st = canonize(source);
  std::vector<AMove> path;
  if (allow_contr && budget >= 0) {
    // iterative deepening so that found witnesses have minimal length
    for (int d = 0; d <= budget; ++d) {
      InhabitCtx ctx{allow_contr};
      path.clear();
      if (inhabit_dfs(ctx, st, d, path)) {
        if (explored) *explored += ctx.explored;
        return concretize(source, path);
      }
      if (explored) *explored += ctx.explored;
    }
    return std::nullopt;
  }
  InhabitCtx ctx{allow_contr};
  if (!inhabit_dfs(ctx, st, budget < 0 ? -1 : budget, path)) {
    if (explored) *explored += ctx.explored;
    return std::nullopt;
  }
  if (explored) *explored += ctx.explored;
  return concretize(source, path);
}

std::optional<InhabitResult> inhabit_p1(const std::vector<FormulaPtr>& gamma, int budget,
                                        long* explored) {
  TypeList source{gamma};
  long n = 0;
  auto nu = find_cut_free_scheduling(source, true, budget, &n);
  if (explored) *explored = n;
  if (!nu) return std::nullopt;
  InhabitResult res;
  res.witness = std::move(*nu);
  res.structure = build(res.witness, source);
  res.states_explored = n;
  return res;
}

std::optional<InhabitResult> inhabit_p2(const std::vector<FormulaPtr>& gamma, long* explored) {
  TypeList source{gamma};
  long n = 0;
  auto nu = find_cut_free_scheduling(source, false, -1, &n);
  if (explored) *explored = n;
  if (!nu) return std::nullopt;
  InhabitResult res;
  res.witness = std::move(*nu);
  res.structure = build(res.witness, source);
  res.states_explored = n;
  return res;
}

}  // namespace mellglue
