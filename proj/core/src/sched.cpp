#include "mellglue/sched.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace mellglue {

namespace {

const std::pair<std::string_view, StepKind> kStepNames[] = {
    {"exc", StepKind::Exc},   {"mix", StepKind::Mix},   {"ax", StepKind::Ax},
    {"bax", StepKind::BangAx}, {"cut", StepKind::Cut},  {"one", StepKind::One},
    {"bot", StepKind::Bot},   {"tensor", StepKind::Tensor}, {"par", StepKind::Par},
    {"contr", StepKind::Contr}, {"der", StepKind::Der}, {"weak", StepKind::Weak},
    {"box", StepKind::Box}};

std::string_view step_name(StepKind k) {
  for (auto& [n, kk] : kStepNames)
    if (kk == k) return n;
  return "?";
}

}  // namespace

std::string to_string(const Step& s) {
  std::string out(step_name(s.kind));
  out += "_" + std::to_string(s.index);
  if (s.kind == StepKind::Cut && s.cut_formula) out += ":" + to_string(s.cut_formula);
  return out;
}

std::string to_string(const Scheduling& nu) {
  std::string out;
  for (size_t i = 0; i < nu.size(); ++i) {
    if (i) out += " ";
    out += to_string(nu[i]);
  }
  return out;
}

Scheduling parse_scheduling(std::string_view text) {
  Scheduling nu;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    size_t us = tok.rfind('_');
    if (us == std::string::npos) throw Error("bad scheduling token: " + tok);
    std::string name = tok.substr(0, us);
    std::string rest = tok.substr(us + 1);
    std::string formula;
    if (size_t colon = rest.find(':'); colon != std::string::npos) {
      formula = rest.substr(colon + 1);
      rest = rest.substr(0, colon);
    }
    Step s;
    bool found = false;
    for (auto& [n, k] : kStepNames)
      if (n == name) {
        s.kind = k;
        found = true;
      }
    if (!found) throw Error("unknown step kind: " + name);
    try {
      s.index = std::stoi(rest);
    } catch (...) {
      throw Error("bad step index in token: " + tok);
    }
    if (s.index < 1) throw Error("step index must be positive: " + tok);
    if (!formula.empty()) {
      if (s.kind != StepKind::Cut) throw Error("only cut steps carry a formula: " + tok);
      s.cut_formula = parse_formula(formula);
    }
    nu.push_back(std::move(s));
  }
  return nu;
}

namespace {

// Flattening positions covered by each component: [start, end] 1-based,
// end < start for empty components.
std::vector<std::pair<int, int>> spans(const TypeList& g) {
  std::vector<std::pair<int, int>> out;
  int pos = 0;
  for (const auto& comp : g) {
    out.push_back({pos + 1, pos + static_cast<int>(comp.size())});
    pos += static_cast<int>(comp.size());
  }
  return out;
}

// Component a cut step appends to: the span run ending at index-1, the
// nonempty candidate preferred.
int cut_component(const TypeList& g, int i) {
  auto sp = spans(g);
  int chosen = -1;
  for (size_t k = 0; k < g.size(); ++k) {
    if (sp[k].second == i - 1) {
      if (!g[k].empty()) return static_cast<int>(k);
      if (chosen < 0) chosen = static_cast<int>(k);
    }
  }
  return chosen;
}

}  // namespace

std::optional<TypeList> try_step_type(const TypeList& g, const Step& s) {
  auto flat = flatten(g);
  int n = static_cast<int>(flat.size());
  int i = s.index;
  auto comp_of = [&](int pos) { return position_component(g, pos).first - 1; };

  switch (s.kind) {
    case StepKind::Exc: {
      if (i < 1 || i + 1 > n) return std::nullopt;
      int k = comp_of(i);
      if (comp_of(i + 1) != k) return std::nullopt;
      TypeList out = g;
      auto [k1, off] = position_component(g, i);
      std::swap(out[k1 - 1][off - 1], out[k1 - 1][off]);
      return out;
    }
    case StepKind::Mix: {
      if (i < 1 || i + 1 > n) return std::nullopt;
      int k = comp_of(i);
      if (comp_of(i + 1) != k) return std::nullopt;
      auto [k1, off] = position_component(g, i);
      TypeList out;
      for (int j = 0; j < k; ++j) out.push_back(g[j]);
      out.push_back({g[k].begin(), g[k].begin() + off});
      out.push_back({g[k].begin() + off, g[k].end()});
      for (size_t j = k + 1; j < g.size(); ++j) out.push_back(g[j]);
      return out;
    }
    case StepKind::Ax: {
      if (i < 2 || i > n) return std::nullopt;
      int k = comp_of(i);
      if (comp_of(i - 1) != k || g[k].size() != 2) return std::nullopt;
      if (is_exponential(g[k][0]) || !formula_eq(g[k][0], dual(g[k][1]))) return std::nullopt;
      TypeList out = g;
      out[k].clear();
      return out;
    }
    case StepKind::BangAx: {
      if (i < 1 || i + 1 > n) return std::nullopt;
      int k = comp_of(i);
      if (comp_of(i + 1) != k || g[k].size() != 2) return std::nullopt;
      if (g[k][0]->kind != FKind::Quest || !formula_eq(g[k][0], dual(g[k][1])))
        return std::nullopt;
      TypeList out = g;
      out[k].clear();
      return out;
    }
    case StepKind::Cut: {
      if (!s.cut_formula) throw Error("cut step without formula cannot be typed");
      int k = cut_component(g, i);
      if (k < 0) return std::nullopt;
      TypeList out = g;
      out[k].push_back(s.cut_formula);
      out[k].push_back(dual(s.cut_formula));
      return out;
    }
    case StepKind::One:
    case StepKind::Bot:
    case StepKind::Weak: {
      if (i < 1 || i > n) return std::nullopt;
      int k = comp_of(i);
      if (g[k].size() != 1) return std::nullopt;
      const FormulaPtr& f = g[k][0];
      if (s.kind == StepKind::One && f->kind != FKind::One) return std::nullopt;
      if (s.kind == StepKind::Bot && f->kind != FKind::Bot) return std::nullopt;
      if (s.kind == StepKind::Weak && f->kind != FKind::Quest) return std::nullopt;
      TypeList out = g;
      out[k].clear();
      return out;
    }
    case StepKind::Tensor:
    case StepKind::Par: {
      if (i < 1 || i > n) return std::nullopt;
      FKind want = s.kind == StepKind::Tensor ? FKind::Tensor : FKind::Par;
      if (flat[i - 1]->kind != want) return std::nullopt;
      auto [k1, off] = position_component(g, i);
      TypeList out = g;
      auto& comp = out[k1 - 1];
      FormulaPtr a = flat[i - 1]->left, b = flat[i - 1]->right;
      comp[off - 1] = a;
      comp.insert(comp.begin() + off, b);
      return out;
    }
    case StepKind::Contr: {
      if (i < 1 || i > n || flat[i - 1]->kind != FKind::Quest) return std::nullopt;
      auto [k1, off] = position_component(g, i);
      TypeList out = g;
      out[k1 - 1].insert(out[k1 - 1].begin() + off, flat[i - 1]);
      return out;
    }
    case StepKind::Der: {
      if (i < 1 || i > n || flat[i - 1]->kind != FKind::Quest) return std::nullopt;
      auto [k1, off] = position_component(g, i);
      TypeList out = g;
      out[k1 - 1][off - 1] = flat[i - 1]->left;
      return out;
    }
    case StepKind::Box: {
      if (i < 1 || i > n || flat[i - 1]->kind != FKind::Bang) return std::nullopt;
      int k = comp_of(i);
      auto sp = spans(g);
      if (sp[k].second != i) return std::nullopt;  // last conclusion of its component
      for (size_t j = 0; j + 1 < g[k].size(); ++j)
        if (g[k][j]->kind != FKind::Quest) return std::nullopt;
      auto [k1, off] = position_component(g, i);
      TypeList out = g;
      out[k1 - 1][off - 1] = flat[i - 1]->left;
      return out;
    }
  }
  return std::nullopt;
}

TypeList step_type(const TypeList& g, const Step& s) {
  auto out = try_step_type(g, s);
  if (!out) throw Error("step " + to_string(s) + " does not apply to (" + to_string(g) + ")");
  return *out;
}

std::vector<TypeList> type_check(const TypeList& source, const Scheduling& nu) {
  std::vector<TypeList> chain{source};
  for (const auto& s : nu) chain.push_back(step_type(chain.back(), s));
  return chain;
}

namespace {

bool is_daimon_comp(const ProofStructure& ps) {
  return ps.m.cells() == 1 && ps.m.kind[0] == CellKind::Daimon;
}

QuasiProofStructure with_comp(const QuasiProofStructure& q, int k, ProofStructure ps) {
  QuasiProofStructure out = q;
  out.comps[k] = std::move(ps);
  return out;
}

QuasiProofStructure with_comp_split(const QuasiProofStructure& q, int k, ProofStructure a,
                                    ProofStructure b) {
  QuasiProofStructure out;
  for (int j = 0; j < static_cast<int>(q.comps.size()); ++j) {
    if (j == k) {
      out.comps.push_back(std::move(a));
      out.comps.push_back(std::move(b));
    } else {
      out.comps.push_back(q.comps[j]);
    }
  }
  return out;
}

// conclusion positions of component k relative to the whole tuple
int comp_start_position(const QuasiProofStructure& q, int k) {
  int pos = 0;
  for (int j = 0; j < k; ++j) pos += static_cast<int>(q.comps[j].conclusions.size());
  return pos + 1;
}

struct Located {
  int comp;
  int local;  // 0-based index into conclusions
  int flag;
};

std::optional<Located> locate(const QuasiProofStructure& q, int i) {
  if (i < 1 || i > conclusion_count(q)) return std::nullopt;
  int seen = 0;
  for (size_t k = 0; k < q.comps.size(); ++k) {
    int m = static_cast<int>(q.comps[k].conclusions.size());
    if (i <= seen + m)
      return Located{static_cast<int>(k), i - seen - 1, q.comps[k].conclusions[i - seen - 1]};
    seen += m;
  }
  return std::nullopt;
}

// ---- structural single-component rewrites ----------------------------------

// daimon with one output retyped / outputs inserted
ProofStructure daimon_retype(const ProofStructure& ps, int local, FormulaPtr t) {
  ProofStructure out = ps;
  int f = out.conclusions[local];
  out.m.type[f] = std::move(t);
  return out;
}

ProofStructure daimon_insert_outputs(const ProofStructure& ps, int local_after,
                                     const std::vector<FormulaPtr>& ts) {
  ProofStructure out = ps;
  std::vector<int> fresh;
  for (const auto& t : ts) fresh.push_back(out.m.add_flag(0, Orient::Out, t));
  out.conclusions.insert(out.conclusions.begin() + local_after + 1, fresh.begin(), fresh.end());
  return out;
}

// delete the cell owning conclusion `local`; the partners of its inputs
// become the new conclusions at that position, in input order
ProofStructure pop_cell(const ProofStructure& ps, int cell, int local) {
  std::vector<char> kill(ps.m.cells(), 0);
  kill[cell] = 1;
  std::vector<int> ins = ps.m.inputs[cell];
  RemovalResult r = remove_cells(ps, kill);
  r.ps.conclusions.clear();
  for (size_t j = 0; j < ps.conclusions.size(); ++j) {
    if (static_cast<int>(j) == local) {
      for (int f : ins) r.ps.conclusions.push_back(r.flag_map[ps.m.partner(f)]);
    } else {
      r.ps.conclusions.push_back(r.flag_map[ps.conclusions[j]]);
    }
  }
  return r.ps;
}

// ---- mix split --------------------------------------------------------------

// side of every cell for a split of component `ps` at global conclusion
// boundary: conclusions with local index < cut go left. A box subtree must
// move wholesale with its principal door, so all pieces touching it are
// unified; nullopt when some unified class has conclusions on both sides
// (the action would not yield a quasi-proof-structure). Classes without
// conclusions go left.
// connected pieces of the cell graph, unified across each root-child box
// subtree together with its principal door (a box moves wholesale)
std::vector<int> split_classes(const ProofStructure& ps) {
  std::vector<int> piece = cell_pieces(ps);
  int npieces = 0;
  for (int p : piece) npieces = std::max(npieces, p + 1);
  std::vector<int> parent(npieces);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  int root = ps.tree.root();
  std::vector<int> child_of(ps.tree.size(), -1);  // vertex -> root child above it
  for (int v = 0; v < ps.tree.size(); ++v) {
    int w = v;
    while (w != root && ps.tree.parent[w] != root) w = ps.tree.parent[w];
    child_of[v] = (w == root) ? -1 : w;
  }
  std::vector<int> principal_cell(ps.tree.size(), -1);
  for (int c = 0; c < ps.m.cells(); ++c) {
    if (ps.m.kind[c] != CellKind::Bang) continue;
    for (int f : ps.m.inputs[c]) {
      int src = ps.box_v[ps.m.flag_cell[ps.m.partner(f)]];
      if (ps.box_v[c] == root && ps.tree.parent[src] == root) principal_cell[src] = c;
    }
  }
  for (int c = 0; c < ps.m.cells(); ++c) {
    int ch = ps.box_v[c] == root ? -1 : child_of[ps.box_v[c]];
    if (ch >= 0 && principal_cell[ch] >= 0) parent[find(piece[c])] = find(piece[principal_cell[ch]]);
  }
  std::vector<int> out(ps.m.cells());
  for (int c = 0; c < ps.m.cells(); ++c) out[c] = find(piece[c]);
  return out;
}

std::optional<std::vector<char>> mix_sides(const ProofStructure& ps, int cut_local) {
  std::vector<int> cls = split_classes(ps);
  std::map<int, int> side;  // class -> 0 L, 1 R
  for (size_t j = 0; j < ps.conclusions.size(); ++j) {
    int c = cls[ps.m.flag_cell[ps.conclusions[j]]];
    int want = static_cast<int>(j) < cut_local ? 0 : 1;
    auto [it, fresh] = side.emplace(c, want);
    if (!fresh && it->second != want) return std::nullopt;
  }
  std::vector<char> out(ps.m.cells(), 0);
  for (int c = 0; c < ps.m.cells(); ++c) {
    auto it = side.find(cls[c]);
    out[c] = static_cast<char>(it == side.end() ? 0 : it->second);
  }
  return out;
}

// extract one side of a component; `ps` keeps cells with side[c] == keep
ProofStructure mix_extract(const ProofStructure& ps, const std::vector<char>& side, char keep,
                           int cut_local) {
  std::vector<char> kill(ps.m.cells(), 0);
  for (int c = 0; c < ps.m.cells(); ++c) kill[c] = side[c] != keep;
  RemovalResult r = remove_cells(ps, kill);
  // rebuild the tree: fresh root, subtrees whose cells stayed
  int root = ps.tree.root();
  std::vector<char> vertex_kept(ps.tree.size(), 0);
  for (int c = 0; c < ps.m.cells(); ++c)
    if (side[c] == keep) vertex_kept[ps.box_v[c]] = 1;
  // a kept vertex keeps its ancestors
  for (int v = 0; v < ps.tree.size(); ++v)
    if (vertex_kept[v])
      for (int w = v; w >= 0; w = ps.tree.parent[w]) vertex_kept[w] = 1;
  vertex_kept[root] = 1;
  std::vector<int> vmap(ps.tree.size(), -1);
  Tree t;
  for (int v = 0; v < ps.tree.size(); ++v)
    if (vertex_kept[v]) {
      vmap[v] = t.size();
      t.parent.push_back(-2);
    }
  for (int v = 0; v < ps.tree.size(); ++v)
    if (vertex_kept[v]) t.parent[vmap[v]] = ps.tree.parent[v] < 0 ? -1 : vmap[ps.tree.parent[v]];
  r.ps.tree = std::move(t);
  std::vector<int> bv;
  for (int c = 0; c < ps.m.cells(); ++c)
    if (side[c] == keep) bv.push_back(vmap[ps.box_v[c]]);
  r.ps.box_v = std::move(bv);
  r.ps.conclusions.clear();
  for (size_t j = 0; j < ps.conclusions.size(); ++j) {
    bool left = static_cast<int>(j) < cut_local;
    if ((keep == 0) == left) r.ps.conclusions.push_back(r.flag_map[ps.conclusions[j]]);
  }
  return r.ps;
}

// ---- box helpers ------------------------------------------------------------

struct BoxShape {
  int bang_cell;
  std::vector<int> border_cells;  // cells at the other conclusions, in order
};

// component-level pattern common to all box variants: the last conclusion
// is the output of a !-cell, every other conclusion is the output of a
// ?-cell.
std::optional<BoxShape> box_shape(const ProofStructure& ps) {
  if (ps.conclusions.empty()) return std::nullopt;
  BoxShape sh;
  int last = ps.conclusions.back();
  sh.bang_cell = ps.m.flag_cell[last];
  if (ps.m.kind[sh.bang_cell] != CellKind::Bang) return std::nullopt;
  for (size_t j = 0; j + 1 < ps.conclusions.size(); ++j) {
    int c = ps.m.flag_cell[ps.conclusions[j]];
    if (ps.m.kind[c] != CellKind::Quest) return std::nullopt;
    sh.border_cells.push_back(c);
  }
  return sh;
}

}  // namespace

// ---- forward actions --------------------------------------------------------

namespace {

// shared by mell_successors and dill_successors; `mell` switches the box
// rule and the dereliction depth condition
void structural_successors(const QuasiProofStructure& q, const Step& s, bool mell,
                           std::vector<std::pair<Choice, std::vector<QuasiProofStructure>>>& out) {
  int i = s.index;
  auto loc = locate(q, i);

  switch (s.kind) {
    case StepKind::Exc: {
      if (!loc) return;
      auto loc2 = locate(q, i + 1);
      if (!loc2 || loc2->comp != loc->comp) return;
      ProofStructure ps = q.comps[loc->comp];
      std::swap(ps.conclusions[loc->local], ps.conclusions[loc2->local]);
      Choice ch;
      ch.comp = loc->comp;
      out.push_back({ch, {with_comp(q, loc->comp, std::move(ps))}});
      return;
    }
    case StepKind::Mix: {
      if (!loc) return;
      auto loc2 = locate(q, i + 1);
      if (!loc2 || loc2->comp != loc->comp) return;
      const ProofStructure& ps = q.comps[loc->comp];
      Choice ch;
      ch.comp = loc->comp;
      if (!mell && is_daimon_comp(ps)) {
        std::vector<FormulaPtr> lt, rt;
        for (size_t j = 0; j < ps.conclusions.size(); ++j)
          (static_cast<int>(j) <= loc->local ? lt : rt).push_back(ps.m.type[ps.conclusions[j]]);
        ch.daimoned = true;
        out.push_back(
            {ch, {with_comp_split(q, loc->comp, daimon_ps(lt), daimon_ps(rt))}});
        return;
      }
      auto side = mix_sides(ps, loc->local + 1);
      if (!side) return;
      out.push_back({ch, {with_comp_split(q, loc->comp, mix_extract(ps, *side, 0, loc->local + 1),
                                          mix_extract(ps, *side, 1, loc->local + 1))}});
      return;
    }
    case StepKind::Ax: {
      if (!loc || loc->local != 1) return;  // conclusions i-1, i are the whole component
      const ProofStructure& ps = q.comps[loc->comp];
      if (ps.conclusions.size() != 2) return;
      FormulaPtr a = ps.m.type[ps.conclusions[0]], b = ps.m.type[ps.conclusions[1]];
      if (is_exponential(a) || !formula_eq(a, dual(b))) return;
      Choice ch;
      ch.comp = loc->comp;
      if (!mell && is_daimon_comp(ps)) {
        ch.daimoned = true;
        out.push_back({ch, {with_comp(q, loc->comp, empty_ps())}});
        return;
      }
      if (ps.m.cells() == 1 && ps.m.kind[0] == CellKind::Ax)
        out.push_back({ch, {with_comp(q, loc->comp, empty_ps())}});
      return;
    }
    case StepKind::BangAx: {
      if (!loc || loc->local != 0) return;
      const ProofStructure& ps = q.comps[loc->comp];
      if (ps.conclusions.size() != 2) return;
      FormulaPtr a = ps.m.type[ps.conclusions[0]], b = ps.m.type[ps.conclusions[1]];
      if (a->kind != FKind::Quest || !formula_eq(a, dual(b))) return;
      Choice ch;
      ch.comp = loc->comp;
      if (!mell && is_daimon_comp(ps)) {
        ch.daimoned = true;
        out.push_back({ch, {with_comp(q, loc->comp, empty_ps())}});
        return;
      }
      if (ps.m.cells() != 2) return;
      int qc = ps.m.flag_cell[ps.conclusions[0]], bc = ps.m.flag_cell[ps.conclusions[1]];
      if (ps.m.kind[qc] != CellKind::Quest || ps.m.kind[bc] != CellKind::BangAx) return;
      if (ps.m.inputs[qc].size() != 1 ||
          ps.m.partner(ps.m.inputs[qc][0]) != ps.m.outputs[bc][1])
        return;
      out.push_back({ch, {with_comp(q, loc->comp, empty_ps())}});
      return;
    }
    case StepKind::One:
    case StepKind::Bot:
    case StepKind::Weak: {
      if (!loc || loc->local != 0) return;
      const ProofStructure& ps = q.comps[loc->comp];
      if (ps.conclusions.size() != 1) return;
      FormulaPtr t = ps.m.type[ps.conclusions[0]];
      if (s.kind == StepKind::One && t->kind != FKind::One) return;
      if (s.kind == StepKind::Bot && t->kind != FKind::Bot) return;
      if (s.kind == StepKind::Weak && t->kind != FKind::Quest) return;
      Choice ch;
      ch.comp = loc->comp;
      if (!mell && is_daimon_comp(ps)) {
        ch.daimoned = true;
        out.push_back({ch, {with_comp(q, loc->comp, empty_ps())}});
        return;
      }
      if (ps.m.cells() != 1) return;
      CellKind want = s.kind == StepKind::One   ? CellKind::One
                      : s.kind == StepKind::Bot ? CellKind::Bot
                                                : CellKind::Quest;
      if (ps.m.kind[0] != want) return;
      if (want == CellKind::Quest && !ps.m.inputs[0].empty()) return;
      out.push_back({ch, {with_comp(q, loc->comp, empty_ps())}});
      return;
    }
    case StepKind::Tensor:
    case StepKind::Par: {
      if (!loc) return;
      const ProofStructure& ps = q.comps[loc->comp];
      FormulaPtr t = ps.m.type[loc->flag];
      FKind want = s.kind == StepKind::Tensor ? FKind::Tensor : FKind::Par;
      if (t->kind != want) return;
      Choice ch;
      ch.comp = loc->comp;
      if (!mell && is_daimon_comp(ps)) {
        ch.daimoned = true;
        ProofStructure d = daimon_retype(ps, loc->local, t->left);
        d = daimon_insert_outputs(d, loc->local, {t->right});
        out.push_back({ch, {with_comp(q, loc->comp, std::move(d))}});
        return;
      }
      int cell = ps.m.flag_cell[loc->flag];
      CellKind wantc = s.kind == StepKind::Tensor ? CellKind::Tensor : CellKind::Par;
      if (ps.m.kind[cell] != wantc) return;
      out.push_back({ch, {with_comp(q, loc->comp, pop_cell(ps, cell, loc->local))}});
      return;
    }
    case StepKind::Contr: {
      if (!loc) return;
      const ProofStructure& ps = q.comps[loc->comp];
      FormulaPtr t = ps.m.type[loc->flag];
      if (t->kind != FKind::Quest) return;
      if (!mell && is_daimon_comp(ps)) {
        Choice ch;
        ch.comp = loc->comp;
        ch.daimoned = true;
        out.push_back(
            {ch, {with_comp(q, loc->comp, daimon_insert_outputs(ps, loc->local, {t}))}});
        return;
      }
      int cell = ps.m.flag_cell[loc->flag];
      if (ps.m.kind[cell] != CellKind::Quest) return;
      const auto& ins = ps.m.inputs[cell];
      int n = static_cast<int>(ins.size());
      if (n > 16) throw Error("contraction with more than 16 inputs");
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        ProofStructure next = ps;
        int u2 = next.m.add_cell(CellKind::Quest);
        next.box_v.push_back(next.tree.root());
        // move the complement of the mask to the fresh cell
        std::vector<int> keep, move;
        for (int j = 0; j < n; ++j) ((mask >> j) & 1u ? keep : move).push_back(ins[j]);
        next.m.inputs[cell] = keep;
        for (int f : move) {
          next.m.flag_cell[f] = u2;
          next.m.inputs[u2].push_back(f);
        }
        int tail = next.m.add_flag(u2, Orient::Out, t);
        next.conclusions.insert(next.conclusions.begin() + loc->local + 1, tail);
        Choice ch;
        ch.comp = loc->comp;
        ch.left_inputs = keep;
        ch.nullary = keep.empty() || move.empty();
        out.push_back({ch, {with_comp(q, loc->comp, std::move(next))}});
      }
      return;
    }
    case StepKind::Der: {
      if (!loc) return;
      const ProofStructure& ps = q.comps[loc->comp];
      FormulaPtr t = ps.m.type[loc->flag];
      if (t->kind != FKind::Quest) return;
      Choice ch;
      ch.comp = loc->comp;
      if (!mell && is_daimon_comp(ps)) {
        ch.daimoned = true;
        out.push_back({ch, {with_comp(q, loc->comp, daimon_retype(ps, loc->local, t->left))}});
        return;
      }
      int cell = ps.m.flag_cell[loc->flag];
      if (ps.m.kind[cell] != CellKind::Quest || ps.m.inputs[cell].size() != 1) return;
      int src = ps.m.partner(ps.m.inputs[cell][0]);
      int src_cell = ps.m.flag_cell[src];
      // the cell must not shift a level in the box-forest
      if (ps.box_v[src_cell] != ps.box_v[cell]) return;
      // and must not orphan a bangax
      if (ps.m.kind[src_cell] == CellKind::BangAx && src == ps.m.outputs[src_cell][1]) return;
      out.push_back({ch, {with_comp(q, loc->comp, pop_cell(ps, cell, loc->local))}});
      return;
    }
    case StepKind::Box: {
      if (!loc) return;
      const ProofStructure& ps = q.comps[loc->comp];
      if (loc->local != static_cast<int>(ps.conclusions.size()) - 1) return;
      FormulaPtr t = ps.m.type[loc->flag];
      if (t->kind != FKind::Bang) return;
      for (size_t j = 0; j + 1 < ps.conclusions.size(); ++j)
        if (ps.m.type[ps.conclusions[j]]->kind != FKind::Quest) return;
      Choice ch;
      ch.comp = loc->comp;
      if (!mell && is_daimon_comp(ps)) {
        ch.daimoned = true;
        out.push_back({ch, {with_comp(q, loc->comp, daimon_retype(ps, loc->local, t->left))}});
        return;
      }
      auto sh = box_shape(ps);
      if (!sh) return;
      const Module& m = ps.m;
      int bang = sh->bang_cell;

      if (mell) {
        if (m.inputs[bang].size() != 1) return;
        int root = ps.tree.root();
        if (ps.box_v[bang] != root) return;
        int src_cell = m.flag_cell[m.partner(m.inputs[bang][0])];
        int v = ps.box_v[src_cell];
        if (ps.tree.parent[v] != root) return;  // principal door must cross one edge
        // the box and its border must be alone in the component
        std::vector<char> in_border(m.cells(), 0);
        for (int c : sh->border_cells) in_border[c] = 1;
        for (int c = 0; c < m.cells(); ++c) {
          if (c == bang || in_border[c]) continue;
          if (!ps.tree.is_ancestor_or_self(v, ps.box_v[c])) return;
        }
        // delete the !-cell, merge the root into v
        std::vector<char> kill(m.cells(), 0);
        kill[bang] = 1;
        int in_flag = m.inputs[bang][0];
        RemovalResult r = remove_cells(ps, kill);
        std::vector<int> vmap(ps.tree.size(), -1);
        Tree nt;
        for (int w = 0; w < ps.tree.size(); ++w) {
          if (w == root) continue;
          vmap[w] = nt.size();
          nt.parent.push_back(-2);
        }
        for (int w = 0; w < ps.tree.size(); ++w) {
          if (w == root) continue;
          int p = ps.tree.parent[w];
          nt.parent[vmap[w]] = (p == root) ? -1 : vmap[p];
        }
        r.ps.tree = std::move(nt);
        for (int c = 0; c < m.cells(); ++c) {
          if (kill[c]) continue;
          int w = ps.box_v[c] == root ? v : ps.box_v[c];
          r.ps.box_v[r.cell_map[c]] = vmap[w];
        }
        r.ps.conclusions.clear();
        for (size_t j = 0; j + 1 < ps.conclusions.size(); ++j)
          r.ps.conclusions.push_back(r.flag_map[ps.conclusions[j]]);
        r.ps.conclusions.push_back(r.flag_map[m.partner(in_flag)]);
        out.push_back({ch, {with_comp(q, loc->comp, r.ps)}});
        return;
      }

      // DiLL0: empty box
      if (m.inputs[bang].empty()) {
        for (int c = 0; c < m.cells(); ++c) {
          if (c == bang) continue;
          if (m.kind[c] != CellKind::Quest || !m.inputs[c].empty()) return;
        }
        std::vector<FormulaPtr> types;
        for (size_t j = 0; j + 1 < ps.conclusions.size(); ++j)
          types.push_back(m.type[ps.conclusions[j]]);
        types.push_back(t->left);
        ch.empty_box = true;
        out.push_back({ch, {with_comp(q, loc->comp, daimon_ps(types))}});
        return;
      }

      // DiLL0: non-empty box; split the content into groups, one per !-input
      std::vector<char> removed(m.cells(), 0);
      removed[bang] = 1;
      for (int c : sh->border_cells) removed[c] = 1;
      // pieces of the content
      Graph g;
      g.endpoint = m.flag_cell;
      g.involution.assign(m.flags(), 0);
      for (int f = 0; f < m.flags(); ++f) {
        int jf = m.involution[f];
        g.involution[f] =
            (jf != f && !removed[m.flag_cell[f]] && !removed[m.flag_cell[jf]]) ? jf : f;
      }
      g.vertices = m.cells();
      std::vector<int> piece = connected_components(g);
      int npieces = 0;
      for (int c = 0; c < m.cells(); ++c)
        if (!removed[c]) npieces = std::max(npieces, piece[c] + 1);
      std::vector<int> anchor_of_piece(npieces, -1);
      int nanchors = 0;
      std::vector<int> anchor_piece;  // group -> piece
      for (size_t j = 0; j < m.inputs[bang].size(); ++j) {
        int pc = piece[m.flag_cell[m.partner(m.inputs[bang][j])]];
        if (anchor_of_piece[pc] != -1) return;  // two doors in one piece
        anchor_of_piece[pc] = nanchors++;
        anchor_piece.push_back(pc);
      }
      std::vector<int> floats;
      for (int p = 0; p < npieces; ++p) {
        bool used = false;
        for (int c = 0; c < m.cells(); ++c)
          if (!removed[c] && piece[c] == p) used = true;
        if (used && anchor_of_piece[p] == -1) floats.push_back(p);
      }
      int fcount = static_cast<int>(floats.size());
      long combos = 1;
      for (int j = 0; j < fcount; ++j) {
        combos *= nanchors;
        if (combos > 4096) throw Error("too many floating-piece distributions");
      }
      for (long code = 0; code < combos; ++code) {
        std::vector<int> assign(npieces, -1);
        for (int g2 = 0; g2 < nanchors; ++g2) assign[anchor_piece[g2]] = g2;
        long c2 = code;
        Choice chh = ch;
        for (int j = 0; j < fcount; ++j) {
          assign[floats[j]] = static_cast<int>(c2 % nanchors);
          chh.float_assign.push_back(static_cast<int>(c2 % nanchors));
          c2 /= nanchors;
        }
        std::vector<QuasiProofStructure> results;
        for (int g2 = 0; g2 < nanchors; ++g2) {
          std::vector<char> kill(m.cells(), 1);
          for (int c = 0; c < m.cells(); ++c)
            if (!removed[c] && assign[piece[c]] == g2) kill[c] = 0;
          RemovalResult r = remove_cells(ps, kill);
          ProofStructure part = r.ps;
          part.tree = bare_root();
          part.box_v.assign(part.m.cells(), 0);
          part.conclusions.clear();
          // fresh border ?-cells in conclusion order
          for (size_t j = 0; j + 1 < ps.conclusions.size(); ++j) {
            int b = sh->border_cells[j];
            int nq = part.m.add_cell(CellKind::Quest);
            part.box_v.push_back(0);
            for (int f : m.inputs[b]) {
              int pf = r.flag_map[m.partner(f)];
              if (pf < 0) continue;
              int nf = part.m.add_flag(nq, Orient::In, m.type[f]);
              part.m.glue(nf, pf);
            }
            part.conclusions.push_back(
                part.m.add_flag(nq, Orient::Out, m.type[ps.conclusions[j]]));
          }
          int door = r.flag_map[m.partner(m.inputs[bang][g2])];
          part.conclusions.push_back(door);
          results.push_back(with_comp(q, loc->comp, std::move(part)));
        }
        out.push_back({chh, std::move(results)});
      }
      return;
    }
    case StepKind::Cut: {
      // candidates: components whose conclusion span ends at index-1
      TypeList ty = type_of(q);
      for (int k = 0; k < static_cast<int>(q.comps.size()); ++k) {
        int end = comp_start_position(q, k) + static_cast<int>(q.comps[k].conclusions.size()) - 1;
        if (end != i - 1) continue;
        const ProofStructure& ps = q.comps[k];
        if (!mell && is_daimon_comp(ps)) {
          if (!s.cut_formula) continue;  // formula needed to extend a daimon
          Choice ch;
          ch.comp = k;
          ch.daimoned = true;
          out.push_back({ch, {with_comp(q, k,
                                        daimon_insert_outputs(
                                            ps, static_cast<int>(ps.conclusions.size()) - 1,
                                            {s.cut_formula, dual(s.cut_formula)}))}});
          continue;
        }
        int root = ps.tree.root();
        for (int c = 0; c < ps.m.cells(); ++c) {
          if (ps.m.kind[c] != CellKind::Cut || ps.box_v[c] != root) continue;
          for (int swap = 0; swap < 2; ++swap) {
            int f0 = ps.m.inputs[c][swap], f1 = ps.m.inputs[c][1 - swap];
            if (s.cut_formula && !formula_eq(ps.m.type[f0], s.cut_formula)) continue;
            std::vector<char> kill(ps.m.cells(), 0);
            kill[c] = 1;
            RemovalResult r = remove_cells(ps, kill);
            ProofStructure next = r.ps;
            next.conclusions.clear();
            for (int f : ps.conclusions) next.conclusions.push_back(r.flag_map[f]);
            next.conclusions.push_back(r.flag_map[ps.m.partner(f0)]);
            next.conclusions.push_back(r.flag_map[ps.m.partner(f1)]);
            Choice ch;
            ch.comp = k;
            ch.cut_cell = c;
            ch.cut_swap = swap != 0;
            out.push_back({ch, {with_comp(q, k, std::move(next))}});
          }
        }
      }
      return;
    }
  }
}

}  // namespace

std::vector<std::pair<Choice, QuasiProofStructure>> mell_successors(const QuasiProofStructure& r,
                                                                    const Step& s) {
  std::vector<std::pair<Choice, std::vector<QuasiProofStructure>>> raw;
  structural_successors(r, s, true, raw);
  std::vector<std::pair<Choice, QuasiProofStructure>> out;
  for (auto& [ch, v] : raw) {
    if (v.size() != 1) throw Error("internal: MELL action produced a set");
    out.push_back({ch, std::move(v.front())});
  }
  return out;
}

std::vector<std::pair<Choice, std::vector<QuasiProofStructure>>> dill_successors(
    const QuasiProofStructure& rho, const Step& s) {
  std::vector<std::pair<Choice, std::vector<QuasiProofStructure>>> out;
  structural_successors(rho, s, false, out);
  return out;
}

namespace {

// a compact exact serialization, used as cache key for per-element
// successor computations (the same element recurs across many set states)
std::string element_key(const QuasiProofStructure& q) {
  std::ostringstream os;
  for (const auto& ps : q.comps) {
    os << '[';
    for (int c = 0; c < ps.m.cells(); ++c) {
      os << static_cast<int>(ps.m.kind[c]) << '@' << ps.box_v[c] << '(';
      for (int f : ps.m.inputs[c]) os << f << ',' << ps.m.partner(f) << ';';
      os << '/';
      for (int f : ps.m.outputs[c]) os << f << ',' << ps.m.partner(f) << ';';
      os << ')';
    }
    os << 'T';
    for (int p : ps.tree.parent) os << p << ',';
    os << 'K';
    for (int f : ps.conclusions) os << f << ':' << to_string(ps.m.type[f]) << ',';
    os << ']';
  }
  return os.str();
}

const std::vector<std::pair<Choice, std::vector<QuasiProofStructure>>>& cached_dill_successors(
    const QuasiProofStructure& e, const Step& s) {
  using Value = std::vector<std::pair<Choice, std::vector<QuasiProofStructure>>>;
  static thread_local std::map<std::string, Value> cache;
  std::string key = element_key(e) + "|" + to_string(s);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() > 100000) cache.clear();
  Value opts = dill_successors(e, s);
  // drop options whose results and classification coincide with an earlier
  // one up to isomorphism; they contribute identical set transitions
  Value pruned;
  std::vector<std::string> keys;
  for (auto& opt : opts) {
    std::string k;
    k += opt.first.daimoned ? 'd' : (opt.first.nullary ? 'n' : '.');
    std::vector<std::string> certs;
    for (const auto& r : opt.second) certs.push_back(certificate(r));
    std::sort(certs.begin(), certs.end());
    for (auto& c : certs) k += c + ";";
    bool dup = false;
    for (const auto& seen : keys) dup = dup || seen == k;
    if (!dup) {
      keys.push_back(std::move(k));
      pruned.push_back(std::move(opt));
    }
  }
  return cache.emplace(std::move(key), std::move(pruned)).first->second;
}

}  // namespace

std::vector<SetTransition> set_successors_detailed(const NetSet& pi, const Step& s) {
  if (pi.elems.empty()) {
    auto target = try_step_type(pi.type, s);
    if (!target) return {};
    SetTransition t;
    t.result.type = *target;
    return {t};
  }
  std::vector<std::vector<std::pair<Choice, std::vector<QuasiProofStructure>>>> options;
  for (const auto& e : pi.elems) {
    auto opts = cached_dill_successors(e, s);
    if (opts.empty()) return {};
    options.push_back(opts);
  }
  long combos = 1;
  for (const auto& per : options) {
    combos *= static_cast<long>(per.size());
    if (combos > 100000) throw Error("set action has too many per-element choices");
  }
  std::vector<SetTransition> results;
  std::set<std::string> seen;
  for (long code = 0; code < combos; ++code) {
    long c = code;
    std::vector<QuasiProofStructure> pool;
    std::vector<Choice> choices;
    for (const auto& per : options) {
      const auto& chosen = per[c % per.size()];
      c /= static_cast<long>(per.size());
      choices.push_back(chosen.first);
      pool.insert(pool.end(), chosen.second.begin(), chosen.second.end());
    }
    SetTransition t;
    t.result = make_net_set(std::move(pool));
    t.choices = std::move(choices);
    std::string key;
    for (const auto& e : t.result.elems) key += certificate(e) + ";";
    // keep one representative per (result, action classification) pair
    for (const auto& ch : t.choices)
      key += ch.daimoned ? 'd' : (ch.nullary ? 'n' : '.');
    if (seen.insert(key).second) results.push_back(std::move(t));
  }
  return results;
}

std::vector<NetSet> set_successors(const NetSet& pi, const Step& s) {
  std::vector<NetSet> out;
  for (auto& t : set_successors_detailed(pi, s)) out.push_back(std::move(t.result));
  return out;
}

// ---- reverse action ---------------------------------------------------------

namespace {

ProofStructure merge_components(const ProofStructure& a, const ProofStructure& b) {
  ProofStructure out;
  // tree: fresh root 0, then non-root vertices of a, then of b
  out.tree.parent.push_back(-1);
  std::vector<int> va(a.tree.size(), -1), vb(b.tree.size(), -1);
  auto graft = [&](const Tree& t, std::vector<int>& vmap) {
    for (int v = 0; v < t.size(); ++v) {
      if (t.parent[v] < 0) {
        vmap[v] = 0;
        continue;
      }
      vmap[v] = out.tree.size();
      out.tree.parent.push_back(-2);
    }
    for (int v = 0; v < t.size(); ++v) {
      if (t.parent[v] < 0) continue;
      out.tree.parent[vmap[v]] = vmap[t.parent[v]];
    }
  };
  graft(a.tree, va);
  graft(b.tree, vb);
  auto copy_module = [&](const ProofStructure& src, const std::vector<int>& vmap) {
    std::vector<int> cmap(src.m.cells(), -1), fmap(src.m.flags(), -1);
    for (int c = 0; c < src.m.cells(); ++c) {
      cmap[c] = out.m.add_cell(src.m.kind[c]);
      out.box_v.push_back(vmap[src.box_v[c]]);
    }
    for (int c = 0; c < src.m.cells(); ++c) {
      for (int f : src.m.inputs[c]) fmap[f] = out.m.add_flag(cmap[c], Orient::In, src.m.type[f]);
      for (int f : src.m.outputs[c]) fmap[f] = out.m.add_flag(cmap[c], Orient::Out, src.m.type[f]);
    }
    for (int f = 0; f < src.m.flags(); ++f) {
      int jf = src.m.partner(f);
      if (jf > f) out.m.glue(fmap[f], fmap[jf]);
    }
    for (int f : src.conclusions) out.conclusions.push_back(fmap[f]);
  };
  copy_module(a, va);
  copy_module(b, vb);
  return out;
}

}  // namespace

QuasiProofStructure mell_unapply(const QuasiProofStructure& target, const Step& s0,
                                 const TypeList& source_type) {
  Step s = s0;
  int i = s.index;
  auto mismatch = [&](const std::string& why) -> Error {
    return Error("cannot unapply " + to_string(s) + ": " + why);
  };
  TypeList tty = type_of(target);
  if (s.kind == StepKind::Cut && !s.cut_formula) {
    // a bare cut token: the pair is read off the target
    auto flat = flatten(tty);
    if (i < 1 || i > static_cast<int>(flat.size())) throw mismatch("cut position out of range");
    s.cut_formula = flat[i - 1];
  }
  if (auto check = try_step_type(source_type, s); !check || !type_list_eq(*check, tty))
    throw mismatch("types do not line up");

  switch (s.kind) {
    case StepKind::Exc: {
      auto loc = locate(target, i), loc2 = locate(target, i + 1);
      ProofStructure ps = target.comps[loc->comp];
      std::swap(ps.conclusions[loc->local], ps.conclusions[loc2->local]);
      return with_comp(target, loc->comp, std::move(ps));
    }
    case StepKind::Mix: {
      auto loc = locate(target, i);
      int k = loc->comp;
      if (loc->local != static_cast<int>(target.comps[k].conclusions.size()) - 1)
        throw mismatch("mix target shape");
      QuasiProofStructure out;
      for (int j = 0; j < static_cast<int>(target.comps.size()); ++j) {
        if (j == k) {
          out.comps.push_back(merge_components(target.comps[k], target.comps[k + 1]));
          ++j;  // skip k+1
          continue;
        }
        out.comps.push_back(target.comps[j]);
      }
      return out;
    }
    case StepKind::Ax:
    case StepKind::BangAx:
    case StepKind::One:
    case StepKind::Bot:
    case StepKind::Weak: {
      int first = s.kind == StepKind::Ax ? i - 1 : i;
      auto [k1, off] = position_component(source_type, first);
      int k = k1 - 1;
      const ProofStructure& ps = target.comps[k];
      if (ps.m.cells() != 0 || !ps.conclusions.empty())
        throw mismatch("target component is not empty");
      ProofStructure fresh = empty_ps();
      const auto& src_comp = source_type[k];
      switch (s.kind) {
        case StepKind::Ax: {
          int c = fresh.m.add_cell(CellKind::Ax);
          fresh.box_v.push_back(0);
          fresh.conclusions.push_back(fresh.m.add_flag(c, Orient::Out, src_comp[0]));
          fresh.conclusions.push_back(fresh.m.add_flag(c, Orient::Out, src_comp[1]));
          break;
        }
        case StepKind::BangAx: {
          int bc = fresh.m.add_cell(CellKind::BangAx);
          fresh.box_v.push_back(0);
          int qc = fresh.m.add_cell(CellKind::Quest);
          fresh.box_v.push_back(0);
          FormulaPtr qa = src_comp[0];  // ?A
          int o1 = fresh.m.add_flag(bc, Orient::Out, src_comp[1]);
          int o2 = fresh.m.add_flag(bc, Orient::Out, qa->left);
          int in = fresh.m.add_flag(qc, Orient::In, qa->left);
          fresh.m.glue(o2, in);
          fresh.conclusions.push_back(fresh.m.add_flag(qc, Orient::Out, qa));
          fresh.conclusions.push_back(o1);
          break;
        }
        case StepKind::One:
        case StepKind::Bot: {
          int c = fresh.m.add_cell(s.kind == StepKind::One ? CellKind::One : CellKind::Bot);
          fresh.box_v.push_back(0);
          fresh.conclusions.push_back(fresh.m.add_flag(c, Orient::Out, src_comp[0]));
          break;
        }
        case StepKind::Weak: {
          int c = fresh.m.add_cell(CellKind::Quest);
          fresh.box_v.push_back(0);
          fresh.conclusions.push_back(fresh.m.add_flag(c, Orient::Out, src_comp[0]));
          break;
        }
        default: break;
      }
      return with_comp(target, k, std::move(fresh));
    }
    case StepKind::Cut: {
      int k = cut_component(source_type, i);
      if (k < 0) throw mismatch("no component ends before the cut position");
      ProofStructure ps = target.comps[k];
      if (ps.conclusions.size() < 2) throw mismatch("cut target too short");
      int g2 = ps.conclusions.back();
      int g1 = ps.conclusions[ps.conclusions.size() - 2];
      if (!formula_eq(ps.m.type[g1], dual(ps.m.type[g2]))) throw mismatch("cut pair not dual");
      ps.conclusions.pop_back();
      ps.conclusions.pop_back();
      int c = ps.m.add_cell(CellKind::Cut);
      ps.box_v.push_back(ps.tree.root());
      int f1 = ps.m.add_flag(c, Orient::In, ps.m.type[g1]);
      int f2 = ps.m.add_flag(c, Orient::In, ps.m.type[g2]);
      ps.m.glue(f1, g1);
      ps.m.glue(f2, g2);
      return with_comp(target, k, std::move(ps));
    }
    case StepKind::Tensor:
    case StepKind::Par: {
      auto loc = locate(target, i), loc2 = locate(target, i + 1);
      if (!loc2 || loc2->comp != loc->comp) throw mismatch("multiplicative target shape");
      ProofStructure ps = target.comps[loc->comp];
      int g1 = ps.conclusions[loc->local], g2 = ps.conclusions[loc2->local];
      FormulaPtr a = ps.m.type[g1], b = ps.m.type[g2];
      int c = ps.m.add_cell(s.kind == StepKind::Tensor ? CellKind::Tensor : CellKind::Par);
      ps.box_v.push_back(ps.tree.root());
      int f1 = ps.m.add_flag(c, Orient::In, a);
      int f2 = ps.m.add_flag(c, Orient::In, b);
      ps.m.glue(f1, g1);
      ps.m.glue(f2, g2);
      FormulaPtr o = s.kind == StepKind::Tensor ? mk_tensor(a, b) : mk_par(a, b);
      int tail = ps.m.add_flag(c, Orient::Out, o);
      ps.conclusions[loc->local] = tail;
      ps.conclusions.erase(ps.conclusions.begin() + loc2->local);
      return with_comp(target, loc->comp, std::move(ps));
    }
    case StepKind::Contr: {
      auto loc = locate(target, i), loc2 = locate(target, i + 1);
      if (!loc2 || loc2->comp != loc->comp) throw mismatch("contraction target shape");
      ProofStructure ps = target.comps[loc->comp];
      int u1 = ps.m.flag_cell[ps.conclusions[loc->local]];
      int u2 = ps.m.flag_cell[ps.conclusions[loc2->local]];
      if (ps.m.kind[u1] != CellKind::Quest || ps.m.kind[u2] != CellKind::Quest || u1 == u2)
        throw mismatch("conclusions are not two ?-cells");
      for (int f : ps.m.inputs[u2]) {
        ps.m.flag_cell[f] = u1;
        ps.m.inputs[u1].push_back(f);
      }
      ps.m.inputs[u2].clear();
      std::vector<char> kill(ps.m.cells(), 0);
      kill[u2] = 1;
      RemovalResult r = remove_cells(ps, kill);
      r.ps.conclusions.clear();
      for (size_t j = 0; j < ps.conclusions.size(); ++j)
        if (static_cast<int>(j) != loc2->local)
          r.ps.conclusions.push_back(r.flag_map[ps.conclusions[j]]);
      return with_comp(target, loc->comp, std::move(r.ps));
    }
    case StepKind::Der: {
      auto loc = locate(target, i);
      ProofStructure ps = target.comps[loc->comp];
      int g2 = ps.conclusions[loc->local];
      FormulaPtr a = ps.m.type[g2];
      int c = ps.m.add_cell(CellKind::Quest);
      ps.box_v.push_back(ps.tree.root());
      int f = ps.m.add_flag(c, Orient::In, a);
      ps.m.glue(f, g2);
      ps.conclusions[loc->local] = ps.m.add_flag(c, Orient::Out, mk_quest(a));
      return with_comp(target, loc->comp, std::move(ps));
    }
    case StepKind::Box: {
      auto loc = locate(target, i);
      ProofStructure ps = target.comps[loc->comp];
      if (loc->local != static_cast<int>(ps.conclusions.size()) - 1)
        throw mismatch("box conclusion must be the last of its component");
      int g2 = ps.conclusions[loc->local];
      FormulaPtr a = ps.m.type[g2];
      int old_root = ps.tree.root();
      int new_root = ps.tree.size();
      ps.tree.parent.push_back(-1);
      ps.tree.parent[old_root] = new_root;
      for (size_t j = 0; j + 1 < ps.conclusions.size(); ++j) {
        int b = ps.m.flag_cell[ps.conclusions[j]];
        if (ps.m.kind[b] != CellKind::Quest) throw mismatch("border conclusion is not a ?-cell");
        ps.box_v[b] = new_root;
      }
      int t = ps.m.add_cell(CellKind::Bang);
      ps.box_v.push_back(new_root);
      int f = ps.m.add_flag(t, Orient::In, a);
      ps.m.glue(f, g2);
      ps.conclusions[loc->local] = ps.m.add_flag(t, Orient::Out, mk_bang(a));
      return with_comp(target, loc->comp, std::move(ps));
    }
  }
  throw mismatch("unhandled step");
}

// ---- replay -----------------------------------------------------------------

bool mell_replays_to_empty(const QuasiProofStructure& r, const Scheduling& nu) {
  std::vector<QuasiProofStructure> frontier{r};
  for (const auto& s : nu) {
    std::vector<QuasiProofStructure> next;
    std::set<std::string> seen;
    for (const auto& q : frontier)
      for (auto& [ch, q2] : mell_successors(q, s)) {
        std::string key = certificate(q2);
        if (seen.insert(key).second) next.push_back(std::move(q2));
      }
    if (next.empty()) return false;
    frontier = std::move(next);
  }
  for (const auto& q : frontier)
    if (classify(q).is_empty) return true;
  return false;
}

bool set_replays_to(const NetSet& pi, const Scheduling& nu, const NetSet& goal) {
  std::vector<NetSet> frontier{pi};
  for (const auto& s : nu) {
    std::vector<NetSet> next;
    std::set<std::string> seen;
    for (const auto& st : frontier)
      for (auto& st2 : set_successors(st, s)) {
        std::string key;
        for (const auto& e : st2.elems) key += certificate(e) + ";";
        key += "//" + to_string(st2.type);
        if (seen.insert(key).second) next.push_back(std::move(st2));
      }
    if (next.empty()) return false;
    frontier = std::move(next);
  }
  for (const auto& st : frontier)
    if (net_set_eq(st, goal) && type_list_eq(st.type, goal.type)) return true;
  return false;
}

// ---- normalization ----------------------------------------------------------

namespace {

bool qps_empty(const QuasiProofStructure& q) { return classify(q).is_empty; }

struct Candidate {
  Step step;
  QuasiProofStructure result;
  MellSize size;
  std::string cert;
};

void consider(std::vector<Candidate>& cands, const QuasiProofStructure& q, const Step& s,
              bool skip_nullary) {
  for (auto& [ch, r] : mell_successors(q, s)) {
    if (skip_nullary && s.kind == StepKind::Contr && ch.nullary) continue;
    Candidate c{s, std::move(r), {}, {}};
    if (s.kind == StepKind::Cut)  // pin the pair so the witness replays
      c.step.cut_formula = flatten(type_of(c.result))[s.index - 1];
    c.size = mell_size(c.result);
    cands.push_back(std::move(c));
  }
}

}  // namespace

Scheduling normalize(const QuasiProofStructure& r0) {
  if (auto e = validate(r0)) throw Error("normalize: invalid input: " + *e);
  Scheduling nu;
  QuasiProofStructure q = r0;
  int guard = 0;
  while (!qps_empty(q)) {
    if (++guard > 100000) throw Error("normalize: no progress");
    int n = conclusion_count(q);
    std::vector<Candidate> cands;
    for (int i = 1; i <= n; ++i) {
      for (StepKind k : {StepKind::Ax, StepKind::BangAx, StepKind::One, StepKind::Bot,
                         StepKind::Weak, StepKind::Tensor, StepKind::Par, StepKind::Der,
                         StepKind::Box, StepKind::Mix})
        consider(cands, q, Step{k, i, nullptr}, true);
      consider(cands, q, Step{StepKind::Contr, i, nullptr}, true);
    }
    for (int i = 1; i <= n + 1; ++i) consider(cands, q, Step{StepKind::Cut, i, nullptr}, true);
    if (cands.empty()) {
      // no rule applies in place: some component needs exchanges first,
      // either to expose a box/bangax pattern or to make a split contiguous
      auto try_sequence = [&](const Scheduling& steps) -> bool {
        QuasiProofStructure cur = q;
        for (const auto& s : steps) {
          auto succ = mell_successors(cur, s);
          if (succ.empty()) return false;
          cur = std::move(succ.front().second);
        }
        nu.insert(nu.end(), steps.begin(), steps.end());
        q = std::move(cur);
        return true;
      };
      bool done = false;
      for (int k = 0; k < static_cast<int>(q.comps.size()) && !done; ++k) {
        const ProofStructure& ps = q.comps[k];
        int m = static_cast<int>(ps.conclusions.size());
        int base = comp_start_position(q, k) - 1;
        // unique !-conclusion among ?-conclusions: bubble it to the end
        {
          int bang = -1, quests = 0;
          for (int j = 0; j < m; ++j) {
            FKind fk = ps.m.type[ps.conclusions[j]]->kind;
            if (fk == FKind::Bang) bang = bang < 0 ? j : -2;
            if (fk == FKind::Quest) ++quests;
          }
          if (bang >= 0 && quests == m - 1 && bang != m - 1) {
            Scheduling steps;
            for (int t = bang; t + 1 < m; ++t)
              steps.push_back(Step{StepKind::Exc, base + t + 1, nullptr});
            steps.push_back(Step{StepKind::Box, base + m, nullptr});
            if (try_sequence(steps)) done = true;
          }
        }
        // swapped bangax pair
        if (!done && m == 2 && ps.m.type[ps.conclusions[1]]->kind == FKind::Quest &&
            formula_eq(ps.m.type[ps.conclusions[0]], dual(ps.m.type[ps.conclusions[1]]))) {
          Scheduling steps{Step{StepKind::Exc, base + 1, nullptr},
                           Step{StepKind::BangAx, base + 1, nullptr}};
          if (try_sequence(steps)) done = true;
        }
        // non-contiguous split: bubble the first class's conclusions front
        if (!done && m >= 2) {
          std::vector<int> cls = split_classes(ps);
          int c0 = cls[ps.m.flag_cell[ps.conclusions[0]]];
          bool splittable = false;
          for (int f : ps.conclusions)
            if (cls[ps.m.flag_cell[f]] != c0) splittable = true;
          if (splittable) {
            Scheduling steps;
            std::vector<char> take(m, 0);
            for (int j = 0; j < m; ++j)
              take[j] = cls[ps.m.flag_cell[ps.conclusions[j]]] == c0;
            int front = 0;
            for (int j = 0; j < m; ++j) {
              if (!take[j]) continue;
              int at = -1;
              int seen = 0;
              for (int t = 0; t < m; ++t)
                if (take[t] && seen++ == front) {
                  at = t;
                  break;
                }
              // position of this conclusion in the current layout
              for (int t = at; t > front; --t) {
                steps.push_back(Step{StepKind::Exc, base + t, nullptr});
                std::swap(take[t], take[t - 1]);
              }
              ++front;
            }
            steps.push_back(Step{StepKind::Mix, base + front, nullptr});
            if (try_sequence(steps)) done = true;
          }
        }
      }
      if (!done) throw Error("normalize: stuck on a nonempty structure");
      continue;
    }
    MellSize before = mell_size(q);
    size_t best = 0;
    for (auto& c : cands) c.cert = certificate(c.result);
    for (size_t j = 1; j < cands.size(); ++j) {
      int cmp = cands[j].size.compare(cands[best].size);
      if (cmp < 0 || (cmp == 0 && cands[j].cert < cands[best].cert)) best = j;
    }
    if (cands[best].size.compare(before) >= 0) throw Error("normalize: size did not decrease");
    nu.push_back(cands[best].step);
    q = std::move(cands[best].result);
  }
  return nu;
}

QuasiProofStructure build(const Scheduling& nu, const TypeList& source) {
  auto chain = type_check(source, nu);
  const TypeList& target = chain.back();
  for (const auto& comp : target)
    if (!comp.empty()) throw Error("build: scheduling does not end at an empty list");
  QuasiProofStructure q = empty_qps(static_cast<int>(target.size()));
  for (size_t j = nu.size(); j-- > 0;) q = mell_unapply(q, nu[j], chain[j]);
  return q;
}

}  // namespace mellglue
