#include "mellglue/net.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace mellglue {

const char* cell_kind_name(CellKind k) {
  switch (k) {
    case CellKind::Ax: return "ax";
    case CellKind::Cut: return "cut";
    case CellKind::One: return "one";
    case CellKind::Bot: return "bot";
    case CellKind::Tensor: return "tensor";
    case CellKind::Par: return "par";
    case CellKind::Quest: return "wn";
    case CellKind::Bang: return "oc";
    case CellKind::Daimon: return "daimon";
    case CellKind::BangAx: return "bangax";
  }
  return "?";
}

std::optional<CellKind> cell_kind_by_name(std::string_view s) {
  static const std::pair<std::string_view, CellKind> table[] = {
      {"ax", CellKind::Ax},         {"cut", CellKind::Cut},   {"one", CellKind::One},
      {"bot", CellKind::Bot},       {"tensor", CellKind::Tensor}, {"par", CellKind::Par},
      {"wn", CellKind::Quest},      {"oc", CellKind::Bang},   {"daimon", CellKind::Daimon},
      {"bangax", CellKind::BangAx}};
  for (auto& [name, k] : table)
    if (name == s) return k;
  return std::nullopt;
}

int Tree::root() const {
  for (int v = 0; v < size(); ++v)
    if (parent[v] < 0) return v;
  throw Error("tree has no root");
}

int Tree::depth(int v) const {
  int d = 0;
  while (parent[v] >= 0) {
    v = parent[v];
    ++d;
  }
  return d;
}

bool Tree::is_ancestor_or_self(int anc, int v) const {
  while (v >= 0) {
    if (v == anc) return true;
    v = parent[v];
  }
  return false;
}

std::vector<std::vector<int>> Tree::children() const {
  std::vector<std::vector<int>> ch(size());
  for (int v = 0; v < size(); ++v)
    if (parent[v] >= 0) ch[parent[v]].push_back(v);
  return ch;
}

Tree bare_root() { return Tree{{-1}}; }

TreeGraph tree_to_graph(const Tree& t) {
  TreeGraph tg;
  tg.graph.vertices = t.size();
  tg.edge_out.assign(t.size(), -1);
  tg.edge_in.assign(t.size(), -1);
  tg.root_tail = tg.graph.add_flag(t.root());
  tg.orient.push_back(Orient::Out);
  for (int v = 0; v < t.size(); ++v) {
    if (t.parent[v] < 0) continue;
    int out = tg.graph.add_flag(v);
    tg.orient.push_back(Orient::Out);
    int in = tg.graph.add_flag(t.parent[v]);
    tg.orient.push_back(Orient::In);
    tg.graph.glue(out, in);
    tg.edge_out[v] = out;
    tg.edge_in[v] = in;
  }
  return tg;
}

ProofStructure empty_ps() {
  ProofStructure ps;
  ps.tree = bare_root();
  return ps;
}

ProofStructure daimon_ps(const std::vector<FormulaPtr>& outputs) {
  if (outputs.empty()) throw Error("daimon needs at least one output");
  ProofStructure ps;
  ps.tree = bare_root();
  int c = ps.m.add_cell(CellKind::Daimon);
  ps.box_v.push_back(0);
  for (const auto& t : outputs) ps.conclusions.push_back(ps.m.add_flag(c, Orient::Out, t));
  return ps;
}

QuasiProofStructure empty_qps(int n) {
  QuasiProofStructure q;
  for (int i = 0; i < n; ++i) q.comps.push_back(empty_ps());
  return q;
}

QuasiProofStructure full_daimon(const TypeList& type) {
  QuasiProofStructure q;
  for (const auto& comp : type)
    q.comps.push_back(comp.empty() ? empty_ps() : daimon_ps(comp));
  return q;
}

namespace {

std::optional<std::string> check_cell_discipline(const Module& m, int c) {
  const auto& in = m.inputs[c];
  const auto& out = m.outputs[c];
  auto ty = [&](int f) { return m.type[f]; };
  std::string at = " at cell " + std::to_string(c);
  switch (m.kind[c]) {
    case CellKind::Cut:
      if (!out.empty() || in.size() != 2) return "cut needs 2 inputs, no output" + at;
      if (!formula_eq(ty(in[0]), dual(ty(in[1])))) return "cut inputs not dual" + at;
      break;
    case CellKind::Ax:
      if (!in.empty() || out.size() != 2) return "ax needs 2 outputs, no input" + at;
      if (!formula_eq(ty(out[0]), dual(ty(out[1])))) return "ax outputs not dual" + at;
      if (is_exponential(ty(out[0]))) return "ax outputs must be non-exponential" + at;
      break;
    case CellKind::One:
    case CellKind::Bot: {
      if (!in.empty() || out.size() != 1) return "unit needs 1 output, no input" + at;
      FKind want = m.kind[c] == CellKind::One ? FKind::One : FKind::Bot;
      if (ty(out[0])->kind != want) return "unit output type mismatch" + at;
      break;
    }
    case CellKind::Tensor:
    case CellKind::Par: {
      if (in.size() != 2 || out.size() != 1) return "tensor/par needs 2 inputs, 1 output" + at;
      FormulaPtr expect = m.kind[c] == CellKind::Tensor ? mk_tensor(ty(in[0]), ty(in[1]))
                                                        : mk_par(ty(in[0]), ty(in[1]));
      if (!formula_eq(ty(out[0]), expect)) return "tensor/par output type mismatch" + at;
      break;
    }
    case CellKind::Quest:
    case CellKind::Bang: {
      if (out.size() != 1) return "exponential cell needs 1 output" + at;
      FormulaPtr o = ty(out[0]);
      FKind want = m.kind[c] == CellKind::Quest ? FKind::Quest : FKind::Bang;
      if (o->kind != want) return "exponential output type mismatch" + at;
      for (int f : in)
        if (!formula_eq(ty(f), o->left)) return "exponential input type mismatch" + at;
      break;
    }
    case CellKind::Daimon:
      if (!in.empty() || out.empty()) return "daimon needs p > 0 outputs, no input" + at;
      break;
    case CellKind::BangAx: {
      if (!in.empty() || out.size() != 2) return "bangax needs 2 outputs, no input" + at;
      FormulaPtr a = ty(out[0]);
      if (a->kind != FKind::Bang || !formula_eq(a->left, dual(ty(out[1]))))
        return "bangax outputs must be !A~, A" + at;
      break;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> validate_ps(const ProofStructure& ps) {
  const Module& m = ps.m;
  // carrier consistency
  if (m.involution.size() != m.flag_cell.size() || m.orient.size() != m.flag_cell.size() ||
      m.type.size() != m.flag_cell.size())
    return "module flag tables differ in length";
  if (m.inputs.size() != m.kind.size() || m.outputs.size() != m.kind.size())
    return "module cell tables differ in length";
  {
    Graph g;
    g.endpoint = m.flag_cell;
    g.involution = m.involution;
    g.vertices = m.cells();
    if (auto e = validate_graph(g)) return e;
  }
  std::vector<char> seen(m.flags(), 0);
  for (int c = 0; c < m.cells(); ++c) {
    for (int f : m.inputs[c]) {
      if (m.flag_cell[f] != c || m.orient[f] != Orient::In) return "input list inconsistent";
      seen[f] = 1;
    }
    for (int f : m.outputs[c]) {
      if (m.flag_cell[f] != c || m.orient[f] != Orient::Out) return "output list inconsistent";
      seen[f] = 1;
    }
  }
  for (int f = 0; f < m.flags(); ++f)
    if (!seen[f]) return "flag " + std::to_string(f) + " not listed by its cell";

  for (int f = 0; f < m.flags(); ++f) {
    int jf = m.partner(f);
    if (jf == f) continue;
    if (m.flag_cell[jf] == m.flag_cell[f]) return "loop at cell " + std::to_string(m.flag_cell[f]);
    if (m.orient[f] == m.orient[jf]) return "edge halves with equal orientation";
    if (!formula_eq(m.type[f], m.type[jf])) return "edge halves with different types";
  }
  // no input tails
  for (int f = 0; f < m.flags(); ++f)
    if (m.is_tail(f) && m.orient[f] == Orient::In) return "input tail " + std::to_string(f);

  for (int c = 0; c < m.cells(); ++c)
    if (auto e = check_cell_discipline(m, c)) return e;

  // conclusions: exactly the output tails, each once
  {
    std::vector<char> listed(m.flags(), 0);
    for (int f : ps.conclusions) {
      if (f < 0 || f >= m.flags() || !m.is_tail(f) || m.orient[f] != Orient::Out)
        return "conclusion list names a non-tail";
      if (listed[f]) return "conclusion listed twice";
      listed[f] = 1;
    }
    for (int f = 0; f < m.flags(); ++f)
      if (m.is_tail(f) && m.orient[f] == Orient::Out && !listed[f])
        return "output tail missing from conclusion order";
  }

  // box-tree and assignment
  if (ps.tree.size() == 0) return "box-tree is empty";
  {
    int roots = 0;
    for (int v = 0; v < ps.tree.size(); ++v) {
      if (ps.tree.parent[v] < 0)
        ++roots;
      else if (ps.tree.parent[v] >= ps.tree.size())
        return "box-tree parent out of range";
    }
    if (roots != 1) return "box-tree must have exactly one root";
    for (int v = 0; v < ps.tree.size(); ++v) {
      int steps = 0, w = v;
      while (ps.tree.parent[w] >= 0) {
        w = ps.tree.parent[w];
        if (++steps > ps.tree.size()) return "box-tree has a cycle";
      }
    }
  }
  if (static_cast<int>(ps.box_v.size()) != m.cells()) return "box assignment length mismatch";
  for (int v : ps.box_v)
    if (v < 0 || v >= ps.tree.size()) return "box assignment out of range";

  int root = ps.tree.root();
  // cells with an output tail sit at the root (tails map to the root tail)
  for (int c = 0; c < m.cells(); ++c)
    for (int f : m.outputs[c])
      if (m.is_tail(f) && ps.box_v[c] != root)
        return "cell with a conclusion not at tree root (cell " + std::to_string(c) + ")";
  // edges must map to directed paths: source at descendant-or-self of target
  for (int f = 0; f < m.flags(); ++f) {
    if (m.is_tail(f) || m.orient[f] != Orient::In) continue;
    int v = m.flag_cell[f], w = m.flag_cell[m.partner(f)];
    if (!ps.tree.is_ancestor_or_self(ps.box_v[v], ps.box_v[w]))
      return "edge breaks box nesting at flag " + std::to_string(f);
    // border condition: level-crossing inputs end in ? or ! cells
    if (ps.box_v[v] != ps.box_v[w] && m.kind[v] != CellKind::Quest && m.kind[v] != CellKind::Bang)
      return "box border crosses a non-exponential cell at flag " + std::to_string(f);
  }
  // bijection between single-edge-crossing !-inputs and tree edges
  {
    std::vector<int> hits(ps.tree.size(), 0);  // per non-root vertex
    for (int c = 0; c < m.cells(); ++c) {
      if (m.kind[c] != CellKind::Bang) continue;
      for (int f : m.inputs[c]) {
        int src = ps.box_v[m.flag_cell[m.partner(f)]];
        if (ps.tree.parent[src] == ps.box_v[c]) ++hits[src];
      }
    }
    for (int v = 0; v < ps.tree.size(); ++v) {
      if (v == root) continue;
      if (hits[v] == 0) return "box-tree input flag without principal door (vertex " +
                               std::to_string(v) + ")";
      if (hits[v] > 1)
        return "box-tree input flag with two principal doors (vertex " + std::to_string(v) + ")";
    }
  }
  // every A-typed output of a bangax feeds a ?-cell
  for (int c = 0; c < m.cells(); ++c) {
    if (m.kind[c] != CellKind::BangAx) continue;
    int f = m.outputs[c][1];
    int jf = m.partner(f);
    if (jf == f || m.kind[m.flag_cell[jf]] != CellKind::Quest ||
        m.orient[jf] != Orient::In)
      return "bangax output not feeding a ?-cell at cell " + std::to_string(c);
  }
  return std::nullopt;
}

std::optional<std::string> validate(const QuasiProofStructure& q) {
  if (q.comps.empty()) return "quasi-proof-structure needs at least one component";
  for (size_t i = 0; i < q.comps.size(); ++i)
    if (auto e = validate_ps(q.comps[i]))
      return "component " + std::to_string(i + 1) + ": " + *e;
  return std::nullopt;
}

Classification classify(const QuasiProofStructure& q) {
  Classification c;
  c.is_mell = true;
  c.is_dill0 = true;
  c.is_cut_free = true;
  c.is_empty = true;
  for (const auto& ps : q.comps) {
    const Module& m = ps.m;
    if (m.cells() > 0) c.is_empty = false;
    bool has_daimon = false;
    for (int i = 0; i < m.cells(); ++i) {
      if (m.kind[i] == CellKind::Cut) c.is_cut_free = false;
      if (m.kind[i] == CellKind::Daimon) has_daimon = true;
      if (m.kind[i] == CellKind::Bang && m.inputs[i].size() != 1) c.is_mell = false;
    }
    if (has_daimon) c.is_mell = false;
    // MELL: every !-input crosses exactly one tree edge
    for (int i = 0; i < m.cells(); ++i) {
      if (m.kind[i] != CellKind::Bang) continue;
      for (int f : m.inputs[i]) {
        int src = ps.box_v[m.flag_cell[m.partner(f)]];
        if (ps.tree.parent[src] != ps.box_v[i]) c.is_mell = false;
      }
    }
    if (ps.tree.size() != 1) c.is_dill0 = false;
    if (has_daimon && m.cells() != 1) c.is_dill0 = false;
  }
  return c;
}

std::vector<FormulaPtr> ps_type(const ProofStructure& ps) {
  std::vector<FormulaPtr> out;
  for (int f : ps.conclusions) out.push_back(ps.m.type[f]);
  return out;
}

TypeList type_of(const QuasiProofStructure& q) {
  TypeList t;
  for (const auto& ps : q.comps) t.push_back(ps_type(ps));
  return t;
}

int conclusion_count(const QuasiProofStructure& q) {
  int n = 0;
  for (const auto& ps : q.comps) n += static_cast<int>(ps.conclusions.size());
  return n;
}

ConclusionRef conclusion_at(const QuasiProofStructure& q, int i) {
  int seen = 0;
  for (size_t k = 0; k < q.comps.size(); ++k) {
    int n = static_cast<int>(q.comps[k].conclusions.size());
    if (i <= seen + n) return {static_cast<int>(k), q.comps[k].conclusions[i - seen - 1]};
    seen += n;
  }
  throw Error("conclusion index out of range: " + std::to_string(i));
}

int conclusion_position(const QuasiProofStructure& q, int comp, int flag) {
  int pos = 0;
  for (int k = 0; k < comp; ++k) pos += static_cast<int>(q.comps[k].conclusions.size());
  for (size_t j = 0; j < q.comps[comp].conclusions.size(); ++j)
    if (q.comps[comp].conclusions[j] == flag) return pos + static_cast<int>(j) + 1;
  throw Error("flag is not a conclusion");
}

std::vector<Box> boxes(const ProofStructure& ps) {
  std::vector<Box> out;
  int root = ps.tree.root();
  for (int v = 0; v < ps.tree.size(); ++v) {
    if (v == root) continue;
    Box b;
    b.tree_vertex = v;
    b.principal_flag = -1;
    for (int c = 0; c < ps.m.cells(); ++c) {
      if (ps.tree.is_ancestor_or_self(v, ps.box_v[c])) b.cells.push_back(c);
      if (ps.m.kind[c] == CellKind::Bang)
        for (int f : ps.m.inputs[c])
          if (ps.box_v[ps.m.flag_cell[ps.m.partner(f)]] == v && ps.box_v[c] == ps.tree.parent[v])
            b.principal_flag = f;
    }
    out.push_back(std::move(b));
  }
  return out;
}

int cell_depth(const ProofStructure& ps, int cell) { return ps.tree.depth(ps.box_v[cell]); }

int depth(const ProofStructure& ps) {
  int d = 0;
  for (int c = 0; c < ps.m.cells(); ++c) d = std::max(d, cell_depth(ps, c));
  return d;
}

int depth(const QuasiProofStructure& q) {
  int d = 0;
  for (const auto& ps : q.comps) d = std::max(d, depth(ps));
  return d;
}

QuasiProofStructure emptying(const QuasiProofStructure& q, const std::vector<int>& comps) {
  QuasiProofStructure out = q;
  for (int k : comps) {
    if (k < 0 || k >= static_cast<int>(q.comps.size())) throw Error("emptying: no such component");
    auto type = ps_type(q.comps[k]);
    if (type.empty()) throw Error("emptying: component has no conclusions");
    out.comps[k] = daimon_ps(type);
  }
  return out;
}

GraphMorphism box_morphism(const ProofStructure& ps, const TreeGraph& tg, const Closure& cl) {
  GraphMorphism m;
  m.vertex_map.reserve(ps.m.cells());
  for (int c = 0; c < ps.m.cells(); ++c) m.vertex_map.push_back(ps.box_v[c]);
  m.flag_map.resize(ps.m.flags());
  (void)tg;
  for (int f = 0; f < ps.m.flags(); ++f) {
    if (ps.m.is_tail(f)) {
      m.flag_map[f] = cl.tails[tg.root_tail];
      continue;
    }
    int v = ps.box_v[ps.m.flag_cell[f]];
    int w = ps.box_v[ps.m.flag_cell[ps.m.partner(f)]];
    // edge from the Out half's vertex to the In half's vertex
    int from = ps.m.orient[f] == Orient::Out ? v : w;
    int to = ps.m.orient[f] == Orient::Out ? w : v;
    int flag = ps.m.orient[f] == Orient::Out ? cl.out_half(from, to) : cl.in_half(from, to);
    if (flag < 0) throw Error("box_morphism: no path in the box-tree");
    m.flag_map[f] = flag;
  }
  return m;
}

int FormulaInterner::intern(const FormulaPtr& f) {
  auto key = to_string(f);
  auto [it, fresh] = ids.emplace(key, static_cast<int>(ids.size()));
  return it->second;
}

ModuleView module_view(const ProofStructure& ps, FormulaInterner& interner, bool with_order) {
  ModuleView v;
  v.graph.endpoint = ps.m.flag_cell;
  v.graph.involution = ps.m.involution;
  v.graph.vertices = ps.m.cells();
  v.overlay.orient = ps.m.orient;
  std::vector<int> labels;
  for (CellKind k : ps.m.kind) labels.push_back(static_cast<int>(k));
  v.overlay.label = std::move(labels);
  std::vector<int> colors;
  for (const auto& t : ps.m.type) colors.push_back(interner.intern(t));
  v.overlay.color = std::move(colors);
  if (with_order) {
    std::vector<std::pair<int, int>> order;
    for (size_t i = 0; i + 1 < ps.conclusions.size(); ++i)
      order.push_back({ps.conclusions[i], ps.conclusions[i + 1]});
    for (int c = 0; c < ps.m.cells(); ++c)
      if (ps.m.kind[c] == CellKind::Tensor || ps.m.kind[c] == CellKind::Par)
        order.push_back({ps.m.inputs[c][0], ps.m.inputs[c][1]});
    v.overlay.order = std::move(order);
  }
  return v;
}

ModuleView combined_view(const ProofStructure& ps, FormulaInterner& interner, bool with_order) {
  ModuleView v = module_view(ps, interner, with_order);
  // append the box-tree: vertices labeled -2, tree edges colored -2,
  // assignment edges (cell -> its tree vertex) colored -3
  int tree_base = v.graph.vertices;
  for (int t = 0; t < ps.tree.size(); ++t) {
    v.graph.add_vertex();
    v.overlay.label->push_back(-2);
  }
  auto add_edge = [&](int va, int vb, int color) {
    int f1 = v.graph.add_flag(va);
    v.overlay.orient->push_back(Orient::Out);
    v.overlay.color->push_back(color);
    int f2 = v.graph.add_flag(vb);
    v.overlay.orient->push_back(Orient::In);
    v.overlay.color->push_back(color);
    v.graph.glue(f1, f2);
  };
  for (int t = 0; t < ps.tree.size(); ++t)
    if (ps.tree.parent[t] >= 0) add_edge(tree_base + t, tree_base + ps.tree.parent[t], -2);
  // root marker tail
  {
    int f = v.graph.add_flag(tree_base + ps.tree.root());
    v.overlay.orient->push_back(Orient::Out);
    v.overlay.color->push_back(-4);
    (void)f;
  }
  for (int c = 0; c < ps.m.cells(); ++c) add_edge(c, tree_base + ps.box_v[c], -3);
  return v;
}

std::optional<std::vector<GraphMorphism>> iso(const QuasiProofStructure& a,
                                              const QuasiProofStructure& b) {
  if (a.comps.size() != b.comps.size()) return std::nullopt;
  std::vector<GraphMorphism> out;
  for (size_t k = 0; k < a.comps.size(); ++k) {
    FormulaInterner interner;
    ModuleView va = combined_view(a.comps[k], interner, true);
    ModuleView vb = combined_view(b.comps[k], interner, true);
    auto m = find_iso(va.graph, va.overlay, vb.graph, vb.overlay);
    if (!m) return std::nullopt;
    out.push_back(std::move(*m));
  }
  return out;
}

namespace {

std::string exact_serial(const QuasiProofStructure& q) {
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

}  // namespace

bool iso_eq(const QuasiProofStructure& a, const QuasiProofStructure& b) {
  // the same value pairs recur across the search layers
  static thread_local std::map<std::string, bool> cache;
  std::string key = exact_serial(a) + "\x1f" + exact_serial(b);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (cache.size() > 200000) cache.clear();
  bool result = iso(a, b).has_value();
  cache.emplace(std::move(key), result);
  return result;
}


std::string certificate(const QuasiProofStructure& q, bool with_order) {
  // memoized: the search layers recompute certificates of recurring values
  static thread_local std::map<std::string, std::string> cache[2];
  auto& slot = cache[with_order ? 1 : 0];
  std::string serial = exact_serial(q);
  if (auto it = slot.find(serial); it != slot.end()) return it->second;
  if (slot.size() > 200000) slot.clear();
  std::ostringstream os;
  for (size_t k = 0; k < q.comps.size(); ++k) {
    FormulaInterner interner;
    ModuleView v = combined_view(q.comps[k], interner, with_order);
    // the interner numbers formulas by encounter; renumber by name so the
    // certificate does not depend on cell order
    std::map<int, int> rank;
    for (const auto& [name, id] : interner.ids) rank[id] = static_cast<int>(rank.size());
    for (int& c : *v.overlay.color)
      if (c >= 0) c = rank[c];
    if (k) os << '|';
    os << graph_certificate(v.graph, v.overlay);
    os << '/';
    for (int f : q.comps[k].conclusions) {
      os << to_string(q.comps[k].m.type[f]);
      os << ',';
    }
  }
  return slot.emplace(std::move(serial), os.str()).first->second;
}

std::vector<int> cell_pieces(const ProofStructure& ps) {
  Graph g;
  g.endpoint = ps.m.flag_cell;
  g.involution = ps.m.involution;
  g.vertices = ps.m.cells();
  return connected_components(g);
}

int cell_count(const QuasiProofStructure& q) {
  int n = 0;
  for (const auto& ps : q.comps) n += ps.m.cells();
  return n;
}

int MellSize::compare(const MellSize& o) const {
  if (int c = quest_arities.compare(o.quest_arities)) return c;
  if (cells != o.cells) return cells < o.cells ? -1 : 1;
  return comp_conclusions.compare(o.comp_conclusions);
}

MellSize mell_size(const QuasiProofStructure& q) {
  MellSize s;
  std::vector<long> arities, concls;
  for (const auto& ps : q.comps) {
    s.cells += ps.m.cells();
    concls.push_back(static_cast<long>(ps.conclusions.size()));
    for (int c = 0; c < ps.m.cells(); ++c)
      if (ps.m.kind[c] == CellKind::Quest)
        arities.push_back(static_cast<long>(ps.m.inputs[c].size()));
  }
  s.quest_arities = Multiset(std::move(arities));
  s.comp_conclusions = Multiset(std::move(concls));
  return s;
}

NetSet make_net_set(std::vector<QuasiProofStructure> elems, std::optional<TypeList> type) {
  NetSet s;
  if (type) s.type = *type;
  std::vector<std::pair<std::string, QuasiProofStructure>> keyed;
  for (auto& q : elems) keyed.push_back({certificate(q), std::move(q)});
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [key, q] : keyed) {
    if (s.elems.empty()) {
      s.elems.push_back(std::move(q));
      continue;
    }
    bool dup = false;
    for (auto it = s.elems.rbegin(); it != s.elems.rend(); ++it) {
      if (certificate(*it) != key) break;
      if (iso_eq(*it, q)) {
        dup = true;
        break;
      }
    }
    if (!dup) s.elems.push_back(std::move(q));
  }
  if (!s.elems.empty()) {
    s.type = type_of(s.elems.front());
    for (const auto& q : s.elems)
      if (!type_list_eq(type_of(q), s.type)) throw Error("net set with mixed types");
  }
  return s;
}

bool net_set_contains(const NetSet& s, const QuasiProofStructure& q) {
  std::string cq = certificate(q);
  for (const auto& e : s.elems)
    if (certificate(e) == cq && iso_eq(e, q)) return true;
  return false;
}

bool net_set_eq(const NetSet& a, const NetSet& b) {
  if (a.elems.size() != b.elems.size()) return false;
  for (const auto& e : a.elems)
    if (!net_set_contains(b, e)) return false;
  return true;
}

bool is_daimon_full(const NetSet& s) {
  if (s.elems.size() != 1) return false;
  return iso_eq(s.elems.front(), full_daimon(s.type));
}

RemovalResult remove_cells(const ProofStructure& ps, const std::vector<char>& kill) {
  RemovalResult r;
  r.ps.tree = ps.tree;
  r.cell_map.assign(ps.m.cells(), -1);
  r.flag_map.assign(ps.m.flags(), -1);
  for (int c = 0; c < ps.m.cells(); ++c) {
    if (kill[c]) continue;
    r.cell_map[c] = r.ps.m.add_cell(ps.m.kind[c]);
    r.ps.box_v.push_back(ps.box_v[c]);
  }
  for (int c = 0; c < ps.m.cells(); ++c) {
    if (kill[c]) continue;
    for (int f : ps.m.inputs[c])
      r.flag_map[f] = r.ps.m.add_flag(r.cell_map[c], Orient::In, ps.m.type[f]);
    for (int f : ps.m.outputs[c])
      r.flag_map[f] = r.ps.m.add_flag(r.cell_map[c], Orient::Out, ps.m.type[f]);
  }
  for (int f = 0; f < ps.m.flags(); ++f) {
    if (r.flag_map[f] < 0) continue;
    int jf = ps.m.partner(f);
    if (jf != f && r.flag_map[jf] >= 0) r.ps.m.glue(r.flag_map[f], r.flag_map[jf]);
  }
  for (int f : ps.conclusions)
    if (r.flag_map[f] >= 0) r.ps.conclusions.push_back(r.flag_map[f]);
  return r;
}

}  // namespace mellglue
