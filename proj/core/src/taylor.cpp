#include "mellglue/taylor.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

namespace mellglue {

namespace {

// thick subtrees of the subtree rooted at `v`, one per iso class
std::vector<ThickSubtree> thick_at(const Tree& target, const std::vector<std::vector<int>>& kids,
                                   int v, int bound) {
  // per child: the classes available below it
  std::vector<std::vector<ThickSubtree>> below;
  for (int c : kids[v]) below.push_back(thick_at(target, kids, c, bound));

  // multisets of copies per child: nondecreasing index tuples of length 0..bound
  std::vector<std::vector<std::vector<int>>> child_multisets;
  for (const auto& classes : below) {
    std::vector<std::vector<int>> tuples;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int min_idx) {
      tuples.push_back(cur);
      if (static_cast<int>(cur.size()) == bound) return;
      for (int j = min_idx; j < static_cast<int>(classes.size()); ++j) {
        cur.push_back(j);
        rec(j);
        cur.pop_back();
      }
    };
    rec(0);
    child_multisets.push_back(std::move(tuples));
  }

  std::vector<ThickSubtree> out;
  std::vector<int> pick(kids[v].size(), 0);
  for (;;) {
    ThickSubtree t;
    t.tree.parent.push_back(-1);
    t.to_target.push_back(v);
    for (size_t ci = 0; ci < kids[v].size(); ++ci) {
      for (int idx : child_multisets[ci][pick[ci]]) {
        const ThickSubtree& sub = below[ci][idx];
        int base = t.tree.size();
        for (int w = 0; w < sub.tree.size(); ++w) {
          t.tree.parent.push_back(sub.tree.parent[w] < 0 ? 0 : base + sub.tree.parent[w]);
          t.to_target.push_back(sub.to_target[w]);
        }
      }
    }
    out.push_back(std::move(t));
    // advance the mixed-radix counter
    size_t ci = 0;
    for (; ci < pick.size(); ++ci) {
      if (++pick[ci] < static_cast<int>(child_multisets[ci].size())) break;
      pick[ci] = 0;
    }
    if (ci == pick.size()) break;
    if (pick.empty()) break;
  }
  return out;
}

}  // namespace

std::vector<ThickSubtree> enumerate_thick_subtrees(const Tree& target, int bound) {
  if (bound < 0) throw Error("thick subtree bound must be nonnegative");
  auto kids = target.children();
  return thick_at(target, kids, target.root(), bound);
}

std::vector<ThickSubforest> enumerate_thick_subforests(const QuasiProofStructure& r, int bound) {
  std::vector<std::vector<ThickSubtree>> per;
  for (const auto& ps : r.comps) per.push_back(enumerate_thick_subtrees(ps.tree, bound));
  std::vector<ThickSubforest> out;
  std::vector<size_t> pick(per.size(), 0);
  for (;;) {
    ThickSubforest f;
    for (size_t k = 0; k < per.size(); ++k) f.trees.push_back(per[k][pick[k]]);
    out.push_back(std::move(f));
    size_t k = 0;
    for (; k < per.size(); ++k) {
      if (++pick[k] < per[k].size()) break;
      pick[k] = 0;
    }
    if (k == per.size()) break;
  }
  return out;
}

std::vector<int> fiber_sizes(const ThickSubtree& t, int target_size) {
  std::vector<int> out(target_size, 0);
  for (int v : t.to_target) ++out[v];
  return out;
}

namespace {

// directed-graph morphism closure(sub) -> closure(target) induced by a tree
// morphism
GraphMorphism lift_closure(const ThickSubtree& t, const TreeGraph& tg_sub, const Closure& cl_sub,
                           const TreeGraph& tg_tgt, const Closure& cl_tgt) {
  GraphMorphism m;
  m.vertex_map = t.to_target;
  m.flag_map.assign(cl_sub.graph.flags(), -1);
  m.flag_map[cl_sub.tails[tg_sub.root_tail]] = cl_tgt.tails[tg_tgt.root_tail];
  int n = t.tree.size();
  for (int v = 0; v < n; ++v)
    for (int w = 0; w < n; ++w) {
      int out = cl_sub.out_half(v, w);
      if (out < 0) continue;
      int mo = cl_tgt.out_half(t.to_target[v], t.to_target[w]);
      int mi = cl_tgt.in_half(t.to_target[v], t.to_target[w]);
      if (mo < 0) throw Error("thick subtree morphism does not preserve paths");
      m.flag_map[out] = mo;
      m.flag_map[cl_sub.in_half(v, w)] = mi;
    }
  return m;
}

}  // namespace

TaylorElement expand(const QuasiProofStructure& r, const ThickSubforest& t) {
  if (t.trees.size() != r.comps.size()) throw Error("expand: subforest shape mismatch");
  TaylorElement out;
  for (size_t k = 0; k < r.comps.size(); ++k) {
    const ProofStructure& ps = r.comps[k];
    const ThickSubtree& sub = t.trees[k];
    if (sub.to_target.at(sub.tree.root()) != ps.tree.root())
      throw Error("expand: subtree must map root to root");

    TreeGraph tg = tree_to_graph(ps.tree);
    Closure cl = transitive_closure(tg.graph, tg.orient);
    GraphMorphism box = box_morphism(ps, tg, cl);

    TreeGraph tgs = tree_to_graph(sub.tree);
    Closure cls = transitive_closure(tgs.graph, tgs.orient);
    GraphMorphism lift = lift_closure(sub, tgs, cls, tg, cl);

    Graph module_graph;
    module_graph.endpoint = ps.m.flag_cell;
    module_graph.involution = ps.m.involution;
    module_graph.vertices = ps.m.cells();

    PullbackResult pb = pullback(module_graph, cls.graph, cl.graph, box, lift);

    // rebuild a module over the carrier
    ProofStructure res;
    res.tree = bare_root();
    TaylorProjection proj;
    for (int c = 0; c < pb.graph.vertices; ++c) {
      int src = pb.to_left.vertex_map[c];
      res.m.add_cell(ps.m.kind[src]);
      res.box_v.push_back(0);
      proj.cell_to_src.push_back(src);
      proj.cell_to_tree.push_back(pb.to_right.vertex_map[c]);
    }
    // flags, inputs before outputs per cell in source order
    std::vector<int> new_flag(pb.graph.flags(), -1);
    auto add_flags_of = [&](int c, bool want_inputs) {
      int src_cell = pb.to_left.vertex_map[c];
      const auto& list = want_inputs ? ps.m.inputs[src_cell] : ps.m.outputs[src_cell];
      for (int src_flag : list)
        for (int f = 0; f < pb.graph.flags(); ++f) {
          if (pb.graph.endpoint[f] != c || pb.to_left.flag_map[f] != src_flag) continue;
          new_flag[f] = res.m.add_flag(c, want_inputs ? Orient::In : Orient::Out,
                                       ps.m.type[src_flag]);
          proj.flag_to_src.push_back(src_flag);
        }
    };
    for (int c = 0; c < pb.graph.vertices; ++c) {
      add_flags_of(c, true);
      add_flags_of(c, false);
    }
    for (int f = 0; f < pb.graph.flags(); ++f) {
      int jf = pb.graph.involution[f];
      if (jf > f) res.m.glue(new_flag[f], new_flag[jf]);
    }
    // conclusions in source order (each has exactly one copy)
    for (int src_flag : ps.conclusions)
      for (int f = 0; f < pb.graph.flags(); ++f)
        if (pb.to_left.flag_map[f] == src_flag) res.conclusions.push_back(new_flag[f]);

    out.net.comps.push_back(std::move(res));
    out.projections.push_back(std::move(proj));
  }
  return out;
}

NetSet taylor_set(const QuasiProofStructure& r, int bound) {
  auto forests = enumerate_thick_subforests(r, bound);
  std::vector<QuasiProofStructure> nets(forests.size());
  parallel_for(forests.size(), [&](size_t j) { nets[j] = expand(r, forests[j]).net; });
  return make_net_set(std::move(nets), type_of(r));
}

NetSet filled_taylor_set(const QuasiProofStructure& r, int bound) {
  NetSet plain = taylor_set(r, bound);
  std::vector<QuasiProofStructure> all;
  for (const auto& e : plain.elems) {
    std::vector<int> candidates;
    for (size_t k = 0; k < e.comps.size(); ++k)
      if (!e.comps[k].conclusions.empty()) candidates.push_back(static_cast<int>(k));
    for (unsigned mask = 0; mask < (1u << candidates.size()); ++mask) {
      std::vector<int> comps;
      for (size_t j = 0; j < candidates.size(); ++j)
        if ((mask >> j) & 1u) comps.push_back(candidates[j]);
      all.push_back(emptying(e, comps));
    }
  }
  return make_net_set(std::move(all), type_of(r));
}

namespace {

// thick subtrees of subtree(v) whose expansion contributes at most `budget`
// cells; `cells_at[v]` counts the cells assigned to each vertex. Pruned
// during generation, so nested boxes stay tractable.
struct Budgeted {
  ThickSubtree t;
  long cost;
};

std::vector<Budgeted> thick_with_budget(const Tree& target,
                                        const std::vector<std::vector<int>>& kids,
                                        const std::vector<long>& cells_at, int v, long budget,
                                        int copy_bound) {
  long base = cells_at[v];
  if (base > budget) return {};
  std::vector<Budgeted> out;
  // per child: available classes under the remaining budget
  std::vector<std::vector<Budgeted>> below;
  for (int c : kids[v])
    below.push_back(thick_with_budget(target, kids, cells_at, c, budget - base, copy_bound));

  // multisets over classes per child, respecting the budget
  struct Partial {
    std::vector<std::vector<int>> picks;  // per child, chosen class indices
    long cost;
  };
  std::vector<Partial> partials{{{}, base}};
  for (size_t ci = 0; ci < kids[v].size(); ++ci) {
    std::vector<Partial> next;
    for (const auto& p : partials) {
      std::function<void(int, std::vector<int>, long)> rec = [&](int min_idx,
                                                                 std::vector<int> chosen,
                                                                 long cost) {
        Partial np = p;
        np.picks.push_back(chosen);
        np.cost = cost;
        next.push_back(std::move(np));
        if (static_cast<int>(chosen.size()) == copy_bound) return;
        for (int j = min_idx; j < static_cast<int>(below[ci].size()); ++j) {
          long c2 = cost + below[ci][j].cost;
          if (c2 > budget) continue;
          auto ch = chosen;
          ch.push_back(j);
          rec(j, std::move(ch), c2);
        }
      };
      rec(0, {}, p.cost);
    }
    partials = std::move(next);
    if (partials.size() > 2000000) throw Error("member: thick subtree space too large");
  }
  for (const auto& p : partials) {
    Budgeted b;
    b.cost = p.cost;
    b.t.tree.parent.push_back(-1);
    b.t.to_target.push_back(v);
    for (size_t ci = 0; ci < kids[v].size(); ++ci)
      for (int idx : p.picks[ci]) {
        const ThickSubtree& sub = below[ci][idx].t;
        int off = b.t.tree.size();
        for (int w = 0; w < sub.tree.size(); ++w) {
          b.t.tree.parent.push_back(sub.tree.parent[w] < 0 ? 0 : off + sub.tree.parent[w]);
          b.t.to_target.push_back(sub.to_target[w]);
        }
      }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

std::optional<MemberWitness> member(const QuasiProofStructure& rho, const QuasiProofStructure& r,
                                    bool filled) {
  if (!type_list_eq(type_of(rho), type_of(r))) throw Error("member: type mismatch");
  if (rho.comps.size() != r.comps.size()) throw Error("member: component count mismatch");

  int bound = std::max(1, cell_count(rho));
  std::vector<int> emptied;
  std::vector<std::vector<ThickSubtree>> per;  // candidates per component
  for (size_t k = 0; k < r.comps.size(); ++k) {
    const ProofStructure& rc = rho.comps[k];
    bool is_daimon = rc.m.cells() == 1 && rc.m.kind[0] == CellKind::Daimon;
    if (is_daimon) {
      if (!filled) return std::nullopt;  // expansions of MELL structures have no daimons
      emptied.push_back(static_cast<int>(k));
      // any subtree works once the component is emptied; take the least one
      ThickSubtree minimal;
      minimal.tree = bare_root();
      minimal.to_target = {r.comps[k].tree.root()};
      per.push_back({minimal});
      continue;
    }
    auto kids = r.comps[k].tree.children();
    std::vector<long> cells_at(r.comps[k].tree.size(), 0);
    for (int c = 0; c < r.comps[k].m.cells(); ++c) ++cells_at[r.comps[k].box_v[c]];
    auto cands = thick_with_budget(r.comps[k].tree, kids, cells_at, r.comps[k].tree.root(),
                                   rc.m.cells(), bound);
    std::vector<ThickSubtree> kept;
    for (auto& b : cands)
      if (b.cost == rc.m.cells()) kept.push_back(std::move(b.t));
    if (kept.empty()) return std::nullopt;
    per.push_back(std::move(kept));
  }

  std::vector<size_t> pick(per.size(), 0);
  for (;;) {
    ThickSubforest f;
    for (size_t k = 0; k < per.size(); ++k) f.trees.push_back(per[k][pick[k]]);
    QuasiProofStructure candidate = expand(r, f).net;
    if (!emptied.empty()) candidate = emptying(candidate, emptied);
    if (iso_eq(candidate, rho)) return MemberWitness{std::move(f), emptied};
    size_t k = 0;
    for (; k < per.size(); ++k) {
      if (++pick[k] < per[k].size()) break;
      pick[k] = 0;
    }
    if (k == per.size()) break;
  }
  return std::nullopt;
}

}  // namespace mellglue
