#include "mellglue/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>
#include <sstream>

namespace mellglue {

unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MELLGLUE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 256) return static_cast<unsigned>(v);
  }
  return hw;
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  unsigned workers = std::min<size_t>(thread_cap(), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<size_t> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n) break;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

GraphMorphism identity_morphism(const Graph& g) {
  GraphMorphism m;
  m.flag_map.resize(g.flags());
  std::iota(m.flag_map.begin(), m.flag_map.end(), 0);
  m.vertex_map.resize(g.vertices);
  std::iota(m.vertex_map.begin(), m.vertex_map.end(), 0);
  return m;
}

GraphMorphism compose(const GraphMorphism& first, const GraphMorphism& then) {
  GraphMorphism m;
  m.flag_map.reserve(first.flag_map.size());
  for (int f : first.flag_map) m.flag_map.push_back(then.flag_map[f]);
  m.vertex_map.reserve(first.vertex_map.size());
  for (int v : first.vertex_map) m.vertex_map.push_back(then.vertex_map[v]);
  return m;
}

std::optional<std::string> validate_graph(const Graph& g) {
  if (g.involution.size() != g.endpoint.size())
    return "involution and endpoint tables differ in length";
  for (int f = 0; f < g.flags(); ++f) {
    if (g.endpoint[f] < 0 || g.endpoint[f] >= g.vertices)
      return "endpoint undefined for flag " + std::to_string(f);
  }
  for (int f = 0; f < g.flags(); ++f) {
    int jf = g.involution[f];
    if (jf < 0 || jf >= g.flags())
      return "involution out of range at flag " + std::to_string(f);
    if (g.involution[jf] != f)
      return "involution not self-inverse at flag " + std::to_string(f);
  }
  return std::nullopt;
}

std::optional<std::string> validate_morphism(const Graph& src, const Graph& tgt,
                                             const GraphMorphism& m,
                                             const std::vector<Orient>* src_orient,
                                             const std::vector<Orient>* tgt_orient) {
  if (static_cast<int>(m.flag_map.size()) != src.flags() ||
      static_cast<int>(m.vertex_map.size()) != src.vertices)
    return "morphism tables do not match the source carrier";
  for (int f = 0; f < src.flags(); ++f) {
    int mf = m.flag_map[f];
    if (mf < 0 || mf >= tgt.flags()) return "flag map out of range at " + std::to_string(f);
    if (m.vertex_map[src.endpoint[f]] != tgt.endpoint[mf])
      return "endpoint square fails at flag " + std::to_string(f);
    if (m.flag_map[src.involution[f]] != tgt.involution[mf])
      return "involution square fails at flag " + std::to_string(f);
    if (src_orient && tgt_orient && (*src_orient)[f] != (*tgt_orient)[mf])
      return "orientation not preserved at flag " + std::to_string(f);
  }
  for (int v = 0; v < src.vertices; ++v) {
    if (m.vertex_map[v] < 0 || m.vertex_map[v] >= tgt.vertices)
      return "vertex map out of range at " + std::to_string(v);
  }
  return std::nullopt;
}

Graph disjoint_union(const Graph& a, const Graph& b, int* right_flag_offset,
                     int* right_vertex_offset) {
  Graph out = a;
  int fo = a.flags(), vo = a.vertices;
  if (right_flag_offset) *right_flag_offset = fo;
  if (right_vertex_offset) *right_vertex_offset = vo;
  out.vertices += b.vertices;
  for (int f = 0; f < b.flags(); ++f) {
    out.endpoint.push_back(b.endpoint[f] + vo);
    out.involution.push_back(b.involution[f] + fo);
  }
  return out;
}

std::vector<int> connected_components(const Graph& g) {
  std::vector<int> parent(g.vertices);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int f = 0; f < g.flags(); ++f) {
    int jf = g.involution[f];
    if (jf != f) {
      int a = find(g.endpoint[f]), b = find(g.endpoint[jf]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<int> id(g.vertices, -1);
  int next = 0;
  for (int v = 0; v < g.vertices; ++v) {
    int r = find(v);
    if (id[r] < 0) id[r] = next++;
    id[v] = id[r];
  }
  return id;
}

Closure transitive_closure(const Graph& g, const std::vector<Orient>& orient) {
  // parent-of relation read off the unique outgoing edge of each vertex
  std::vector<int> parent(g.vertices, -1);
  for (int f = 0; f < g.flags(); ++f) {
    if (g.is_tail(f)) continue;
    if (orient[f] != Orient::Out) continue;
    int v = g.endpoint[f], w = g.endpoint[g.involution[f]];
    if (parent[v] != -1) throw Error("transitive_closure: vertex has two outgoing edges");
    parent[v] = w;
  }
  // acyclicity
  for (int v = 0; v < g.vertices; ++v) {
    int slow = v, fast = v;
    while (fast != -1 && parent[fast] != -1) {
      slow = parent[slow];
      fast = parent[parent[fast]];
      if (slow == fast && slow != -1) throw Error("transitive_closure: cyclic input");
    }
  }

  Closure c;
  c.n = g.vertices;
  c.graph.vertices = g.vertices;
  c.table.assign(static_cast<size_t>(g.vertices) * g.vertices * 2, -1);
  // preserved tails
  for (int f = 0; f < g.flags(); ++f) {
    if (!g.is_tail(f)) {
      c.tails.push_back(-1);
      continue;
    }
    int nf = c.graph.add_flag(g.endpoint[f]);
    c.orient.push_back(orient[f]);
    c.tails.push_back(nf);
  }
  // one edge per directed path, loops for empty paths
  for (int v = 0; v < g.vertices; ++v) {
    for (int w = v;; w = parent[w]) {
      int out = c.graph.add_flag(v);
      c.orient.push_back(Orient::Out);
      int in = c.graph.add_flag(w);
      c.orient.push_back(Orient::In);
      c.graph.glue(out, in);
      c.table[(static_cast<size_t>(v) * c.n + w) * 2] = out;
      c.table[(static_cast<size_t>(v) * c.n + w) * 2 + 1] = in;
      if (parent[w] == -1) break;
    }
  }
  return c;
}

PullbackResult pullback(const Graph& sigma, const Graph& rho, const Graph& tau,
                        const GraphMorphism& g, const GraphMorphism& h) {
  if (auto e = validate_morphism(sigma, tau, g)) throw Error("pullback: left leg: " + *e);
  if (auto e = validate_morphism(rho, tau, h)) throw Error("pullback: right leg: " + *e);

  PullbackResult pb;
  // vertices: pairs with equal image
  std::vector<std::vector<int>> vertex_pair_id(sigma.vertices, std::vector<int>(rho.vertices, -1));
  for (int vs = 0; vs < sigma.vertices; ++vs)
    for (int vr = 0; vr < rho.vertices; ++vr)
      if (g.vertex_map[vs] == h.vertex_map[vr]) {
        vertex_pair_id[vs][vr] = pb.graph.add_vertex();
        pb.to_left.vertex_map.push_back(vs);
        pb.to_right.vertex_map.push_back(vr);
      }
  // flags: pairs with equal image; structure maps act componentwise
  std::vector<std::vector<int>> flag_pair_id(sigma.flags(), std::vector<int>(rho.flags(), -1));
  for (int fs = 0; fs < sigma.flags(); ++fs)
    for (int fr = 0; fr < rho.flags(); ++fr)
      if (g.flag_map[fs] == h.flag_map[fr]) {
        int id = pb.graph.add_flag(vertex_pair_id[sigma.endpoint[fs]][rho.endpoint[fr]]);
        flag_pair_id[fs][fr] = id;
        pb.to_left.flag_map.push_back(fs);
        pb.to_right.flag_map.push_back(fr);
      }
  for (int fs = 0; fs < sigma.flags(); ++fs)
    for (int fr = 0; fr < rho.flags(); ++fr) {
      int id = flag_pair_id[fs][fr];
      if (id >= 0) pb.graph.involution[id] = flag_pair_id[sigma.involution[fs]][rho.involution[fr]];
    }
  return pb;
}

std::optional<GraphMorphism> factorize(const Graph& q, const GraphMorphism& p,
                                       const GraphMorphism& k, const Graph& sigma,
                                       const Graph& rho, const Graph& tau, const GraphMorphism& g,
                                       const GraphMorphism& h, const PullbackResult& pb) {
  if (validate_morphism(q, sigma, p) || validate_morphism(q, rho, k)) return std::nullopt;
  for (int f = 0; f < q.flags(); ++f)
    if (g.flag_map[p.flag_map[f]] != h.flag_map[k.flag_map[f]]) return std::nullopt;
  for (int v = 0; v < q.vertices; ++v)
    if (g.vertex_map[p.vertex_map[v]] != h.vertex_map[k.vertex_map[v]]) return std::nullopt;

  // index the carrier pairs
  std::map<std::pair<int, int>, int> vpairs, fpairs;
  for (int v = 0; v < pb.graph.vertices; ++v)
    vpairs[{pb.to_left.vertex_map[v], pb.to_right.vertex_map[v]}] = v;
  for (int f = 0; f < pb.graph.flags(); ++f)
    fpairs[{pb.to_left.flag_map[f], pb.to_right.flag_map[f]}] = f;

  GraphMorphism u;
  for (int f = 0; f < q.flags(); ++f) u.flag_map.push_back(fpairs.at({p.flag_map[f], k.flag_map[f]}));
  for (int v = 0; v < q.vertices; ++v)
    u.vertex_map.push_back(vpairs.at({p.vertex_map[v], k.vertex_map[v]}));
  return u;
}

bool is_isomorphism(const Graph& src, const Graph& tgt, const GraphMorphism& m) {
  if (validate_morphism(src, tgt, m)) return false;
  if (src.flags() != tgt.flags() || src.vertices != tgt.vertices) return false;
  std::vector<char> fseen(tgt.flags(), 0), vseen(tgt.vertices, 0);
  for (int f : m.flag_map) {
    if (fseen[f]) return false;
    fseen[f] = 1;
  }
  for (int v : m.vertex_map) {
    if (vseen[v]) return false;
    vseen[v] = 1;
  }
  return true;
}

namespace {

// Iterative refinement of vertex colors; flags contribute their own
// invariants (orientation, color, tailness) to their endpoint.
std::vector<uint64_t> refine_colors(const Graph& g, const Overlay& o) {
  std::vector<uint64_t> vcol(g.vertices, 1);
  if (o.label) {
    for (int v = 0; v < g.vertices; ++v) vcol[v] = hash_mix(7, static_cast<uint64_t>((*o.label)[v]) + 1);
  }
  std::vector<uint64_t> flag_static(g.flags(), 3);
  for (int f = 0; f < g.flags(); ++f) {
    uint64_t h = 3;
    h = hash_mix(h, g.is_tail(f) ? 11 : 13);
    if (o.orient) h = hash_mix(h, (*o.orient)[f] == Orient::In ? 17 : 19);
    if (o.color) h = hash_mix(h, static_cast<uint64_t>((*o.color)[f]) + 23);
    flag_static[f] = h;
  }

  // flags grouped by endpoint, CSR layout reused across rounds
  std::vector<int> off(g.vertices + 1, 0);
  for (int f = 0; f < g.flags(); ++f) ++off[g.endpoint[f] + 1];
  for (int v = 0; v < g.vertices; ++v) off[v + 1] += off[v];
  std::vector<int> slot = off;
  std::vector<int> by_vertex(g.flags());
  for (int f = 0; f < g.flags(); ++f) by_vertex[slot[g.endpoint[f]]++] = f;

  std::vector<uint64_t> fcol(g.flags()), next(g.vertices), scratch(g.flags());
  int rounds = std::min(g.vertices + 2, 8);
  for (int round = 0; round < rounds; ++round) {
    for (int f = 0; f < g.flags(); ++f) {
      uint64_t h = flag_static[f];
      int jf = g.involution[f];
      if (jf != f) h = hash_mix(h, vcol[g.endpoint[jf]]);
      fcol[f] = h;
    }
    if (o.order)
      for (auto [a, b] : *o.order) {
        fcol[a] = hash_mix(fcol[a], 29);
        fcol[b] = hash_mix(fcol[b], 31);
      }
    for (int v = 0; v < g.vertices; ++v) {
      int lo = off[v], hi = off[v + 1];
      for (int j = lo; j < hi; ++j) scratch[j] = fcol[by_vertex[j]];
      std::sort(scratch.begin() + lo, scratch.begin() + hi);
      uint64_t h = hash_mix(vcol[v], 37);
      for (int j = lo; j < hi; ++j) h = hash_mix(h, scratch[j]);
      next[v] = h;
    }
    if (next == vcol) break;
    vcol.swap(next);
  }
  return vcol;
}

struct IsoSearch {
  const Graph &a, &b;
  const Overlay &oa, &ob;
  std::vector<uint64_t> ca, cb;
  std::vector<int> vmap, vrev;  // a-vertex -> b-vertex and inverse
  std::vector<int> fmap, frev;

  bool flag_compatible(int fa, int fb) const {
    if (a.is_tail(fa) != b.is_tail(fb)) return false;
    if (oa.orient && ob.orient && (*oa.orient)[fa] != (*ob.orient)[fb]) return false;
    if (oa.color && ob.color && (*oa.color)[fa] != (*ob.color)[fb]) return false;
    return true;
  }

  bool assign_flag(int fa, int fb, std::vector<std::pair<int, int>>& trail) {
    if (fmap[fa] != -1 || frev[fb] != -1) return fmap[fa] == fb;
    if (!flag_compatible(fa, fb)) return false;
    if (vmap[a.endpoint[fa]] != b.endpoint[fb]) return false;
    fmap[fa] = fb;
    frev[fb] = fa;
    trail.push_back({fa, fb});
    int ja = a.involution[fa], jb = b.involution[fb];
    bool ta = (ja == fa), tb = (jb == fb);
    if (ta != tb) return false;
    if (!ta) {
      // partner forced, if its endpoint is mapped already
      if (vmap[a.endpoint[ja]] != -1) {
        if (!assign_flag(ja, jb, trail)) return false;
      }
    }
    return true;
  }

  // Match all flags incident to vertex va against those of vb; on a full
  // matching, continue with `k`. Failures deep in `k` backtrack into
  // alternative flag matchings here.
  bool match_vertex_flags(int va, int vb, std::vector<int>& favail, size_t idx,
                          std::vector<std::pair<int, int>>& trail,
                          const std::function<bool()>& k) {
    if (idx == favail.size()) return k();
    int fa = favail[idx];
    if (fmap[fa] != -1) return match_vertex_flags(va, vb, favail, idx + 1, trail, k);
    for (int fb = 0; fb < b.flags(); ++fb) {
      if (b.endpoint[fb] != vb || frev[fb] != -1) continue;
      size_t mark = trail.size();
      if (assign_flag(fa, fb, trail) && match_vertex_flags(va, vb, favail, idx + 1, trail, k))
        return true;
      while (trail.size() > mark) {
        auto [xa, xb] = trail.back();
        trail.pop_back();
        fmap[xa] = -1;
        frev[xb] = -1;
      }
    }
    return false;
  }

  bool order_respected() const {
    if (!oa.order || !ob.order) return true;
    std::set<std::pair<int, int>> pb((*ob.order).begin(), (*ob.order).end());
    for (auto [x, y] : *oa.order)
      if (!pb.count({fmap[x], fmap[y]})) return false;
    return pb.size() == (*oa.order).size();
  }

  bool extend(int va) {
    while (va < a.vertices && vmap[va] != -1) ++va;
    if (va == a.vertices) return order_respected();
    for (int vb = 0; vb < b.vertices; ++vb) {
      if (vrev[vb] != -1 || ca[va] != cb[vb]) continue;
      if (oa.label && ob.label && (*oa.label)[va] != (*ob.label)[vb]) continue;
      vmap[va] = vb;
      vrev[vb] = va;
      std::vector<std::pair<int, int>> trail;
      std::vector<int> favail;
      for (int f = 0; f < a.flags(); ++f)
        if (a.endpoint[f] == va) favail.push_back(f);
      // flags whose partner is mapped already are forced
      bool ok = true;
      for (int f : favail) {
        int jf = a.involution[f];
        if (jf != f && fmap[jf] != -1 && fmap[f] == -1) {
          if (!assign_flag(f, b.involution[fmap[jf]], trail)) {
            ok = false;
            break;
          }
        }
      }
      if (ok &&
          match_vertex_flags(va, vb, favail, 0, trail, [&] { return extend(va + 1); }))
        return true;
      for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
        fmap[it->first] = -1;
        frev[it->second] = -1;
      }
      vmap[va] = -1;
      vrev[vb] = -1;
    }
    return false;
  }
};

}  // namespace

std::optional<GraphMorphism> find_iso(const Graph& a, const Overlay& oa, const Graph& b,
                                      const Overlay& ob) {
  if (a.flags() != b.flags() || a.vertices != b.vertices) return std::nullopt;
  IsoSearch s{a, b, oa, ob, refine_colors(a, oa), refine_colors(b, ob),
              std::vector<int>(a.vertices, -1), std::vector<int>(b.vertices, -1),
              std::vector<int>(a.flags(), -1), std::vector<int>(b.flags(), -1)};
  {
    auto sa = s.ca, sb = s.cb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return std::nullopt;
  }
  if (!s.extend(0)) return std::nullopt;
  GraphMorphism m;
  m.flag_map = s.fmap;
  m.vertex_map = s.vmap;
  return m;
}

std::string graph_certificate(const Graph& g, const Overlay& o) {
  auto col = refine_colors(g, o);
  std::vector<uint64_t> sorted = col;
  std::sort(sorted.begin(), sorted.end());
  uint64_t h = hash_mix(41, g.flags());
  h = hash_mix(h, g.vertices);
  for (uint64_t c : sorted) h = hash_mix(h, c);
  // edge signature: sorted endpoint-color pairs
  std::vector<uint64_t> edges;
  for (int f = 0; f < g.flags(); ++f) {
    int jf = g.involution[f];
    if (jf > f) edges.push_back(hash_mix(col[g.endpoint[f]], col[g.endpoint[jf]]) ^
                                hash_mix(col[g.endpoint[jf]], col[g.endpoint[f]]));
  }
  std::sort(edges.begin(), edges.end());
  for (uint64_t e : edges) h = hash_mix(h, e);
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace mellglue
