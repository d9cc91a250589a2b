#include "mellglue/io.hpp"

#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mellglue {

using nlohmann::json;

namespace {

std::string door_name(const ProofStructure& ps, int f) {
  if (ps.m.is_tail(f)) return "tail";
  int v = ps.box_v[ps.m.flag_cell[f]];
  int w = ps.box_v[ps.m.flag_cell[ps.m.partner(f)]];
  int from = ps.m.orient[f] == Orient::Out ? v : w;
  int to = ps.m.orient[f] == Orient::Out ? w : v;
  std::ostringstream os;
  if (from == to)
    os << "loop@t" << from;
  else
    os << "path@t" << from << ">t" << to;
  os << (ps.m.orient[f] == Orient::Out ? ":out" : ":in");
  return os.str();
}

}  // namespace

std::string encode_net(const QuasiProofStructure& q) {
  json doc;
  std::map<std::string, int> interned;
  std::vector<std::string> formulas;
  auto intern = [&](const FormulaPtr& f) {
    std::string s = to_string(f);
    auto [it, fresh] = interned.emplace(s, static_cast<int>(formulas.size()));
    if (fresh) formulas.push_back(s);
    return it->second;
  };

  json cells = json::array(), flags = json::array(), comps = json::array(),
       conclusion_order = json::array();
  for (size_t k = 0; k < q.comps.size(); ++k) {
    const ProofStructure& ps = q.comps[k];
    auto cid = [&](int c) { return "k" + std::to_string(k) + "c" + std::to_string(c); };
    auto fid = [&](int f) { return "k" + std::to_string(k) + "f" + std::to_string(f); };
    for (int c = 0; c < ps.m.cells(); ++c) {
      json cell;
      cell["id"] = cid(c);
      cell["kind"] = cell_kind_name(ps.m.kind[c]);
      cell["inputs"] = json::array();
      for (int f : ps.m.inputs[c]) cell["inputs"].push_back(fid(f));
      cell["outputs"] = json::array();
      for (int f : ps.m.outputs[c]) cell["outputs"].push_back(fid(f));
      cells.push_back(std::move(cell));
    }
    for (int f = 0; f < ps.m.flags(); ++f) {
      json flag;
      flag["id"] = fid(f);
      flag["type"] = intern(ps.m.type[f]);
      if (ps.m.is_tail(f))
        flag["pair"] = nullptr;
      else
        flag["pair"] = fid(ps.m.partner(f));
      flags.push_back(std::move(flag));
    }
    for (int f : ps.conclusions) conclusion_order.push_back(fid(f));

    json comp;
    json tree;
    tree["vertices"] = json::array();
    for (int v = 0; v < ps.tree.size(); ++v) tree["vertices"].push_back("t" + std::to_string(v));
    tree["edges"] = json::array();
    for (int v = 0; v < ps.tree.size(); ++v)
      if (ps.tree.parent[v] >= 0)
        tree["edges"].push_back(
            {{"child", "t" + std::to_string(v)}, {"parent", "t" + std::to_string(ps.tree.parent[v])}});
    tree["root"] = "t" + std::to_string(ps.tree.root());
    comp["box_tree"] = std::move(tree);
    json cmap = json::object(), fmap = json::object();
    for (int c = 0; c < ps.m.cells(); ++c) cmap[cid(c)] = "t" + std::to_string(ps.box_v[c]);
    for (int f = 0; f < ps.m.flags(); ++f) fmap[fid(f)] = door_name(ps, f);
    comp["box_map"] = {{"cells", std::move(cmap)}, {"flags", std::move(fmap)}};
    comps.push_back(std::move(comp));
  }
  doc["formulas"] = formulas;
  doc["cells"] = std::move(cells);
  doc["flags"] = std::move(flags);
  doc["conclusion_order"] = std::move(conclusion_order);
  doc["components"] = std::move(comps);
  return doc.dump(2);
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error("net document: " + what); }

}  // namespace

QuasiProofStructure decode_net(const std::string& json_text, bool check) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(std::string("malformed JSON: ") + e.what());
  }
  for (const char* field : {"formulas", "cells", "flags", "conclusion_order", "components"})
    if (!doc.contains(field)) bad(std::string("missing field '") + field + "'");

  std::vector<FormulaPtr> formulas;
  for (const auto& s : doc["formulas"]) formulas.push_back(parse_formula(s.get<std::string>()));

  struct FlagIn {
    FormulaPtr type;
    std::string pair;  // empty = tail
  };
  std::map<std::string, FlagIn> flags;
  for (const auto& f : doc["flags"]) {
    if (!f.contains("id") || !f.contains("type")) bad("flag without id or type");
    FlagIn in;
    int ty = f["type"].get<int>();
    if (ty < 0 || ty >= static_cast<int>(formulas.size())) bad("flag type index out of range");
    in.type = formulas[ty];
    if (f.contains("pair") && !f["pair"].is_null()) in.pair = f["pair"].get<std::string>();
    if (!flags.emplace(f["id"].get<std::string>(), std::move(in)).second)
      bad("duplicate flag id");
  }

  struct CellIn {
    CellKind kind;
    std::vector<std::string> inputs, outputs;
  };
  std::map<std::string, CellIn> cells;
  std::vector<std::string> cell_order;
  for (const auto& c : doc["cells"]) {
    if (!c.contains("id") || !c.contains("kind")) bad("cell without id or kind");
    CellIn in;
    auto kind = cell_kind_by_name(c["kind"].get<std::string>());
    if (!kind) bad("unknown cell kind '" + c["kind"].get<std::string>() + "'");
    in.kind = *kind;
    if (c.contains("inputs"))
      for (const auto& f : c["inputs"]) in.inputs.push_back(f.get<std::string>());
    if (c.contains("outputs"))
      for (const auto& f : c["outputs"]) in.outputs.push_back(f.get<std::string>());
    cell_order.push_back(c["id"].get<std::string>());
    if (!cells.emplace(cell_order.back(), std::move(in)).second) bad("duplicate cell id");
  }

  QuasiProofStructure q;
  std::map<std::string, std::pair<int, int>> flag_at;  // id -> (component, local flag)
  std::set<std::string> used_cells;
  for (const auto& comp : doc["components"]) {
    if (!comp.contains("box_tree") || !comp.contains("box_map")) bad("component without tree/map");
    const auto& jt = comp["box_tree"];
    std::map<std::string, int> vid;
    for (const auto& v : jt["vertices"]) vid.emplace(v.get<std::string>(), vid.size());
    ProofStructure ps;
    ps.tree.parent.assign(vid.size(), -1);
    for (const auto& e : jt["edges"]) {
      auto c = vid.find(e["child"].get<std::string>()), p = vid.find(e["parent"].get<std::string>());
      if (c == vid.end() || p == vid.end()) bad("tree edge names unknown vertex");
      ps.tree.parent[c->second] = p->second;
    }
    const auto& cmap = comp["box_map"]["cells"];
    std::map<std::string, int> local_cell, local_flag;
    for (auto it = cmap.begin(); it != cmap.end(); ++it) {
      auto c = cells.find(it.key());
      if (c == cells.end()) bad("box map names unknown cell '" + it.key() + "'");
      if (!used_cells.insert(it.key()).second) bad("cell in two components");
      auto v = vid.find(it.value().get<std::string>());
      if (v == vid.end()) bad("box map names unknown vertex");
      int lc = ps.m.add_cell(c->second.kind);
      ps.box_v.push_back(v->second);
      local_cell[it.key()] = lc;
      for (const auto& fname : c->second.inputs) {
        auto f = flags.find(fname);
        if (f == flags.end()) bad("cell names unknown flag '" + fname + "'");
        local_flag[fname] = ps.m.add_flag(lc, Orient::In, f->second.type);
      }
      for (const auto& fname : c->second.outputs) {
        auto f = flags.find(fname);
        if (f == flags.end()) bad("cell names unknown flag '" + fname + "'");
        local_flag[fname] = ps.m.add_flag(lc, Orient::Out, f->second.type);
      }
    }
    for (auto& [fname, lf] : local_flag) {
      const auto& in = flags.at(fname);
      if (in.pair.empty()) continue;
      auto other = local_flag.find(in.pair);
      if (other == local_flag.end()) bad("flag paired across components: " + fname);
      if (flags.at(in.pair).pair != fname) bad("involution not symmetric at " + fname);
      ps.m.glue(lf, other->second);
    }
    for (auto& [fname, lf] : local_flag)
      flag_at[fname] = {static_cast<int>(q.comps.size()), lf};
    q.comps.push_back(std::move(ps));
  }
  for (const auto& [name, cell] : cells)
    if (!used_cells.count(name)) bad("cell '" + name + "' not assigned to a component");

  // conclusions, global order grouped by component
  int last_comp = -1;
  for (const auto& f : doc["conclusion_order"]) {
    auto it = flag_at.find(f.get<std::string>());
    if (it == flag_at.end()) bad("conclusion order names unknown flag");
    auto [k, lf] = it->second;
    if (k < last_comp) bad("conclusion order does not respect component order");
    last_comp = k;
    q.comps[k].conclusions.push_back(lf);
  }

  if (check)
    if (auto e = validate(q)) bad("semantic validation failed: " + *e);
  return q;
}

std::string encode_net_set(const NetSet& s) {
  json doc;
  doc["type"] = to_string(s.type);
  doc["nets"] = json::array();
  for (const auto& e : s.elems) doc["nets"].push_back(json::parse(encode_net(e)));
  return doc.dump(2);
}

NetSet decode_net_set(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.contains("nets")) throw Error("net set document: missing field 'nets'");
  std::vector<QuasiProofStructure> elems;
  for (const auto& n : doc["nets"]) elems.push_back(decode_net(n.dump()));
  std::optional<TypeList> type;
  if (doc.contains("type")) type = parse_type_list(doc["type"].get<std::string>());
  if (elems.empty() && !type)
    throw Error("net set document: empty set needs an explicit type");
  return make_net_set(std::move(elems), type);
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const QuasiProofStructure& q, const DotOptions& opt) {
  std::ostringstream os;
  os << "digraph net {\n  rankdir=BT;\n  node [shape=box, fontsize=10];\n";
  for (size_t k = 0; k < q.comps.size(); ++k) {
    const ProofStructure& ps = q.comps[k];
    os << "  subgraph cluster_comp" << k << " {\n    style=dashed;\n    label=\"component "
       << (k + 1) << "\";\n";
    // nested clusters per box, cells grouped by subtree
    auto kids = ps.tree.children();
    std::function<void(int, const std::string&)> walk = [&](int v, const std::string& indent) {
      if (opt.show_boxes && ps.tree.parent[v] >= 0) {
        os << indent << "subgraph cluster_k" << k << "t" << v << " {\n"
           << indent << "  style=solid;\n"
           << indent << "  label=\"box t" << v << "\";\n";
      }
      for (int c = 0; c < ps.m.cells(); ++c)
        if (ps.box_v[c] == v)
          os << indent << "  k" << k << "c" << c << " [label=\""
             << dot_escape(cell_kind_name(ps.m.kind[c])) << "\"];\n";
      for (int w : kids[v]) walk(w, indent + "  ");
      if (opt.show_boxes && ps.tree.parent[v] >= 0) os << indent << "}\n";
    };
    walk(ps.tree.root(), "    ");
    // conclusions as sink nodes
    for (size_t j = 0; j < ps.conclusions.size(); ++j) {
      int f = ps.conclusions[j];
      os << "    k" << k << "concl" << j << " [shape=plaintext, label=\""
         << dot_escape(to_string(ps.m.type[f])) << "\"];\n";
    }
    os << "  }\n";
  }
  // edges
  for (size_t k = 0; k < q.comps.size(); ++k) {
    const ProofStructure& ps = q.comps[k];
    for (int f = 0; f < ps.m.flags(); ++f) {
      if (ps.m.orient[f] != Orient::Out) continue;
      int jf = ps.m.partner(f);
      if (jf == f) continue;
      os << "  k" << k << "c" << ps.m.flag_cell[f] << " -> k" << k << "c" << ps.m.flag_cell[jf]
         << " [label=\"" << dot_escape(to_string(ps.m.type[f])) << "\", dir=back];\n";
    }
    for (size_t j = 0; j < ps.conclusions.size(); ++j) {
      int f = ps.conclusions[j];
      os << "  k" << k << "concl" << j << " -> k" << k << "c" << ps.m.flag_cell[f]
         << " [dir=back];\n";
    }
    if (!ps.conclusions.empty()) {
      os << "  { rank=sink;";
      for (size_t j = 0; j < ps.conclusions.size(); ++j) os << " k" << k << "concl" << j << ";";
      os << " }\n";
    }
  }
  if (opt.show_box_tree) {
    for (size_t k = 0; k < q.comps.size(); ++k) {
      const ProofStructure& ps = q.comps[k];
      for (int v = 0; v < ps.tree.size(); ++v) {
        os << "  k" << k << "t" << v << " [shape=point];\n";
        if (ps.tree.parent[v] >= 0)
          os << "  k" << k << "t" << v << " -> k" << k << "t" << ps.tree.parent[v] << ";\n";
      }
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace mellglue
