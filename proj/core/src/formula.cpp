#include "mellglue/formula.hpp"

#include <cctype>

namespace mellglue {

Formula::Formula(FKind k, std::string a, FormulaPtr l, FormulaPtr r)
    : kind(k), atom(std::move(a)), left(std::move(l)), right(std::move(r)) {
  size = 1;
  if (left) size += left->size;
  if (right) size += right->size;
  uint64_t h = hash_mix(0x5bf0, static_cast<uint64_t>(kind));
  for (char c : atom) h = hash_mix(h, static_cast<unsigned char>(c));
  if (left) h = hash_mix(h, left->hash);
  if (right) h = hash_mix(h, right->hash);
  hash = h;
}

FormulaPtr mk_atom(std::string name) {
  return std::make_shared<Formula>(FKind::Atom, std::move(name), nullptr, nullptr);
}
FormulaPtr mk_natom(std::string name) {
  return std::make_shared<Formula>(FKind::NegAtom, std::move(name), nullptr, nullptr);
}
FormulaPtr mk_one() { return std::make_shared<Formula>(FKind::One, "", nullptr, nullptr); }
FormulaPtr mk_bot() { return std::make_shared<Formula>(FKind::Bot, "", nullptr, nullptr); }
FormulaPtr mk_tensor(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(FKind::Tensor, "", std::move(a), std::move(b));
}
FormulaPtr mk_par(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(FKind::Par, "", std::move(a), std::move(b));
}
FormulaPtr mk_bang(FormulaPtr a) {
  return std::make_shared<Formula>(FKind::Bang, "", std::move(a), nullptr);
}
FormulaPtr mk_quest(FormulaPtr a) {
  return std::make_shared<Formula>(FKind::Quest, "", std::move(a), nullptr);
}

bool formula_eq(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind || a->atom != b->atom) return false;
  return formula_eq(a->left, b->left) && formula_eq(a->right, b->right);
}

int formula_cmp(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return 0;
  if (!a) return b ? -1 : 0;
  if (!b) return 1;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (int c = a->atom.compare(b->atom)) return c < 0 ? -1 : 1;
  if (int c = formula_cmp(a->left, b->left)) return c;
  return formula_cmp(a->right, b->right);
}

FormulaPtr dual(const FormulaPtr& a) {
  switch (a->kind) {
    case FKind::Atom: return mk_natom(a->atom);
    case FKind::NegAtom: return mk_atom(a->atom);
    case FKind::One: return mk_bot();
    case FKind::Bot: return mk_one();
    case FKind::Tensor: return mk_par(dual(a->left), dual(a->right));
    case FKind::Par: return mk_tensor(dual(a->left), dual(a->right));
    case FKind::Bang: return mk_quest(dual(a->left));
    case FKind::Quest: return mk_bang(dual(a->left));
  }
  throw Error("dual: bad formula");
}

bool is_atomic(const FormulaPtr& a) {
  return a->kind == FKind::Atom || a->kind == FKind::NegAtom;
}
bool is_exponential(const FormulaPtr& a) {
  return a->kind == FKind::Bang || a->kind == FKind::Quest;
}

std::string to_string(const FormulaPtr& a) {
  switch (a->kind) {
    case FKind::Atom: return a->atom;
    case FKind::NegAtom: return "~" + a->atom;
    case FKind::One: return "one";
    case FKind::Bot: return "bot";
    case FKind::Tensor: return "(" + to_string(a->left) + "*" + to_string(a->right) + ")";
    case FKind::Par: return "(" + to_string(a->left) + "|" + to_string(a->right) + ")";
    case FKind::Bang: return "!" + to_string(a->left);
    case FKind::Quest: return "?" + to_string(a->left);
  }
  throw Error("to_string: bad formula");
}

namespace {

struct Parser {
  std::string_view s;
  size_t pos = 0;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw Error("formula parse error at offset " + std::to_string(pos) + ": " + what);
  }
  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }
  char take() {
    char c = peek();
    if (c) ++pos;
    return c;
  }

  std::string ident() {
    skip();
    size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    if (start == pos) fail("expected identifier");
    return std::string(s.substr(start, pos - start));
  }

  FormulaPtr formula() {
    char c = peek();
    switch (c) {
      case '~': {
        take();
        return mk_natom(ident());
      }
      case '!': {
        take();
        return mk_bang(formula());
      }
      case '?': {
        take();
        return mk_quest(formula());
      }
      case '(': {
        take();
        FormulaPtr a = formula();
        char op = take();
        if (op != '*' && op != '|') fail("expected '*' or '|'");
        FormulaPtr b = formula();
        if (take() != ')') fail("expected ')'");
        return op == '*' ? mk_tensor(a, b) : mk_par(a, b);
      }
      default: {
        if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected character");
        std::string name = ident();
        if (name == "one") return mk_one();
        if (name == "bot") return mk_bot();
        if (!std::isupper(static_cast<unsigned char>(name[0])))
          fail("atoms are uppercase identifiers");
        return mk_atom(name);
      }
    }
  }
};

}  // namespace

FormulaPtr parse_formula(std::string_view text) {
  Parser p{text};
  FormulaPtr f = p.formula();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return f;
}

std::vector<FormulaPtr> flatten(const TypeList& g) {
  std::vector<FormulaPtr> out;
  for (const auto& comp : g) out.insert(out.end(), comp.begin(), comp.end());
  return out;
}

std::pair<int, int> position_component(const TypeList& g, int i) {
  if (i < 1) throw Error("position_component: index out of range");
  int seen = 0;
  for (size_t k = 0; k < g.size(); ++k) {
    if (i <= seen + static_cast<int>(g[k].size()))
      return {static_cast<int>(k) + 1, i - seen};
    seen += static_cast<int>(g[k].size());
  }
  throw Error("position_component: index out of range");
}

std::string to_string(const TypeList& g) {
  std::string out;
  for (size_t k = 0; k < g.size(); ++k) {
    if (k) out += " ; ";
    for (size_t j = 0; j < g[k].size(); ++j) {
      if (j) out += ", ";
      out += to_string(g[k][j]);
    }
  }
  return out;
}

TypeList parse_type_list(std::string_view text) {
  TypeList g;
  size_t start = 0;
  auto trim = [](std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    return v;
  };
  for (size_t k = 0; k <= text.size(); ++k) {
    if (k == text.size() || text[k] == ';') {
      std::string_view seg = trim(text.substr(start, k - start));
      std::vector<FormulaPtr> comp;
      size_t s2 = 0;
      int depth = 0;
      for (size_t j = 0; j <= seg.size(); ++j) {
        if (j < seg.size() && seg[j] == '(') ++depth;
        if (j < seg.size() && seg[j] == ')') --depth;
        if (j == seg.size() || (seg[j] == ',' && depth == 0)) {
          std::string_view item = trim(seg.substr(s2, j - s2));
          if (!item.empty()) comp.push_back(parse_formula(item));
          s2 = j + 1;
        }
      }
      g.push_back(std::move(comp));
      start = k + 1;
    }
  }
  return g;
}

bool type_list_eq(const TypeList& a, const TypeList& b) {
  if (a.size() != b.size()) return false;
  for (size_t k = 0; k < a.size(); ++k) {
    if (a[k].size() != b[k].size()) return false;
    for (size_t j = 0; j < a[k].size(); ++j)
      if (!formula_eq(a[k][j], b[k][j])) return false;
  }
  return true;
}

P2Size p2_size(const TypeList& g) {
  P2Size sz;
  std::vector<long> lens;
  for (const auto& comp : g) {
    lens.push_back(static_cast<long>(comp.size()));
    for (const auto& f : comp) sz.flat += f->size;
  }
  sz.lengths = Multiset(std::move(lens));
  return sz;
}

}  // namespace mellglue
