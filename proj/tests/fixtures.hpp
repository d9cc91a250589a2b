// Structures from the worked examples, encoded by hand for the tests.
#pragma once

#include "mellglue/net.hpp"
#include "mellglue/taylor.hpp"

namespace mellglue::fixtures {

struct Builder {
  ProofStructure ps;

  Builder() { ps.tree = bare_root(); }

  int vertex(int parent) {
    ps.tree.parent.push_back(parent);
    return ps.tree.size() - 1;
  }
  int cell(CellKind k, int box = 0) {
    int c = ps.m.add_cell(k);
    ps.box_v.push_back(box);
    return c;
  }
  int out(int c, const std::string& ty) {
    return ps.m.add_flag(c, Orient::Out, parse_formula(ty));
  }
  int in(int c, const std::string& ty) { return ps.m.add_flag(c, Orient::In, parse_formula(ty)); }
  // new input on `c` wired to the existing output flag `from`
  int feed(int c, int from) {
    int f = ps.m.add_flag(c, Orient::In, ps.m.type[from]);
    ps.m.glue(from, f);
    return f;
  }
  ProofStructure done(std::vector<int> conclusions) {
    ps.conclusions = std::move(conclusions);
    return ps;
  }
};

// Fig. "pointed-proof-net": the depth-2 structure with four boxes.
inline QuasiProofStructure fig5_S() {
  Builder b;
  int blue = b.vertex(0), purple = b.vertex(blue), red = b.vertex(0), orange = b.vertex(0);
  // purple box
  int one_p = b.cell(CellKind::One, purple);
  int onep_o = b.out(one_p, "one");
  int bot_p = b.cell(CellKind::Bot, purple);
  int botp_o = b.out(bot_p, "bot");
  // blue box
  int one_b = b.cell(CellKind::One, blue);
  int oneb_o = b.out(one_b, "one");
  int bang_p = b.cell(CellKind::Bang, blue);
  b.feed(bang_p, onep_o);
  int bangp_o = b.out(bang_p, "!one");
  // depth 0
  int bot0 = b.cell(CellKind::Bot);
  int bot0_o = b.out(bot0, "bot");
  int bang_b = b.cell(CellKind::Bang);
  b.feed(bang_b, oneb_o);
  int bangb_o = b.out(bang_b, "!one");
  int qbot = b.cell(CellKind::Quest);
  b.feed(qbot, bot0_o);
  b.feed(qbot, botp_o);
  int qbot_o = b.out(qbot, "?bot");
  int qbang = b.cell(CellKind::Quest);
  b.feed(qbang, bangp_o);
  b.feed(qbang, bangb_o);
  int qbang_o = b.out(qbang, "?!one");
  int ax = b.cell(CellKind::Ax);
  int ax_xp = b.out(ax, "~X");
  int ax_x = b.out(ax, "X");
  int tens = b.cell(CellKind::Tensor);
  b.feed(tens, ax_x);
  b.feed(tens, qbot_o);
  int tens_o = b.out(tens, "(X*?bot)");
  // red box
  int ax2 = b.cell(CellKind::Ax, red);
  int ax2_y = b.out(ax2, "Y");
  int ax2_yp = b.out(ax2, "~Y");
  int qy = b.cell(CellKind::Quest, red);
  b.feed(qy, ax2_y);
  int qy_o = b.out(qy, "?Y");
  int par = b.cell(CellKind::Par, red);
  b.feed(par, qy_o);
  b.feed(par, ax2_yp);
  int par_o = b.out(par, "(?Y|~Y)");
  int bang_r = b.cell(CellKind::Bang);
  b.feed(bang_r, par_o);
  int bangr_o = b.out(bang_r, "!(?Y|~Y)");
  // orange box
  int one_o = b.cell(CellKind::One, orange);
  int oneo_o = b.out(one_o, "one");
  int bang_o = b.cell(CellKind::Bang);
  b.feed(bang_o, oneo_o);
  int bango_o = b.out(bang_o, "!one");

  QuasiProofStructure q;
  q.comps.push_back(b.done({ax_xp, tens_o, qbang_o, bangr_o, bango_o}));
  return q;
}

// Fig. "pointed-quasi-proof-net": fig5_S after mix_3.
inline QuasiProofStructure pointed_quasi_R() {
  QuasiProofStructure q;
  {
    Builder b;
    int blue = b.vertex(0), purple = b.vertex(blue);
    int one_p = b.cell(CellKind::One, purple);
    int onep_o = b.out(one_p, "one");
    int bot_p = b.cell(CellKind::Bot, purple);
    int botp_o = b.out(bot_p, "bot");
    int one_b = b.cell(CellKind::One, blue);
    int oneb_o = b.out(one_b, "one");
    int bang_p = b.cell(CellKind::Bang, blue);
    b.feed(bang_p, onep_o);
    int bangp_o = b.out(bang_p, "!one");
    int bot0 = b.cell(CellKind::Bot);
    int bot0_o = b.out(bot0, "bot");
    int bang_b = b.cell(CellKind::Bang);
    b.feed(bang_b, oneb_o);
    int bangb_o = b.out(bang_b, "!one");
    int qbot = b.cell(CellKind::Quest);
    b.feed(qbot, bot0_o);
    b.feed(qbot, botp_o);
    int qbot_o = b.out(qbot, "?bot");
    int qbang = b.cell(CellKind::Quest);
    b.feed(qbang, bangp_o);
    b.feed(qbang, bangb_o);
    int qbang_o = b.out(qbang, "?!one");
    int ax = b.cell(CellKind::Ax);
    int ax_xp = b.out(ax, "~X");
    int ax_x = b.out(ax, "X");
    int tens = b.cell(CellKind::Tensor);
    b.feed(tens, ax_x);
    b.feed(tens, qbot_o);
    int tens_o = b.out(tens, "(X*?bot)");
    q.comps.push_back(b.done({ax_xp, tens_o, qbang_o}));
  }
  {
    Builder b;
    int red = b.vertex(0), orange = b.vertex(0);
    int ax2 = b.cell(CellKind::Ax, red);
    int ax2_y = b.out(ax2, "Y");
    int ax2_yp = b.out(ax2, "~Y");
    int qy = b.cell(CellKind::Quest, red);
    b.feed(qy, ax2_y);
    int qy_o = b.out(qy, "?Y");
    int par = b.cell(CellKind::Par, red);
    b.feed(par, qy_o);
    b.feed(par, ax2_yp);
    int par_o = b.out(par, "(?Y|~Y)");
    int bang_r = b.cell(CellKind::Bang);
    b.feed(bang_r, par_o);
    int bangr_o = b.out(bang_r, "!(?Y|~Y)");
    int one_o = b.cell(CellKind::One, orange);
    int oneo_o = b.out(one_o, "one");
    int bang_o = b.cell(CellKind::Bang);
    b.feed(bang_o, oneo_o);
    int bango_o = b.out(bang_o, "!one");
    q.comps.push_back(b.done({bangr_o, bango_o}));
  }
  return q;
}

// Example "proto-taylor": 3 copies of the blue box carrying 1, 0 and 2
// copies of the purple one; 1 red copy; 4 orange copies.
inline ThickSubforest proto_taylor_subforest() {
  ThickSubforest f;
  {
    ThickSubtree t;
    t.tree.parent = {-1, 0, 0, 0, 1, 3, 3};
    t.to_target = {0, 1, 1, 1, 2, 2, 2};
    f.trees.push_back(std::move(t));
  }
  {
    ThickSubtree t;
    t.tree.parent = {-1, 0, 0, 0, 0, 0};
    t.to_target = {0, 1, 2, 2, 2, 2};
    f.trees.push_back(std::move(t));
  }
  return f;
}

// Fig. "taylor-expansion": the element of T(R) obtained from the subforest
// above, encoded directly.
inline QuasiProofStructure fig6_element() {
  QuasiProofStructure q;
  {
    Builder b;
    // three copies of the blue box; purple copies: 1, 0, 2
    int bang_b = b.cell(CellKind::Bang);
    int qbang = b.cell(CellKind::Quest);
    int qbot = b.cell(CellKind::Quest);
    int bot0 = b.cell(CellKind::Bot);
    b.feed(qbot, b.out(bot0, "bot"));
    std::vector<int> purple_per_copy{1, 0, 2};
    for (int copy = 0; copy < 3; ++copy) {
      int one_b = b.cell(CellKind::One);
      b.feed(bang_b, b.out(one_b, "one"));
      int bang_p = b.cell(CellKind::Bang);
      for (int p = 0; p < purple_per_copy[copy]; ++p) {
        int one_p = b.cell(CellKind::One);
        b.feed(bang_p, b.out(one_p, "one"));
        int bot_p = b.cell(CellKind::Bot);
        b.feed(qbot, b.out(bot_p, "bot"));
      }
      b.feed(qbang, b.out(bang_p, "!one"));
    }
    b.feed(qbang, b.out(bang_b, "!one"));
    int qbang_o = b.out(qbang, "?!one");
    int qbot_o = b.out(qbot, "?bot");
    int ax = b.cell(CellKind::Ax);
    int ax_xp = b.out(ax, "~X");
    int ax_x = b.out(ax, "X");
    int tens = b.cell(CellKind::Tensor);
    b.feed(tens, ax_x);
    b.feed(tens, qbot_o);
    int tens_o = b.out(tens, "(X*?bot)");
    q.comps.push_back(b.done({ax_xp, tens_o, qbang_o}));
  }
  {
    Builder b;
    // one red copy, four orange copies
    int ax2 = b.cell(CellKind::Ax);
    int ax2_y = b.out(ax2, "Y");
    int ax2_yp = b.out(ax2, "~Y");
    int qy = b.cell(CellKind::Quest);
    b.feed(qy, ax2_y);
    int qy_o = b.out(qy, "?Y");
    int par = b.cell(CellKind::Par);
    b.feed(par, qy_o);
    b.feed(par, ax2_yp);
    int par_o = b.out(par, "(?Y|~Y)");
    int bang_r = b.cell(CellKind::Bang);
    b.feed(bang_r, par_o);
    int bangr_o = b.out(bang_r, "!(?Y|~Y)");
    int bang_o = b.cell(CellKind::Bang);
    for (int copy = 0; copy < 4; ++copy) {
      int one_o = b.cell(CellKind::One);
      b.feed(bang_o, b.out(one_o, "one"));
    }
    int bango_o = b.out(bang_o, "!one");
    q.comps.push_back(b.done({bangr_o, bango_o}));
  }
  return q;
}

// Fig. "emptyings": first component emptied; red taken 0 times, orange
// twice.
inline QuasiProofStructure fig7_emptying() {
  QuasiProofStructure q;
  q.comps.push_back(
      daimon_ps({parse_formula("~X"), parse_formula("(X*?bot)"), parse_formula("?!one")}));
  Builder b;
  int cow = b.cell(CellKind::Bang);
  int cow_o = b.out(cow, "!(?Y|~Y)");
  int bang_o = b.cell(CellKind::Bang);
  for (int copy = 0; copy < 2; ++copy) {
    int one_o = b.cell(CellKind::One);
    b.feed(bang_o, b.out(one_o, "one"));
  }
  int bango_o = b.out(bang_o, "!one");
  q.comps.push_back(b.done({cow_o, bango_o}));
  return q;
}

// Fig. "longex2".
inline QuasiProofStructure longex2_rho() {
  Builder b;
  int w = b.cell(CellKind::Quest);
  int w_o = b.out(w, "??bot");
  int cow = b.cell(CellKind::Bang);
  int cow_o = b.out(cow, "!!(~X|X)");
  QuasiProofStructure q;
  q.comps.push_back(b.done({w_o, cow_o}));
  return q;
}

inline QuasiProofStructure longex2_R() {
  Builder b;
  int outer = b.vertex(0), inner = b.vertex(outer);
  int ax = b.cell(CellKind::Ax, inner);
  int ax_xp = b.out(ax, "~X");
  int ax_x = b.out(ax, "X");
  int par = b.cell(CellKind::Par, inner);
  b.feed(par, ax_xp);
  b.feed(par, ax_x);
  int par_o = b.out(par, "(~X|X)");
  int bot1 = b.cell(CellKind::Bot, inner);
  int bot2 = b.cell(CellKind::Bot, inner);
  int wbot = b.cell(CellKind::Quest, outer);
  b.feed(wbot, b.out(bot1, "bot"));
  b.feed(wbot, b.out(bot2, "bot"));
  int wbot_o = b.out(wbot, "?bot");
  int bang_i = b.cell(CellKind::Bang, outer);
  b.feed(bang_i, par_o);
  int bangi_o = b.out(bang_i, "!(~X|X)");
  int wwbot = b.cell(CellKind::Quest);
  b.feed(wwbot, wbot_o);
  int wwbot_o = b.out(wwbot, "??bot");
  int bang_o = b.cell(CellKind::Bang);
  b.feed(bang_o, bangi_o);
  int bango_o = b.out(bang_o, "!!(~X|X)");
  QuasiProofStructure q;
  q.comps.push_back(b.done({wwbot_o, bango_o}));
  return q;
}

inline const char* longex2_sched() {
  return "box_2 der_1 box_2 par_2 mix_1 ax_3 contr_1 der_2 mix_1 bot_2 der_1 bot_1";
}

// Example "not-coherent": three structures gluable two by two but not as a
// whole; bang arities and quest arities per position.
inline QuasiProofStructure not_coherent(int bang1, int bang2, int bang3, int q4, int q5, int q6) {
  Builder b;
  std::vector<int> concl;
  for (int arity : {bang1, bang2, bang3}) {
    int bang = b.cell(CellKind::Bang);
    for (int j = 0; j < arity; ++j) {
      int one = b.cell(CellKind::One);
      b.feed(bang, b.out(one, "one"));
    }
    concl.push_back(b.out(bang, "!one"));
  }
  for (int arity : {q4, q5, q6}) {
    int quest = b.cell(CellKind::Quest);
    for (int j = 0; j < arity; ++j) {
      int bot = b.cell(CellKind::Bot);
      b.feed(quest, b.out(bot, "bot"));
    }
    concl.push_back(b.out(quest, "?bot"));
  }
  QuasiProofStructure q;
  q.comps.push_back(b.done(std::move(concl)));
  return q;
}

inline QuasiProofStructure not_coherent_rho1() { return not_coherent(2, 1, 1, 1, 2, 2); }
inline QuasiProofStructure not_coherent_rho2() { return not_coherent(1, 2, 1, 2, 1, 2); }
inline QuasiProofStructure not_coherent_rho3() { return not_coherent(1, 1, 2, 2, 2, 1); }

inline QuasiProofStructure not_coherent_R12() {
  Builder b;
  int b1 = b.vertex(0), b2 = b.vertex(0), b3 = b.vertex(0);
  int one1 = b.cell(CellKind::One, b1);
  int bot5 = b.cell(CellKind::Bot, b1);
  int one2 = b.cell(CellKind::One, b2);
  int bot4 = b.cell(CellKind::Bot, b2);
  int one3 = b.cell(CellKind::One, b3);
  int bot6 = b.cell(CellKind::Bot);
  int bot7 = b.cell(CellKind::Bot);
  int B1 = b.cell(CellKind::Bang);
  b.feed(B1, b.out(one1, "one"));
  int B1_o = b.out(B1, "!one");
  int B2 = b.cell(CellKind::Bang);
  b.feed(B2, b.out(one2, "one"));
  int B2_o = b.out(B2, "!one");
  int B3 = b.cell(CellKind::Bang);
  b.feed(B3, b.out(one3, "one"));
  int B3_o = b.out(B3, "!one");
  int q4 = b.cell(CellKind::Quest);
  b.feed(q4, b.out(bot4, "bot"));
  int q4_o = b.out(q4, "?bot");
  int q5 = b.cell(CellKind::Quest);
  b.feed(q5, b.out(bot5, "bot"));
  int q5_o = b.out(q5, "?bot");
  int q6 = b.cell(CellKind::Quest);
  b.feed(q6, b.out(bot6, "bot"));
  b.feed(q6, b.out(bot7, "bot"));
  int q6_o = b.out(q6, "?bot");
  QuasiProofStructure q;
  q.comps.push_back(b.done({B1_o, B2_o, B3_o, q4_o, q5_o, q6_o}));
  return q;
}

// Fig. "rewrite-with-cut": the co-weakening of type !X and the structure S0
// it expands from.
inline QuasiProofStructure fig8_sigma0() {
  Builder b;
  int cow = b.cell(CellKind::Bang);
  int cow_o = b.out(cow, "!X");
  QuasiProofStructure q;
  q.comps.push_back(b.done({cow_o}));
  return q;
}

inline QuasiProofStructure fig8_S0() {
  Builder b;
  int outer = b.vertex(0), inner = b.vertex(outer);
  int ax = b.cell(CellKind::Ax, outer);
  int ax_x = b.out(ax, "X");
  int ax_xp = b.out(ax, "~X");
  int axA = b.cell(CellKind::Ax, inner);
  int axA_xp = b.out(axA, "~X");
  int axA_x = b.out(axA, "X");
  int qc = b.cell(CellKind::Quest, outer);
  b.feed(qc, ax_xp);
  b.feed(qc, axA_xp);
  int qc_o = b.out(qc, "?~X");
  int bc = b.cell(CellKind::Bang, outer);
  b.feed(bc, axA_x);
  int bc_o = b.out(bc, "!X");
  int cut = b.cell(CellKind::Cut, outer);
  b.feed(cut, bc_o);
  b.feed(cut, qc_o);
  int BC = b.cell(CellKind::Bang);
  b.feed(BC, ax_x);
  int BC_o = b.out(BC, "!X");
  QuasiProofStructure q;
  q.comps.push_back(b.done({BC_o}));
  return q;
}

// Example "box": rho_0, rho_1, rho_2 and their box_2 results.
inline QuasiProofStructure ex_box_rho0() {
  Builder b;
  int w = b.cell(CellKind::Quest);
  int w_o = b.out(w, "?X");
  int cow = b.cell(CellKind::Bang);
  int cow_o = b.out(cow, "!!~X");
  QuasiProofStructure q;
  q.comps.push_back(b.done({w_o, cow_o}));
  return q;
}

inline QuasiProofStructure ex_box_rho1() {
  Builder b;
  int w = b.cell(CellKind::Quest);
  int w_o = b.out(w, "?X");
  int cow = b.cell(CellKind::Bang);
  int cow_o = b.out(cow, "!~X");
  int t = b.cell(CellKind::Bang);
  b.feed(t, cow_o);
  int t_o = b.out(t, "!!~X");
  QuasiProofStructure q;
  q.comps.push_back(b.done({w_o, t_o}));
  return q;
}

inline QuasiProofStructure ex_box_rho2() {
  Builder b;
  int ax = b.cell(CellKind::Ax);
  int ax_x = b.out(ax, "X");
  int ax_xp = b.out(ax, "~X");
  int w = b.cell(CellKind::Quest);
  b.feed(w, ax_x);
  int w_o = b.out(w, "?X");
  int bx = b.cell(CellKind::Bang);
  b.feed(bx, ax_xp);
  int bx_o = b.out(bx, "!~X");
  int cow = b.cell(CellKind::Bang);
  int cow_o = b.out(cow, "!~X");
  int t = b.cell(CellKind::Bang);
  b.feed(t, bx_o);
  b.feed(t, cow_o);
  int t_o = b.out(t, "!!~X");
  QuasiProofStructure q;
  q.comps.push_back(b.done({w_o, t_o}));
  return q;
}

inline QuasiProofStructure ex_box_rho0p() {
  QuasiProofStructure q;
  q.comps.push_back(daimon_ps({parse_formula("?X"), parse_formula("!~X")}));
  return q;
}

inline QuasiProofStructure ex_box_rho1p() {
  Builder b;
  int w = b.cell(CellKind::Quest);
  int w_o = b.out(w, "?X");
  int cow = b.cell(CellKind::Bang);
  int cow_o = b.out(cow, "!~X");
  QuasiProofStructure q;
  q.comps.push_back(b.done({w_o, cow_o}));
  return q;
}

inline QuasiProofStructure ex_box_rho2p() {
  Builder b;
  int ax = b.cell(CellKind::Ax);
  int ax_x = b.out(ax, "X");
  int ax_xp = b.out(ax, "~X");
  int w = b.cell(CellKind::Quest);
  b.feed(w, ax_x);
  int w_o = b.out(w, "?X");
  int bx = b.cell(CellKind::Bang);
  b.feed(bx, ax_xp);
  int bx_o = b.out(bx, "!~X");
  QuasiProofStructure q;
  q.comps.push_back(b.done({w_o, bx_o}));
  return q;
}

// Example "church": pi with conclusions (?~X, ?(!X*~X), X).
inline QuasiProofStructure church_pi() {
  Builder b;
  int w = b.cell(CellKind::Quest);
  int w_o = b.out(w, "?~X");
  int cow = b.cell(CellKind::Bang);
  int cow_o = b.out(cow, "!X");
  int ax = b.cell(CellKind::Ax);
  int ax_xp = b.out(ax, "~X");
  int ax_x = b.out(ax, "X");
  int tens = b.cell(CellKind::Tensor);
  b.feed(tens, cow_o);
  b.feed(tens, ax_xp);
  int tens_o = b.out(tens, "(!X*~X)");
  int qt = b.cell(CellKind::Quest);
  b.feed(qt, tens_o);
  int qt_o = b.out(qt, "?(!X*~X)");
  QuasiProofStructure q;
  q.comps.push_back(b.done({w_o, qt_o, ax_x}));
  return q;
}

// Fig. "rewrite-diff": two axioms over a binary !-cell and a binary ?-cell.
inline QuasiProofStructure rewrite_diff_pi() {
  Builder b;
  int ax1 = b.cell(CellKind::Ax);
  int ax1_xp = b.out(ax1, "~X");
  int ax1_x = b.out(ax1, "X");
  int ax2 = b.cell(CellKind::Ax);
  int ax2_xp = b.out(ax2, "~X");
  int ax2_x = b.out(ax2, "X");
  int bang = b.cell(CellKind::Bang);
  b.feed(bang, ax1_x);
  b.feed(bang, ax2_x);
  int bang_o = b.out(bang, "!X");
  int quest = b.cell(CellKind::Quest);
  b.feed(quest, ax1_xp);
  b.feed(quest, ax2_xp);
  int quest_o = b.out(quest, "?~X");
  QuasiProofStructure q;
  q.comps.push_back(b.done({quest_o, bang_o}));
  return q;
}

// The box-around-an-axiom Q of the dereliction discussion.
inline QuasiProofStructure box_Q() {
  Builder b;
  int box = b.vertex(0);
  int ax = b.cell(CellKind::Ax, box);
  int ax_x = b.out(ax, "X");
  int ax_xp = b.out(ax, "~X");
  int qc = b.cell(CellKind::Quest);
  b.feed(qc, ax_x);
  int qc_o = b.out(qc, "?X");
  int bc = b.cell(CellKind::Bang);
  b.feed(bc, ax_xp);
  int bc_o = b.out(bc, "!~X");
  QuasiProofStructure q;
  q.comps.push_back(b.done({qc_o, bc_o}));
  return q;
}

// Same module, but the box assignment leaves the box-tree edge without a
// principal door: not a proof-structure.
inline QuasiProofStructure box_Q_bad() {
  Builder b;
  b.vertex(0);  // an input of the box-tree nothing maps onto
  int ax = b.cell(CellKind::Ax);
  int ax_x = b.out(ax, "X");
  int ax_xp = b.out(ax, "~X");
  int qc = b.cell(CellKind::Quest);
  b.feed(qc, ax_x);
  int qc_o = b.out(qc, "?X");
  int bc = b.cell(CellKind::Bang);
  b.feed(bc, ax_xp);
  int bc_o = b.out(bc, "!~X");
  QuasiProofStructure q;
  q.comps.push_back(b.done({qc_o, bc_o}));
  return q;
}

// A box around a single one-cell, of type (!one).
inline QuasiProofStructure box_around_one() {
  Builder b;
  int box = b.vertex(0);
  int one = b.cell(CellKind::One, box);
  int one_o = b.out(one, "one");
  int bang = b.cell(CellKind::Bang);
  b.feed(bang, one_o);
  int bang_o = b.out(bang, "!one");
  QuasiProofStructure q;
  q.comps.push_back(b.done({bang_o}));
  return q;
}

}  // namespace mellglue::fixtures
