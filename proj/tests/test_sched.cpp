#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "mellglue/sched.hpp"
#include "testgen.hpp"

using namespace mellglue;
namespace fx = mellglue::fixtures;

TEST_CASE("scheduling text round trips") {
  const char* text = "par_1 tensor_3 mix_2 ax_2 box_2 contr_1 der_2 weak_1 cut_2:?~X one_1 bot_1 exc_1 bax_2";
  Scheduling nu = parse_scheduling(text);
  CHECK(to_string(nu) == text);
  CHECK_THROWS_AS(parse_scheduling("frob_1"), Error);
  CHECK_THROWS_AS(parse_scheduling("der_0"), Error);
}

TEST_CASE("tensor splits in place") {
  TypeList g = parse_type_list("(A*B)");
  TypeList out = step_type(g, Step{StepKind::Tensor, 1, nullptr});
  CHECK(to_string(out) == "A, B");
}

TEST_CASE("the barbara scheduling type-checks to three empty lists") {
  TypeList g = parse_type_list("((X*~Y)|((Y*~Z)|(~X|Z)))");
  Scheduling nu = parse_scheduling("par_1 par_2 par_3 tensor_1 tensor_3 exc_1 exc_2 mix_2 ax_2 exc_2 mix_2 ax_2 ax_2");
  CHECK(nu.size() == 13);
  auto chain = type_check(g, nu);
  CHECK(to_string(chain.back()) == " ;  ; ");
}

TEST_CASE("ax on a non-dual pair fails") {
  TypeList g = parse_type_list("X ; Y");
  // position 2 in component 2: the component is not the dual pair
  CHECK(!try_step_type(g, Step{StepKind::Ax, 2, nullptr}));
  TypeList g2 = parse_type_list("X, Y");
  CHECK(!try_step_type(g2, Step{StepKind::Ax, 2, nullptr}));
  TypeList g3 = parse_type_list("X, ~X");
  CHECK(try_step_type(g3, Step{StepKind::Ax, 2, nullptr}));
  // exponential pairs are reserved for bax
  TypeList g4 = parse_type_list("?X, !~X");
  CHECK(!try_step_type(g4, Step{StepKind::Ax, 2, nullptr}));
  CHECK(try_step_type(g4, Step{StepKind::BangAx, 1, nullptr}));
}

TEST_CASE("exchange twice is the identity on structures") {
  QuasiProofStructure r = fx::pointed_quasi_R();
  Step e{StepKind::Exc, 1, nullptr};
  auto s1 = mell_successors(r, e);
  REQUIRE(s1.size() == 1);
  auto s2 = mell_successors(s1[0].second, e);
  REQUIRE(s2.size() == 1);
  CHECK(iso_eq(s2[0].second, r));
  CHECK(!iso_eq(s1[0].second, r));
}

TEST_CASE("mix_3 splits S into the quasi R") {
  QuasiProofStructure S = fx::fig5_S();
  auto succ = mell_successors(S, Step{StepKind::Mix, 3, nullptr});
  REQUIRE(succ.size() == 1);
  CHECK(!validate(succ[0].second));
  CHECK(iso_eq(succ[0].second, fx::pointed_quasi_R()));
}

TEST_CASE("dereliction cannot act on the boxed axiom Q") {
  QuasiProofStructure Q = fx::box_Q();
  CHECK(mell_successors(Q, Step{StepKind::Der, 1, nullptr}).empty());
}

TEST_CASE("box_2 fires on the quasi R's second component after isolating it") {
  // gray component = red box + orange box: box_4 needs the box alone, so it
  // must not apply before a mix
  QuasiProofStructure R = fx::pointed_quasi_R();
  CHECK(mell_successors(R, Step{StepKind::Box, 5, nullptr}).empty());
  auto mixed = mell_successors(R, Step{StepKind::Mix, 4, nullptr});
  REQUIRE(mixed.size() == 1);
  auto boxed = mell_successors(mixed[0].second, Step{StepKind::Box, 5, nullptr});
  REQUIRE(boxed.size() == 1);
  CHECK(!validate(boxed[0].second));
  CHECK(to_string(type_of(boxed[0].second)) == "~X, (X*?bot), ?!one ; !(?Y|~Y) ; one");
}

TEST_CASE("forward and backward round trip on the longex2 structure") {
  QuasiProofStructure R = fx::longex2_R();
  REQUIRE(!validate(R));
  Scheduling nu = parse_scheduling(fx::longex2_sched());
  TypeList g = type_of(R);
  std::vector<QuasiProofStructure> frontier{R};
  for (const auto& s : nu) {
    std::vector<QuasiProofStructure> next_frontier;
    for (const auto& cur : frontier)
      for (auto& [ch, next] : mell_successors(cur, s)) {
        REQUIRE(!validate(next));
        // every successor unapplies back to where it came from
        CHECK(iso_eq(mell_unapply(next, s, type_of(cur)), cur));
        next_frontier.push_back(std::move(next));
      }
    REQUIRE(!next_frontier.empty());
    g = step_type(g, s);
    for (const auto& q : next_frontier) CHECK(type_list_eq(type_of(q), g));
    frontier = std::move(next_frontier);
  }
  bool some_empty = false;
  for (const auto& q : frontier)
    if (classify(q).is_empty && q.comps.size() == 3) some_empty = true;
  CHECK(some_empty);
}

TEST_CASE("build recovers the longex2 structure from its scheduling") {
  Scheduling nu = parse_scheduling(fx::longex2_sched());
  QuasiProofStructure R = build(nu, type_of(fx::longex2_R()));
  CHECK(!validate(R));
  CHECK(iso_eq(R, fx::longex2_R()));
}

TEST_CASE("build on the empty scheduling gives empty structures") {
  TypeList g = parse_type_list(" ;  ; ");
  QuasiProofStructure q = build({}, g);
  CHECK(classify(q).is_empty);
  CHECK(q.comps.size() == 3);
}

TEST_CASE("unapply tensor rebuilds the cell over an axiom") {
  fx::Builder b;
  int ax = b.cell(CellKind::Ax);
  int x = b.out(ax, "X");
  int xp = b.out(ax, "~X");
  QuasiProofStructure r;
  r.comps.push_back(b.done({x, xp}));
  QuasiProofStructure before =
      mell_unapply(r, Step{StepKind::Tensor, 1, nullptr}, parse_type_list("(X*~X)"));
  CHECK(!validate(before));
  CHECK(to_string(type_of(before)) == "(X*~X)");
  auto fwd = mell_successors(before, Step{StepKind::Tensor, 1, nullptr});
  REQUIRE(fwd.size() == 1);
  CHECK(iso_eq(fwd[0].second, r));
}

TEST_CASE("build of the barbara scheduling is a cut-free net with three axioms") {
  TypeList g = parse_type_list("((X*~Y)|((Y*~Z)|(~X|Z)))");
  Scheduling nu = parse_scheduling("par_1 par_2 par_3 tensor_1 tensor_3 exc_1 exc_2 mix_2 ax_2 exc_2 mix_2 ax_2 ax_2");
  QuasiProofStructure R = build(nu, g);
  CHECK(!validate(R));
  CHECK(classify(R).is_mell);
  CHECK(classify(R).is_cut_free);
  CHECK(R.comps.size() == 1);
  int axes = 0;
  for (CellKind k : R.comps[0].m.kind)
    if (k == CellKind::Ax) ++axes;
  CHECK(axes == 3);
  CHECK(mell_replays_to_empty(R, nu));
}

TEST_CASE("normalize terminates and replays on the bundled structures") {
  for (const auto& r : {fx::fig5_S(), fx::pointed_quasi_R(), fx::longex2_R(), fx::fig8_S0(),
                        fx::box_Q(), fx::box_around_one(), fx::not_coherent_R12()}) {
    Scheduling nu = normalize(r);
    CHECK(mell_replays_to_empty(r, nu));
    CHECK(iso_eq(build(nu, type_of(r)), r));
  }
}

TEST_CASE("normalize of the empty structure is empty") {
  CHECK(normalize(empty_qps(2)).empty());
}

TEST_CASE("normalize of an axiom net is a single hypothesis step") {
  fx::Builder b;
  int ax = b.cell(CellKind::Ax);
  int x = b.out(ax, "X");
  int xp = b.out(ax, "~X");
  QuasiProofStructure r;
  r.comps.push_back(b.done({x, xp}));
  Scheduling nu = normalize(r);
  REQUIRE(nu.size() == 1);
  CHECK(nu[0].kind == StepKind::Ax);
}

TEST_CASE("round trip and monotonicity on random MELL steps") {
  std::mt19937 rng(2024);
  int steps_checked = 0;
  while (steps_checked < 10000) {
    QuasiProofStructure r = testgen::random_mell(rng, 3 + rng() % 8);
    TypeList g = type_of(r);
    auto moves = testgen::applicable_steps(r, rng);
    if (moves.empty()) continue;
    const Step& s = moves[rng() % moves.size()];
    auto succ = mell_successors(r, s);
    if (succ.empty()) continue;
    auto& [ch, next] = succ[rng() % succ.size()];
    REQUIRE(!validate(next));
    // co-functionality round trip
    QuasiProofStructure back = mell_unapply(next, s, g);
    CHECK(iso_eq(back, r));
    // measure monotonicity
    if (s.kind != StepKind::Exc && !(s.kind == StepKind::Contr && ch.nullary))
      CHECK(mell_size(next).compare(mell_size(r)) < 0);
    if (s.kind == StepKind::Exc) CHECK(mell_size(next).compare(mell_size(r)) == 0);
    ++steps_checked;
  }
}

TEST_CASE("normalize a generated corpus") {
  std::mt19937 rng(99);
  for (int round = 0; round < 200; ++round) {
    QuasiProofStructure r = testgen::random_mell(rng, 3 + rng() % 10);
    Scheduling nu = normalize(r);
    CHECK(mell_replays_to_empty(r, nu));
  }
}

TEST_CASE("dill box on the example structures") {
  Step box2{StepKind::Box, 2, nullptr};
  auto s0 = dill_successors(fx::ex_box_rho0(), box2);
  REQUIRE(s0.size() == 1);
  REQUIRE(s0[0].second.size() == 1);
  CHECK(iso_eq(s0[0].second[0], fx::ex_box_rho0p()));
  CHECK(s0[0].first.empty_box);

  auto s1 = dill_successors(fx::ex_box_rho1(), box2);
  REQUIRE(s1.size() == 1);
  REQUIRE(s1[0].second.size() == 1);
  CHECK(iso_eq(s1[0].second[0], fx::ex_box_rho1p()));

  auto s2 = dill_successors(fx::ex_box_rho2(), box2);
  REQUIRE(s2.size() == 1);
  REQUIRE(s2[0].second.size() == 2);
  NetSet got = make_net_set(s2[0].second);
  CHECK(net_set_contains(got, fx::ex_box_rho1p()));
  CHECK(net_set_contains(got, fx::ex_box_rho2p()));
}

TEST_CASE("set action on the example box set") {
  NetSet pi = make_net_set({fx::ex_box_rho0(), fx::ex_box_rho1(), fx::ex_box_rho2()});
  auto succ = set_successors(pi, Step{StepKind::Box, 2, nullptr});
  REQUIRE(succ.size() == 1);
  NetSet expect = make_net_set({fx::ex_box_rho0p(), fx::ex_box_rho1p(), fx::ex_box_rho2p()});
  CHECK(net_set_eq(succ[0], expect));
}

TEST_CASE("daimoned contraction extends the daimon") {
  QuasiProofStructure d;
  d.comps.push_back(daimon_ps({parse_formula("?~X"), parse_formula("!X")}));
  auto succ = dill_successors(d, Step{StepKind::Contr, 1, nullptr});
  REQUIRE(succ.size() == 1);
  CHECK(succ[0].first.daimoned);
  CHECK(to_string(type_of(succ[0].second[0])) == "?~X, ?~X, !X");
}

TEST_CASE("empty set rewrites to the empty set") {
  NetSet empty;
  empty.type = parse_type_list("(X*X)");
  auto succ = set_successors(empty, Step{StepKind::Tensor, 1, nullptr});
  REQUIRE(succ.size() == 1);
  CHECK(succ[0].elems.empty());
  CHECK(to_string(succ[0].type) == "X, X");
}

TEST_CASE("rewrite-diff: one path gets stuck, the other empties") {
  NetSet pi = make_net_set({fx::rewrite_diff_pi()});
  // contr_1 (proper 1-1 split) then der_1 der_2 reaches a stuck singleton
  NetSet stuck;
  bool found_stuck = false;
  for (auto& after_contr : set_successors(pi, Step{StepKind::Contr, 1, nullptr})) {
    for (auto& after_der1 : set_successors(after_contr, Step{StepKind::Der, 1, nullptr}))
      for (auto& after_der2 : set_successors(after_der1, Step{StepKind::Der, 2, nullptr})) {
        stuck = after_der2;
        found_stuck = true;
      }
  }
  REQUIRE(found_stuck);
  int n = conclusion_count(stuck.elems.front());
  for (StepKind k : {StepKind::Mix, StepKind::Ax, StepKind::BangAx, StepKind::Cut, StepKind::One,
                     StepKind::Bot, StepKind::Tensor, StepKind::Par, StepKind::Contr, StepKind::Der,
                     StepKind::Weak, StepKind::Box})
    for (int i = 1; i <= n + 1; ++i) {
      Step s{k, i, nullptr};
      if (k == StepKind::Cut) s.cut_formula = parse_formula("X");
      CHECK(set_successors(stuck, s).empty());
    }
  // under box_2 der_1 ax_2 the original singleton reaches {empty}
  NetSet goal = make_net_set({empty_qps(1)});
  CHECK(set_replays_to(pi, parse_scheduling("box_2 der_1 ax_2"), goal));
}

TEST_CASE("church: the singleton of pi empties under nu_1") {
  // nu_1^1 = der_2 tensor_2 mix_2 ax_4 box_2 der_1 ax_2
  NetSet pi = make_net_set({fx::church_pi()});
  NetSet goal = make_net_set({empty_qps(2)});
  CHECK(set_replays_to(pi, parse_scheduling("der_2 tensor_2 mix_2 ax_4 box_2 der_1 ax_2"), goal));
}

TEST_CASE("longex2 set replay reaches three empties") {
  NetSet pi = make_net_set({fx::longex2_rho()});
  NetSet goal = make_net_set({empty_qps(3)});
  CHECK(set_replays_to(pi, parse_scheduling(fx::longex2_sched()), goal));
}
