#include "doctest.h"
#include "lamref/harness.hpp"
#include "lamref/opsem.hpp"
#include "lamref/parser.hpp"

using namespace lamref;

TEST_CASE("untyped heaps typecheck in at most one way") {
  Signature sig = constant_bool_signature();
  Layout w;
  w.cells[0] = "d";
  UntypedHeap ok = {{0, mk_bool(true)}};
  CHECK(to_typed(sig, w, ok).contents.size() == 1);
  CHECK_THROWS_AS(to_typed(sig, w, UntypedHeap{}), IllTypedHeapError);

  Signature lists = example_list_signature();
  Layout wl;
  wl.cells[0] = "list";
  // inj2 #1 : 1 + ref cell dangles when #1 is not allocated
  UntypedHeap dangling = {
      {0, mk_inj(2, mk_loc(1),
                 Type::from_ground(lists.content_type("list")))}};
  CHECK_THROWS_AS(to_typed(lists, wl, dangling), IllTypedHeapError);
}

TEST_CASE("fresh locations take the smallest free indices") {
  Layout w;
  w.cells[0] = "d";
  w.cells[2] = "d";
  CHECK(fresh_locations(w, 2) == std::vector<int>{1, 3});
  CHECK(fresh_locations(Layout{}, 1) == std::vector<int>{0});
  Layout w1;
  w1.cells[0] = "d";
  CHECK(fresh_locations(w1, 1) == std::vector<int>{1});
}

TEST_CASE("substitution") {
  CHECK(alpha_eq(substitute(mk_var("x"), {{"x", mk_star()}}), mk_star()));
  // no capture: (fun x -> y)[y := x] renames the binder
  TermPtr t = mk_fun("x", Type::unit(), mk_var("y"));
  TermPtr s = substitute(t, {{"y", mk_var("x")}});
  REQUIRE(s->kind == Term::Kind::Fun);
  CHECK(s->t0->kind == Term::Kind::Var);
  CHECK(s->t0->var == "x");
  CHECK(s->var != "x");
  // allocation-rule shape: body[xi := li]
  TermPtr body = mk_pair(mk_var("a"), mk_var("b"));
  TermPtr subbed = substitute(body, {{"a", mk_loc(0)}, {"b", mk_loc(1)}});
  CHECK(alpha_eq(subbed, mk_pair(mk_loc(0), mk_loc(1))));
}

TEST_CASE("allocation evaluates with smallest fresh locations") {
  Signature sig = constant_bool_signature();
  TermPtr t = parse_term(sig, Layout{}, "new {x : d = inj1 ()} in !x");
  EvalResult r = eval(sig, Config{t, {}});
  CHECK(alpha_eq(r.value, mk_bool(true)));
  REQUIRE(r.heap.size() == 1);
  CHECK(alpha_eq(r.heap.at(0), mk_bool(true)));
  REQUIRE(r.allocations.size() == 1);
  CHECK(r.allocations[0] == std::pair<int, std::string>{0, "d"});
}

TEST_CASE("the swap program swaps") {
  Signature sig = example_list_signature();
  Layout w;
  w.cells[0] = "data";
  w.cells[1] = "data";
  TermPtr t = parse_term(sig, w, "let x = !#0 in (#0 := !#1; #1 := x)");
  UntypedHeap h = {{0, mk_bool(true)}, {1, mk_bool(false)}};
  EvalResult r = eval(sig, Config{t, h});
  CHECK(alpha_eq(r.value, mk_star()));
  CHECK(alpha_eq(r.heap.at(0), mk_bool(false)));
  CHECK(alpha_eq(r.heap.at(1), mk_bool(true)));
}

TEST_CASE("values evaluate to themselves") {
  Signature sig = constant_bool_signature();
  UntypedHeap h = {{0, mk_bool(true)}};
  for (const TermPtr& v :
       {mk_star(), mk_bool(false), mk_pair(mk_star(), mk_bool(true)),
        mk_loc(0), mk_fun("x", Type::unit(), mk_var("x"))}) {
    EvalResult r = eval(sig, Config{v, h});
    CHECK(alpha_eq(r.value, v));
    CHECK(r.heap.size() == h.size());
  }
}

TEST_CASE("cyclic list allocation produces the documented cycle") {
  const char* src =
      "cell list = 1 + ref cell;"
      "cell cell = ref data * ref list;"
      "cell data = bool;"
      "new {payload : data = true,"
      "     lst : list = inj2 head,"
      "     head : cell = (payload, lst)} in lst";
  ParsedProgram p = parse_program(src);
  EvalResult r = eval(p.sig, Config{p.term, {}});
  // payload -> #0, lst -> #1, head -> #2 under the smallest-free policy
  CHECK(alpha_eq(r.value, mk_loc(1)));
  REQUIRE(r.heap.size() == 3);
  CHECK(alpha_eq(r.heap.at(0), mk_bool(true)));
  REQUIRE(r.heap.at(1)->kind == Term::Kind::Inj);
  CHECK(r.heap.at(1)->t0->loc == 2);  // lst points at head
  REQUIRE(r.heap.at(2)->kind == Term::Kind::Pair);
  CHECK(r.heap.at(2)->t0->loc == 0);  // head points at payload
  CHECK(r.heap.at(2)->t1->loc == 1);  // ... and back at lst
  // the final heap is well-typed
  Layout w2;
  for (const auto& [l, s] : r.allocations) w2.cells[l] = s;
  CHECK(to_typed(p.sig, w2, r.heap).contents.size() == 3);
}

TEST_CASE("ill-typed dead ends are reported as stuck") {
  Signature sig = constant_bool_signature();
  CHECK_THROWS_AS(eval(sig, Config{mk_deref(mk_star()), {}}), StuckError);
  CHECK_THROWS_AS(eval(sig, Config{mk_app(mk_star(), mk_star()), {}}),
                  StuckError);
  // assignment outside the heap hits the side condition
  CHECK_THROWS_AS(eval(sig, Config{mk_assign(mk_loc(7), mk_bool(true)), {}}),
                  StuckError);
}

TEST_CASE("preservation and totality on a generated corpus") {
  Signature sig = example_list_signature();
  Context ctx;
  int evaluated = 0;
  for (uint64_t seed = 1; seed <= 300; ++seed) {
    GeneratedTerm g = gen_well_typed(sig, 10, seed);
    auto heaps = enumerate_heaps(sig, g.layout);
    if (heaps.empty()) continue;
    const TypedHeap& H1 = heaps.front();
    EvalResult r = eval(sig, Config{g.term, H1.contents});  // must not throw
    Layout w2 = g.layout;
    for (const auto& [l, s] : r.allocations) w2.cells[l] = s;
    CHECK(type_eq(infer(sig, w2, ctx, r.value), g.type));
    CHECK(to_typed(sig, w2, r.heap).contents.size() == w2.cells.size());
    ++evaluated;
  }
  CHECK(evaluated > 200);
}
