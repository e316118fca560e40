#include "doctest.h"
#include "lamref/parser.hpp"
#include "lamref/worlds.hpp"

using namespace lamref;

namespace {

World w_of(const std::string& s) { return parse_layout(s); }

}  // namespace

TEST_CASE("numof is the smallest index beyond the support") {
  CHECK(numof(World{}) == 0);
  CHECK(numof(w_of("{#0:d, #2:d}")) == 3);
  CHECK(numof(w_of("{#5:d}")) == 6);
}

TEST_CASE("independent coproduct shifts the second summand") {
  {
    auto cp = indep_coproduct(w_of("{#0:d}"), w_of("{#0:d}"));
    CHECK(cp.world == w_of("{#0:d, #1:d}"));
    CHECK(cp.into1(0) == 0);
    CHECK(cp.into2(0) == 1);
  }
  {
    World w = w_of("{#0:d, #1:c}");
    auto cp = indep_coproduct(World{}, w);
    CHECK(cp.world == w);
    CHECK(cp.into2.is_identity());
  }
  {
    auto cp = indep_coproduct(w_of("{#0:d, #2:c}"), w_of("{#1:d}"));
    CHECK(cp.into2(1) == 4);  // numof = 3, so #(3+1)
  }
}

TEST_CASE("every location decomposes uniquely through the coprojections") {
  for (const auto& w1 : {World{}, w_of("{#0:d}"), w_of("{#0:d, #1:c}")})
    for (const auto& w2 : {World{}, w_of("{#0:c}"), w_of("{#0:d, #2:d}")}) {
      auto cp = indep_coproduct(w1, w2);
      for (const auto& [l, _] : cp.world.cells) {
        int count = 0;
        if (cp.into1.hits(l)) ++count;
        if (cp.into2.hits(l)) ++count;
        CHECK(count == 1);
      }
    }
}

TEST_CASE("complement collects the missed locations") {
  World w2 = w_of("{#0:d, #1:c}");
  Injection id = Injection::identity(w2);
  CHECK(complement(id).dom().cells.empty());

  Injection h = Injection::inclusion(w_of("{#0:d}"), w2);
  Injection c = complement(h);
  CHECK(c.dom() == w_of("{#1:c}"));

  auto cp = indep_coproduct(w_of("{#0:d}"), w_of("{#0:c, #1:c}"));
  CHECK(complement(cp.into1).dom().size() == 2);
  CHECK(complement(cp.into2).dom().size() == 1);
}

TEST_CASE("defrag: w1 (+) (w2 (-) h) is isomorphic to w2") {
  Injection h =
      Injection::inclusion(w_of("{#1:d}"), w_of("{#0:c, #1:d, #3:c}"));
  Injection iso = defrag_iso(h);
  CHECK(iso.dom().size() == 3);
  CHECK(iso.cod() == h.cod());
  std::set<int> image;
  for (const auto& [_, dst] : iso.mapping()) image.insert(dst);
  CHECK(image.size() == 3);  // bijective onto w2
}

TEST_CASE("local coproduct commutes over the shared domain") {
  World w = w_of("{#0:d}");
  {
    Injection id = Injection::identity(w);
    auto lcp = local_coproduct(id, id);
    CHECK(lcp.world.size() == 1);
    CHECK(lcp.from_cod1 == lcp.from_cod2);
  }
  {
    Injection h1(World{}, w_of("{#0:d}"), {});
    Injection h2(World{}, w_of("{#0:c}"), {});
    auto lcp = local_coproduct(h1, h2);
    CHECK(lcp.world == w_of("{#0:d, #1:c}"));
  }
  // exhaustive commutation at small worlds
  Signature sig = example_list_signature();
  int cases = 0;
  for (const auto& base : enumerate_worlds(sig, 1))
    for (const auto& w1 : enumerate_worlds(sig, 2))
      for (const auto& h1 : enumerate_injections(base, w1))
        for (const auto& w2 : enumerate_worlds(sig, 2))
          for (const auto& h2 : enumerate_injections(base, w2)) {
            auto lcp = local_coproduct(h1, h2);
            CHECK(compose(lcp.from_cod1, h1) == compose(lcp.from_cod2, h2));
            ++cases;
          }
  CHECK(cases == 316);
}

TEST_CASE("no codiagonal out of w (+) w") {
  World w = w_of("{#0:d}");
  auto cp = indep_coproduct(w, w);
  CHECK(enumerate_injections(cp.world, w).empty());
}

TEST_CASE("type interpretation at a world") {
  Signature sig = example_list_signature();
  {
    auto vs =
        interp_type(sig, GroundType::ref("data"), w_of("{#0:data, #1:cell}"));
    REQUIRE(vs.size() == 1);
    CHECK(vs[0] == SemValue::loc(0));
  }
  for (const auto& w : enumerate_worlds(sig, 2)) {
    auto vs = interp_type(sig, GroundType::boolean(), w);
    CHECK(vs.size() == 2);
  }
  CHECK(interp_type(sig,
                    GroundType::product(GroundType::ref("cell"),
                                        GroundType::ref("cell")),
                    w_of("{#0:cell, #1:cell}"))
            .size() == 4);
  CHECK(interp_type(sig, GroundType::empty(), World{}).empty());
}

TEST_CASE("interpretation action on locations") {
  Signature sig = example_list_signature();
  World a = w_of("{#0:data}");
  World b = w_of("{#1:cell, #3:data}");
  Injection h(a, b, {{0, 3}});
  CHECK(interp_action(sig, GroundType::ref("data"), h, SemValue::loc(0)) ==
        SemValue::loc(3));
  CHECK(interp_action(sig, GroundType::boolean(), h,
                      SemValue::inj(1, SemValue::star())) ==
        SemValue::inj(1, SemValue::star()));
  CHECK_THROWS_AS(
      interp_action(sig, GroundType::ref("cell"), h, SemValue::loc(0)),
      LamrefError);
}

TEST_CASE("interpretation is functorial") {
  Signature sig = example_list_signature();
  std::vector<GroundTypePtr> types = {GroundType::boolean(),
                                      GroundType::ref("data"),
                                      sig.content_type("list"),
                                      sig.content_type("cell")};
  for (const auto& w1 : enumerate_worlds(sig, 2)) {
    for (const auto& g : types) {
      Injection id = Injection::identity(w1);
      for (const auto& v : interp_type(sig, g, w1))
        CHECK(interp_action(sig, g, id, v) == v);
      for (const auto& w2 : enumerate_worlds(sig, 3)) {
        for (const auto& h1 : enumerate_injections(w1, w2))
          for (const auto& h2 : enumerate_injections(w2, w2)) {
            for (const auto& v : interp_type(sig, g, w1)) {
              SemValue lhs = interp_action(sig, g, compose(h2, h1), v);
              SemValue rhs =
                  interp_action(sig, g, h2, interp_action(sig, g, h1, v));
              CHECK(lhs == rhs);
            }
          }
      }
    }
  }
}

TEST_CASE("coproduct is functorial and the coprojections are natural") {
  Signature sig = constant_bool_signature();
  for (const auto& w1 : enumerate_worlds(sig, 2))
    for (const auto& w1p : enumerate_worlds(sig, 2))
      for (const auto& f : enumerate_injections(w1, w1p))
        for (const auto& w2 : enumerate_worlds(sig, 2))
          for (const auto& w2p : enumerate_worlds(sig, 2))
            for (const auto& g : enumerate_injections(w2, w2p)) {
              auto cp = indep_coproduct(w1, w2);
              auto cpp = indep_coproduct(w1p, w2p);
              std::map<int, int> m;
              for (const auto& [l, _] : w1.cells)
                m[cp.into1(l)] = cpp.into1(f(l));
              for (const auto& [l, _] : w2.cells)
                m[cp.into2(l)] = cpp.into2(g(l));
              Injection fg(cp.world, cpp.world, m);
              CHECK(compose(fg, cp.into1) == compose(cpp.into1, f));
              CHECK(compose(fg, cp.into2) == compose(cpp.into2, g));
            }
}

TEST_CASE("world enumeration counts and order") {
  Signature one = constant_bool_signature();
  auto ws1 = enumerate_worlds(one, 1);
  REQUIRE(ws1.size() == 2);
  CHECK(ws1[0] == World{});
  CHECK(ws1[1] == w_of("{#0:d}"));

  Signature two = validate_signature(
      {{"a", GroundType::unit()}, {"b", GroundType::boolean()}});
  CHECK(enumerate_worlds(two, 1).size() == 3);
  CHECK(enumerate_worlds(two, 2).size() == 7);
}

TEST_CASE("transport composes through closures") {
  Signature sig = constant_bool_signature();
  World w = w_of("{#0:d}");
  World w2 = w_of("{#0:d, #1:d}");
  auto c = std::make_shared<ClosureData>();
  c->sig = &sig;
  c->judgement_layout = w;
  c->binder = "x";
  c->binder_type = Type::unit();
  c->result_type = Type::boolean();
  c->body = mk_deref(mk_loc(0));
  c->loc_env = Injection::identity(w);
  SemValue v = SemValue::closure(c);
  Injection h(w, w2, {{0, 1}});
  SemValue moved = transport_value(h, v);
  REQUIRE(moved.kind() == SemValue::Kind::Closure);
  CHECK(moved.clos()->loc_env(0) == 1);
  std::vector<int> locs;
  collect_locations(moved, locs);
  CHECK(locs == std::vector<int>{1});
}
