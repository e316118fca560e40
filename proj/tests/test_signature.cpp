#include "doctest.h"
#include "lamref/parser.hpp"
#include "lamref/signature.hpp"

using namespace lamref;

TEST_CASE("example signature: three mutually referring sorts") {
  using G = GroundType;
  Signature sig = validate_signature({
      {"data", G::boolean()},
      {"list", G::sum(G::unit(), G::ref("cell"))},
      {"cell", G::product(G::ref("data"), G::ref("list"))},
  });
  CHECK(sig.sorts().size() == 3);
  CHECK(sig.has_sort("cell"));
  CHECK(print_ground(sig.content_type("list")) == "1 + ref cell");
}

TEST_CASE("empty signature is fine") {
  Signature sig = validate_signature({});
  CHECK(sig.sorts().empty());
  CHECK(is_constant_signature(sig));
}

TEST_CASE("unknown ref target is rejected") {
  CHECK_THROWS_AS(validate_signature({{"a", GroundType::ref("b")}}),
                  UnknownSortError);
}

TEST_CASE("duplicate sorts are rejected") {
  CHECK_THROWS_AS(validate_signature({{"a", GroundType::unit()},
                                      {"a", GroundType::boolean()}}),
                  DuplicateSortError);
}

TEST_CASE("validation is idempotent on its own output") {
  Signature sig = example_list_signature();
  Signature again = validate_signature(sig.declarations());
  CHECK(again.sorts() == sig.sorts());
  for (const auto& s : sig.sorts())
    CHECK(ground_eq(again.content_type(s), sig.content_type(s)));
}

TEST_CASE("constancy agrees with scanning for ref occurrences") {
  auto no_ref_scan = [](const Signature& sig) {
    for (const auto& s : sig.sorts())
      if (sig.content_type(s)->mentions_ref()) return false;
    return true;
  };
  Signature consts = constant_bool_signature();
  Signature lists = example_list_signature();
  CHECK(is_constant_signature(consts) == no_ref_scan(consts));
  CHECK(is_constant_signature(consts));
  CHECK(is_constant_signature(lists) == no_ref_scan(lists));
  CHECK_FALSE(is_constant_signature(lists));
}

TEST_CASE("ground type print/parse round trip") {
  for (const char* src :
       {"0", "1", "1 + 1", "ref cell", "1 + ref cell",
        "ref data * ref list", "(1 + 1) * 1", "1 + 1 * 0"}) {
    GroundTypePtr g = parse_ground_type(src);
    CHECK(ground_eq(parse_ground_type(print_ground(g)), g));
  }
  // * binds tighter than +
  GroundTypePtr g = parse_ground_type("1 + 1 * 0");
  CHECK(g->kind() == GroundType::Kind::Sum);
  CHECK(g->rhs()->kind() == GroundType::Kind::Product);
}
