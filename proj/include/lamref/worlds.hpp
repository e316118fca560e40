#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lamref/signature.hpp"
#include "lamref/syntax.hpp"
#include "lamref/typing.hpp"

namespace lamref {

// Worlds are heap layouts; injections are sort-preserving one-to-one maps
// between their supports.
using World = Layout;

class Injection {
 public:
  Injection() = default;
  Injection(World dom, World cod, std::map<int, int> map);

  static Injection identity(const World& w);
  // The inclusion of w into an extension w2 (requires layout_extends(w, w2)).
  static Injection inclusion(const World& w, const World& w2);

  const World& dom() const { return dom_; }
  const World& cod() const { return cod_; }
  const std::map<int, int>& mapping() const { return map_; }

  int operator()(int loc) const;
  bool hits(int cod_loc) const;      // is cod_loc in the image?
  int preimage(int cod_loc) const;   // requires hits(cod_loc)
  bool is_identity() const;

  bool operator==(const Injection& o) const {
    return dom_ == o.dom_ && cod_ == o.cod_ && map_ == o.map_;
  }

 private:
  World dom_, cod_;
  std::map<int, int> map_;
};

// g . h (h first); requires h.cod() == g.dom().
Injection compose(const Injection& g, const Injection& h);

std::string print_world(const World& w);
std::string print_injection(const Injection& h);

// Smallest index beyond all locations of w.
int numof(const World& w);

struct IndepCoproduct {
  World world;
  Injection into1, into2;
};

// w1 (+) w2: keeps w1's locations and shifts w2's by numof(w1).
IndepCoproduct indep_coproduct(const World& w1, const World& w2);

// The inclusion (w2 (-) h) -> w2 of the locations h misses.
Injection complement(const Injection& h);

// The canonical isomorphism w1 (+) (w2 (-) h) -> w2 for h : w1 -> w2.
Injection defrag_iso(const Injection& h);

struct LocalCoproduct {
  World world;  // w (+) (w1 (-) h1) (+) (w2 (-) h2)
  Injection from_cod1;  // w1 -> world
  Injection from_cod2;  // w2 -> world
};

// Local independent coproduct of h1 : w -> w1, h2 : w -> w2; the square
// from_cod1 . h1 = from_cod2 . h2 commutes.
LocalCoproduct local_coproduct(const Injection& h1, const Injection& h2);

// ---------------------------------------------------------------------------
// Semantic values: elements of the interpretations of types at a world.
// Function-typed values are intensional closures (defined with the
// denotational layer, opaque here).

struct ClosureData;
using ClosurePtr = std::shared_ptr<const ClosureData>;

class SemValue {
 public:
  enum class Kind { Star, Inj, Pair, Loc, Closure };

  SemValue() = default;  // the unit value

  static SemValue star();
  static SemValue inj(int tag, SemValue v);
  static SemValue pair(SemValue a, SemValue b);
  static SemValue loc(int l);
  static SemValue closure(ClosurePtr c);
  // Right-nested tuple; empty = star, singleton = the value itself.
  static SemValue tuple(const std::vector<SemValue>& items);

  Kind kind() const { return kind_; }
  int tag() const { return tag_; }
  int loc_index() const { return tag_; }
  const SemValue& fst() const { return *a_; }
  const SemValue& snd() const { return *b_; }
  const SemValue& sub() const { return *a_; }
  const ClosurePtr& clos() const { return clos_; }

  bool contains_closure() const;

  // Structural; closures compare by identity.
  bool operator==(const SemValue& o) const;
  bool operator!=(const SemValue& o) const { return !(*this == o); }
  bool operator<(const SemValue& o) const;

 private:
  Kind kind_ = Kind::Star;
  int tag_ = 0;  // Inj tag or Loc index
  std::shared_ptr<const SemValue> a_, b_;
  ClosurePtr clos_;
};

std::string print_sem_value(const SemValue& v);

// Environments map identifiers to semantic values.
using Env = std::map<std::string, SemValue>;

// An intensional representative of an element of an exponential: the
// captured interpretation state of a function abstraction, applied at later
// worlds by re-running the term semantics.
struct ClosureData {
  const Signature* sig = nullptr;
  Layout judgement_layout;   // the layout of the typing judgement
  Context ctx;               // context of the body, including the binder
  std::string binder;
  TypePtr binder_type;
  TypePtr result_type;
  TermPtr body;
  Injection loc_env;         // judgement layout -> world of the closure
  Env env;                   // environment at the closure's world
};

// Transports a semantic value along a world injection: locations map through
// h, closures compose their captured injection, the rest is structural.
SemValue transport_value(const Injection& h, const SemValue& v);
Env transport_env(const Injection& h, const Env& e);

// All locations a value can reach directly (closures contribute their
// captured location environment and environment values).
void collect_locations(const SemValue& v, std::vector<int>& out);

// [[g]]w as an explicitly enumerated finite set, in a fixed order.
std::vector<SemValue> interp_type(const Signature& sig, const GroundTypePtr& g,
                                  const World& w);

// The functorial action [[g]]h; checks v against [[g]](dom h).
SemValue interp_action(const Signature& sig, const GroundTypePtr& g,
                       const Injection& h, const SemValue& v);

// Membership in [[g]]w without enumerating the whole set.
bool interp_member(const Signature& sig, const GroundTypePtr& g,
                   const World& w, const SemValue& v);

// All worlds with contiguous support #0..#(k-1), k <= max_cells, every sort
// assignment, in a fixed lexicographic order.
std::vector<World> enumerate_worlds(const Signature& sig, int max_cells);

// All injections w -> w2, deterministic order.
std::vector<Injection> enumerate_injections(const World& w, const World& w2);

}  // namespace lamref
