#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lamref/worlds.hpp"

namespace lamref {

// A heaplet: a value for each cell of `shape`, the values living at
// `ambient`. Stores(w-, w+) in the possible-worlds model.
struct Heaplet {
  World shape;
  World ambient;
  std::map<int, SemValue> contents;

  bool operator==(const Heaplet& o) const {
    return shape == o.shape && ambient == o.ambient && contents == o.contents;
  }
};

// A full heap: shape = ambient.
struct Store {
  World world;
  std::map<int, SemValue> contents;

  bool operator==(const Store& o) const {
    return world == o.world && contents == o.contents;
  }
  bool operator<(const Store& o) const {
    if (world.cells != o.world.cells) return world.cells < o.world.cells;
    return contents < o.contents;
  }
};

Heaplet store_to_heaplet(const Store& s);
Store heaplet_to_store(const Heaplet& h);

// An initialisation: an injection together with initialisation data for
// every location the injection misses. Morphism of the category Init.
struct Initialisation {
  Injection inj;
  Heaplet data;  // shape = cod (-) inj, ambient = cod

  static Initialisation identity(const World& w);
};

// A representative q_h(payload, store) of the coend quotient: a payload and
// a store over a private extension of `base`, considered up to garbage
// collection and renaming of the private locations.
struct CoendRep {
  World base;
  Injection inj;  // base -> store.world
  SemValue payload;
  Store store;

  bool operator==(const CoendRep& o) const {
    return base == o.base && inj == o.inj && payload == o.payload &&
           store == o.store;
  }
};

struct BaseMismatchError : LamrefError {
  BaseMismatchError() : LamrefError("coend representatives have different base worlds") {}
};

struct BudgetExceededError : LamrefError {
  explicit BudgetExceededError(const std::string& what) : LamrefError(what) {}
};

// mu : Stores(w1, w) x Stores(w2, w) -> Stores(w1 (+) w2, w); the contents
// move through the coprojections, values unchanged.
Heaplet heaplet_concat(const Heaplet& r1, const Heaplet& r2);

// Contravariant action (projection): shape becomes dom h.
Heaplet heaplet_contra(const Injection& h, const Heaplet& r);

// Covariant action (component-wise on values): ambient becomes cod h.
Heaplet heaplet_co(const Signature& sig, const Injection& h, const Heaplet& r);

// Composition in Init: compose the injections, append the data of the second
// to the first's data promoted along it.
Initialisation compose_init(const Signature& sig, const Initialisation& i1,
                            const Initialisation& i2);

// Functorial action of Stores on Init; agrees with compose_init through
// Stores w ~ Init(empty, w).
Store stores_action(const Signature& sig, const Initialisation& i,
                    const Store& s);

const SemValue& store_lookup(const Store& s, int loc);
Store store_update(const Signature& sig, const Store& s, int loc,
                   const SemValue& x);

struct Promoted {
  Initialisation promoted;  // h |> i : w' -> local coproduct
  Injection transposed;     // i <| h : cod(i) -> local coproduct
};

// Promotes initialisation data along an injection with shared domain: the
// local-coproduct leg under h acquires initialisation structure, with i's
// data transported through the complement isomorphism and pushed covariantly.
Promoted promote(const Signature& sig, const Injection& h,
                 const Initialisation& i);

// Restricts to the locations reachable from the public image and the payload,
// then relabels private locations onto the smallest indices free of the base,
// in payload-then-store discovery order. Idempotent; the identity on
// representatives without unreachable or non-canonically-named cells.
CoendRep gc_canonical(const Signature& sig, const CoendRep& r);

// Decision procedure for the coend quotient: canonicalize both sides and
// compare structurally. Payloads must be closure-free (ground); the bounded
// extensional comparison of the denotational layer handles function types.
bool coend_equal(const Signature& sig, const CoendRep& r1, const CoendRep& r2);

// Independent brute-force oracle: builds the zig-zag closure of the
// generating relation (the covariant action along all initialisations into
// worlds of at most size_bound cells) and tests connectivity.
bool coend_equal_oracle(const Signature& sig, const GroundTypePtr& payload_type,
                        const CoendRep& r1, const CoendRep& r2,
                        int size_bound);

// Batched form: every representative of the given base and payload type over
// the enumerated worlds, partitioned into zig-zag connected components.
std::vector<std::vector<CoendRep>> oracle_components(
    const Signature& sig, const GroundTypePtr& payload_type, const World& base,
    int size_bound);

// All stores over w (empty when some content type is uninhabited at w).
std::vector<Store> enumerate_stores(const Signature& sig, const World& w);

// Debug rendering: public / private split plus the payload.
std::string print_coend_rep(const CoendRep& r);

}  // namespace lamref
