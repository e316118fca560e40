#pragma once

#include <functional>
#include <optional>

#include "lamref/initialisations.hpp"
#include "lamref/opsem.hpp"

namespace lamref {

// ---------------------------------------------------------------------------
// The hiding monad P on [Init, Set], at A = X . Stores: elements are coend
// representatives q_h(x, s), kept in canonical (garbage-collected) form.

using PVal = CoendRep;

// q_id(x, s).
PVal p_return(const Signature& sig, const World& w, SemValue payload,
              Store store);

// Contravariant action of the coend: q_{h'}(a) |-> q_{h' . h}.
PVal p_hide(const Signature& sig, const Injection& h, const PVal& r);

// Kleisli arrow A -> PB, given pointwise at a world.
using PKleisli =
    std::function<PVal(const World&, const SemValue&, const Store&)>;

// q_h(a) >>= g := hide_h(g(a)).
PVal p_bind(const Signature& sig, const PVal& r, const PKleisli& g);

// sigma(x, q_h(a)) := q_h(<Xh x, a>).
PVal p_strength(const Signature& sig, const SemValue& x, const PVal& r);

// Functorial action of P(X . Stores) on an initialisation of the base,
// via promotion of the representative's injection.
PVal p_action(const Signature& sig, const Initialisation& i, const PVal& r);

// ---------------------------------------------------------------------------
// The full ground storage monad T. An element of (TX)w is an end over
// extensions of w, represented intensionally: a computable family giving a
// coend representative for every (injection out of w, store over its target).

struct MonadComp {
  World base;
  TypePtr type;  // result type; may be null for internal intermediates
  std::function<CoendRep(const Injection&, const Store&)> component;
};

// (pi_h . return x) s = q_id(Xh x, s).
MonadComp t_return(const Signature& sig, const World& base, TypePtr type,
                   const SemValue& x);

// A Kleisli arrow X -> TY as a pointwise family; the world argument is the
// representative's private world, the value the payload there.
using TKleisli = std::function<MonadComp(const World&, const SemValue&)>;

// (pi_h (m >>= f)) s' = q_{h'' . h'}(y, s''') where (pi_h m) s' = q_{h'}(x, s'')
// and (pi_id f(x)) s'' = q_{h''}(y, s''').
MonadComp t_bind(const Signature& sig, const MonadComp& m, TypePtr result_type,
                 const TKleisli& f);

// Functorial action T f on payloads.
MonadComp t_map(const Signature& sig, const MonadComp& m, TypePtr result_type,
                const std::function<SemValue(const World&, const SemValue&)>& f);

// (pi_h sigma(x, m)) s' = q_{h'}(<X(h'.h) x, y>, s'').
MonadComp t_strength(const Signature& sig, const SemValue& x,
                     const MonadComp& m, TypePtr result_type = nullptr);

// Double strength: left argument first, then the right at the extended world.
MonadComp t_dstrength(const Signature& sig, const MonadComp& m1,
                      const MonadComp& m2, TypePtr result_type = nullptr);

// The end's restriction along g : base -> w2 (the functorial action of TX).
MonadComp t_restrict(const MonadComp& m, const Injection& g);

// (pi_h mget(l)) s = q_id(s(h l), s).
MonadComp t_mget(const Signature& sig, const World& base, int loc);

// (pi_h mset(l, a)) s = q_id(*, s[h l := [[typeof]]h a]).
MonadComp t_mset(const Signature& sig, const World& base, int loc,
                 const SemValue& a);

// Builds the initialisation w -> w (+) w0 from data for w0's cells; the data
// lives at w (+) w0 and may reference the new cells (cyclic initialisation).
Initialisation minit(const Signature& sig, const World& base, const World& w0,
                     const std::map<int, SemValue>& data);

// Allocation: the new locations (in w0's order) under the promoted
// initialisation, the store extended by the promoted data.
MonadComp t_mnew(const Signature& sig, const World& base, const World& w0,
                 const std::map<int, SemValue>& data);

// ---------------------------------------------------------------------------
// Value, term, and heap semantics.

// [[ctx |-_w v : ty]](h, e) for h : w -> w', e an environment at w'.
SemValue denote_value(const Signature& sig, const Layout& w, const Context& ctx,
                      const TermPtr& v, const Injection& h, const Env& e);

// [[ctx |-_w t : ty]](h, e) in T[[ty]] based at h's codomain.
MonadComp denote_term(const Signature& sig, const Layout& w, const Context& ctx,
                      const TermPtr& t, const Injection& h, const Env& e);

// Pointwise value denotation of a typed heap.
Store denote_heap(const Signature& sig, const TypedHeap& H);

// Applies a closure at a later world: g maps the closure's world there.
MonadComp apply_closure(const ClosurePtr& c, const Injection& g,
                        const SemValue& arg);

// ---------------------------------------------------------------------------
// Bounded extensional equality of monadic computations.

struct EqResult {
  enum class Status { Equal, NotEqual, Approximate };
  Status status = Status::Equal;
  // Witness for NotEqual: the distinguishing component.
  std::optional<Injection> witness_h;
  std::optional<Store> witness_store;
  std::string detail;

  bool equal() const { return status == Status::Equal; }
};

// Compares components at every extension of the shared base with at most
// world_bound cells and every store. Function-typed payloads are compared
// extensionally over all arguments of ground type within the bound; other
// argument types make the comparison approximate. value_bound caps the
// number of probed argument/extension combinations per closure.
EqResult equal_bounded(const Signature& sig, const MonadComp& m1,
                       const MonadComp& m2, int world_bound,
                       int value_bound = 64);

}  // namespace lamref
