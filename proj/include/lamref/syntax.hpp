#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lamref/signature.hpp"

namespace lamref {

// Types of the calculus: full ground types plus functions.
class Type;
using TypePtr = std::shared_ptr<const Type>;

class Type {
 public:
  enum class Kind { Ref, Empty, Sum, Unit, Product, Arrow };

  Kind kind() const { return kind_; }
  const TypePtr& lhs() const { return lhs_; }
  const TypePtr& rhs() const { return rhs_; }
  const std::string& ref_sort() const { return sort_; }

  static TypePtr empty();
  static TypePtr unit();
  static TypePtr boolean();
  static TypePtr sum(TypePtr a, TypePtr b);
  static TypePtr product(TypePtr a, TypePtr b);
  static TypePtr arrow(TypePtr a, TypePtr b);
  static TypePtr ref(std::string sort);
  static TypePtr from_ground(const GroundTypePtr& g);

  bool is_ground() const;
  // Inverse of from_ground; requires is_ground().
  GroundTypePtr to_ground() const;

 private:
  Type(Kind k, TypePtr a, TypePtr b, std::string s)
      : kind_(k), lhs_(std::move(a)), rhs_(std::move(b)), sort_(std::move(s)) {}

  Kind kind_;
  TypePtr lhs_, rhs_;
  std::string sort_;
};

bool type_eq(const TypePtr& a, const TypePtr& b);
std::string print_type(const TypePtr& t);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct NewBinder {
  std::string name;
  std::string sort;
  TermPtr init;  // syntactically a value
};

// Core terms, exactly the grammar of the calculus. `pos` is a source offset
// for diagnostics, -1 when synthesized.
struct Term {
  enum class Kind {
    Loc,         // #n
    Var,         // x
    Inj,         // inj1 t / inj2 t, annotated with its sum type
    Star,        // ()
    Pair,        // (t, t')
    Fun,         // fun (x:ty) -> t
    MatchEmpty,  // match t with {} : ty
    MatchSum,    // match t with inj1 x1 -> t1 | inj2 x2 -> t2
    MatchProd,   // match t with (x1, x2) -> t'
    App,         // t t'
    Assign,      // t := t'
    Deref,       // !t
    New,         // new {x1:k1 = v1, ...} in t
  };

  Kind kind;
  int pos = -1;

  int loc = 0;          // Loc
  std::string var;      // Var, Fun/MatchSum/MatchProd binders (var = first)
  int inj_tag = 0;      // Inj: 1 or 2
  TermPtr t0, t1, t2;   // subterms; by convention t0 is the scrutinee/first
  std::string var2;     // second binder where applicable
  TypePtr annot;        // Fun argument, MatchEmpty result, Inj sum type
  std::vector<NewBinder> binders;  // New
};

TermPtr mk_loc(int n, int pos = -1);
TermPtr mk_var(std::string x, int pos = -1);
// `sum_type` is the full sum type of the injection; the Church-style
// annotation keeps inferred types unique.
TermPtr mk_inj(int tag, TermPtr t, TypePtr sum_type, int pos = -1);
TermPtr mk_star(int pos = -1);
TermPtr mk_pair(TermPtr a, TermPtr b, int pos = -1);
TermPtr mk_fun(std::string x, TypePtr ty, TermPtr body, int pos = -1);
TermPtr mk_match_empty(TermPtr scrut, TypePtr ty, int pos = -1);
TermPtr mk_match_sum(TermPtr scrut, std::string x1, TermPtr t1, std::string x2,
                     TermPtr t2, int pos = -1);
TermPtr mk_match_prod(TermPtr scrut, std::string x1, std::string x2,
                      TermPtr body, int pos = -1);
TermPtr mk_app(TermPtr f, TermPtr a, int pos = -1);
TermPtr mk_assign(TermPtr ref, TermPtr val, int pos = -1);
TermPtr mk_deref(TermPtr t, int pos = -1);
TermPtr mk_new(std::vector<NewBinder> binders, TermPtr body, int pos = -1);

// Convenience: true = inj1 (), false = inj2 ().
TermPtr mk_bool(bool b);

// The value subgrammar: locations, identifiers, injections and pairs of
// values, unit, function abstractions.
bool is_value(const TermPtr& t);

std::set<std::string> free_vars(const TermPtr& t);

bool alpha_eq(const TermPtr& a, const TermPtr& b);

// Pretty-printer; parse(print(t)) is alpha-equivalent to t.
std::string print_term(const TermPtr& t);

// ---------------------------------------------------------------------------
// Surface language: the core constructs plus let, sequencing, single-cell
// allocation sugar and n-ary tuples. Desugaring eliminates the extras.

struct Surface;
using SurfacePtr = std::shared_ptr<const Surface>;

struct SurfaceNewBinder {
  std::string name;
  std::string sort;
  SurfacePtr init;
};

struct Surface {
  enum class Kind {
    Loc, Var, Inj, Star, Fun, MatchEmpty, MatchSum, MatchProd,
    App, Assign, Deref, New,
    // sugar
    Let,      // let x [: ty] = t in t'
    Seq,      // t ; t'
    RefNew,   // ref k t
    Tuple,    // (t1, ..., tn), n >= 2; n = 2 is the core pair
    Ascribe,  // t : ty
  };

  Kind kind;
  int pos = -1;

  int loc = 0;
  std::string var, var2;
  int inj_tag = 0;
  std::string sort;                 // RefNew
  SurfacePtr s0, s1, s2;
  TypePtr annot;                    // Fun / MatchEmpty / Let / Inj / Ascribe
  std::vector<SurfacePtr> items;    // Tuple
  std::vector<SurfaceNewBinder> binders;
};

SurfacePtr core_to_surface(const TermPtr& t);

// Fails (LamrefError) if sugar nodes remain.
TermPtr surface_to_core(const SurfacePtr& s);

// Context for the desugar/elaboration pass: unannotated `let` and `;` need
// the bound term's type, and bare injections take their sum type from the
// expected type at their position.
struct DesugarEnv {
  const Signature* sig = nullptr;
  const std::map<int, std::string>* layout = nullptr;  // location -> sort
  std::map<std::string, TypePtr> vars;
};

// Eliminates Let/Seq/RefNew/Tuple/Ascribe and fills in injection sum types;
// idempotent. `expected`, when known, is pushed down structurally.
SurfacePtr desugar(const SurfacePtr& s, const DesugarEnv& env,
                   const TypePtr& expected = nullptr);

}  // namespace lamref
