#include "lamref/syntax.hpp"

#include <algorithm>
#include <cassert>

#include "lamref/typing.hpp"

namespace lamref {

TypePtr Type::empty() {
  static TypePtr t{new Type(Kind::Empty, nullptr, nullptr, "")};
  return t;
}
TypePtr Type::unit() {
  static TypePtr t{new Type(Kind::Unit, nullptr, nullptr, "")};
  return t;
}
TypePtr Type::boolean() {
  static TypePtr t = sum(unit(), unit());
  return t;
}
TypePtr Type::sum(TypePtr a, TypePtr b) {
  return TypePtr{new Type(Kind::Sum, std::move(a), std::move(b), "")};
}
TypePtr Type::product(TypePtr a, TypePtr b) {
  return TypePtr{new Type(Kind::Product, std::move(a), std::move(b), "")};
}
TypePtr Type::arrow(TypePtr a, TypePtr b) {
  return TypePtr{new Type(Kind::Arrow, std::move(a), std::move(b), "")};
}
TypePtr Type::ref(std::string sort) {
  return TypePtr{new Type(Kind::Ref, nullptr, nullptr, std::move(sort))};
}

TypePtr Type::from_ground(const GroundTypePtr& g) {
  switch (g->kind()) {
    case GroundType::Kind::Empty:
      return empty();
    case GroundType::Kind::Unit:
      return unit();
    case GroundType::Kind::Sum:
      return sum(from_ground(g->lhs()), from_ground(g->rhs()));
    case GroundType::Kind::Product:
      return product(from_ground(g->lhs()), from_ground(g->rhs()));
    case GroundType::Kind::Ref:
      return ref(g->ref_sort());
  }
  throw LamrefError("unreachable ground kind");
}

bool Type::is_ground() const {
  switch (kind_) {
    case Kind::Empty:
    case Kind::Unit:
    case Kind::Ref:
      return true;
    case Kind::Sum:
    case Kind::Product:
      return lhs_->is_ground() && rhs_->is_ground();
    case Kind::Arrow:
      return false;
  }
  return false;
}

GroundTypePtr Type::to_ground() const {
  switch (kind_) {
    case Kind::Empty:
      return GroundType::empty();
    case Kind::Unit:
      return GroundType::unit();
    case Kind::Sum:
      return GroundType::sum(lhs_->to_ground(), rhs_->to_ground());
    case Kind::Product:
      return GroundType::product(lhs_->to_ground(), rhs_->to_ground());
    case Kind::Ref:
      return GroundType::ref(sort_);
    case Kind::Arrow:
      throw LamrefError("to_ground: function type is not ground");
  }
  throw LamrefError("unreachable type kind");
}

bool type_eq(const TypePtr& a, const TypePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case Type::Kind::Empty:
    case Type::Kind::Unit:
      return true;
    case Type::Kind::Ref:
      return a->ref_sort() == b->ref_sort();
    case Type::Kind::Sum:
    case Type::Kind::Product:
    case Type::Kind::Arrow:
      return type_eq(a->lhs(), b->lhs()) && type_eq(a->rhs(), b->rhs());
  }
  return false;
}

namespace {

// Precedence: -> is 0, + is 1, * is 2; all right-associative.
void print_type_rec(const TypePtr& t, int prec, std::string& out) {
  switch (t->kind()) {
    case Type::Kind::Empty:
      out += "0";
      return;
    case Type::Kind::Unit:
      out += "1";
      return;
    case Type::Kind::Ref:
      out += "ref " + t->ref_sort();
      return;
    case Type::Kind::Arrow: {
      bool paren = prec > 0;
      if (paren) out += "(";
      print_type_rec(t->lhs(), 1, out);
      out += " -> ";
      print_type_rec(t->rhs(), 0, out);
      if (paren) out += ")";
      return;
    }
    case Type::Kind::Sum: {
      bool paren = prec > 1;
      if (paren) out += "(";
      print_type_rec(t->lhs(), 2, out);
      out += " + ";
      print_type_rec(t->rhs(), 1, out);
      if (paren) out += ")";
      return;
    }
    case Type::Kind::Product: {
      bool paren = prec > 2;
      if (paren) out += "(";
      print_type_rec(t->lhs(), 3, out);
      out += " * ";
      print_type_rec(t->rhs(), 2, out);
      if (paren) out += ")";
      return;
    }
  }
}

}  // namespace

std::string print_type(const TypePtr& t) {
  std::string out;
  print_type_rec(t, 0, out);
  return out;
}

// --- term constructors ------------------------------------------------------

namespace {
TermPtr mk(Term&& t) { return std::make_shared<Term>(std::move(t)); }
}  // namespace

TermPtr mk_loc(int n, int pos) {
  Term t;
  t.kind = Term::Kind::Loc;
  t.loc = n;
  t.pos = pos;
  return mk(std::move(t));
}
TermPtr mk_var(std::string x, int pos) {
  Term t;
  t.kind = Term::Kind::Var;
  t.var = std::move(x);
  t.pos = pos;
  return mk(std::move(t));
}
TermPtr mk_inj(int tag, TermPtr sub, TypePtr sum_type, int pos) {
  if (!sum_type || sum_type->kind() != Type::Kind::Sum)
    throw LamrefError("inj: annotation must be a sum type");
  Term t;
  t.kind = Term::Kind::Inj;
  t.inj_tag = tag;
  t.t0 = std::move(sub);
  t.annot = std::move(sum_type);
  t.pos = pos;
  return mk(std::move(t));
}
TermPtr mk_star(int pos) {
  Term t;
  t.kind = Term::Kind::Star;
  t.pos = pos;
  return mk(std::move(t));
}
TermPtr mk_pair(TermPtr a, TermPtr b, int pos) {
  Term t;
  t.kind = Term::Kind::Pair;
  t.t0 = std::move(a);
  t.t1 = std::move(b);
  t.pos = pos;
  return mk(std::move(t));
}
TermPtr mk_fun(std::string x, TypePtr ty, TermPtr body, int pos) {
  Term t;
  t.kind = Term::Kind::Fun;
  t.var = std::move(x);
  t.annot = std::move(ty);
  t.t0 = std::move(body);
  t.pos = pos;
  return mk(std::move(t));
}
TermPtr mk_match_empty(TermPtr scrut, TypePtr ty, int pos) {
  Term t;
  t.kind = Term::Kind::MatchEmpty;
  t.t0 = std::move(scrut);
  t.annot = std::move(ty);
  t.pos = pos;
  return mk(std::move(t));
}
TermPtr mk_match_sum(TermPtr scrut, std::string x1, TermPtr t1, std::string x2,
                     TermPtr t2, int pos) {
  Term t;
  t.kind = Term::Kind::MatchSum;
  t.t0 = std::move(scrut);
  t.var = std::move(x1);
  t.t1 = std::move(t1);
  t.var2 = std::move(x2);
  t.t2 = std::move(t2);
  t.pos = pos;
  return mk(std::move(t));
}
TermPtr mk_match_prod(TermPtr scrut, std::string x1, std::string x2,
                      TermPtr body, int pos) {
  Term t;
  t.kind = Term::Kind::MatchProd;
  t.t0 = std::move(scrut);
  t.var = std::move(x1);
  t.var2 = std::move(x2);
  t.t1 = std::move(body);
  t.pos = pos;
  return mk(std::move(t));
}
TermPtr mk_app(TermPtr f, TermPtr a, int pos) {
  Term t;
  t.kind = Term::Kind::App;
  t.t0 = std::move(f);
  t.t1 = std::move(a);
  t.pos = pos;
  return mk(std::move(t));
}
TermPtr mk_assign(TermPtr ref, TermPtr val, int pos) {
  Term t;
  t.kind = Term::Kind::Assign;
  t.t0 = std::move(ref);
  t.t1 = std::move(val);
  t.pos = pos;
  return mk(std::move(t));
}
TermPtr mk_deref(TermPtr sub, int pos) {
  Term t;
  t.kind = Term::Kind::Deref;
  t.t0 = std::move(sub);
  t.pos = pos;
  return mk(std::move(t));
}
TermPtr mk_new(std::vector<NewBinder> binders, TermPtr body, int pos) {
  if (binders.empty()) throw LamrefError("new: binder list must be nonempty");
  std::set<std::string> names;
  for (const auto& b : binders)
    if (!names.insert(b.name).second)
      throw LamrefError("new: duplicate binder " + b.name);
  Term t;
  t.kind = Term::Kind::New;
  t.binders = std::move(binders);
  t.t0 = std::move(body);
  t.pos = pos;
  return mk(std::move(t));
}

TermPtr mk_bool(bool b) {
  return mk_inj(b ? 1 : 2, mk_star(), Type::boolean());
}

bool is_value(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Loc:
    case Term::Kind::Var:
    case Term::Kind::Star:
    case Term::Kind::Fun:
      return true;
    case Term::Kind::Inj:
      return is_value(t->t0);
    case Term::Kind::Pair:
      return is_value(t->t0) && is_value(t->t1);
    default:
      return false;
  }
}

namespace {

void free_vars_rec(const TermPtr& t, std::set<std::string>& bound,
                   std::set<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::Loc:
    case Term::Kind::Star:
      return;
    case Term::Kind::Var:
      if (!bound.count(t->var)) out.insert(t->var);
      return;
    case Term::Kind::Inj:
    case Term::Kind::Deref:
      free_vars_rec(t->t0, bound, out);
      return;
    case Term::Kind::Pair:
    case Term::Kind::App:
    case Term::Kind::Assign:
      free_vars_rec(t->t0, bound, out);
      free_vars_rec(t->t1, bound, out);
      return;
    case Term::Kind::Fun: {
      bool fresh = bound.insert(t->var).second;
      free_vars_rec(t->t0, bound, out);
      if (fresh) bound.erase(t->var);
      return;
    }
    case Term::Kind::MatchEmpty:
      free_vars_rec(t->t0, bound, out);
      return;
    case Term::Kind::MatchSum: {
      free_vars_rec(t->t0, bound, out);
      bool f1 = bound.insert(t->var).second;
      free_vars_rec(t->t1, bound, out);
      if (f1) bound.erase(t->var);
      bool f2 = bound.insert(t->var2).second;
      free_vars_rec(t->t2, bound, out);
      if (f2) bound.erase(t->var2);
      return;
    }
    case Term::Kind::MatchProd: {
      free_vars_rec(t->t0, bound, out);
      bool f1 = bound.insert(t->var).second;
      bool f2 = bound.insert(t->var2).second;
      free_vars_rec(t->t1, bound, out);
      if (f1) bound.erase(t->var);
      if (f2) bound.erase(t->var2);
      return;
    }
    case Term::Kind::New: {
      std::vector<std::string> added;
      for (const auto& b : t->binders)
        if (bound.insert(b.name).second) added.push_back(b.name);
      for (const auto& b : t->binders) free_vars_rec(b.init, bound, out);
      free_vars_rec(t->t0, bound, out);
      for (const auto& n : added) bound.erase(n);
      return;
    }
  }
}

// Alpha-equivalence via synchronized numbering of binders.
struct AlphaEnv {
  std::map<std::string, int> left, right;
  int next = 0;
};

bool alpha_rec(const TermPtr& a, const TermPtr& b, AlphaEnv env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Loc:
      return a->loc == b->loc;
    case Term::Kind::Star:
      return true;
    case Term::Kind::Var: {
      auto la = env.left.find(a->var);
      auto rb = env.right.find(b->var);
      if (la == env.left.end() && rb == env.right.end())
        return a->var == b->var;  // both free
      if (la == env.left.end() || rb == env.right.end()) return false;
      return la->second == rb->second;
    }
    case Term::Kind::Inj:
      return a->inj_tag == b->inj_tag && type_eq(a->annot, b->annot) &&
             alpha_rec(a->t0, b->t0, env);
    case Term::Kind::Deref:
      return alpha_rec(a->t0, b->t0, env);
    case Term::Kind::Pair:
    case Term::Kind::App:
    case Term::Kind::Assign:
      return alpha_rec(a->t0, b->t0, env) && alpha_rec(a->t1, b->t1, env);
    case Term::Kind::Fun: {
      if (!type_eq(a->annot, b->annot)) return false;
      AlphaEnv e = env;
      e.left[a->var] = e.right[b->var] = e.next++;
      return alpha_rec(a->t0, b->t0, std::move(e));
    }
    case Term::Kind::MatchEmpty:
      return type_eq(a->annot, b->annot) && alpha_rec(a->t0, b->t0, env);
    case Term::Kind::MatchSum: {
      if (!alpha_rec(a->t0, b->t0, env)) return false;
      AlphaEnv e1 = env;
      e1.left[a->var] = e1.right[b->var] = e1.next++;
      if (!alpha_rec(a->t1, b->t1, std::move(e1))) return false;
      AlphaEnv e2 = env;
      e2.left[a->var2] = e2.right[b->var2] = e2.next++;
      return alpha_rec(a->t2, b->t2, std::move(e2));
    }
    case Term::Kind::MatchProd: {
      if (!alpha_rec(a->t0, b->t0, env)) return false;
      AlphaEnv e = env;
      e.left[a->var] = e.right[b->var] = e.next++;
      e.left[a->var2] = e.right[b->var2] = e.next++;
      return alpha_rec(a->t1, b->t1, std::move(e));
    }
    case Term::Kind::New: {
      if (a->binders.size() != b->binders.size()) return false;
      AlphaEnv e = env;
      for (size_t i = 0; i < a->binders.size(); ++i) {
        if (a->binders[i].sort != b->binders[i].sort) return false;
        e.left[a->binders[i].name] = e.right[b->binders[i].name] = e.next++;
      }
      for (size_t i = 0; i < a->binders.size(); ++i)
        if (!alpha_rec(a->binders[i].init, b->binders[i].init, e)) return false;
      return alpha_rec(a->t0, b->t0, std::move(e));
    }
  }
  return false;
}

// Printer precedence: 0 open forms (fun/match/new), 1 assign, 2 application,
// 3 prefix (! and inj), 4 atoms.
void print_rec(const TermPtr& t, int prec, std::string& out) {
  auto open = [&](int own) { if (own < prec) out += "("; };
  auto close = [&](int own) { if (own < prec) out += ")"; };
  switch (t->kind) {
    case Term::Kind::Loc:
      out += "#" + std::to_string(t->loc);
      return;
    case Term::Kind::Var:
      out += t->var;
      return;
    case Term::Kind::Star:
      out += "()";
      return;
    case Term::Kind::Pair:
      out += "(";
      print_rec(t->t0, 0, out);
      out += ", ";
      print_rec(t->t1, 0, out);
      out += ")";
      return;
    case Term::Kind::Inj:
      // true/false shorthand for the booleans of 1 + 1.
      if (t->t0->kind == Term::Kind::Star &&
          type_eq(t->annot, Type::boolean())) {
        out += t->inj_tag == 1 ? "true" : "false";
        return;
      }
      open(0);
      out += t->inj_tag == 1 ? "inj1 " : "inj2 ";
      print_rec(t->t0, 3, out);
      out += " : " + print_type(t->annot);
      close(0);
      return;
    case Term::Kind::Deref:
      open(3);
      out += "!";
      print_rec(t->t0, 3, out);
      close(3);
      return;
    case Term::Kind::App:
      open(2);
      print_rec(t->t0, 2, out);
      out += " ";
      print_rec(t->t1, 3, out);
      close(2);
      return;
    case Term::Kind::Assign:
      open(1);
      print_rec(t->t0, 2, out);
      out += " := ";
      print_rec(t->t1, 1, out);
      close(1);
      return;
    case Term::Kind::Fun:
      open(0);
      out += "fun (" + t->var + " : " + print_type(t->annot) + ") -> ";
      print_rec(t->t0, 0, out);
      close(0);
      return;
    case Term::Kind::MatchEmpty:
      open(0);
      out += "match ";
      print_rec(t->t0, 1, out);
      out += " with {} : " + print_type(t->annot);
      close(0);
      return;
    case Term::Kind::MatchSum:
      open(0);
      out += "match ";
      print_rec(t->t0, 1, out);
      out += " with inj1 " + t->var + " -> ";
      print_rec(t->t1, 1, out);  // keep the first arm closed
      out += " | inj2 " + t->var2 + " -> ";
      print_rec(t->t2, 0, out);
      close(0);
      return;
    case Term::Kind::MatchProd:
      open(0);
      out += "match ";
      print_rec(t->t0, 1, out);
      out += " with (" + t->var + ", " + t->var2 + ") -> ";
      print_rec(t->t1, 0, out);
      close(0);
      return;
    case Term::Kind::New: {
      open(0);
      out += "new {";
      bool first = true;
      for (const auto& b : t->binders) {
        if (!first) out += ", ";
        first = false;
        out += b.name + " : " + b.sort + " = ";
        print_rec(b.init, 1, out);
      }
      out += "} in ";
      print_rec(t->t0, 0, out);
      close(0);
      return;
    }
  }
}

}  // namespace

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> bound, out;
  free_vars_rec(t, bound, out);
  return out;
}

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  return alpha_rec(a, b, AlphaEnv{});
}

std::string print_term(const TermPtr& t) {
  std::string out;
  print_rec(t, 0, out);
  return out;
}

// --- surface terms and desugaring -------------------------------------------

namespace {
SurfacePtr mks(Surface&& s) { return std::make_shared<Surface>(std::move(s)); }

std::string fresh_name(const std::string& base,
                       const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 0;; ++i) {
    std::string cand = base + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

void surface_free_vars(const SurfacePtr& s, std::set<std::string>& bound,
                       std::set<std::string>& out) {
  if (!s) return;
  switch (s->kind) {
    case Surface::Kind::Var:
      if (!bound.count(s->var)) out.insert(s->var);
      break;
    case Surface::Kind::Fun: {
      bool f = bound.insert(s->var).second;
      surface_free_vars(s->s0, bound, out);
      if (f) bound.erase(s->var);
      return;
    }
    case Surface::Kind::Let: {
      surface_free_vars(s->s0, bound, out);
      bool f = bound.insert(s->var).second;
      surface_free_vars(s->s1, bound, out);
      if (f) bound.erase(s->var);
      return;
    }
    case Surface::Kind::MatchSum: {
      surface_free_vars(s->s0, bound, out);
      bool f1 = bound.insert(s->var).second;
      surface_free_vars(s->s1, bound, out);
      if (f1) bound.erase(s->var);
      bool f2 = bound.insert(s->var2).second;
      surface_free_vars(s->s2, bound, out);
      if (f2) bound.erase(s->var2);
      return;
    }
    case Surface::Kind::MatchProd: {
      surface_free_vars(s->s0, bound, out);
      bool f1 = bound.insert(s->var).second;
      bool f2 = bound.insert(s->var2).second;
      surface_free_vars(s->s1, bound, out);
      if (f1) bound.erase(s->var);
      if (f2) bound.erase(s->var2);
      return;
    }
    case Surface::Kind::New: {
      std::vector<std::string> added;
      for (const auto& b : s->binders)
        if (bound.insert(b.name).second) added.push_back(b.name);
      for (const auto& b : s->binders) surface_free_vars(b.init, bound, out);
      surface_free_vars(s->s0, bound, out);
      for (const auto& n : added) bound.erase(n);
      return;
    }
    default:
      break;
  }
  surface_free_vars(s->s0, bound, out);
  surface_free_vars(s->s1, bound, out);
  surface_free_vars(s->s2, bound, out);
  for (const auto& i : s->items) surface_free_vars(i, bound, out);
}

std::set<std::string> surface_free_vars(const SurfacePtr& s) {
  std::set<std::string> bound, out;
  surface_free_vars(s, bound, out);
  return out;
}

TypePtr infer_surface(const SurfacePtr& core_only, const DesugarEnv& env) {
  if (env.sig == nullptr)
    throw LamrefError(
        "desugar: unannotated let/seq needs a signature for inference");
  Layout w;
  if (env.layout != nullptr)
    for (const auto& [l, sort] : *env.layout) w.cells[l] = sort;
  Context ctx;
  ctx.vars = env.vars;
  return infer(*env.sig, w, ctx, surface_to_core(core_only));
}

}  // namespace

SurfacePtr core_to_surface(const TermPtr& t) {
  Surface s;
  s.pos = t->pos;
  switch (t->kind) {
    case Term::Kind::Loc:
      s.kind = Surface::Kind::Loc;
      s.loc = t->loc;
      break;
    case Term::Kind::Var:
      s.kind = Surface::Kind::Var;
      s.var = t->var;
      break;
    case Term::Kind::Star:
      s.kind = Surface::Kind::Star;
      break;
    case Term::Kind::Inj:
      s.kind = Surface::Kind::Inj;
      s.inj_tag = t->inj_tag;
      s.annot = t->annot;
      s.s0 = core_to_surface(t->t0);
      break;
    case Term::Kind::Pair:
      s.kind = Surface::Kind::Tuple;
      s.items = {core_to_surface(t->t0), core_to_surface(t->t1)};
      break;
    case Term::Kind::Fun:
      s.kind = Surface::Kind::Fun;
      s.var = t->var;
      s.annot = t->annot;
      s.s0 = core_to_surface(t->t0);
      break;
    case Term::Kind::MatchEmpty:
      s.kind = Surface::Kind::MatchEmpty;
      s.s0 = core_to_surface(t->t0);
      s.annot = t->annot;
      break;
    case Term::Kind::MatchSum:
      s.kind = Surface::Kind::MatchSum;
      s.s0 = core_to_surface(t->t0);
      s.var = t->var;
      s.s1 = core_to_surface(t->t1);
      s.var2 = t->var2;
      s.s2 = core_to_surface(t->t2);
      break;
    case Term::Kind::MatchProd:
      s.kind = Surface::Kind::MatchProd;
      s.s0 = core_to_surface(t->t0);
      s.var = t->var;
      s.var2 = t->var2;
      s.s1 = core_to_surface(t->t1);
      break;
    case Term::Kind::App:
      s.kind = Surface::Kind::App;
      s.s0 = core_to_surface(t->t0);
      s.s1 = core_to_surface(t->t1);
      break;
    case Term::Kind::Assign:
      s.kind = Surface::Kind::Assign;
      s.s0 = core_to_surface(t->t0);
      s.s1 = core_to_surface(t->t1);
      break;
    case Term::Kind::Deref:
      s.kind = Surface::Kind::Deref;
      s.s0 = core_to_surface(t->t0);
      break;
    case Term::Kind::New:
      s.kind = Surface::Kind::New;
      for (const auto& b : t->binders)
        s.binders.push_back({b.name, b.sort, core_to_surface(b.init)});
      s.s0 = core_to_surface(t->t0);
      break;
  }
  return mks(std::move(s));
}

TermPtr surface_to_core(const SurfacePtr& s) {
  switch (s->kind) {
    case Surface::Kind::Loc:
      return mk_loc(s->loc, s->pos);
    case Surface::Kind::Var:
      return mk_var(s->var, s->pos);
    case Surface::Kind::Star:
      return mk_star(s->pos);
    case Surface::Kind::Inj:
      if (!s->annot)
        throw LamrefError(
            "bare injection whose sum type cannot be determined; "
            "ascribe it, e.g. (inj1 t : ty1 + ty2)");
      return mk_inj(s->inj_tag, surface_to_core(s->s0), s->annot, s->pos);
    case Surface::Kind::Fun:
      return mk_fun(s->var, s->annot, surface_to_core(s->s0), s->pos);
    case Surface::Kind::MatchEmpty:
      return mk_match_empty(surface_to_core(s->s0), s->annot, s->pos);
    case Surface::Kind::MatchSum:
      return mk_match_sum(surface_to_core(s->s0), s->var, surface_to_core(s->s1),
                          s->var2, surface_to_core(s->s2), s->pos);
    case Surface::Kind::MatchProd:
      return mk_match_prod(surface_to_core(s->s0), s->var, s->var2,
                           surface_to_core(s->s1), s->pos);
    case Surface::Kind::App:
      return mk_app(surface_to_core(s->s0), surface_to_core(s->s1), s->pos);
    case Surface::Kind::Assign:
      return mk_assign(surface_to_core(s->s0), surface_to_core(s->s1), s->pos);
    case Surface::Kind::Deref:
      return mk_deref(surface_to_core(s->s0), s->pos);
    case Surface::Kind::New: {
      std::vector<NewBinder> bs;
      for (const auto& b : s->binders)
        bs.push_back({b.name, b.sort, surface_to_core(b.init)});
      return mk_new(std::move(bs), surface_to_core(s->s0), s->pos);
    }
    case Surface::Kind::Tuple:
      if (s->items.size() == 2)
        return mk_pair(surface_to_core(s->items[0]),
                       surface_to_core(s->items[1]), s->pos);
      throw LamrefError("surface_to_core: residual n-ary tuple");
    case Surface::Kind::Let:
    case Surface::Kind::Seq:
    case Surface::Kind::RefNew:
    case Surface::Kind::Ascribe:
      throw LamrefError("surface_to_core: residual sugar node");
  }
  throw LamrefError("unreachable surface kind");
}

SurfacePtr desugar(const SurfacePtr& s, const DesugarEnv& env,
                   const TypePtr& expected) {
  switch (s->kind) {
    case Surface::Kind::Loc:
    case Surface::Kind::Var:
    case Surface::Kind::Star:
      return s;
    case Surface::Kind::Inj: {
      TypePtr sum = expected ? expected : s->annot;
      if (sum && sum->kind() != Type::Kind::Sum)
        throw LamrefError("injection used at non-sum type " + print_type(sum));
      Surface r = *s;
      r.annot = sum;
      r.s0 = desugar(s->s0, env,
                     sum ? (s->inj_tag == 1 ? sum->lhs() : sum->rhs())
                         : nullptr);
      return mks(std::move(r));
    }
    case Surface::Kind::Deref: {
      Surface r = *s;
      r.s0 = desugar(s->s0, env);
      return mks(std::move(r));
    }
    case Surface::Kind::App: {
      Surface r = *s;
      r.s0 = desugar(s->s0, env);
      TypePtr fn_ty = infer_surface(r.s0, env);
      TypePtr arg_expected =
          fn_ty->kind() == Type::Kind::Arrow ? fn_ty->lhs() : nullptr;
      r.s1 = desugar(s->s1, env, arg_expected);
      return mks(std::move(r));
    }
    case Surface::Kind::Assign: {
      Surface r = *s;
      r.s0 = desugar(s->s0, env);
      TypePtr ref_ty = infer_surface(r.s0, env);
      TypePtr val_expected = nullptr;
      if (ref_ty->kind() == Type::Kind::Ref && env.sig != nullptr)
        val_expected =
            Type::from_ground(env.sig->content_type(ref_ty->ref_sort()));
      r.s1 = desugar(s->s1, env, val_expected);
      return mks(std::move(r));
    }
    case Surface::Kind::Fun: {
      DesugarEnv inner = env;
      inner.vars[s->var] = s->annot;
      TypePtr body_expected =
          expected && expected->kind() == Type::Kind::Arrow ? expected->rhs()
                                                            : nullptr;
      Surface r = *s;
      r.s0 = desugar(s->s0, inner, body_expected);
      return mks(std::move(r));
    }
    case Surface::Kind::MatchEmpty: {
      Surface r = *s;
      r.s0 = desugar(s->s0, env, Type::empty());
      return mks(std::move(r));
    }
    case Surface::Kind::MatchSum: {
      Surface r = *s;
      r.s0 = desugar(s->s0, env);
      TypePtr scrut_ty = infer_surface(r.s0, env);
      if (scrut_ty->kind() != Type::Kind::Sum)
        throw LamrefError("match: scrutinee is not a sum");
      DesugarEnv e1 = env;
      e1.vars[s->var] = scrut_ty->lhs();
      r.s1 = desugar(s->s1, e1, expected);
      DesugarEnv e2 = env;
      e2.vars[s->var2] = scrut_ty->rhs();
      r.s2 = desugar(s->s2, e2, expected);
      return mks(std::move(r));
    }
    case Surface::Kind::MatchProd: {
      Surface r = *s;
      r.s0 = desugar(s->s0, env);
      TypePtr scrut_ty = infer_surface(r.s0, env);
      if (scrut_ty->kind() != Type::Kind::Product)
        throw LamrefError("match: scrutinee is not a product");
      DesugarEnv e = env;
      e.vars[s->var] = scrut_ty->lhs();
      e.vars[s->var2] = scrut_ty->rhs();
      r.s1 = desugar(s->s1, e, expected);
      return mks(std::move(r));
    }
    case Surface::Kind::New: {
      DesugarEnv inner = env;
      for (const auto& b : s->binders)
        inner.vars[b.name] = Type::ref(b.sort);
      Surface r = *s;
      r.binders.clear();
      for (const auto& b : s->binders) {
        TypePtr content =
            env.sig != nullptr && env.sig->has_sort(b.sort)
                ? Type::from_ground(env.sig->content_type(b.sort))
                : nullptr;
        r.binders.push_back({b.name, b.sort, desugar(b.init, inner, content)});
      }
      r.s0 = desugar(s->s0, inner, expected);
      return mks(std::move(r));
    }

    case Surface::Kind::Let: {
      // let x [: ty] = t in t'  ==>  (fun (x:ty) -> t') t
      SurfacePtr rhs = desugar(s->s0, env, s->annot);
      TypePtr ty = s->annot ? s->annot : infer_surface(rhs, env);
      DesugarEnv inner = env;
      inner.vars[s->var] = ty;
      SurfacePtr body = desugar(s->s1, inner, expected);
      Surface fn;
      fn.kind = Surface::Kind::Fun;
      fn.pos = s->pos;
      fn.var = s->var;
      fn.annot = ty;
      fn.s0 = body;
      Surface app;
      app.kind = Surface::Kind::App;
      app.pos = s->pos;
      app.s0 = mks(std::move(fn));
      app.s1 = rhs;
      return mks(std::move(app));
    }
    case Surface::Kind::Seq: {
      // t ; t'  ==>  let _ = t in t'
      SurfacePtr lhs = desugar(s->s0, env);
      TypePtr ty = infer_surface(lhs, env);
      std::string x = fresh_name("_seq", surface_free_vars(s->s1));
      Surface fn;
      fn.kind = Surface::Kind::Fun;
      fn.pos = s->pos;
      fn.var = x;
      fn.annot = ty;
      fn.s0 = desugar(s->s1, env, expected);
      Surface app;
      app.kind = Surface::Kind::App;
      app.pos = s->pos;
      app.s0 = mks(std::move(fn));
      app.s1 = lhs;
      return mks(std::move(app));
    }
    case Surface::Kind::RefNew: {
      // ref k t  ==>  let x : typeof k = t in new {y:k = x} in y
      if (env.sig == nullptr || !env.sig->has_sort(s->sort))
        throw UnknownSortError(s->sort);
      TypePtr content = Type::from_ground(env.sig->content_type(s->sort));
      SurfacePtr rhs = desugar(s->s0, env, content);
      std::string x = fresh_name("_ref", {});
      std::string y = fresh_name("_loc", {x});

      Surface yvar;
      yvar.kind = Surface::Kind::Var;
      yvar.var = y;
      Surface xvar;
      xvar.kind = Surface::Kind::Var;
      xvar.var = x;
      Surface nw;
      nw.kind = Surface::Kind::New;
      nw.pos = s->pos;
      nw.binders.push_back({y, s->sort, mks(std::move(xvar))});
      nw.s0 = mks(std::move(yvar));
      Surface fn;
      fn.kind = Surface::Kind::Fun;
      fn.pos = s->pos;
      fn.var = x;
      fn.annot = content;
      fn.s0 = mks(std::move(nw));
      Surface app;
      app.kind = Surface::Kind::App;
      app.pos = s->pos;
      app.s0 = mks(std::move(fn));
      app.s1 = rhs;
      return mks(std::move(app));
    }
    case Surface::Kind::Tuple: {
      // Right-nested pairs; an expected product type is peeled component-wise.
      if (s->items.size() < 2)
        throw LamrefError("tuple with fewer than two components");
      std::vector<SurfacePtr> ds(s->items.size());
      TypePtr rest = expected;
      for (size_t i = 0; i + 1 < s->items.size(); ++i) {
        TypePtr head = nullptr;
        if (rest && rest->kind() == Type::Kind::Product) {
          head = rest->lhs();
          rest = rest->rhs();
        } else {
          rest = nullptr;
        }
        ds[i] = desugar(s->items[i], env, head);
      }
      ds.back() = desugar(s->items.back(), env, rest);
      SurfacePtr acc = ds.back();
      for (size_t i = ds.size() - 1; i-- > 0;) {
        Surface p;
        p.kind = Surface::Kind::Tuple;
        p.pos = s->pos;
        p.items = {ds[i], acc};
        acc = mks(std::move(p));
      }
      return acc;
    }
    case Surface::Kind::Ascribe: {
      SurfacePtr inner = desugar(s->s0, env, s->annot);
      TypePtr got = infer_surface(inner, env);
      if (!type_eq(got, s->annot))
        throw LamrefError("ascription mismatch: term has type " +
                          print_type(got) + ", ascribed " +
                          print_type(s->annot));
      return inner;
    }
  }
  throw LamrefError("unreachable surface kind");
}

}  // namespace lamref
