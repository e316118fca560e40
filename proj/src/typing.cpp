#include "lamref/typing.hpp"

namespace lamref {

const std::string& Layout::sort_of(int loc) const {
  auto it = cells.find(loc);
  if (it == cells.end()) throw UnknownLocationError(loc, -1);
  return it->second;
}

std::string print_layout(const Layout& w) {
  std::string out = "{";
  bool first = true;
  for (const auto& [l, s] : w.cells) {
    if (!first) out += ", ";
    first = false;
    out += "#" + std::to_string(l) + ":" + s;
  }
  return out + "}";
}

bool layout_extends(const Layout& w, const Layout& w2) {
  for (const auto& [l, s] : w.cells) {
    auto it = w2.cells.find(l);
    if (it == w2.cells.end() || it->second != s) return false;
  }
  return true;
}

namespace {

[[noreturn]] void mismatch(const TermPtr& t, const std::string& expected,
                           const TypePtr& found) {
  throw TypeError("type error at `" + print_term(t) + "`: expected " +
                      expected + ", found " + print_type(found),
                  t->pos);
}

}  // namespace

TypePtr infer(const Signature& sig, const Layout& w, const Context& ctx,
              const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Loc: {
      auto it = w.cells.find(t->loc);
      if (it == w.cells.end()) throw UnknownLocationError(t->loc, t->pos);
      return Type::ref(it->second);
    }
    case Term::Kind::Var: {
      auto it = ctx.vars.find(t->var);
      if (it == ctx.vars.end()) throw UnboundIdentifierError(t->var, t->pos);
      return it->second;
    }
    case Term::Kind::Star:
      return Type::unit();
    case Term::Kind::Inj: {
      TypePtr sub = infer(sig, w, ctx, t->t0);
      const TypePtr& side = t->inj_tag == 1 ? t->annot->lhs() : t->annot->rhs();
      if (!type_eq(sub, side)) mismatch(t->t0, print_type(side), sub);
      return t->annot;
    }
    case Term::Kind::Pair: {
      TypePtr a = infer(sig, w, ctx, t->t0);
      TypePtr b = infer(sig, w, ctx, t->t1);
      return Type::product(a, b);
    }
    case Term::Kind::Fun: {
      Context inner = ctx;
      inner.vars[t->var] = t->annot;
      return Type::arrow(t->annot, infer(sig, w, inner, t->t0));
    }
    case Term::Kind::MatchEmpty: {
      TypePtr s = infer(sig, w, ctx, t->t0);
      if (s->kind() != Type::Kind::Empty) mismatch(t->t0, "0", s);
      return t->annot;
    }
    case Term::Kind::MatchSum: {
      TypePtr s = infer(sig, w, ctx, t->t0);
      if (s->kind() != Type::Kind::Sum) mismatch(t->t0, "a sum type", s);
      Context c1 = ctx;
      c1.vars[t->var] = s->lhs();
      TypePtr r1 = infer(sig, w, c1, t->t1);
      Context c2 = ctx;
      c2.vars[t->var2] = s->rhs();
      TypePtr r2 = infer(sig, w, c2, t->t2);
      if (!type_eq(r1, r2)) mismatch(t->t2, print_type(r1), r2);
      return r1;
    }
    case Term::Kind::MatchProd: {
      TypePtr s = infer(sig, w, ctx, t->t0);
      if (s->kind() != Type::Kind::Product)
        mismatch(t->t0, "a product type", s);
      Context c = ctx;
      c.vars[t->var] = s->lhs();
      c.vars[t->var2] = s->rhs();
      return infer(sig, w, c, t->t1);
    }
    case Term::Kind::App: {
      TypePtr f = infer(sig, w, ctx, t->t0);
      if (f->kind() != Type::Kind::Arrow) mismatch(t->t0, "a function type", f);
      TypePtr a = infer(sig, w, ctx, t->t1);
      if (!type_eq(a, f->lhs())) mismatch(t->t1, print_type(f->lhs()), a);
      return f->rhs();
    }
    case Term::Kind::Assign: {
      TypePtr r = infer(sig, w, ctx, t->t0);
      if (r->kind() != Type::Kind::Ref) mismatch(t->t0, "a reference type", r);
      TypePtr content = Type::from_ground(sig.content_type(r->ref_sort()));
      TypePtr v = infer(sig, w, ctx, t->t1);
      if (!type_eq(v, content)) mismatch(t->t1, print_type(content), v);
      return Type::unit();
    }
    case Term::Kind::Deref: {
      TypePtr r = infer(sig, w, ctx, t->t0);
      if (r->kind() != Type::Kind::Ref) mismatch(t->t0, "a reference type", r);
      return Type::from_ground(sig.content_type(r->ref_sort()));
    }
    case Term::Kind::New: {
      Context inner = ctx;
      for (const auto& b : t->binders) {
        if (!sig.has_sort(b.sort)) throw UnknownSortError(b.sort);
        inner.vars[b.name] = Type::ref(b.sort);
      }
      for (const auto& b : t->binders) {
        if (!is_value(b.init)) throw NotAValueError(b.init->pos);
        TypePtr content = Type::from_ground(sig.content_type(b.sort));
        TypePtr got = infer(sig, w, inner, b.init);
        if (!type_eq(got, content)) mismatch(b.init, print_type(content), got);
      }
      return infer(sig, w, inner, t->t0);
    }
  }
  throw LamrefError("unreachable term kind");
}

}  // namespace lamref
