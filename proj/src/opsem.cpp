#include "lamref/opsem.hpp"

#include <algorithm>

namespace lamref {

TypedHeap to_typed(const Signature& sig, const Layout& w,
                   const UntypedHeap& h) {
  if (h.size() != w.cells.size())
    throw IllTypedHeapError(-1, "heap and layout supports differ");
  for (const auto& [loc, _] : h)
    if (!w.contains(loc))
      throw IllTypedHeapError(loc, "location not in layout");
  Context empty;
  for (const auto& [loc, v] : h) {
    if (!is_value(v)) throw IllTypedHeapError(loc, "heap entry is not a value");
    TypePtr expected = Type::from_ground(sig.content_type(w.cells.at(loc)));
    TypePtr got;
    try {
      got = infer(sig, w, empty, v);
    } catch (const TypeError& e) {
      throw IllTypedHeapError(loc, e.what());
    }
    if (!type_eq(got, expected))
      throw IllTypedHeapError(loc, "entry has type " + print_type(got) +
                                       ", cell stores " +
                                       print_type(expected));
  }
  return TypedHeap{w, h};
}

std::vector<int> fresh_locations(const Layout& w, int n) {
  std::vector<int> out;
  int candidate = 0;
  while (static_cast<int>(out.size()) < n) {
    if (!w.contains(candidate)) out.push_back(candidate);
    ++candidate;
  }
  return out;
}

namespace {

std::vector<int> fresh_for_heap(const UntypedHeap& h, int n) {
  std::vector<int> out;
  int candidate = 0;
  while (static_cast<int>(out.size()) < n) {
    if (!h.count(candidate)) out.push_back(candidate);
    ++candidate;
  }
  return out;
}

std::string fresh_var(const std::string& base,
                      const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 0;; ++i) {
    std::string cand = base + "'" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

}  // namespace

TermPtr substitute(const TermPtr& t, const std::map<std::string, TermPtr>& e) {
  if (e.empty()) return t;
  switch (t->kind) {
    case Term::Kind::Loc:
    case Term::Kind::Star:
      return t;
    case Term::Kind::Var: {
      auto it = e.find(t->var);
      return it == e.end() ? t : it->second;
    }
    case Term::Kind::Inj:
      return mk_inj(t->inj_tag, substitute(t->t0, e), t->annot, t->pos);
    case Term::Kind::Pair:
      return mk_pair(substitute(t->t0, e), substitute(t->t1, e), t->pos);
    case Term::Kind::Deref:
      return mk_deref(substitute(t->t0, e), t->pos);
    case Term::Kind::App:
      return mk_app(substitute(t->t0, e), substitute(t->t1, e), t->pos);
    case Term::Kind::Assign:
      return mk_assign(substitute(t->t0, e), substitute(t->t1, e), t->pos);
    case Term::Kind::MatchEmpty:
      return mk_match_empty(substitute(t->t0, e), t->annot, t->pos);
    default:
      break;
  }

  // Binding forms: drop shadowed entries and rename binders that would
  // capture free identifiers of the substituted values.
  std::set<std::string> in_scope_free;
  for (const auto& [x, v] : e) {
    (void)x;
    auto fv = free_vars(v);
    in_scope_free.insert(fv.begin(), fv.end());
  }

  auto subst_under = [&](const std::vector<std::string>& binders,
                         const std::vector<TermPtr>& bodies)
      -> std::pair<std::vector<std::string>, std::vector<TermPtr>> {
    std::map<std::string, TermPtr> inner = e;
    for (const auto& b : binders) inner.erase(b);
    // Collect capture hazards; sibling binders stay distinct.
    std::set<std::string> avoid = in_scope_free;
    avoid.insert(binders.begin(), binders.end());
    for (const auto& body : bodies) {
      auto fv = free_vars(body);
      avoid.insert(fv.begin(), fv.end());
    }
    std::vector<std::string> fresh_binders;
    bool renamed = false;
    std::map<std::string, TermPtr> renaming;
    for (const auto& b : binders) {
      if (inner.count(b) == 0 && in_scope_free.count(b)) {
        std::string nb = fresh_var(b, avoid);
        avoid.insert(nb);
        renaming[b] = mk_var(nb);
        fresh_binders.push_back(nb);
        renamed = true;
      } else {
        fresh_binders.push_back(b);
      }
    }
    std::vector<TermPtr> out_bodies;
    for (const auto& body : bodies) {
      TermPtr b2 = renamed ? substitute(body, renaming) : body;
      out_bodies.push_back(substitute(b2, inner));
    }
    return {fresh_binders, out_bodies};
  };

  switch (t->kind) {
    case Term::Kind::Fun: {
      auto [bs, bodies] = subst_under({t->var}, {t->t0});
      return mk_fun(bs[0], t->annot, bodies[0], t->pos);
    }
    case Term::Kind::MatchSum: {
      TermPtr scrut = substitute(t->t0, e);
      auto [b1, bod1] = subst_under({t->var}, {t->t1});
      auto [b2, bod2] = subst_under({t->var2}, {t->t2});
      return mk_match_sum(scrut, b1[0], bod1[0], b2[0], bod2[0], t->pos);
    }
    case Term::Kind::MatchProd: {
      TermPtr scrut = substitute(t->t0, e);
      auto [bs, bodies] = subst_under({t->var, t->var2}, {t->t1});
      return mk_match_prod(scrut, bs[0], bs[1], bodies[0], t->pos);
    }
    case Term::Kind::New: {
      std::vector<std::string> names;
      std::vector<TermPtr> bodies;
      for (const auto& b : t->binders) names.push_back(b.name);
      for (const auto& b : t->binders) bodies.push_back(b.init);
      bodies.push_back(t->t0);
      auto [bs, out] = subst_under(names, bodies);
      std::vector<NewBinder> binders;
      for (size_t i = 0; i < t->binders.size(); ++i)
        binders.push_back({bs[i], t->binders[i].sort, out[i]});
      return mk_new(std::move(binders), out.back(), t->pos);
    }
    default:
      throw LamrefError("unreachable in substitute");
  }
}

namespace {

struct Evaluator {
  long fuel;
  std::vector<std::pair<int, std::string>>* allocations;

  void burn() {
    if (--fuel < 0) throw FuelExhaustedError();
  }

  // Returns the value; mutates the heap in place.
  TermPtr run(const TermPtr& t, UntypedHeap& h) {
    burn();
    switch (t->kind) {
      case Term::Kind::Loc:
      case Term::Kind::Star:
      case Term::Kind::Fun:
        return t;
      case Term::Kind::Var:
        throw StuckError("free identifier " + t->var);
      case Term::Kind::Inj: {
        if (is_value(t)) return t;
        TermPtr v = run(t->t0, h);
        return mk_inj(t->inj_tag, v, t->annot);
      }
      case Term::Kind::Pair: {
        if (is_value(t)) return t;
        TermPtr v1 = run(t->t0, h);
        TermPtr v2 = run(t->t1, h);
        return mk_pair(v1, v2);
      }
      case Term::Kind::MatchEmpty:
        run(t->t0, h);
        throw StuckError("value of empty type");
      case Term::Kind::MatchSum: {
        TermPtr s = run(t->t0, h);
        if (s->kind != Term::Kind::Inj)
          throw StuckError("match on a non-injection");
        if (s->inj_tag == 1)
          return run(substitute(t->t1, {{t->var, s->t0}}), h);
        return run(substitute(t->t2, {{t->var2, s->t0}}), h);
      }
      case Term::Kind::MatchProd: {
        TermPtr s = run(t->t0, h);
        if (s->kind != Term::Kind::Pair)
          throw StuckError("match on a non-pair");
        return run(substitute(t->t1, {{t->var, s->t0}, {t->var2, s->t1}}), h);
      }
      case Term::Kind::App: {
        TermPtr f = run(t->t0, h);
        if (f->kind != Term::Kind::Fun)
          throw StuckError("application of a non-function");
        TermPtr a = run(t->t1, h);
        return run(substitute(f->t0, {{f->var, a}}), h);
      }
      case Term::Kind::Assign: {
        TermPtr r = run(t->t0, h);
        if (r->kind != Term::Kind::Loc)
          throw StuckError("assignment to a non-location");
        TermPtr v = run(t->t1, h);
        if (!h.count(r->loc))
          throw StuckError("assignment to unallocated #" +
                           std::to_string(r->loc));
        h[r->loc] = v;
        return mk_star();
      }
      case Term::Kind::Deref: {
        TermPtr r = run(t->t0, h);
        if (r->kind != Term::Kind::Loc)
          throw StuckError("dereference of a non-location");
        auto it = h.find(r->loc);
        if (it == h.end())
          throw StuckError("dereference of unallocated #" +
                           std::to_string(r->loc));
        return it->second;
      }
      case Term::Kind::New: {
        int n = static_cast<int>(t->binders.size());
        std::vector<int> locs = fresh_for_heap(h, n);
        std::map<std::string, TermPtr> e;
        for (int i = 0; i < n; ++i) e[t->binders[i].name] = mk_loc(locs[i]);
        for (int i = 0; i < n; ++i) {
          h[locs[i]] = substitute(t->binders[i].init, e);
          if (allocations)
            allocations->emplace_back(locs[i], t->binders[i].sort);
        }
        return run(substitute(t->t0, e), h);
      }
    }
    throw LamrefError("unreachable term kind");
  }
};

}  // namespace

EvalResult eval(const Signature& sig, const Config& c, long fuel) {
  (void)sig;  // the untyped semantics never consults the signature
  EvalResult res;
  res.heap = c.heap;
  Evaluator ev{fuel, &res.allocations};
  res.value = ev.run(c.term, res.heap);
  return res;
}

std::string print_heap(const UntypedHeap& h) {
  std::string out = "{";
  bool first = true;
  for (const auto& [loc, v] : h) {
    if (!first) out += ", ";
    first = false;
    out += "#" + std::to_string(loc) + " = " + print_term(v);
  }
  return out + "}";
}

}  // namespace lamref
