#include "lamref/denote.hpp"

#include <algorithm>

namespace lamref {

// --- hiding monad -------------------------------------------------------------

PVal p_return(const Signature& sig, const World& w, SemValue payload,
              Store store) {
  CoendRep r;
  r.base = w;
  r.inj = Injection::identity(w);
  r.payload = std::move(payload);
  r.store = std::move(store);
  if (!(r.store.world == w)) throw LamrefError("p_return: store world mismatch");
  return gc_canonical(sig, r);
}

PVal p_hide(const Signature& sig, const Injection& h, const PVal& r) {
  if (!(h.cod() == r.base)) throw LamrefError("p_hide: base mismatch");
  CoendRep out = r;
  out.base = h.dom();
  out.inj = compose(r.inj, h);
  return gc_canonical(sig, out);
}

PVal p_bind(const Signature& sig, const PVal& r, const PKleisli& g) {
  PVal s = g(r.store.world, r.payload, r.store);
  if (!(s.base == r.store.world))
    throw LamrefError("p_bind: continuation produced a wrong base");
  return p_hide(sig, r.inj, s);
}

PVal p_strength(const Signature& sig, const SemValue& x, const PVal& r) {
  CoendRep out = r;
  out.payload = SemValue::pair(transport_value(r.inj, x), r.payload);
  return gc_canonical(sig, out);
}

PVal p_action(const Signature& sig, const Initialisation& i, const PVal& r) {
  if (!(i.inj.dom() == r.base)) throw LamrefError("p_action: base mismatch");
  Promoted pr = promote(sig, r.inj, i);
  CoendRep out;
  out.base = i.inj.cod();
  out.inj = pr.transposed;
  out.payload = transport_value(pr.promoted.inj, r.payload);
  out.store = stores_action(sig, pr.promoted, r.store);
  return gc_canonical(sig, out);
}

// --- storage monad ------------------------------------------------------------

namespace {

void check_component_args(const World& base, const Injection& h,
                          const Store& s) {
  if (!(h.dom() == base))
    throw LamrefError(
        "component queried with an injection out of a different world");
  if (!(s.world == h.cod()))
    throw LamrefError("component queried with a store over a different world");
}

}  // namespace

MonadComp t_return(const Signature& sig, const World& base, TypePtr type,
                   const SemValue& x) {
  return MonadComp{base, std::move(type),
                   [&sig, base, x](const Injection& h, const Store& s) {
                     check_component_args(base, h, s);
                     return p_return(sig, h.cod(), transport_value(h, x), s);
                   }};
}

MonadComp t_bind(const Signature& sig, const MonadComp& m, TypePtr result_type,
                 const TKleisli& f) {
  World base = m.base;
  auto comp = m.component;
  return MonadComp{
      base, std::move(result_type),
      [&sig, base, comp, f](const Injection& h, const Store& s) {
        check_component_args(base, h, s);
        CoendRep r = comp(h, s);
        MonadComp next = f(r.store.world, r.payload);
        if (!(next.base == r.store.world))
          throw LamrefError("t_bind: continuation based at a wrong world");
        CoendRep r2 =
            next.component(Injection::identity(r.store.world), r.store);
        CoendRep out;
        out.base = h.cod();
        out.inj = compose(r2.inj, r.inj);
        out.payload = r2.payload;
        out.store = r2.store;
        return gc_canonical(sig, out);
      }};
}

MonadComp t_map(
    const Signature& sig, const MonadComp& m, TypePtr result_type,
    const std::function<SemValue(const World&, const SemValue&)>& f) {
  World base = m.base;
  auto comp = m.component;
  return MonadComp{base, std::move(result_type),
                   [&sig, base, comp, f](const Injection& h, const Store& s) {
                     check_component_args(base, h, s);
                     CoendRep r = comp(h, s);
                     r.payload = f(r.store.world, r.payload);
                     return gc_canonical(sig, r);
                   }};
}

MonadComp t_strength(const Signature& sig, const SemValue& x,
                     const MonadComp& m, TypePtr result_type) {
  World base = m.base;
  auto comp = m.component;
  return MonadComp{
      base, std::move(result_type),
      [&sig, base, comp, x](const Injection& h, const Store& s) {
        check_component_args(base, h, s);
        CoendRep r = comp(h, s);
        SemValue xt = transport_value(compose(r.inj, h), x);
        r.payload = SemValue::pair(std::move(xt), r.payload);
        return gc_canonical(sig, r);
      }};
}

MonadComp t_dstrength(const Signature& sig, const MonadComp& m1,
                      const MonadComp& m2, TypePtr result_type) {
  if (!(m1.base == m2.base)) throw LamrefError("t_dstrength: bases differ");
  World base = m1.base;
  auto c1 = m1.component;
  auto c2 = m2.component;
  return MonadComp{
      base, std::move(result_type),
      [&sig, base, c1, c2](const Injection& h, const Store& s1) {
        check_component_args(base, h, s1);
        CoendRep r1 = c1(h, s1);
        CoendRep r2 = c2(compose(r1.inj, h), r1.store);
        CoendRep out;
        out.base = h.cod();
        out.inj = compose(r2.inj, r1.inj);
        out.payload =
            SemValue::pair(transport_value(r2.inj, r1.payload), r2.payload);
        out.store = r2.store;
        return gc_canonical(sig, out);
      }};
}

MonadComp t_restrict(const MonadComp& m, const Injection& g) {
  if (!(g.dom() == m.base)) throw LamrefError("t_restrict: domain mismatch");
  auto comp = m.component;
  World base2 = g.cod();
  return MonadComp{base2, m.type,
                   [base2, comp, g](const Injection& h, const Store& s) {
                     check_component_args(base2, h, s);
                     return comp(compose(h, g), s);
                   }};
}

MonadComp t_mget(const Signature& sig, const World& base, int loc) {
  auto sort = base.cells.find(loc);
  if (sort == base.cells.end()) throw UnknownLocationError(loc, -1);
  TypePtr type = Type::from_ground(sig.content_type(sort->second));
  return MonadComp{base, type,
                   [&sig, base, loc](const Injection& h, const Store& s) {
                     check_component_args(base, h, s);
                     return p_return(sig, h.cod(), store_lookup(s, h(loc)), s);
                   }};
}

MonadComp t_mset(const Signature& sig, const World& base, int loc,
                 const SemValue& a) {
  auto sort = base.cells.find(loc);
  if (sort == base.cells.end()) throw UnknownLocationError(loc, -1);
  if (!interp_member(sig, sig.content_type(sort->second), base, a))
    throw LamrefError("mset: value not in the cell's content type");
  GroundTypePtr content = sig.content_type(sort->second);
  return MonadComp{
      base, Type::unit(),
      [&sig, base, loc, a, content](const Injection& h, const Store& s) {
        check_component_args(base, h, s);
        SemValue at = interp_action(sig, content, h, a);
        return p_return(sig, h.cod(), SemValue::star(),
                        store_update(sig, s, h(loc), at));
      }};
}

Initialisation minit(const Signature& sig, const World& base, const World& w0,
                     const std::map<int, SemValue>& data) {
  IndepCoproduct cp = indep_coproduct(base, w0);
  Heaplet d;
  d.shape = complement(cp.into1).dom();
  d.ambient = cp.world;
  for (const auto& [l0, sort] : w0.cells) {
    auto it = data.find(l0);
    if (it == data.end())
      throw LamrefError("minit: missing datum for #" + std::to_string(l0));
    if (!interp_member(sig, sig.content_type(sort), cp.world, it->second))
      throw LamrefError(
          "minit: datum not in the content type at the extended world");
    d.contents[cp.into2(l0)] = it->second;
  }
  return Initialisation{cp.into1, std::move(d)};
}

MonadComp t_mnew(const Signature& sig, const World& base, const World& w0,
                 const std::map<int, SemValue>& data) {
  Initialisation init = minit(sig, base, w0, data);
  IndepCoproduct cp = indep_coproduct(base, w0);

  TypePtr type = Type::unit();
  std::vector<TypePtr> ref_types;
  for (const auto& [_, sort] : w0.cells) ref_types.push_back(Type::ref(sort));
  if (!ref_types.empty()) {
    type = ref_types.back();
    for (size_t i = ref_types.size() - 1; i-- > 0;)
      type = Type::product(ref_types[i], type);
  }

  return MonadComp{
      base, type,
      [&sig, base, init, cp](const Injection& h, const Store& s1) {
        check_component_args(base, h, s1);
        Promoted pr = promote(sig, h, init);
        std::vector<SemValue> locs;
        for (const auto& [l0, _] : cp.into2.dom().cells)
          locs.push_back(SemValue::loc(pr.transposed(cp.into2(l0))));
        CoendRep out;
        out.base = h.cod();
        out.inj = pr.promoted.inj;
        out.payload = SemValue::tuple(locs);
        out.store = stores_action(sig, pr.promoted, s1);
        return gc_canonical(sig, out);
      }};
}

// --- value and term semantics ---------------------------------------------------

namespace {

// (h, e) packed as a semantic value so the strength can transport it: the
// location environment as a tuple of locations (judgement layout order), the
// environment as a tuple of values (context order).
SemValue pack_env(const Layout& w, const Context& ctx, const Injection& h,
                  const Env& e) {
  std::vector<SemValue> locs;
  for (const auto& [l, _] : w.cells) locs.push_back(SemValue::loc(h(l)));
  std::vector<SemValue> vals;
  for (const auto& [x, _] : ctx.vars) vals.push_back(e.at(x));
  return SemValue::pair(SemValue::tuple(locs), SemValue::tuple(vals));
}

std::vector<SemValue> untuple(const SemValue& v, size_t n) {
  std::vector<SemValue> out;
  if (n == 0) return out;
  SemValue cur = v;
  for (size_t i = 0; i + 1 < n; ++i) {
    out.push_back(cur.fst());
    cur = cur.snd();
  }
  out.push_back(cur);
  return out;
}

std::pair<Injection, Env> unpack_env(const Layout& w, const Context& ctx,
                                     const World& at, const SemValue& packed) {
  std::vector<SemValue> locs = untuple(packed.fst(), w.cells.size());
  std::map<int, int> m;
  size_t i = 0;
  for (const auto& [l, _] : w.cells) m[l] = locs[i++].loc_index();
  Injection h(w, at, std::move(m));
  std::vector<SemValue> vals = untuple(packed.snd(), ctx.vars.size());
  Env e;
  i = 0;
  for (const auto& [x, _] : ctx.vars) e[x] = vals[i++];
  return {std::move(h), std::move(e)};
}

}  // namespace

SemValue denote_value(const Signature& sig, const Layout& w, const Context& ctx,
                      const TermPtr& v, const Injection& h, const Env& e) {
  switch (v->kind) {
    case Term::Kind::Loc:
      return SemValue::loc(h(v->loc));
    case Term::Kind::Var: {
      auto it = e.find(v->var);
      if (it == e.end()) throw LamrefError("denote_value: unbound " + v->var);
      return it->second;
    }
    case Term::Kind::Star:
      return SemValue::star();
    case Term::Kind::Inj:
      return SemValue::inj(v->inj_tag, denote_value(sig, w, ctx, v->t0, h, e));
    case Term::Kind::Pair:
      return SemValue::pair(denote_value(sig, w, ctx, v->t0, h, e),
                            denote_value(sig, w, ctx, v->t1, h, e));
    case Term::Kind::Fun: {
      auto c = std::make_shared<ClosureData>();
      c->sig = &sig;
      c->judgement_layout = w;
      c->ctx = ctx;
      c->ctx.vars[v->var] = v->annot;
      c->binder = v->var;
      c->binder_type = v->annot;
      c->result_type = infer(sig, w, c->ctx, v->t0);
      c->body = v->t0;
      c->loc_env = h;
      // Restrict the captured environment to the body's free identifiers so
      // out-of-scope entries do not keep private locations reachable.
      auto fv = free_vars(v->t0);
      for (const auto& x : fv)
        if (x != v->var) {
          auto it = e.find(x);
          if (it == e.end())
            throw LamrefError("denote_value: unbound " + x + " in closure");
          c->env.emplace(x, it->second);
        }
      Context restricted;
      for (const auto& x : fv)
        if (x != v->var) restricted.vars[x] = ctx.vars.at(x);
      restricted.vars[v->var] = v->annot;
      c->ctx = restricted;
      return SemValue::closure(std::move(c));
    }
    default:
      throw LamrefError("denote_value: not a value");
  }
}

MonadComp apply_closure(const ClosurePtr& c, const Injection& g,
                        const SemValue& arg) {
  if (!(g.dom() == c->loc_env.cod()))
    throw LamrefError("apply_closure: injection domain mismatch");
  Env e = transport_env(g, c->env);
  e[c->binder] = arg;
  return denote_term(*c->sig, c->judgement_layout, c->ctx, c->body,
                     compose(g, c->loc_env), e);
}

MonadComp denote_term(const Signature& sig, const Layout& w, const Context& ctx,
                      const TermPtr& t, const Injection& h, const Env& e) {
  TypePtr type = infer(sig, w, ctx, t);
  const World& cur = h.cod();

  if (is_value(t))
    return t_return(sig, cur, type, denote_value(sig, w, ctx, t, h, e));

  switch (t->kind) {
    case Term::Kind::Inj: {
      MonadComp m = denote_term(sig, w, ctx, t->t0, h, e);
      int tag = t->inj_tag;
      return t_map(sig, m, type, [tag](const World&, const SemValue& x) {
        return SemValue::inj(tag, x);
      });
    }
    case Term::Kind::Pair:
      return t_dstrength(sig, denote_term(sig, w, ctx, t->t0, h, e),
                         denote_term(sig, w, ctx, t->t1, h, e), type);
    case Term::Kind::MatchEmpty: {
      MonadComp m = denote_term(sig, w, ctx, t->t0, h, e);
      return t_map(sig, m, type, [](const World&, const SemValue&) -> SemValue {
        throw LamrefError("denotation reached a value of the empty type");
      });
    }
    case Term::Kind::MatchSum: {
      MonadComp scrut = denote_term(sig, w, ctx, t->t0, h, e);
      MonadComp packed = t_strength(sig, pack_env(w, ctx, h, e), scrut);
      TypePtr scrut_ty = infer(sig, w, ctx, t->t0);
      Context c1 = ctx, c2 = ctx;
      c1.vars[t->var] = scrut_ty->lhs();
      c2.vars[t->var2] = scrut_ty->rhs();
      TermPtr arm1 = t->t1, arm2 = t->t2;
      std::string x1 = t->var, x2 = t->var2;
      Layout wj = w;
      Context ctx0 = ctx;
      return t_bind(sig, packed, type,
                    [&sig, wj, ctx0, c1, c2, arm1, arm2, x1, x2](
                        const World& at, const SemValue& pv) {
                      auto [h2, e2] = unpack_env(wj, ctx0, at, pv.fst());
                      const SemValue& s = pv.snd();
                      if (s.kind() != SemValue::Kind::Inj)
                        throw LamrefError("match: payload is not an injection");
                      if (s.tag() == 1) {
                        Env e1 = e2;
                        e1[x1] = s.sub();
                        return denote_term(sig, wj, c1, arm1, h2, e1);
                      }
                      Env e3 = e2;
                      e3[x2] = s.sub();
                      return denote_term(sig, wj, c2, arm2, h2, e3);
                    });
    }
    case Term::Kind::MatchProd: {
      MonadComp scrut = denote_term(sig, w, ctx, t->t0, h, e);
      MonadComp packed = t_strength(sig, pack_env(w, ctx, h, e), scrut);
      TypePtr scrut_ty = infer(sig, w, ctx, t->t0);
      Context cb = ctx;
      cb.vars[t->var] = scrut_ty->lhs();
      cb.vars[t->var2] = scrut_ty->rhs();
      TermPtr body = t->t1;
      std::string x1 = t->var, x2 = t->var2;
      Layout wj = w;
      Context ctx0 = ctx;
      return t_bind(sig, packed, type,
                    [&sig, wj, ctx0, cb, body, x1, x2](const World& at,
                                                       const SemValue& pv) {
                      auto [h2, e2] = unpack_env(wj, ctx0, at, pv.fst());
                      Env eb = e2;
                      eb[x1] = pv.snd().fst();
                      eb[x2] = pv.snd().snd();
                      return denote_term(sig, wj, cb, body, h2, eb);
                    });
    }
    case Term::Kind::App: {
      MonadComp both = t_dstrength(sig, denote_term(sig, w, ctx, t->t0, h, e),
                                   denote_term(sig, w, ctx, t->t1, h, e));
      return t_bind(sig, both, type, [](const World& at, const SemValue& pv) {
        if (pv.fst().kind() != SemValue::Kind::Closure)
          throw LamrefError("application of a non-closure");
        return apply_closure(pv.fst().clos(), Injection::identity(at),
                             pv.snd());
      });
    }
    case Term::Kind::Assign: {
      MonadComp both = t_dstrength(sig, denote_term(sig, w, ctx, t->t0, h, e),
                                   denote_term(sig, w, ctx, t->t1, h, e));
      return t_bind(sig, both, type,
                    [&sig](const World& at, const SemValue& pv) {
                      return t_mset(sig, at, pv.fst().loc_index(), pv.snd());
                    });
    }
    case Term::Kind::Deref: {
      MonadComp m = denote_term(sig, w, ctx, t->t0, h, e);
      return t_bind(sig, m, type, [&sig](const World& at, const SemValue& lv) {
        return t_mget(sig, at, lv.loc_index());
      });
    }
    case Term::Kind::New: {
      // Interpret the initialisers at the (+)-extended world with the new
      // cells substituted through the second coprojection, then allocate and
      // bind the body.
      World w0;
      Context ctx_ext = ctx;
      int idx = 0;
      for (const auto& b : t->binders) {
        w0.cells[idx++] = b.sort;
        ctx_ext.vars[b.name] = Type::ref(b.sort);
      }
      IndepCoproduct cp = indep_coproduct(cur, w0);
      Injection h_ext = compose(cp.into1, h);
      Env e_ext = transport_env(cp.into1, e);
      idx = 0;
      for (const auto& b : t->binders)
        e_ext[b.name] = SemValue::loc(cp.into2(idx++));
      std::map<int, SemValue> data;
      idx = 0;
      for (const auto& b : t->binders)
        data[idx++] = denote_value(sig, w, ctx_ext, b.init, h_ext, e_ext);

      MonadComp alloc = t_mnew(sig, cur, w0, data);
      MonadComp packed = t_strength(sig, pack_env(w, ctx, h, e), alloc);
      std::vector<std::string> names;
      for (const auto& b : t->binders) names.push_back(b.name);
      TermPtr body = t->t0;
      Layout wj = w;
      Context ctx0 = ctx;
      return t_bind(sig, packed, type,
                    [&sig, wj, ctx0, ctx_ext, names, body](const World& at,
                                                           const SemValue& pv) {
                      auto [h2, e2] = unpack_env(wj, ctx0, at, pv.fst());
                      std::vector<SemValue> locs =
                          untuple(pv.snd(), names.size());
                      Env eb = e2;
                      for (size_t i = 0; i < names.size(); ++i)
                        eb[names[i]] = locs[i];
                      return denote_term(sig, wj, ctx_ext, body, h2, eb);
                    });
    }
    default:
      throw LamrefError("denote_term: unexpected term kind");
  }
}

Store denote_heap(const Signature& sig, const TypedHeap& H) {
  Store out;
  out.world = H.layout;
  Injection id = Injection::identity(H.layout);
  Context empty;
  for (const auto& [l, v] : H.contents)
    out.contents[l] = denote_value(sig, H.layout, empty, v, id, Env{});
  return out;
}

// --- bounded equality -----------------------------------------------------------

namespace {

struct Cmp {
  const Signature& sig;
  int world_bound;
  int value_bound;
  std::string approx_reason;
  bool approximate = false;

  bool value_equal(const TypePtr& ty, const World& at, const SemValue& a,
                   const SemValue& b) {
    switch (ty->kind()) {
      case Type::Kind::Empty:
      case Type::Kind::Unit:
      case Type::Kind::Ref:
        return a == b;
      case Type::Kind::Sum:
        if (a.kind() != SemValue::Kind::Inj || b.kind() != SemValue::Kind::Inj)
          throw LamrefError("value_equal: sum payload expected");
        if (a.tag() != b.tag()) return false;
        return value_equal(a.tag() == 1 ? ty->lhs() : ty->rhs(), at, a.sub(),
                           b.sub());
      case Type::Kind::Product:
        return value_equal(ty->lhs(), at, a.fst(), b.fst()) &&
               value_equal(ty->rhs(), at, a.snd(), b.snd());
      case Type::Kind::Arrow: {
        if (a.kind() != SemValue::Kind::Closure ||
            b.kind() != SemValue::Kind::Closure)
          throw LamrefError("value_equal: closure payload expected");
        if (!ty->lhs()->is_ground()) {
          approximate = true;
          approx_reason = "function argument type " + print_type(ty->lhs()) +
                          " is not ground";
          return true;
        }
        GroundTypePtr arg_ty = ty->lhs()->to_ground();
        int probes = 0;
        std::vector<World> targets = enumerate_worlds(sig, world_bound);
        if (std::find(targets.begin(), targets.end(), at) == targets.end())
          targets.push_back(at);
        for (const auto& w2 : targets) {
          for (const auto& g : enumerate_injections(at, w2)) {
            for (const auto& arg : interp_type(sig, arg_ty, w2)) {
              if (++probes > value_bound) {
                approximate = true;
                approx_reason = "closure probe budget exhausted";
                return true;
              }
              MonadComp ma = apply_closure(a.clos(), g, arg);
              MonadComp mb = apply_closure(b.clos(), g, arg);
              ma.type = mb.type = ty->rhs();
              EqResult r = run(ma, mb);
              if (r.status == EqResult::Status::NotEqual) return false;
              if (r.status == EqResult::Status::Approximate) {
                approximate = true;
                approx_reason = r.detail;
              }
            }
          }
        }
        return true;
      }
    }
    return false;
  }

  bool rep_equal(const TypePtr& ty, const CoendRep& r1, const CoendRep& r2) {
    CoendRep c1 = gc_canonical(sig, r1);
    CoendRep c2 = gc_canonical(sig, r2);
    if (ty->is_ground()) return c1 == c2;
    // Function-valued payloads: the world, injection and store structure is
    // part of the representative; the closures compare extensionally.
    if (!(c1.store.world == c2.store.world) || !(c1.inj == c2.inj))
      return false;
    if (!(c1.store == c2.store)) return false;
    return value_equal(ty, c1.store.world, c1.payload, c2.payload);
  }

  EqResult run(const MonadComp& m1, const MonadComp& m2) {
    if (!(m1.base == m2.base)) throw LamrefError("equal_bounded: bases differ");
    if (!m1.type || !m2.type)
      throw LamrefError("equal_bounded: computations need their result types");
    if (!type_eq(m1.type, m2.type))
      throw LamrefError("equal_bounded: result types differ");
    EqResult out;
    // The base itself is always among the tested worlds, even when it is
    // larger than the bound or has gaps in its support.
    std::vector<World> worlds = enumerate_worlds(sig, world_bound);
    if (std::find(worlds.begin(), worlds.end(), m1.base) == worlds.end())
      worlds.push_back(m1.base);
    for (const auto& w2 : worlds) {
      for (const auto& h : enumerate_injections(m1.base, w2)) {
        for (const auto& s : enumerate_stores(sig, w2)) {
          CoendRep r1 = m1.component(h, s);
          CoendRep r2 = m2.component(h, s);
          if (!rep_equal(m1.type, r1, r2)) {
            out.status = EqResult::Status::NotEqual;
            out.witness_h = h;
            out.witness_store = s;
            out.detail = "components differ at " + print_injection(h) +
                         " with a store over " + print_world(w2);
            return out;
          }
        }
      }
    }
    if (approximate) {
      out.status = EqResult::Status::Approximate;
      out.detail = approx_reason;
    }
    return out;
  }
};

}  // namespace

EqResult equal_bounded(const Signature& sig, const MonadComp& m1,
                       const MonadComp& m2, int world_bound, int value_bound) {
  Cmp cmp{sig, world_bound, value_bound, "", false};
  return cmp.run(m1, m2);
}

}  // namespace lamref
